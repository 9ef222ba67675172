//! Permutations in lexicographic order, and cursors over products of
//! symmetric groups.

use alloc::vec::Vec;

/// `n!`, or `None` on `u64` overflow.
pub fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// Writes the permutation of lexicographic rank `index` into `out`.
pub fn unrank(mut index: u64, out: &mut [usize]) {
    let n = out.len();
    let mut pool: Vec<usize> = (0..n).collect();
    for (k, slot) in out.iter_mut().enumerate() {
        let f = factorial(n - 1 - k).unwrap_or(u64::MAX);
        let d = (index / f) as usize;
        index %= f;
        *slot = pool.remove(d);
    }
}

/// Lexicographic rank of a permutation of `0..n`.
pub fn rank(perm: &[usize]) -> u64 {
    let n = perm.len();
    let mut r = 0u64;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&v| v < perm[i]).count() as u64;
        r += smaller * factorial(n - 1 - i).unwrap_or(0);
    }
    r
}

/// Advances to the lexicographic successor; on the last permutation, resets
/// to the identity order and returns `false`.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `(n!)^k`, or `None` on overflow.
pub fn product_size(n: usize, k: usize) -> Option<u64> {
    let f = factorial(n)?;
    (0..k).try_fold(1u64, |acc, _| acc.checked_mul(f))
}

/// Walks `S_n^k` in lexicographic order of `(π_1, …, π_k)`, the last factor
/// varying fastest. The current tuple is stored flat: `π_c(i)` sits at
/// `c * n + i`.
#[derive(Debug, Clone)]
pub struct ProductCursor {
    n: usize,
    flat: Vec<usize>,
}

impl ProductCursor {
    /// Positioned at the tuple of rank `index`.
    pub fn at(n: usize, k: usize, index: u64) -> Self {
        let f = factorial(n).expect("n! fits in u64");
        let mut flat = alloc::vec![0; n * k];
        let mut rest = index;
        for c in (0..k).rev() {
            unrank(rest % f, &mut flat[c * n..(c + 1) * n]);
            rest /= f;
        }
        ProductCursor { n, flat }
    }

    pub fn current(&self) -> &[usize] {
        &self.flat
    }

    /// Moves to the next tuple; `false` after wrapping past the last one.
    pub fn advance(&mut self) -> bool {
        let n = self.n;
        let k = self.flat.len().checked_div(n).unwrap_or(0);
        for c in (0..k).rev() {
            if next_permutation(&mut self.flat[c * n..(c + 1) * n]) {
                return true;
            }
        }
        false
    }
}
