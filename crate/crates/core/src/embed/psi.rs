use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::Matrix;
use crate::average::{average, AverageEstimate, Caps, EstimateMode, Plan};
use crate::error::{domain, Error, Result};
use crate::exec::Executor;
use crate::math::sqrt;
use crate::orlicz::{Exponents, WeightVector};
use crate::perm::{product_size, ProductCursor};

/// Regenerates entries of the embedding from permutation and sign indices.
///
/// Row `(π, σ, η, ε, δ)` has entry `x_{π(i)} y_{σ(j)} z_{η(j)} ε_i δ_j` in
/// column `(i, j)`, with `x_i = (n/i)^{1/r}` and `z_j = (n/j)^{1/p}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiEvaluator {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl PsiEvaluator {
    pub fn new(e: &Exponents, y: &WeightVector) -> Self {
        let n = y.len();
        PsiEvaluator {
            x: WeightVector::generated(n, e.r()).into_inner(),
            y: y.as_slice().to_vec(),
            z: WeightVector::generated(n, e.p()).into_inner(),
        }
    }

    pub fn with_weights(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() || y.len() != z.len() {
            return Err(domain!("x, y, z must be nonempty and of equal length"));
        }
        Ok(PsiEvaluator { x, y, z })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// `w_ij = a_ij x_{π(i)} y_{σ(j)} z_{η(j)}`; `perms` is `π, σ, η` flattened.
    fn fill(&self, a: &Matrix, perms: &[usize], w: &mut [f64]) {
        let n = self.n();
        let (pi, rest) = perms.split_at(n);
        let (sigma, eta) = rest.split_at(n);
        for i in 0..n {
            let xi = self.x[pi[i]];
            for j in 0..n {
                w[i * n + j] = a.get(i, j) * xi * self.y[sigma[j]] * self.z[eta[j]];
            }
        }
    }
}

/// `Ave_{ε,δ} |Σ_ij w_ij ε_i δ_j|` over all sign sequences.
///
/// Flipping every `ε` (or every `δ`) leaves the modulus unchanged, so the
/// first sign of each sequence is pinned to `+1` and the remaining
/// `2^{2n−2}` patterns are visited in Gray-code order.
fn sign_average(w: &[f64], n: usize, u: &mut [f64]) -> f64 {
    let half = 1usize << (n - 1);
    let mut delta = vec![1.0f64; n];
    for i in 0..n {
        u[i] = w[i * n..(i + 1) * n].iter().sum();
    }
    let mut total = 0.0;
    for kd in 0..half {
        if kd > 0 {
            let j = 1 + kd.trailing_zeros() as usize;
            for i in 0..n {
                u[i] -= 2.0 * delta[j] * w[i * n + j];
            }
            delta[j] = -delta[j];
        }
        let mut s: f64 = u[..n].iter().sum();
        let mut eps_flipped = 0usize;
        total += s.abs();
        for ke in 1..half {
            let i = 1 + ke.trailing_zeros() as usize;
            let bit = 1usize << i;
            let sign = if eps_flipped & bit == 0 { 1.0 } else { -1.0 };
            s -= 2.0 * sign * u[i];
            eps_flipped ^= bit;
            total += s.abs();
        }
    }
    total / (half * half) as f64
}

/// `Ave_{ε,δ} |Σ w_ij ε_i δ_j| / (Σ w_ij²)^{1/2}` for an `n × n` array `w`.
pub fn khintchine_ratio(w: &Matrix) -> f64 {
    let n = w.n();
    let l2 = sqrt(w.as_slice().iter().map(|v| v * v).sum());
    if l2 == 0.0 {
        return 1.0;
    }
    let mut u = vec![0.0; n];
    sign_average(w.as_slice(), n, &mut u) / l2
}

/// `‖Ψ_n(a)‖_{L_1}`: the average of `|⟨row, a⟩|` over all rows.
///
/// Exact enumeration visits every `(π, σ, η)`. Otherwise the permutations are
/// sampled and the signs still enumerated exactly, and the estimate is tagged
/// [`EstimateMode::Hybrid`].
pub fn l1_image_norm<E: Executor + ?Sized>(
    exec: &E,
    psi: &PsiEvaluator,
    a: &Matrix,
    plan: &Plan,
) -> Result<AverageEstimate> {
    let n = psi.n();
    if a.n() != n {
        return Err(domain!("matrix is {0}×{0}, embedding has n = {1}", a.n(), n));
    }
    let mut est = average(exec, n, 3, plan.caps.l1_exact, plan, |perms, buf| {
        buf.resize(n * n + n, 0.0);
        let (w, u) = buf.split_at_mut(n * n);
        psi.fill(a, perms, w);
        sign_average(w, n, u)
    })?;
    if est.mode == EstimateMode::MonteCarlo {
        est.mode = EstimateMode::Hybrid;
    }
    Ok(est)
}

/// The embedding written out row by row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingMatrix {
    n: usize,
    rows: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `(n!)³ 4ⁿ`.
    pub fn row_count(&self) -> usize {
        self.rows
    }

    /// `n²`; column `(i, j)` has index `i n + j`.
    pub fn col_count(&self) -> usize {
        self.n * self.n
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let c = self.col_count();
        &self.data[k * c..(k + 1) * c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.col_count())
    }

    /// Average of `|⟨row, a⟩|` over the materialised rows.
    pub fn l1_norm(&self, a: &Matrix) -> Result<f64> {
        if a.n() != self.n {
            return Err(domain!("matrix is {0}×{0}, embedding has n = {1}", a.n(), self.n));
        }
        let total: f64 = self
            .rows()
            .map(|row| row.iter().zip(a.as_slice()).map(|(r, v)| r * v).sum::<f64>().abs())
            .sum();
        Ok(total / self.rows as f64)
    }
}

/// Materialises every row in lexicographic `(π, σ, η, ε, δ)` order, with `+1`
/// ordered before `−1` in each sign.
pub fn build_psi(psi: &PsiEvaluator, caps: &Caps) -> Result<EmbeddingMatrix> {
    let n = psi.n();
    if n > caps.psi {
        return Err(Error::Resource(alloc::format!(
            "materialising the embedding needs n ≤ {}, got n = {n}",
            caps.psi
        )));
    }
    let perms = product_size(n, 3).ok_or_else(|| Error::Resource("(n!)³ overflows".into()))? as usize;
    let signs = 1usize << n;
    let rows = perms * signs * signs;
    let cols = n * n;
    let mut data = Vec::with_capacity(rows * cols);
    let ones = Matrix::from_fn(n, |_, _| 1.0);
    let mut base = vec![0.0; cols];
    let mut cursor = ProductCursor::at(n, 3, 0);
    let sign = |bits: usize, i: usize| if bits >> (n - 1 - i) & 1 == 0 { 1.0 } else { -1.0 };
    for k in 0..perms {
        psi.fill(&ones, cursor.current(), &mut base);
        for eps in 0..signs {
            for delta in 0..signs {
                for i in 0..n {
                    for j in 0..n {
                        data.push(base[i * n + j] * sign(eps, i) * sign(delta, j));
                    }
                }
            }
        }
        if k + 1 < perms {
            cursor.advance();
        }
    }
    Ok(EmbeddingMatrix { n, rows, data })
}
