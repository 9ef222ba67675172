//! Decreasing rearrangements and the separable allocation problem
//! `max Σ a_i g(ℓ_i)` subject to `Σ ℓ_i = budget`, `0 ≤ ℓ_i ≤ cap`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::error::{domain, Result};

/// Values sorted nonincreasing together with their running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    values: Vec<f64>,
    prefix_sums: Vec<f64>,
}

impl Rearrangement {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let prefix_sums = values
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Rearrangement {
            values,
            prefix_sums,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `prefix_sums()[k] = Σ_{i ≤ k} values()[i]`.
    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix_sums
    }

    /// Sum of the `l` largest values (`0` for `l = 0`).
    pub fn top_sum(&self, l: usize) -> f64 {
        match l {
            0 => 0.0,
            l => self.prefix_sums[l - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Relative tolerance on gain concavity; gain tables built from prefix sums of
/// sorted data are concave only up to rounding.
const CONCAVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationProblem {
    weights: Vec<f64>,
    gain: Vec<f64>,
    budget: usize,
}

impl AllocationProblem {
    /// `gain[k]` is the gain of `k` units in one slot, so the per-slot cap is
    /// `gain.len() - 1`.
    pub fn new(weights: Vec<f64>, gain: Vec<f64>, budget: usize) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(domain!("allocation weights must be finite and ≥ 0, found {w}"));
        }
        if gain.first() != Some(&0.0) {
            return Err(domain!("gain table must start with gain(0) = 0"));
        }
        let marginals: Vec<f64> = gain.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(k) = marginals.iter().position(|d| !(*d >= 0.0)) {
            return Err(domain!("gain decreases between {k} and {}", k + 1));
        }
        if let Some(k) = marginals
            .windows(2)
            .position(|d| d[1] > d[0] + CONCAVE_TOL * d[0].abs().max(d[1].abs()))
        {
            return Err(domain!("gain is not concave at {}", k + 1));
        }
        let cap = gain.len() - 1;
        if budget > weights.len() * cap {
            return Err(domain!(
                "budget {budget} infeasible for {} slots of capacity {cap}",
                weights.len()
            ));
        }
        Ok(AllocationProblem {
            weights,
            gain,
            budget,
        })
    }

    pub fn cap(&self) -> usize {
        self.gain.len() - 1
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gain(&self) -> &[f64] {
        &self.gain
    }

    /// `Σ a_i · gain(ℓ_i)`.
    pub fn objective(&self, counts: &[usize]) -> f64 {
        self.weights
            .iter()
            .zip(counts)
            .map(|(a, &l)| a * self.gain[l])
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub counts: Vec<usize>,
}

#[derive(PartialEq)]
struct Marginal(f64, Reverse<usize>);

impl Eq for Marginal {}

impl PartialOrd for Marginal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Marginal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Hands out the budget one unit at a time to the slot with the largest
/// weighted marginal gain; ties go to the lowest slot index. Optimal because
/// every slot's marginal gains are nonincreasing.
pub fn allocate_greedy(prob: &AllocationProblem) -> (Allocation, f64) {
    let cap = prob.cap();
    let mut counts = vec![0usize; prob.weights.len()];
    let marginal = |i: usize, l: usize| prob.weights[i] * (prob.gain[l + 1] - prob.gain[l]);
    let mut heap: BinaryHeap<Marginal> = (0..counts.len())
        .filter(|_| cap > 0)
        .map(|i| Marginal(marginal(i, 0), Reverse(i)))
        .collect();
    for _ in 0..prob.budget {
        let Marginal(_, Reverse(i)) = heap.pop().expect("budget feasibility checked");
        counts[i] += 1;
        if counts[i] < cap {
            heap.push(Marginal(marginal(i, counts[i]), Reverse(i)));
        }
    }
    let objective = prob.objective(&counts);
    (Allocation { counts }, objective)
}

/// Tries every feasible allocation. Exponential; for cross-checking small
/// instances. Among optimal allocations the lexicographically largest wins.
pub fn allocate_exhaustive(prob: &AllocationProblem) -> (Allocation, f64) {
    fn go(prob: &AllocationProblem, counts: &mut Vec<usize>, left: usize, best: &mut (Vec<usize>, f64)) {
        let i = counts.len();
        let slots = prob.weights.len();
        if i == slots {
            if left == 0 {
                let v = prob.objective(counts);
                if v > best.1 {
                    *best = (counts.clone(), v);
                }
            }
            return;
        }
        let rest = (slots - i - 1) * prob.cap();
        for k in (0..=prob.cap().min(left)).rev() {
            if left - k > rest {
                break;
            }
            counts.push(k);
            go(prob, counts, left - k, best);
            counts.pop();
        }
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    go(prob, &mut Vec::new(), prob.budget, &mut best);
    (Allocation { counts: best.0 }, best.1)
}
