use alloc::vec::Vec;

use serde::Serialize;

use super::{l1_image_norm, matrix_norm, Matrix, MatrixSpaceNorm, PsiEvaluator};
use crate::average::{EstimateMode, Plan};
use crate::construct::construct_lr_orlicz;
use crate::error::{domain, Result};
use crate::exec::Executor;
use crate::math::{p_norm, powf, root, sqrt};
use crate::orlicz::{Exponents, OrliczFunction, WeightVector, YoungFunction};
use crate::rng::{derive_seed, stream, RngExt};

pub const DISTORTION_LABEL: &str = "empirical distortion over sampled directions";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionSample {
    pub index: usize,
    pub matrix_norm: f64,
    pub l1_norm: f64,
    pub ratio: f64,
}

/// Spread of `‖Ψ_n a‖_{L_1} / ‖a‖` over random Gaussian directions `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub label: &'static str,
    pub n: usize,
    pub sample_count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`.
    pub distortion: f64,
    pub seed: u64,
    pub l1_mode: EstimateMode,
    /// `(5√2)^{-1} n^{1/p − 1/r}`, for context only.
    pub lower_bound: f64,
    #[serde(skip)]
    pub samples: Vec<DistortionSample>,
}

/// Draws `samples` Gaussian matrices and hands them to [`distortion_on`].
pub fn measure_distortion<E: Executor + ?Sized>(
    exec: &E,
    e: &Exponents,
    y: &WeightVector,
    samples: usize,
    seed: u64,
    plan: &Plan,
) -> Result<DistortionReport> {
    if samples < 100 {
        return Err(domain!("distortion needs at least 100 samples, got {samples}"));
    }
    let n = y.len();
    let matrix_seed = derive_seed(seed, 0);
    let matrices: Vec<Matrix> = (0..samples)
        .map(|index| {
            let mut rng = stream(matrix_seed, index as u64);
            Matrix::from_fn(n, |_, _| rng.normal())
        })
        .collect();
    distortion_on(exec, e, y, &matrices, seed, plan)
}

/// Normalises each matrix to unit `‖(‖(a_ij)_i‖_r)_j‖_{M_y}` and records its
/// L1 image norm. `M_y` is the function prescribed from `y` with exponent `p`.
pub fn distortion_on<E: Executor + ?Sized>(
    exec: &E,
    e: &Exponents,
    y: &WeightVector,
    matrices: &[Matrix],
    seed: u64,
    plan: &Plan,
) -> Result<DistortionReport> {
    if matrices.is_empty() {
        return Err(domain!("no matrices to measure"));
    }
    let n = y.len();
    let my = construct_lr_orlicz(y, e.p())?.function;
    let norm = MatrixSpaceNorm::new(my, e.r(), n)?;
    let psi = PsiEvaluator::new(e, y);
    let mut out = Vec::with_capacity(matrices.len());
    let mut l1_mode = EstimateMode::Exact;
    for (index, raw) in matrices.iter().enumerate() {
        let scale = matrix_norm(raw, &norm)?;
        if !(scale > 0.0) {
            return Err(domain!("matrix {index} is zero"));
        }
        let a = raw.scaled(1.0 / scale);
        let mn = matrix_norm(&a, &norm)?;
        let est = l1_image_norm(exec, &psi, &a, &plan.with_seed(derive_seed(seed, 1 + index as u64)))?;
        l1_mode = est.mode;
        out.push(DistortionSample {
            index,
            matrix_norm: mn,
            l1_norm: est.value,
            ratio: est.value / mn,
        });
    }
    let (min_ratio, max_ratio) = out
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)));
    Ok(DistortionReport {
        label: DISTORTION_LABEL,
        n,
        sample_count: out.len(),
        min_ratio,
        max_ratio,
        distortion: max_ratio / min_ratio,
        seed,
        l1_mode,
        lower_bound: lower_bound_report(n, e.p(), e.r())?,
        samples: out,
    })
}

/// `(5√2)^{-1} n^{1/p − 1/r}`.
pub fn lower_bound_report(n: usize, p: f64, r: f64) -> Result<f64> {
    if !(1.0 <= p && p <= r && r <= 2.0) {
        return Err(domain!("need 1 ≤ p ≤ r ≤ 2, got p = {p}, r = {r}"));
    }
    Ok(powf(n as f64, 1.0 / p - 1.0 / r) / (5.0 * sqrt(2.0)))
}

/// Prefix and tail sums of `1/M^{-1}(i/n)` against their bounds, per `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummationBounds {
    pub n: usize,
    /// `(1/n) Σ_{i ≤ ℓ} 1/M^{-1}(i/n)` divided by `(ℓ/n) / M^{-1}(ℓ/n)`.
    pub prefix_ratios: Vec<f64>,
    /// `(ℓ/n)^{1/p*} ((1/n) Σ_{i > ℓ} M^{-1}(i/n)^{-p})^{1/p}` divided by `M^{*-1}(ℓ/n)`.
    pub tail_ratios: Vec<f64>,
    pub prefix_constant: f64,
    pub tail_constant: f64,
}

pub fn summation_bounds(m: &OrliczFunction, p: f64, n: usize) -> Result<SummationBounds> {
    if n == 0 || !(p > 1.0) {
        return Err(domain!("need n ≥ 1 and p > 1"));
    }
    let nf = n as f64;
    let dual = m.conjugate();
    let inv: Vec<f64> = (1..=n).map(|i| m.inverse_saturating(i as f64 / nf)).collect();
    if inv[0] <= 0.0 {
        return Err(domain!("M^{{-1}}(1/n) must be positive"));
    }
    let recip: Vec<f64> = inv.iter().map(|v| 1.0 / v).collect();
    let mut prefix = 0.0;
    let mut prefix_ratios = Vec::with_capacity(n);
    let mut tail_ratios = Vec::with_capacity(n);
    for l in 1..=n {
        let frac = l as f64 / nf;
        prefix += recip[l - 1];
        prefix_ratios.push((prefix / nf) / (frac * recip[l - 1]));
        let tail = p_norm(recip[l..].iter().copied(), p) / root(nf, p);
        tail_ratios.push(powf(frac, 1.0 - 1.0 / p) * tail / dual.inverse_saturating(frac));
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max);
    Ok(SummationBounds {
        n,
        prefix_constant: max(&prefix_ratios),
        tail_constant: max(&tail_ratios),
        prefix_ratios,
        tail_ratios,
    })
}
