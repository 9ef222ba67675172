//! Orlicz functions built from weight vectors: the max-over-compositions norm
//! `‖·‖_y`, functions prescribed through their conjugate inverse on a grid,
//! the `ℓ_r`- and `ℓ_p`-generating constructions, and the weight vector `y`
//! read off an Orlicz function `M`.

use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::math::{p_norm, powf, root};
use crate::orlicz::{
    c_const, check_regularity, Direction, Exponents, OrliczFunction, PiecewiseAffine,
    RegularityReport, Tail, WeightVector, YoungFunction,
};
use crate::rearrange::{allocate_greedy, AllocationProblem, Rearrangement};

/// `‖x‖_y = max_{Σ k_i = m} Σ_i (Σ_{j ≤ k_i} y_j) |x_i|`.
pub fn norm_y(x: &[f64], y: &WeightVector, m: usize) -> Result<f64> {
    if y.len() != m {
        return Err(domain!("y has length {} but m = {m}", y.len()));
    }
    if m < x.len() {
        return Err(domain!("need n ≤ m, got n = {} > m = {m}", x.len()));
    }
    let mut gain = Vec::with_capacity(m + 1);
    gain.push(0.0);
    let mut acc = 0.0;
    for &w in y.iter() {
        acc += w;
        gain.push(acc);
    }
    let weights = x.iter().map(|v| v.abs()).collect();
    let prob = AllocationProblem::new(weights, gain, m)?;
    Ok(allocate_greedy(&prob).1)
}

/// The conjugate `N*` of the function whose conjugate inverse takes the values
/// `grid[ℓ]` at `ℓ / total` (`total = grid.len() - 1`) and is affine in
/// between.
///
/// `grid` must start at zero and be concave and nondecreasing. Past the last
/// grid point `N*` continues with its last slope; a flat stretch in the grid
/// makes `N*` bounded.
pub fn dual_from_grid(grid: &[f64]) -> Result<PiecewiseAffine> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(domain!("conjugate-inverse grid must start at 0 and have ≥ 2 points"));
    }
    if grid[1] <= 0.0 {
        return Err(domain!("conjugate-inverse grid must increase at the origin"));
    }
    let total = (grid.len() - 1) as f64;
    let incs: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(k) = incs.iter().position(|d| *d < -1e-12 * grid[grid.len() - 1]) {
        return Err(Error::Invariant(alloc::format!(
            "conjugate-inverse grid decreases after index {k}"
        )));
    }
    if let Some(k) = incs
        .windows(2)
        .position(|d| d[1] > d[0] + 1e-9 * d[0].abs().max(d[1].abs()))
    {
        return Err(Error::Invariant(alloc::format!(
            "conjugate-inverse grid is not concave at index {}",
            k + 1
        )));
    }
    let mut bp = vec![(0.0, 0.0)];
    let mut tail = None;
    for (l, d) in incs.iter().enumerate() {
        if *d <= 0.0 {
            tail = Some(Tail::Bounded);
            break;
        }
        bp.push((grid[l + 1], (l + 1) as f64 / total));
    }
    let tail = tail.unwrap_or_else(|| {
        let d = incs[incs.len() - 1];
        Tail::Slope(1.0 / (total * d))
    });
    PiecewiseAffine::new(bp, tail)
}

/// The Orlicz function `N` with `N^{*-1}(ℓ/total) = grid[ℓ]`, see
/// [`dual_from_grid`].
pub fn orlicz_from_dual_grid(grid: &[f64]) -> Result<OrliczFunction> {
    Ok(OrliczFunction::PiecewiseAffine(dual_from_grid(grid)?.conjugate()))
}

/// `N` with `N^{*-1}(ℓ/total) = (1/total) Σ_{k ≤ ℓ} s(k)`.
pub fn orlicz_from_prefix(values: &Rearrangement, total: usize) -> Result<OrliczFunction> {
    if values.len() != total {
        return Err(domain!("{} values for a grid of {total}", values.len()));
    }
    let t = total as f64;
    let grid: Vec<f64> = core::iter::once(0.0)
        .chain(values.prefix_sums().iter().map(|s| s / t))
        .collect();
    orlicz_from_dual_grid(&grid)
}

/// The function `M` with `M*(Σ_{i ≤ k} y_i) = k/m` used alongside `‖·‖_y`.
pub fn orlicz_for_norm_y(y: &WeightVector) -> Result<OrliczFunction> {
    let grid: Vec<f64> = core::iter::once(0.0)
        .chain(y.iter().scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        }))
        .collect();
    orlicz_from_dual_grid(&grid)
}

/// `n · (M^{*-1}(j/n) − M^{*-1}((j−1)/n))`, `j = 1..=n`.
pub fn dual_increments(m: &OrliczFunction, n: usize) -> Vec<f64> {
    let dual = m.conjugate();
    let nf = n as f64;
    let mut prev = 0.0;
    (1..=n)
        .map(|j| {
            let cur = dual.inverse_saturating(j as f64 / nf);
            let d = nf * (cur - prev);
            prev = cur;
            d
        })
        .collect()
}

/// The `n²` numbers `a_i · n · (M^{*-1}(j/n) − M^{*-1}((j−1)/n))`, sorted.
pub fn product_increments(a: &WeightVector, m: &OrliczFunction) -> Rearrangement {
    let w = dual_increments(m, a.len());
    Rearrangement::new(a.iter().flat_map(|ai| w.iter().map(move |wj| ai * wj)).collect())
}

/// `N` with `N^{*-1}(ℓ/n²) = (1/n²) Σ_{k ≤ ℓ} s(k)` for the numbers of
/// [`product_increments`]; its norm is equivalent to the permutation average
/// `Ave_π ‖(x_i a_{π(i)})‖_M`.
pub fn orlicz_for_average(a: &WeightVector, m: &OrliczFunction) -> Result<OrliczFunction> {
    let n = a.len();
    orlicz_from_prefix(&product_increments(a, m), n * n)
}

/// `C_r [ (1/n) Σ_{i ≤ ℓ} a_i + (ℓ/n)^{1/r*} ((1/n) Σ_{i > ℓ} a_i^r)^{1/r} ]`
/// for `ℓ = 0..=n`.
pub fn lr_grid(a: &[f64], r: f64) -> Vec<f64> {
    split_grid(a, 1.0, r)
}

/// `C_r [ (ℓ/n)^{1/p*} ((1/n) Σ_{i ≤ ℓ} a_i^p)^{1/p} + (ℓ/n)^{1/r*} ((1/n) Σ_{i > ℓ} a_i^r)^{1/r} ]`
/// for `ℓ = 0..=n`; reduces to [`lr_grid`] at `p = 1`.
pub fn split_grid(a: &[f64], p: f64, r: f64) -> Vec<f64> {
    let n = a.len();
    let nf = n as f64;
    let cr = c_const(r);
    let head: Vec<f64> = a
        .iter()
        .scan(0.0, |acc, v| {
            *acc += powf(v.abs(), p);
            Some(*acc)
        })
        .collect();
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + powf(a[i].abs(), r);
    }
    (0..=n)
        .map(|l| {
            if l == 0 {
                return 0.0;
            }
            let frac = l as f64 / nf;
            let h = powf(frac, 1.0 - 1.0 / p) * root(head[l - 1] / nf, p);
            let t = powf(frac, 1.0 - 1.0 / r) * root(tail[l] / nf, r);
            cr * (h + t)
        })
        .collect()
}

/// Least concave nondecreasing majorant on the integer grid `0..values.len()`.
pub fn concave_majorant(values: &[f64]) -> Vec<f64> {
    let mut running = Vec::with_capacity(values.len());
    let mut best = f64::NEG_INFINITY;
    for &v in values {
        best = best.max(v);
        running.push(best);
    }
    let mut hull: Vec<usize> = Vec::new();
    for (k, &v) in running.iter().enumerate() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let (ya, yb) = (running[a], running[b]);
            // drop b when it lies on or below the chord from a to k
            if (yb - ya) * (k - a) as f64 <= (v - ya) * (b - a) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut out = vec![0.0; values.len()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        for (k, slot) in out.iter_mut().enumerate().take(b + 1).skip(a) {
            let s = (k - a) as f64 / (b - a) as f64;
            *slot = running[a] + s * (running[b] - running[a]);
        }
    }
    if hull.len() == 1 {
        out[hull[0]] = running[hull[0]];
    }
    out
}

/// An Orlicz function prescribed by a target `E(ℓ)` for its conjugate inverse
/// on the grid `ℓ/n`, together with how closely it meets the target.
#[derive(Debug, Clone, Serialize)]
pub struct GridConstruction {
    pub function: OrliczFunction,
    /// The target `E(ℓ)`, `ℓ = 0..=n`.
    pub target: Vec<f64>,
    /// The realised `N^{*-1}(ℓ/n)`, `ℓ = 0..=n`.
    pub grid: Vec<f64>,
    /// `min_ℓ E(ℓ) / N^{*-1}(ℓ/n)`.
    pub lower: f64,
    /// `max_ℓ E(ℓ) / N^{*-1}(ℓ/n)`.
    pub upper: f64,
}

impl GridConstruction {
    /// `N^{*-1} ≤ E ≤ bound · N^{*-1}` on the grid, with rounding slack.
    pub fn within(&self, bound: f64) -> bool {
        self.lower >= 1.0 - 1e-12 && self.upper <= bound * (1.0 + 1e-12)
    }

    /// Builds the function from an arbitrary positive target. A target that is
    /// already concave and nondecreasing is used verbatim (constants 1 and 1);
    /// otherwise its least concave nondecreasing majorant is scaled down until
    /// it no longer exceeds the target.
    pub fn from_target(target: Vec<f64>) -> Result<Self> {
        if target.len() < 2 || target[0] != 0.0 || target[1..].iter().any(|v| !(*v > 0.0)) {
            return Err(domain!("target must be 0 at the origin and positive elsewhere"));
        }
        let hull = concave_majorant(&target);
        let kappa = hull[1..]
            .iter()
            .zip(&target[1..])
            .map(|(h, e)| h / e)
            .fold(1.0, f64::max);
        let grid: Vec<f64> = if kappa == 1.0 {
            target.clone()
        } else {
            hull.iter().map(|h| h / kappa).collect()
        };
        let function = orlicz_from_dual_grid(&grid)?;
        let (lower, upper) = ratio_bounds(&target[1..], &grid[1..]);
        Ok(GridConstruction {
            function,
            target,
            grid,
            lower,
            upper,
        })
    }
}

fn ratio_bounds(num: &[f64], den: &[f64]) -> (f64, f64) {
    num.iter()
        .zip(den)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), q| (lo.min(q), hi.max(q)))
}

/// The Orlicz function `N̄` whose conjugate inverse is affine on each
/// `[ℓ/n, (ℓ+1)/n]` and tracks [`lr_grid`]`(a, r)`; its norm is equivalent
/// to `Ave_π ‖(x_i a_{π(i)})‖_r`.
pub fn construct_lr_orlicz(a: &WeightVector, r: f64) -> Result<GridConstruction> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(domain!("need 1 < r < ∞, got {r}"));
    }
    GridConstruction::from_target(lr_grid(a, r))
}

/// `N(t) = M(t^p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposedOrlicz {
    pub outer: OrliczFunction,
    pub power: f64,
}

impl ComposedOrlicz {
    pub fn new(outer: OrliczFunction, power: f64) -> Result<Self> {
        if !(power >= 1.0 && power.is_finite()) {
            return Err(domain!("inner power must be ≥ 1, got {power}"));
        }
        Ok(ComposedOrlicz { outer, power })
    }

    /// `‖x‖_{M∘t^p} = ‖(|x_i|^p)‖_M^{1/p}`.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        let xp: Vec<f64> = x.iter().map(|v| powf(v.abs(), self.power)).collect();
        Ok(root(crate::orlicz::luxemburg_norm(&self.outer, &xp)?, self.power))
    }

    /// `N*(x) = sup_t (xt − M(t^p))`, maximised piece by piece.
    pub fn conjugate_value(&self, x: f64) -> f64 {
        let p = self.power;
        if p == 1.0 {
            return self.outer.conjugate().value(x);
        }
        let pw = match &self.outer {
            OrliczFunction::Power { p: q, scale } => {
                return OrliczFunction::Power { p: q * p, scale: *scale }
                    .conjugate()
                    .value(x);
            }
            OrliczFunction::PiecewiseAffine(pw) => pw,
        };
        // on a piece M(u) = v_a + β(u − u_a), maximise xt − v_a − β(t^p − u_a)
        let piece = |lo: f64, hi: f64, ua: f64, va: f64, beta: f64| -> f64 {
            let t = if beta == 0.0 {
                hi
            } else {
                powf(x / (beta * p), 1.0 / (p - 1.0)).clamp(lo, hi)
            };
            if t.is_infinite() {
                return f64::INFINITY;
            }
            x * t - va - beta * (powf(t, p) - ua)
        };
        let bp = pw.breakpoints();
        let mut best: f64 = 0.0;
        for w in bp.windows(2) {
            let ((ua, va), (ub, vb)) = (w[0], w[1]);
            let beta = (vb - va) / (ub - ua);
            best = best.max(piece(root(ua, p), root(ub, p), ua, va, beta));
        }
        if let Tail::Slope(s) = pw.tail() {
            let (uk, vk) = bp[bp.len() - 1];
            best = best.max(piece(root(uk, p), f64::INFINITY, uk, vk, s));
        }
        best
    }

    /// `N^{*-1}(v)` by bisection on the convex conjugate.
    pub fn dual_inverse(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while self.conjugate_value(hi) < v {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.conjugate_value(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl YoungFunction for ComposedOrlicz {
    fn value(&self, t: f64) -> f64 {
        self.outer.value(powf(t, self.power))
    }

    fn inverse_saturating(&self, v: f64) -> f64 {
        root(self.outer.inverse_saturating(v), self.power)
    }
}

/// The Orlicz function whose norm is equivalent to
/// `(Ave_π ‖(x_i a_{π(i)})‖_r^p)^{1/p}`: `N = M ∘ t^p` where `M` is
/// [`construct_lr_orlicz`] applied to `(a_i^p)` with exponent `r/p`.
#[derive(Debug, Clone, Serialize)]
pub struct SplitConstruction {
    pub outer: GridConstruction,
    pub function: ComposedOrlicz,
}

pub fn construct_split_orlicz(a: &WeightVector, e: &Exponents) -> Result<SplitConstruction> {
    let (p, r) = (e.p(), e.r());
    if p >= r {
        return Err(domain!("need p < r, got p = {p}, r = {r}"));
    }
    let ap = WeightVector::new_nonneg(a.iter().map(|v| powf(*v, p)).collect())?;
    let outer = construct_lr_orlicz(&ap, r / p)?;
    let function = ComposedOrlicz::new(outer.function.clone(), p)?;
    Ok(SplitConstruction { outer, function })
}

/// `y_ℓ = n (M^{*-1}(ℓ/n) − M^{*-1}((ℓ−1)/n))`, so that
/// `M^{*-1}(ℓ/n) = (1/n) Σ_{i ≤ ℓ} y_i`.
pub fn y_from_m(m: &OrliczFunction, n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(domain!("n must be ≥ 1"));
    }
    let mut y = dual_increments(m, n);
    // equal increments of an affine piece can come out a rounding error apart
    for i in 1..n {
        if y[i] > y[i - 1] {
            if y[i] - y[i - 1] > 1e-9 * y[i - 1].max(1e-300) {
                return Err(Error::Invariant(alloc::format!(
                    "conjugate inverse of M is not concave near {i}/{n}"
                )));
            }
            y[i] = y[i - 1];
        }
    }
    WeightVector::new_nonneg(y)
}

/// Which exponent carries the regularity hypothesis on `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentOrdering {
    /// `M(t)/t^p` decreasing with `p < r`.
    SmallerRegular,
    /// `M(t)/t^r` decreasing with `r < p`.
    LargerRegular,
}

impl ExponentOrdering {
    pub const ALL: [ExponentOrdering; 2] = [Self::SmallerRegular, Self::LargerRegular];
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub ordering: ExponentOrdering,
    pub n: usize,
    pub regularity_exponent: f64,
    pub tail_exponent: f64,
    pub regularity: RegularityReport,
    /// `middle / M^{*-1}(ℓ/n)` for `ℓ = 1..=n`.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `M^{*-1} ≤ middle ≤ 3 M^{*-1}` at every `ℓ`.
    pub holds: bool,
}

/// Upper constant in the chain comparing `M*` with the conjugate of `M_y`.
pub const CHAIN_BOUND: f64 = 3.0;

/// `middle / M^{*-1}(ℓ/n)`, `ℓ = 1..=n`, for the chain of
/// [`verify_my_equiv_m`] with tail exponent `p`, without checking any
/// hypothesis on `M`.
pub fn chain_ratios(m: &OrliczFunction, p: f64, n: usize) -> Result<Vec<f64>> {
    if !(p > 1.0) {
        return Err(domain!("tail exponent must exceed 1, got {p}"));
    }
    let y = y_from_m(m, n)?;
    let dual = m.conjugate();
    let nf = n as f64;
    let mut head = 0.0;
    Ok((1..=n)
        .map(|l| {
            head += y[l - 1];
            let lhs = dual.inverse_saturating(l as f64 / nf);
            let tail = p_norm(y[l..].iter().copied(), p) / root(nf, p);
            let mid = head / nf + powf(l as f64 / nf, 1.0 - 1.0 / p) * tail;
            mid / lhs
        })
        .collect())
}

/// Evaluates `M^{*-1}(ℓ/n) ≤ (1/n) Σ_{i ≤ ℓ} y_i + (ℓ/n)^{1/p*} ((1/n) Σ_{i > ℓ} y_i^p)^{1/p}
/// ≤ 3 M^{*-1}(ℓ/n)` for `y` from [`y_from_m`].
pub fn verify_my_equiv_m(
    m: &OrliczFunction,
    e: &Exponents,
    n: usize,
    ordering: ExponentOrdering,
) -> Result<ChainReport> {
    let (p, r) = (e.p(), e.r());
    let reg_exp = match ordering {
        ExponentOrdering::SmallerRegular if p < r => p,
        ExponentOrdering::LargerRegular if r < p => r,
        _ => return Err(domain!("exponents p = {p}, r = {r} do not fit ordering {ordering:?}")),
    };
    let regularity = check_regularity(m, reg_exp, Direction::Decreasing);
    if let Some((s, t)) = regularity.violation {
        return Err(Error::Precondition(alloc::format!(
            "M(t)/t^{reg_exp} is not decreasing between t = {s} and t = {t}"
        )));
    }
    let ratios = chain_ratios(m, p, n)?;
    let (min_ratio, max_ratio) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &q| (lo.min(q), hi.max(q)));
    Ok(ChainReport {
        ordering,
        n,
        regularity_exponent: reg_exp,
        tail_exponent: p,
        regularity,
        holds: min_ratio >= 1.0 - 1e-9 && max_ratio <= CHAIN_BOUND,
        ratios,
        min_ratio,
        max_ratio,
    })
}
