//! Averages over one or several independent uniform permutations, computed by
//! exhaustive enumeration or by Monte Carlo sampling.
//!
//! Both paths split the work into blocks of [`BLOCK`] evaluations. Each block
//! produces a [`Partial`] (count, mean, centred second moment) and the
//! partials are merged in block order, so the result does not depend on the
//! executor.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::construct::dual_increments;
use crate::embed::Matrix;
use crate::error::{domain, Error, Result};
use crate::exec::Executor;
use crate::math::{p_norm, powf, root, sqrt};
use crate::orlicz::{luxemburg_norm, OrliczFunction, WeightVector};
use crate::perm::{product_size, ProductCursor};
use crate::rearrange::Rearrangement;
use crate::rng::{stream, RngExt};

/// Evaluations per block.
pub const BLOCK: u64 = 2048;

/// Sample count used by [`Mode::Auto`] when it falls back to sampling.
pub const AUTO_MIN_SAMPLES: u64 = 100_000;

/// How an average is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    #[serde(rename = "mc")]
    MonteCarlo,
    /// Exact when within the caps, otherwise sampling with at least
    /// [`AUTO_MIN_SAMPLES`] samples.
    Auto,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::MonteCarlo),
            "auto" => Ok(Mode::Auto),
            _ => Err(domain!("unknown mode {s:?}; expected exact, mc or auto")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "mc",
            Mode::Auto => "auto",
        })
    }
}

/// How an estimate was actually obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
    /// Permutations sampled, signs enumerated exhaustively.
    Hybrid,
}

/// Largest `n` for which each exact enumeration is attempted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Averages over one permutation.
    pub single: usize,
    /// Averages over two independent permutations.
    pub double: usize,
    /// Averages over three independent permutations.
    pub triple: usize,
    /// Materialised rows of the L1 embedding.
    pub psi: usize,
    /// Exact L1 image norms (three permutations and all signs).
    pub l1_exact: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            single: 8,
            double: 6,
            triple: 5,
            psi: 3,
            l1_exact: 3,
        }
    }
}

impl Caps {
    /// The cap for an average over `factors` permutations.
    pub fn for_factors(&self, factors: usize) -> usize {
        match factors {
            0 | 1 => self.single,
            2 => self.double,
            _ => self.triple,
        }
    }

    /// Applies comma-separated `key=value` overrides, e.g. `single=9,triple=6`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| domain!("cap override {item:?} is not key=value"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| domain!("cap override {item:?} needs an integer"))?;
            let slot = match key.trim() {
                "single" => &mut self.single,
                "double" => &mut self.double,
                "triple" => &mut self.triple,
                "psi" => &mut self.psi,
                "l1" | "l1_exact" => &mut self.l1_exact,
                other => return Err(domain!("unknown cap {other:?}")),
            };
            *slot = value;
        }
        Ok(self)
    }
}

/// Settings shared by every average of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub mode: Mode,
    pub samples: u64,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for Plan {
    fn default() -> Self {
        Plan {
            mode: Mode::Auto,
            samples: AUTO_MIN_SAMPLES,
            seed: 0,
            caps: Caps::default(),
        }
    }
}

impl Plan {
    pub fn exact() -> Self {
        Plan {
            mode: Mode::Exact,
            ..Plan::default()
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        Plan {
            mode: Mode::MonteCarlo,
            samples,
            seed,
            ..Plan::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Plan { seed, ..self }
    }

    /// Chooses exact enumeration or a sample count for size `n` under `cap`.
    fn resolve(&self, n: usize, cap: usize, what: &str) -> Result<Option<u64>> {
        match self.mode {
            Mode::Exact if n > cap => Err(Error::Resource(alloc::format!(
                "exact {what} needs n ≤ {cap}, got n = {n}"
            ))),
            Mode::Exact => Ok(None),
            Mode::MonteCarlo if self.samples == 0 => Err(domain!("samples must be ≥ 1")),
            Mode::MonteCarlo => Ok(Some(self.samples)),
            Mode::Auto if n <= cap => Ok(None),
            Mode::Auto => Ok(Some(self.samples.max(AUTO_MIN_SAMPLES))),
        }
    }
}

/// An average with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageEstimate {
    pub value: f64,
    pub mode: EstimateMode,
    pub samples: u64,
    /// Half-width of the normal-approximation 95% interval; 0 when exact.
    #[serde(rename = "ci95")]
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

impl AverageEstimate {
    /// `|self − value| ≤ k · ci95`, allowing rounding slack for exact results.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.value - value).abs() <= k * self.ci95_halfwidth + 1e-12 * value.abs().max(1.0)
    }
}

/// Running count, mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Partial {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Partial {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(self, other: Partial) -> Partial {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let d = other.mean - self.mean;
        Partial {
            count,
            mean: self.mean + d * nb / count as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / count as f64,
        }
    }

    /// Sample standard deviation with Bessel's correction.
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        sqrt(self.m2 / (self.count - 1) as f64)
    }
}

/// Average of `f` over `S_n^factors`.
///
/// `f` receives the permutations flattened (`π_c(i)` at `c * n + i`) and a
/// scratch buffer it may use freely.
pub fn average<E, F>(
    exec: &E,
    n: usize,
    factors: usize,
    cap: usize,
    plan: &Plan,
    f: F,
) -> Result<AverageEstimate>
where
    E: Executor + ?Sized,
    F: Fn(&[usize], &mut Vec<f64>) -> f64 + Sync,
{
    if n == 0 {
        return Err(domain!("n must be ≥ 1"));
    }
    match plan.resolve(n, cap, "average")? {
        None => {
            let total = product_size(n, factors)
                .ok_or_else(|| Error::Resource(alloc::format!("(n!)^{factors} overflows")))?;
            let blocks = total.div_ceil(BLOCK);
            let parts = exec.map_blocks(blocks as usize, |b| {
                let start = b as u64 * BLOCK;
                let len = BLOCK.min(total - start);
                let mut cursor = ProductCursor::at(n, factors, start);
                let mut scratch = Vec::new();
                let mut acc = Partial::default();
                for k in 0..len {
                    acc.push(f(cursor.current(), &mut scratch));
                    if k + 1 < len {
                        cursor.advance();
                    }
                }
                acc
            });
            let acc = parts.into_iter().fold(Partial::default(), Partial::merge);
            Ok(AverageEstimate {
                value: acc.mean,
                mode: EstimateMode::Exact,
                samples: total,
                ci95_halfwidth: 0.0,
                seed: plan.seed,
            })
        }
        Some(samples) => {
            let blocks = samples.div_ceil(BLOCK);
            let parts = exec.map_blocks(blocks as usize, |b| {
                let start = b as u64 * BLOCK;
                let len = BLOCK.min(samples - start);
                let mut rng = stream(plan.seed, b as u64);
                let mut flat: Vec<usize> = (0..factors).flat_map(|_| 0..n).collect();
                let mut scratch = Vec::new();
                let mut acc = Partial::default();
                for _ in 0..len {
                    for c in 0..factors {
                        rng.shuffle_in_place(&mut flat[c * n..(c + 1) * n]);
                    }
                    acc.push(f(&flat, &mut scratch));
                }
                acc
            });
            let acc = parts.into_iter().fold(Partial::default(), Partial::merge);
            Ok(AverageEstimate {
                value: acc.mean,
                mode: EstimateMode::MonteCarlo,
                samples,
                ci95_halfwidth: 1.96 * acc.std_dev() / sqrt(samples as f64),
                seed: plan.seed,
            })
        }
    }
}

/// `‖x‖_f`, with the closed form for powers.
pub(crate) fn orlicz_norm(f: &OrliczFunction, x: &[f64]) -> Result<f64> {
    match f {
        OrliczFunction::Power { p, scale } => Ok(root(*scale, *p) * p_norm(x.iter().copied(), *p)),
        _ => luxemburg_norm(f, x),
    }
}

fn same_len(x: &[f64], a: &[f64]) -> Result<usize> {
    if x.len() != a.len() {
        return Err(domain!("length mismatch: {} vs {}", x.len(), a.len()));
    }
    Ok(x.len())
}

/// `Ave_π ‖(x_i a_{π(i)})_i‖_f`.
pub fn ave_single<E: Executor + ?Sized>(
    exec: &E,
    x: &[f64],
    a: &WeightVector,
    f: &OrliczFunction,
    plan: &Plan,
) -> Result<AverageEstimate> {
    ave_single_pow(exec, x, a, f, 1.0, plan)
}

/// `Ave_π ‖(x_i a_{π(i)})_i‖_f^q`.
pub fn ave_single_pow<E: Executor + ?Sized>(
    exec: &E,
    x: &[f64],
    a: &WeightVector,
    f: &OrliczFunction,
    q: f64,
    plan: &Plan,
) -> Result<AverageEstimate> {
    let n = same_len(x, a)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(domain!("x must be finite"));
    }
    average(exec, n, 1, plan.caps.single, plan, |perm, buf| {
        buf.clear();
        buf.extend((0..n).map(|i| x[i] * a[perm[i]]));
        // finite input and a valid function: the norm cannot fail
        let v = orlicz_norm(f, buf).unwrap_or(f64::NAN);
        if q == 1.0 {
            v
        } else {
            powf(v, q)
        }
    })
}

/// `Ave_π max_i |x_i · n (M^{*-1}(π(i)/n) − M^{*-1}((π(i)−1)/n))|`.
pub fn ave_double_max<E: Executor + ?Sized>(
    exec: &E,
    x: &[f64],
    m: &OrliczFunction,
    plan: &Plan,
) -> Result<AverageEstimate> {
    let n = x.len();
    let w = dual_increments(m, n);
    average(exec, n, 1, plan.caps.single, plan, |perm, _| {
        (0..n).map(|i| (x[i] * w[perm[i]]).abs()).fold(0.0, f64::max)
    })
}

/// Lower and upper constants in `c_lo ‖x‖_M ≤ ave_double_max ≤ c_hi ‖x‖_M`.
/// The lower constant is `None` when it is not positive (`n ≤ 3`).
pub fn double_max_constants(n: usize) -> (Option<f64>, f64) {
    let lower = if n >= 4 {
        Some(0.5 * (0.5 - 1.0 / (n as f64 - 1.0)))
    } else {
        None
    };
    (lower, 2.0)
}

/// Nonnegative numbers `B(i, k, l)`, `0 ≤ i, k, l < n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct TensorB {
    n: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    n: usize,
    entries: Vec<f64>,
}

impl TryFrom<TensorRepr> for TensorB {
    type Error = Error;
    fn try_from(r: TensorRepr) -> Result<Self> {
        TensorB::new(r.n, r.entries)
    }
}

impl From<TensorB> for TensorRepr {
    fn from(t: TensorB) -> Self {
        TensorRepr {
            n: t.n,
            entries: t.entries,
        }
    }
}

impl TensorB {
    /// `entries[(i * n + k) * n + l] = B(i, k, l)`.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n * n {
            return Err(domain!("need n ≥ 1 and n³ entries"));
        }
        if entries.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(domain!("tensor entries must be finite and nonnegative"));
        }
        Ok(TensorB { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    entries.push(f(i, k, l));
                }
            }
        }
        TensorB::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, l: usize) -> f64 {
        self.entries[(i * self.n + k) * self.n + l]
    }

    pub fn rearrangement(&self) -> Rearrangement {
        Rearrangement::new(self.entries.clone())
    }

    /// `(1/(16n²)) Σ_{α ≤ n²} s(α)` and `(4/n²) Σ_{α ≤ n²} s(α)`.
    pub fn triple_max_bounds(&self) -> (f64, f64) {
        let n2 = (self.n * self.n) as f64;
        let top = self.rearrangement().top_sum(self.n * self.n);
        (top / (16.0 * n2), 4.0 * top / n2)
    }
}

/// `Ave_{π,σ} max_i B(i, π(i), σ(i))`.
pub fn ave_triple_max<E: Executor + ?Sized>(exec: &E, b: &TensorB, plan: &Plan) -> Result<AverageEstimate> {
    let n = b.n();
    average(exec, n, 2, plan.caps.double, plan, |perm, _| {
        (0..n).map(|i| b.get(i, perm[i], perm[n + i])).fold(0.0, f64::max)
    })
}

/// `Ave_π (Σ_i |x_i a_{π(i)}|²)^{1/2}` with `a_i = (n/i)^{1/p}`.
pub fn ave_lp_generator<E: Executor + ?Sized>(
    exec: &E,
    x: &[f64],
    p: f64,
    plan: &Plan,
) -> Result<AverageEstimate> {
    let a = WeightVector::generated(x.len(), p);
    ave_single(exec, x, &a, &OrliczFunction::power(2.0)?, plan)
}

/// `Ave_{π,σ,η} (Σ_{i,j} |a_ij x_{π(i)} y_{σ(j)} z_{η(j)}|²)^{1/2}`.
pub fn ave_matrix_triple<E: Executor + ?Sized>(
    exec: &E,
    a: &Matrix,
    x: &[f64],
    y: &[f64],
    z: &[f64],
    plan: &Plan,
) -> Result<AverageEstimate> {
    let n = a.n();
    if x.len() != n || y.len() != n || z.len() != n {
        return Err(domain!("weights must have length n = {n}"));
    }
    let sq: Vec<f64> = a.as_slice().iter().map(|v| v * v).collect();
    average(exec, n, 3, plan.caps.triple, plan, |perm, _| {
        let (pi, rest) = perm.split_at(n);
        let (sigma, eta) = rest.split_at(n);
        let mut total = 0.0;
        for j in 0..n {
            let w = y[sigma[j]] * z[eta[j]];
            let col: f64 = (0..n)
                .map(|i| {
                    let xi = x[pi[i]];
                    sq[i * n + j] * xi * xi
                })
                .sum();
            total += w * w * col;
        }
        sqrt(total)
    })
}
