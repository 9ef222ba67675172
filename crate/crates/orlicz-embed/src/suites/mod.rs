//! One suite per checked statement. Each builds its random instances from the
//! run seed, evaluates both sides of an inequality and records the empirical
//! constants next to the ones being asserted.

mod averages;
mod embed;
mod lr;
mod orlicz;

use orlicz_embed_core::rng::{derive_seed, stream, BlockRng, RngExt};
use orlicz_embed_core::{OrliczFunction, Result, Tail, WeightVector};

use crate::config::RunConfig;
use crate::report::VerifyReport;
use crate::Threaded;

pub use averages::{double_max, generating_lp, lemma_average, triple_max};
pub use embed::{embedding, summation, y_chain};
pub use lr::{lr_average, split_average};
pub use orlicz::{duality, norm_y_sandwich};

/// Relative slack on every asserted inequality.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Statement {
    Eq1,
    L21,
    L22,
    L23,
    L24,
    L25,
    L26,
    Genlp,
    Prop31,
    Cor32,
    Thm11,
}

impl Statement {
    pub fn id(self) -> &'static str {
        match self {
            Statement::Eq1 => "eq1",
            Statement::L21 => "l21",
            Statement::L22 => "l22",
            Statement::L23 => "l23",
            Statement::L24 => "l24",
            Statement::L25 => "l25",
            Statement::L26 => "l26",
            Statement::Genlp => "genlp",
            Statement::Prop31 => "prop31",
            Statement::Cor32 => "cor32",
            Statement::Thm11 => "thm11",
        }
    }
}

pub fn run(which: Statement, cfg: &RunConfig, exec: &Threaded) -> Result<VerifyReport> {
    match which {
        Statement::Eq1 => duality(cfg),
        Statement::L21 => norm_y_sandwich(cfg),
        Statement::L22 => double_max(cfg, exec),
        Statement::L23 => triple_max(cfg, exec),
        Statement::L24 => lemma_average(cfg, exec),
        Statement::L25 => lr_average(cfg, exec),
        Statement::L26 => split_average(cfg, exec),
        Statement::Genlp => generating_lp(cfg, exec),
        Statement::Prop31 => embedding(cfg, exec),
        Statement::Cor32 => summation(cfg),
        Statement::Thm11 => y_chain(cfg),
    }
}

/// Generator for instance `k` of the suite tagged `label`.
pub(crate) fn instance_rng(seed: u64, label: u64, k: usize) -> BlockRng {
    stream(derive_seed(seed, label), k as u64)
}

/// Seed for the averages of instance `k` of the suite tagged `label`.
pub(crate) fn average_seed(seed: u64, label: u64, k: usize) -> u64 {
    derive_seed(derive_seed(seed, label ^ 0x5eed), k as u64)
}

pub fn random_normal(rng: &mut BlockRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

/// `n` positive weights drawn from `[lo, hi)`, sorted nonincreasing.
pub fn random_sorted(rng: &mut BlockRng, n: usize, lo: f64, hi: f64) -> WeightVector {
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    WeightVector::new(v).expect("positive sorted draws")
}

/// A convex piecewise-affine Orlicz function with 2 to 6 pieces and a
/// terminal slope.
pub fn random_pwa(rng: &mut BlockRng) -> OrliczFunction {
    let pieces = 2 + (rng.uniform(0.0, 5.0) as usize).min(4);
    let mut bp = vec![(0.0, 0.0)];
    let mut slope = rng.uniform(0.05, 1.0);
    let (mut t, mut v) = (0.0, 0.0);
    for _ in 0..pieces {
        let dt = rng.uniform(0.2, 2.0);
        t += dt;
        v += slope * dt;
        bp.push((t, v));
        slope += rng.uniform(0.0, 1.5);
    }
    OrliczFunction::piecewise(bp, Tail::Slope(slope)).expect("convex by construction")
}

/// The default rotation of test functions: two powers and a random
/// piecewise-affine function.
pub(crate) fn rotating_function(cfg: &RunConfig, rng: &mut BlockRng, k: usize) -> OrliczFunction {
    if let Some(m) = &cfg.m {
        return m.clone();
    }
    match k % 3 {
        0 => OrliczFunction::power(2.0).expect("valid exponent"),
        1 => OrliczFunction::power(1.5).expect("valid exponent"),
        _ => random_pwa(rng),
    }
}

/// Running minimum and maximum together with the arguments attaining them.
#[derive(Debug, Clone)]
pub(crate) struct Extremes<T> {
    pub min: f64,
    pub max: f64,
    pub argmin: Option<T>,
    pub argmax: Option<T>,
}

impl<T> Default for Extremes<T> {
    fn default() -> Self {
        Extremes {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            argmin: None,
            argmax: None,
        }
    }
}

impl<T: Clone> Extremes<T> {
    pub fn push(&mut self, v: f64, at: impl FnOnce() -> T) {
        let lo = v < self.min;
        let hi = v > self.max;
        if lo || hi {
            let a = at();
            if lo {
                self.min = v;
                self.argmin = Some(a.clone());
            }
            if hi {
                self.max = v;
                self.argmax = Some(a);
            }
        }
    }

    pub fn merge(&mut self, other: &Extremes<T>) {
        if other.min < self.min {
            self.min = other.min;
            self.argmin = other.argmin.clone();
        }
        if other.max > self.max {
            self.max = other.max;
            self.argmax = other.argmax.clone();
        }
    }
}

pub(crate) fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(a.abs())
}
