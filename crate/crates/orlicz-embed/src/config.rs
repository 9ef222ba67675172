use std::path::PathBuf;

use orlicz_embed_core::average::{Caps, Mode, Plan};
use orlicz_embed_core::{Error, Exponents, OrliczFunction, Result};
use serde_json::{json, Map, Value};

use crate::report::Format;

/// Overrides for the exact-enumeration caps, e.g. `single=9,triple=6`.
/// Raising them makes exact runs take much longer.
pub const CAPS_ENV: &str = "ORLICZ_EMBED_CAPS";

/// Monte Carlo samples per average unless `--samples` says otherwise.
pub const DEFAULT_SAMPLES: u64 = 100_000;

pub fn caps_from_env() -> Result<Caps> {
    match std::env::var(CAPS_ENV) {
        Ok(spec) => Caps::default().with_overrides(&spec),
        Err(_) => Ok(Caps::default()),
    }
}

/// Settings for one command. Unset options fall back to per-suite defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub seed: u64,
    /// Monte Carlo sample count; `None` means the command's default.
    pub samples: Option<u64>,
    pub mode: Mode,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub grid: usize,
    pub m: Option<OrliczFunction>,
    pub a: Option<Vec<f64>>,
    pub matrix: Option<PathBuf>,
    pub perm_samples: u64,
    pub instances: Option<usize>,
    pub caps: Caps,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: None,
            p: None,
            r: None,
            seed: 0,
            samples: None,
            mode: Mode::Auto,
            threads: 1,
            out: None,
            format: Format::Json,
            grid: 100,
            m: None,
            a: None,
            matrix: None,
            perm_samples: 500_000,
            instances: None,
            caps: Caps::default(),
        }
    }
}

impl RunConfig {
    pub fn plan(&self) -> Plan {
        Plan {
            mode: self.mode,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed,
            caps: self.caps,
        }
    }

    /// `n` if given, otherwise `default`.
    pub fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    pub fn instances_or(&self, default: usize) -> usize {
        self.instances.unwrap_or(default)
    }

    pub fn exponents(&self, p: f64, r: f64) -> Result<Exponents> {
        Exponents::new(self.p.unwrap_or(p), self.r.unwrap_or(r))
    }

    pub fn function_or(&self, default: OrliczFunction) -> OrliczFunction {
        self.m.clone().unwrap_or(default)
    }

    /// Everything that influences results. The thread count is left out on
    /// purpose: reports must not depend on it.
    pub fn params(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("n".into(), json!(self.n));
        m.insert("p".into(), json!(self.p));
        m.insert("r".into(), json!(self.r));
        m.insert("seed".into(), json!(self.seed));
        m.insert("samples".into(), json!(self.samples));
        m.insert("mode".into(), json!(self.mode));
        m.insert("grid".into(), json!(self.grid));
        m.insert("M".into(), json!(self.m.as_ref().map(|f| f.to_string())));
        m.insert("a".into(), json!(self.a));
        m.insert("perm_samples".into(), json!(self.perm_samples));
        m.insert("instances".into(), json!(self.instances));
        m.insert("caps".into(), json!(self.caps));
        m
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("{t:?} is not a number")))
        })
        .collect()
}
