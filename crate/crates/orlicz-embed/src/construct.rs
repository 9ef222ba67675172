//! `construct` subcommands: the objects themselves, serialised.

use orlicz_embed_core::average::Caps;
use orlicz_embed_core::construct::{construct_lr_orlicz, y_from_m};
use orlicz_embed_core::embed::{build_psi, PsiEvaluator};
use orlicz_embed_core::{Exponents, OrliczFunction, Result, WeightVector};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::report::Table;

/// Upper constant the prescribed function must meet on the grid.
pub const GRID_BOUND: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Object {
    /// The Orlicz function prescribed by a weight vector `a`.
    #[value(name = "orlicz-from-a")]
    OrliczFromA,
    /// The weights `y` read off an Orlicz function `M`.
    #[value(name = "y-from-M", alias = "y-from-m")]
    YFromM,
    /// The embedding matrix, row by row.
    #[value(name = "psi")]
    Psi,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrliczFromA {
    pub object: &'static str,
    pub params: Map<String, Value>,
    pub n: usize,
    pub a: Vec<f64>,
    pub r: f64,
    /// The realised `N^{*-1}(ℓ/n)`, `ℓ = 0..=n`.
    pub grid_values: Vec<f64>,
    /// The target it approximates, `ℓ = 0..=n`.
    pub target_values: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
    pub function: OrliczFunction,
    pub conjugate: OrliczFunction,
    #[serde(skip)]
    pub table: Table,
}

#[derive(Debug, Clone, Serialize)]
pub struct YFromM {
    pub object: &'static str,
    pub params: Map<String, Value>,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: String,
    pub weights: Vec<f64>,
    pub nonincreasing: bool,
    pub pass: bool,
    #[serde(skip)]
    pub table: Table,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub object: &'static str,
    pub params: Map<String, Value>,
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub pass: bool,
    pub matrix: Vec<Vec<f64>>,
    #[serde(skip)]
    pub table: Table,
}

pub fn orlicz_from_a(cfg: &RunConfig) -> Result<OrliczFromA> {
    let a = cfg.a.clone().unwrap_or_else(|| vec![4.0, 3.0, 2.0, 1.0]);
    let r = cfg.r.unwrap_or(2.0);
    let weights = WeightVector::new(a.clone())?;
    let c = construct_lr_orlicz(&weights, r)?;
    let mut table = Table::new(&["l", "target", "grid", "ratio"]);
    for (l, (t, g)) in c.target.iter().zip(&c.grid).enumerate() {
        let ratio = if l == 0 { f64::NAN } else { t / g };
        table.push(vec![l as f64, *t, *g, ratio]);
    }
    Ok(OrliczFromA {
        object: "orlicz-from-a",
        params: cfg.params(),
        n: a.len(),
        a,
        r,
        pass: c.within(GRID_BOUND),
        grid_values: c.grid,
        target_values: c.target,
        lower: c.lower,
        upper: c.upper,
        conjugate: c.function.conjugate(),
        function: c.function,
        table,
    })
}

pub fn y_from_function(cfg: &RunConfig) -> Result<YFromM> {
    let m = cfg.function_or(OrliczFunction::power(2.0)?);
    let n = cfg.n.unwrap_or(8);
    let y = y_from_m(&m, n)?;
    let mut table = Table::new(&["l", "y"]);
    for (l, v) in y.iter().enumerate() {
        table.push(vec![(l + 1) as f64, *v]);
    }
    let nonincreasing = y.windows(2).all(|w| w[0] >= w[1]);
    Ok(YFromM {
        object: "y-from-M",
        params: cfg.params(),
        n,
        m: m.to_string(),
        weights: y.into_inner(),
        nonincreasing,
        pass: nonincreasing,
        table,
    })
}

pub fn psi(cfg: &RunConfig) -> Result<PsiReport> {
    let n = cfg.n.unwrap_or(2);
    let e = Exponents::embedding(cfg.p.unwrap_or(1.5), cfg.r.unwrap_or(1.8))?;
    let y = match &cfg.a {
        Some(a) => WeightVector::new(a.clone())?,
        None => y_from_m(&cfg.function_or(OrliczFunction::power(1.3)?), n)?,
    };
    if y.len() != n {
        return Err(orlicz_embed_core::Error::Domain(format!(
            "--a has {} entries but n = {n}",
            y.len()
        )));
    }
    let caps: Caps = cfg.caps;
    let ev = PsiEvaluator::new(&e, &y);
    let mat = build_psi(&ev, &caps)?;
    let cols = mat.col_count();
    let header: Vec<String> = (0..n)
        .flat_map(|i| (0..n).map(move |j| format!("a_{}_{}", i + 1, j + 1)))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header);
    let matrix: Vec<Vec<f64>> = mat.rows().map(<[f64]>::to_vec).collect();
    for row in &matrix {
        table.push(row.clone());
    }
    Ok(PsiReport {
        object: "psi",
        params: cfg.params(),
        n,
        rows: mat.row_count(),
        cols,
        x: ev.x().to_vec(),
        y: ev.y().to_vec(),
        z: ev.z().to_vec(),
        pass: true,
        matrix,
        table,
    })
}
