use orlicz_embed_core::construct::{norm_y, orlicz_from_prefix};
use orlicz_embed_core::rearrange::{allocate_exhaustive, allocate_greedy, AllocationProblem, Rearrangement};
use orlicz_embed_core::{luxemburg_norm, OrliczFunction, Result, YoungFunction};
use serde_json::json;

use super::{instance_rng, le, random_normal, random_pwa, random_sorted, Extremes, SLACK};
use crate::config::RunConfig;
use crate::report::{Table, VerifyReport};

const EQ1: u64 = 1;
const L21: u64 = 21;

/// `t ≤ M^{-1}(t) M^{*-1}(t) ≤ 2t` on a geometric grid.
pub fn duality(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("eq1", cfg.params());
    let functions: Vec<OrliczFunction> = match &cfg.m {
        Some(m) => vec![m.clone()],
        None => {
            let mut fs = Vec::new();
            for p in [1.0, 1.1, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0] {
                fs.push(OrliczFunction::power(p)?);
            }
            fs.push(OrliczFunction::scaled_power(2.0, 0.3)?);
            for k in 0..10 {
                fs.push(random_pwa(&mut instance_rng(cfg.seed, EQ1, k)));
            }
            fs
        }
    };
    let points = cfg.grid.max(2);
    let grid: Vec<f64> = (0..points)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (points - 1) as f64))
        .collect();

    let mut table = Table::new(&["function", "t", "ratio"]);
    let mut ext = Extremes::default();
    for (k, f) in functions.iter().enumerate() {
        let dual = f.conjugate();
        for &t in &grid {
            let ratio = f.inverse_saturating(t) * dual.inverse_saturating(t) / t;
            table.push(vec![k as f64, t, ratio]);
            ext.push(ratio, || json!({"function": f.to_string(), "index": k, "t": t, "ratio": ratio}));
        }
    }
    rep.empirical("lower", ext.min);
    rep.empirical("upper", ext.max);
    rep.paper("lower", 1.0);
    rep.paper("upper", 2.0);
    rep.check("lower", ext.min >= 1.0 - SLACK);
    rep.check("upper", le(ext.max, 2.0));
    rep.detail("functions", functions.len());
    rep.detail("functions_list", functions.iter().map(|f| f.to_string()).collect::<Vec<_>>());
    rep.detail("grid_points", points);
    rep.worst_case_instance = Some(json!({"min": ext.argmin, "max": ext.argmax}));
    rep.table = table;
    Ok(rep)
}

/// `½‖x‖_y ≤ ‖x‖_M ≤ 2‖x‖_y` for `M` built from the prefix sums of `y`, and
/// the greedy allocation against exhaustive search.
pub fn norm_y_sandwich(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("l21", cfg.params());
    let instances = cfg.instances_or(50);
    let mut table = Table::new(&["n", "m", "instance", "norm_y", "norm_M", "ratio"]);
    let mut ext = Extremes::default();
    let mut greedy_ok = true;
    let mut worst_gap = 0.0f64;
    for n in cfg.ns(&[3, 4]) {
        for m in [n, 2 * n] {
            for k in 0..instances {
                let mut rng = instance_rng(cfg.seed, L21 ^ ((n as u64) << 8) ^ ((m as u64) << 16), k);
                let y = random_sorted(&mut rng, m, 0.05, 1.0);
                let x = random_normal(&mut rng, n);

                let gain: Vec<f64> = std::iter::once(0.0)
                    .chain(Rearrangement::new(y.to_vec()).prefix_sums().iter().copied())
                    .collect();
                let weights: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                let prob = AllocationProblem::new(weights, gain, m)?;
                let (_, greedy) = allocate_greedy(&prob);
                let (_, best) = allocate_exhaustive(&prob);
                let gap = (greedy - best).abs() / best.abs().max(1e-300);
                worst_gap = worst_gap.max(gap);
                greedy_ok &= gap <= 1e-12;

                let ny = norm_y(&x, &y, m)?;
                let scaled = Rearrangement::new(y.iter().map(|v| v * m as f64).collect());
                // M^{*-1}(k/m) = Σ_{i ≤ k} y_i
                let big_m = orlicz_from_prefix(&scaled, m)?;
                let nm = luxemburg_norm(&big_m, &x)?;
                let ratio = nm / ny;
                table.push(vec![n as f64, m as f64, k as f64, ny, nm, ratio]);
                ext.push(ratio, || json!({"n": n, "m": m, "instance": k, "x": x, "y": y.to_vec()}));
            }
        }
    }
    rep.empirical("lower", ext.min);
    rep.empirical("upper", ext.max);
    rep.empirical("greedy_relative_gap", worst_gap);
    rep.paper("lower", 0.5);
    rep.paper("upper", 2.0);
    rep.check("lower", ext.min >= 0.5 * (1.0 - SLACK));
    rep.check("upper", le(ext.max, 2.0));
    rep.check("greedy_matches_exhaustive", greedy_ok);
    rep.worst_case_instance = Some(json!({"min": ext.argmin, "max": ext.argmax}));
    rep.table = table;
    Ok(rep)
}
