use orlicz_embed_core::average::{ave_matrix_triple, Mode, Plan};
use orlicz_embed_core::construct::{
    chain_ratios, construct_lr_orlicz, lr_grid, verify_my_equiv_m, y_from_m, ExponentOrdering, CHAIN_BOUND,
};
use orlicz_embed_core::embed::{
    summation_bounds, l1_image_norm, matrix_norm, Matrix, MatrixSpaceNorm, PsiEvaluator,
};
use orlicz_embed_core::orlicz::{c_const, check_regularity, Direction};
use orlicz_embed_core::rng::RngExt;
use orlicz_embed_core::{Error, Exponents, OrliczFunction, Result, YoungFunction};
use serde_json::{json, Map, Value};

use super::averages::Modes;
use super::{average_seed, instance_rng, le, Extremes, SLACK};
use crate::config::RunConfig;
use crate::report::{Table, VerifyReport};
use crate::Threaded;

const PROP31: u64 = 31;

/// Allowed factor between the ratio bands at the smallest and largest `n`.
pub const BAND_FACTOR: f64 = 2.0;

fn default_dual_function() -> OrliczFunction {
    OrliczFunction::power(1.3).expect("valid exponent")
}

/// `Ψ_n a` in L1 against `‖(‖(a_ij)_i‖_r)_j‖_{M_y}` over Gaussian matrices.
/// Exact averages up to the `l1_exact` cap, sampled permutations with exact
/// signs above it.
pub fn embedding(cfg: &RunConfig, exec: &Threaded) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("prop31", cfg.params());
    let e = Exponents::embedding(cfg.p.unwrap_or(1.5), cfg.r.unwrap_or(1.8))?;
    let m = cfg.function_or(default_dual_function());
    let instances = cfg.instances_or(20);
    let ns: Vec<usize> = match cfg.n {
        Some(n) if n >= 2 => (2..=n).collect(),
        Some(n) => vec![n],
        None => vec![2, 3, 4, 5],
    };
    let mut table = Table::new(&["n", "instance", "l1_norm", "matrix_norm", "ratio", "ci95"]);
    let mut bands = Vec::new();
    let mut khintchine = Extremes::<Value>::default();
    let mut khintchine_ok = true;
    let mut modes = Modes::default();
    let mut worst = Extremes::default();
    for &n in &ns {
        let y = y_from_m(&m, n)?;
        let my = construct_lr_orlicz(&y, e.p())?.function;
        let norm = MatrixSpaceNorm::new(my, e.r(), n)?;
        let psi = PsiEvaluator::new(&e, &y);
        let base = PROP31 ^ ((n as u64) << 8);
        let mut ext = Extremes::default();
        for k in 0..instances {
            let mut rng = instance_rng(cfg.seed, base, k);
            let a = Matrix::from_fn(n, |_, _| rng.normal());
            let plan = Plan {
                mode: cfg.mode,
                samples: cfg.perm_samples,
                seed: average_seed(cfg.seed, base, k),
                caps: cfg.caps,
            };
            let est = l1_image_norm(exec, &psi, &a, &plan)?;
            modes.record(n, est.mode);
            let mn = matrix_norm(&a, &norm)?;
            let ratio = est.value / mn;
            table.push(vec![n as f64, k as f64, est.value, mn, ratio, est.ci95_halfwidth]);
            ext.push(ratio, || json!({"n": n, "instance": k, "matrix": a}));

            // the sign average against the square function, exact only
            if n <= cfg.caps.l1_exact.min(cfg.caps.triple) && cfg.mode != Mode::MonteCarlo {
                let sq = ave_matrix_triple(exec, &a, psi.x(), psi.y(), psi.z(), &Plan::exact())?;
                let c = est.value / sq.value;
                khintchine_ok &= le(c, 1.0);
                khintchine.push(c, || json!({"n": n, "instance": k}));
            }
        }
        bands.push((n, ext.min, ext.max));
        worst.merge(&ext);
    }
    let mut per_n = Map::new();
    for (n, lo, hi) in &bands {
        per_n.insert(format!("n{n}"), json!({"a_rp": lo, "b_rp": hi}));
    }
    rep.empirical("bands", Value::Object(per_n));
    if khintchine.argmin.is_some() {
        rep.empirical("khintchine", json!({"c_K": khintchine.min, "max": khintchine.max}));
        rep.check("khintchine_upper", khintchine_ok);
    }
    rep.paper("band_factor", BAND_FACTOR);
    rep.paper("khintchine", Value::Null);
    if let (Some(first), Some(last)) = (bands.first(), bands.last()) {
        if bands.len() > 1 {
            let within = |a: f64, b: f64| a <= BAND_FACTOR * b && b <= BAND_FACTOR * a;
            rep.detail(
                "band_comparison",
                json!({"from_n": first.0, "to_n": last.0, "min_ratio": last.1 / first.1, "max_ratio": last.2 / first.2}),
            );
            rep.check("band_stable", within(first.1, last.1) && within(first.2, last.2));
        }
    }
    rep.detail("modes", modes.to_value());
    rep.detail("M", m.to_string());
    rep.worst_case_instance = Some(json!({"min": worst.argmin, "max": worst.argmax}));
    rep.table = table;
    Ok(rep)
}

/// Prefix and tail sums of `1/M^{-1}(i/n)` for `M = t^q`, `1 < q < p`, and
/// the comparison of `M_y` with `M` it feeds into.
pub fn summation(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("cor32", cfg.params());
    let m = cfg.function_or(default_dual_function());
    let p = cfg.p.unwrap_or(1.5);
    let q = match m {
        OrliczFunction::Power { p: q, .. } => Some(q),
        _ => None,
    };
    if let Some(q) = q {
        if !(1.0 < q && q < p) {
            return Err(Error::Domain(format!("need 1 < q < p, got q = {q}, p = {p}")));
        }
    }
    let mut table = Table::new(&["n", "l", "prefix_ratio", "tail_ratio", "my_ratio"]);
    let (mut prefix, mut tail, mut my_band) = (0.0f64, 0.0f64, (f64::INFINITY, 0.0f64));
    for n in cfg.ns(&[16, 64]) {
        let cs = summation_bounds(&m, p, n)?;
        prefix = prefix.max(cs.prefix_constant);
        tail = tail.max(cs.tail_constant);
        // y_j = 1/M^{-1}(j/n) against M^{*-1}
        let nf = n as f64;
        let y: Vec<f64> = (1..=n).map(|j| 1.0 / m.inverse_saturating(j as f64 / nf)).collect();
        let bracket = lr_grid(&y, p);
        let dual = m.conjugate();
        let cp = c_const(p);
        for (l, b) in bracket.iter().enumerate().take(n + 1).skip(1) {
            let my = b / cp / dual.inverse_saturating(l as f64 / nf);
            my_band = (my_band.0.min(my), my_band.1.max(my));
            table.push(vec![nf, l as f64, cs.prefix_ratios[l - 1], cs.tail_ratios[l - 1], my]);
        }
        rep.empirical(&format!("n{n}"), json!({"prefix": cs.prefix_constant, "tail": cs.tail_constant}));
    }
    rep.empirical("prefix", prefix);
    rep.empirical("tail", tail);
    rep.empirical("my_vs_m", json!({"min": my_band.0, "max": my_band.1}));
    match q {
        Some(q) => {
            let q_conj = q / (q - 1.0);
            let tail_bound = (q / (p - q)).powf(1.0 / p) / c_const(q);
            rep.paper("prefix", q_conj);
            rep.paper("tail", tail_bound);
            rep.check("prefix", le(prefix, q_conj));
            rep.check("tail", le(tail, tail_bound));
        }
        None => {
            rep.paper("prefix", Value::Null);
            rep.paper("tail", Value::Null);
            rep.detail("note", "closed-form bounds need M = t^q; constants reported only");
        }
    }
    rep.table = table;
    Ok(rep)
}

/// The chain `M^{*-1} ≤ (1/n) Σ_{i ≤ ℓ} y_i + (ℓ/n)^{1/p*} (…)^{1/p} ≤ 3 M^{*-1}`
/// under both readings of which exponent carries the regularity hypothesis.
pub fn y_chain(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new("thm11", cfg.params());
    let (p, r) = (cfg.p.unwrap_or(1.5), cfg.r.unwrap_or(1.8));
    if p == r {
        return Err(Error::Domain(format!("p and r must differ, both are {p}")));
    }
    let (lo, hi) = (p.min(r), p.max(r));
    let functions: Vec<OrliczFunction> = match &cfg.m {
        Some(m) => vec![m.clone()],
        None => [1.1, 1.3, 1.5]
            .iter()
            .map(|&q| OrliczFunction::power(q))
            .collect::<Result<_>>()?,
    };
    let ns = cfg.ns(&[8, 16]);
    let mut table = Table::new(&["function", "n", "ordering", "l", "ratio"]);
    let mut satisfied = Vec::new();
    let mut per_ordering = Map::new();
    for (oi, ordering) in ExponentOrdering::ALL.iter().enumerate() {
        // the ordering fixes which of the two exponents is p in the chain
        let e = match ordering {
            ExponentOrdering::SmallerRegular => Exponents::new(lo, hi)?,
            ExponentOrdering::LargerRegular => Exponents::new(hi, lo)?,
        };
        let mut applicable = 0usize;
        let mut all_hold = true;
        let mut runs = Vec::new();
        for (fi, m) in functions.iter().enumerate() {
            for &n in &ns {
                match verify_my_equiv_m(m, &e, n, *ordering) {
                    Ok(report) => {
                        applicable += 1;
                        all_hold &= report.holds;
                        for (l, ratio) in report.ratios.iter().enumerate() {
                            table.push(vec![fi as f64, n as f64, oi as f64, (l + 1) as f64, *ratio]);
                        }
                        runs.push(json!({
                            "M": m.to_string(), "n": n, "applicable": true,
                            "min_ratio": report.min_ratio, "max_ratio": report.max_ratio, "holds": report.holds,
                        }));
                    }
                    Err(Error::Precondition(reason)) => {
                        let ratios = chain_ratios(m, e.p(), n)?;
                        let max = ratios.iter().copied().fold(0.0f64, f64::max);
                        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                        let regularity = check_regularity(m, lo.min(hi), Direction::Decreasing);
                        runs.push(json!({
                            "M": m.to_string(), "n": n, "applicable": false, "reason": reason,
                            "min_ratio": min, "max_ratio": max,
                            "holds_anyway": min >= 1.0 - SLACK && max <= CHAIN_BOUND,
                            "regularity_violation": regularity.violation,
                        }));
                    }
                    Err(err) => return Err(err),
                }
            }
        }
        let ok = applicable > 0 && all_hold;
        if ok {
            satisfied.push(*ordering);
        }
        per_ordering.insert(
            serde_json::to_value(ordering)
                .expect("ordering serialises")
                .as_str()
                .expect("unit variant")
                .to_string(),
            json!({
                "regularity_exponent": lo,
                "tail_exponent": e.p(),
                "applicable_instances": applicable,
                "holds": ok,
                "runs": runs,
            }),
        );
    }
    rep.paper("upper", CHAIN_BOUND);
    rep.paper("lower", 1.0);
    rep.detail("orderings", Value::Object(per_ordering));
    rep.detail("orderings_satisfied", &satisfied);
    rep.check("some_ordering_holds", !satisfied.is_empty());
    rep.table = table;
    Ok(rep)
}
