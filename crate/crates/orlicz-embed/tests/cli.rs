use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz-embed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn unknown_lemma_is_a_usage_error() {
    assert_eq!(run(&["verify", "l99"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn bad_values_are_usage_errors() {
    assert_eq!(run(&["verify", "eq1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "eq1", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "y-from-M", "--M", "power:0.5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "thm11", "--p", "1.5", "--r", "1.5"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exact_enumeration_over_cap_is_a_resource_error() {
    let out = run(&["construct", "psi", "--n", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn l22_at_five_carries_its_constants() {
    let rep = json(&["verify", "l22", "--n", "5", "--seed", "7"]);
    assert_eq!(rep["lemma"], "l22");
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["paper_constants"]["n5"]["lower"], 0.125);
    assert_eq!(rep["paper_constants"]["n5"]["upper"], 2.0);
}

#[test]
fn l23_at_three_carries_its_bounds() {
    let rep = json(&["verify", "l23", "--n", "3"]);
    assert_eq!(rep["pass"], true);
    let c = &rep["paper_constants"]["n3"];
    assert!(close(c["lower"].as_f64().unwrap(), 1.0 / 144.0), "{c}");
    assert!(close(c["upper"].as_f64().unwrap(), 4.0 / 9.0), "{c}");
}

#[test]
fn eq1_on_a_hundred_points() {
    let rep = json(&["verify", "eq1", "--grid", "100"]);
    assert_eq!(rep["pass"], true);
    assert!(rep["empirical_constants"]["upper"].as_f64().unwrap() <= 2.0 + 1e-9);
}

#[test]
fn y_from_square_matches_the_closed_form() {
    let rep = json(&["construct", "y-from-M", "--M", "power:2", "--n", "8"]);
    let w: Vec<f64> = rep["weights"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(w.len(), 8);
    for (l, v) in w.iter().enumerate() {
        let (a, b) = ((l + 1) as f64 / 8.0, l as f64 / 8.0);
        assert!(close(*v, 16.0 * (a.sqrt() - b.sqrt())), "ℓ = {}: {v}", l + 1);
    }
    assert!(w.windows(2).all(|p| p[0] > p[1]));
}

#[test]
fn psi_at_two_is_128_by_4() {
    let rep = json(&["construct", "psi", "--n", "2", "--p", "1.1", "--r", "1.5"]);
    assert_eq!(rep["rows"], 128);
    assert_eq!(rep["cols"], 4);
    let m = rep["matrix"].as_array().unwrap();
    assert_eq!(m.len(), 128);
    assert!(m.iter().all(|row| row.as_array().unwrap().len() == 4));
}

#[test]
fn orlicz_from_a_lists_breakpoints() {
    let rep = json(&["construct", "orlicz-from-a", "--a", "4,3,2,1", "--r", "2"]);
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["grid_values"].as_array().unwrap().len(), 5);
    assert!(rep["function"]["breakpoints"].as_array().unwrap().len() >= 2);
}

#[test]
fn csv_output_has_a_header() {
    let out = run(&["construct", "y-from-M", "--n", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("l,y"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rep.json");
    let out = run(&["verify", "l21", "--instances", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rep["lemma"], "l21");
}

#[test]
fn distortion_is_reproducible() {
    let args = ["distortion", "--n", "2", "--seed", "4", "--samples", "120"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn distortion_grows_slowly_from_two_to_three() {
    let d = |n: &str| json(&["distortion", "--n", n, "--seed", "1", "--samples", "100"])["distortion"].as_f64().unwrap();
    let (d2, d3) = (d("2"), d("3"));
    assert!(d2 >= 1.0 && d3 >= 1.0);
    assert!(d3 / d2 < 2.0, "{d2} → {d3}");
}

#[test]
fn distortion_ignores_matrix_scale() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        vec![vec![1.0, -0.5, 0.25], vec![0.3, 2.0, -1.1], vec![-0.7, 0.4, 0.9]],
        vec![vec![0.2, 0.1, -1.5], vec![1.3, -0.6, 0.8], vec![0.5, 0.5, -0.2]],
    ];
    let write = |name: &str, scale: f64| {
        let scaled: Vec<Vec<Vec<f64>>> = base
            .iter()
            .map(|m| m.iter().map(|row| row.iter().map(|v| v * scale).collect()).collect())
            .collect();
        let path = dir.path().join(name);
        std::fs::write(&path, serde_json::to_string(&scaled).unwrap()).unwrap();
        path
    };
    let (p1, p2) = (write("one.json", 1.0), write("lambda.json", 8.0));
    let d = |p: &std::path::Path| json(&["distortion", "--matrix", p.to_str().unwrap()])["distortion"].as_f64().unwrap();
    let (a, b) = (d(&p1), d(&p2));
    assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
}

#[test]
fn malformed_matrix_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "[[1, 2], [3]]").unwrap();
    assert_eq!(run(&["distortion", "--matrix", path.to_str().unwrap()]).status.code(), Some(2));
}
