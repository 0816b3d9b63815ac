use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldpc-scaling"))
        .args(args)
        .output()
        .expect("spawn ldpc-scaling")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data lines (no `#` comments), split into fields.
fn records(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let recs = records(text);
    let idx = recs[0].iter().position(|c| c == name).unwrap();
    recs[1..].iter().map(|r| r[idx].clone()).collect()
}

#[test]
fn threshold_of_two_three() {
    let text = stdout(&["threshold", "--regular", "2", "3"]);
    let recs = records(&text);
    assert_eq!(recs.len(), 1);
    let v: f64 = recs[0][0].parse().unwrap();
    assert!((v - 0.5).abs() < 1e-9, "{v}");
}

#[test]
fn alpha_at_depth_42() {
    let text = stdout(&["alpha", "--regular", "3", "6", "--eps", "0.425", "--iters", "42"]);
    assert_eq!(records(&text)[0], ["epsilon", "t", "beta", "gamma", "alpha"]);
    let alpha: f64 = column(&text, "alpha")[0].parse().unwrap();
    assert!((alpha.abs() - 35710.34).abs() < 0.01, "{alpha}");
}

#[test]
fn infeasible_blocklength_exits_one() {
    let out = run(&["simulate", "--regular", "2", "3", "--blocklength", "50", "--eps", "0.3", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("infeasible") && err.contains("48") && err.contains("51"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["alpha", "--regular", "3", "6", "--eps", "0.4", "--frobnicate"][..],
        &["alpha", "--regular", "3", "6"],
        &["alpha", "--eps", "0.4"],
        &["alpha", "--regular", "3", "6", "--eps-range", "0.1", "0.2", "0"],
        &["alpha", "--regular", "3", "6", "--eps", "0.4", "--prec-bits", "20"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(run(&["alpha", "--regular", "3", "6", "--eps", "1.5"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("irregular.json");
    std::fs::write(&path, r#"{"lambda": {"2": 0.5, "3": 0.5}, "rho": {"6": 1.0}}"#).unwrap();
    let ens = path.to_str().unwrap();
    // β has no closed form here, γ does
    assert_eq!(run(&["alpha", "--ensemble", ens, "--eps", "0.3"]).status.code(), Some(1));
    let text = stdout(&["gamma", "--ensemble", ens, "--eps", "0.3", "--iters", "4"]);
    let row = &records(&text)[1];
    assert!(row[2].is_empty() && row[4].is_empty());
    assert!(row[3].parse::<f64>().unwrap().is_finite());
}

#[test]
fn de_trace_layout() {
    let text = stdout(&["de", "--regular", "2", "3", "--eps", "0.3", "--iters", "2"]);
    let recs = records(&text);
    assert_eq!(recs[0], ["t", "P", "Q"]);
    assert_eq!(recs[1], ["0", "1.0", ""]);
    assert_eq!(recs[2], ["1", "0.51", "0.3"]);
}

#[test]
fn json_mirror() {
    let text = stdout(&["alpha", "--regular", "2", "3", "--eps", "0.2", "--iters", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["parameters"]["iters"], "3");
    let alpha = v["rows"][0]["alpha"].as_f64().unwrap();
    assert!((alpha - 0.3257638333879652).abs() < 1e-12);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("de.csv");
    let args = ["de", "--regular", "3", "6", "--eps", "0.4", "--iters", "5"];
    let printed = stdout(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(stdout(&with_out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    // only the echoed command line differs
    let body = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&written), body(&printed));
    // nothing left behind besides the target
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn header_regenerates_output() {
    let text = stdout(&[
        "simulate", "--regular", "3", "6", "--blocklength", "64", "--eps-range", "0.3", "0.4", "0.05",
        "--iters", "4", "--trials", "200", "--seed", "7",
    ]);
    let first = text.lines().next().unwrap();
    let argv: Vec<&str> = first.trim_start_matches("# ").split(' ').skip(1).collect();
    assert_eq!(stdout(&argv), text);
    assert!(text.contains("# seed: 7") && text.contains("# eps: 0.3 0.35 0.4"));
}

#[test]
fn precision_paths_agree() {
    for (ens, eps) in [(["2", "3"], "0.3"), (["3", "6"], "0.4")] {
        let common = ["alpha", "--regular", ens[0], ens[1], "--eps", eps, "--iters", "10", "--sweep"];
        let low = stdout(&[&common[..], &["--prec-bits", "53"]].concat());
        let high = stdout(&common);
        for (a, b) in column(&low, "alpha").iter().zip(column(&high, "alpha")) {
            let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-300), "{a} vs {b}");
        }
    }
}

#[test]
fn exact_small_code() {
    let text = stdout(&["exact", "--regular", "2", "3", "--blocklength", "3", "--eps", "0.5"]);
    assert_eq!(column(&text, "pb_exact"), ["0.5", "0.375", "0.375"]);
}

#[test]
fn curve_rows_per_blocklength() {
    let text = stdout(&[
        "curve", "--regular", "2", "3", "--eps", "0.3", "--eps", "0.4", "--blocklength", "51",
        "--blocklength", "102", "--iters", "20",
    ]);
    let n = column(&text, "n");
    assert_eq!(n, ["51", "51", "102", "102"]);
    let approx: Vec<f64> = column(&text, "pb_approx").iter().map(|s| s.parse().unwrap()).collect();
    let inf: Vec<f64> = column(&text, "pb_infinite").iter().map(|s| s.parse().unwrap()).collect();
    let alpha: Vec<f64> = column(&text, "alpha").iter().map(|s| s.parse().unwrap()).collect();
    assert!((approx[2] - (inf[2] + alpha[2] / 102.0)).abs() < 1e-15);
}

#[test]
fn fig4_columns_nearly_equal() {
    let text = stdout(&["fig4", "--eps", "0.1", "--eps", "0.3"]);
    let lim = column(&text, "alpha_limit");
    let floor = column(&text, "errorfloor");
    for (a, b) in lim.iter().zip(&floor) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
    }
    assert!(column(&text, "status").iter().all(|s| s == "converged"));
}

#[test]
fn compare_reports_z_scores() {
    let text = stdout(&[
        "compare", "--regular", "2", "3", "--eps", "0.3", "--blocklength", "201", "--iters", "20",
        "--trials", "2000",
    ]);
    let z: f64 = column(&text, "z_score")[0].parse().unwrap();
    assert!(z.is_finite());
}
