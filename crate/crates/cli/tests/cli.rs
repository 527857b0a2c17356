use std::process::{Command, Output};

fn paritydd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paritydd")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn sequence_lists_pulses_and_residual() {
    let out = paritydd(&["sequence", "--udd", "1,2", "--t", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "time,fraction,qubit");
    assert_eq!(lines.len(), 1 + 3 + 1);
    // UDD(1) puts its only pulse at the midpoint, time 1 of 2.
    assert!(lines[1..4].contains(&"1.000000000000e+00,5.000000000000e-01,q1"));
    let residual: f64 = lines[4].strip_prefix("# first_order_residual,").unwrap().parse().unwrap();
    assert!(residual.abs() < 1e-15);
}

#[test]
fn filters_header_and_row_count() {
    let out = paritydd(&["filters", "--udd", "2,3", "--grid", "0,10,11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,f_n,f_m,abs_y_n,abs_y_m,im_yn_ym_conj"));
    assert_eq!(lines.count(), 11);
}

#[test]
fn verify_passes_by_default() {
    let out = paritydd(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() > 100);
}

#[test]
fn perturbation_breaks_udd_checks_but_not_the_generic_one() {
    let out = paritydd(&["verify", "--perturb", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let checks = report["checks"].as_array().unwrap();
    let failed = |prefix: &str| {
        checks.iter().filter(|c| c["name"].as_str().unwrap().starts_with(prefix)).any(|c| c["passed"] == false)
    };
    assert!(failed("identity:parity_sum"));
    assert!(failed("taylor:y_vanishes"));
    assert!(!failed("identity:parity_difference"));
    assert!(!failed("kernel:"));
}

#[test]
fn uncoupled_oracle_matches_exactly() {
    let out = paritydd(&["oracle", "--oracle", "1,0", "--udd", "2,3"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["kernel_deviation"], 0.0);
}

#[test]
fn concurrence_starts_at_one_half() {
    let out = paritydd(&["concurrence", "--udd", "6,7", "--grid", "0,1,3", "--kernel-magnitudes"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0].split(',').count(), 18);
    let c0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((c0 - 0.5).abs() < 1e-12);
}

#[test]
fn errors_are_json_with_exit_two() {
    for args in [&["kernel", "--spectrum", "bogus"][..], &["kernel", "--udd", "1,1"][..]] {
        let out = paritydd(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(err["error"]["kind"].is_string());
        assert!(err["error"]["message"].is_string());
    }
}

#[test]
fn writes_to_out_file() {
    let path = std::env::temp_dir().join(format!("paritydd-cli-{}.json", std::process::id()));
    let out = paritydd(&["kernel", "--udd", "2,4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["m"], 4);
    std::fs::remove_file(path).unwrap();
}
