use std::process::{Command, Output};

fn jch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jch"))
        .args(args)
        .env_remove("JCH_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn markovian_point_has_zero_backflow() {
    let o = jch(&["nonmarkov", "--delta", "0", "--g-p", "0", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,tail_bound,converged,negative_intervals,flag"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn nonmarkov_intervals_list_sign_changes() {
    let o = jch(&["nonmarkov", "--delta", "10", "--lambda", "0.1", "--intervals", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = v["axes"]["grid"][0]["values"].as_array().unwrap().len();
    assert!(n > 2, "expected several sign intervals, got {n}");
}

#[test]
fn invalid_parameter_exits_one_and_names_it() {
    let o = jch(&["rates", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lambda"), "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let o = jch(&["rates", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn numerical_failure_exits_two() {
    // the phonon sideband series cannot be truncated within the term budget
    let o = jch(&["rates", "--g-p", "40"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn help_lists_flags_with_units_for_every_subcommand() {
    for sub in [
        vec!["rates"],
        vec!["coherence"],
        vec!["nonmarkov"],
        vec!["sweep"],
        vec!["oracle", "quadrature"],
        vec!["oracle", "exact"],
        vec!["oracle", "polaron"],
    ] {
        let mut args = sub.clone();
        args.push("--help");
        let o = jch(&args);
        assert_eq!(o.status.code(), Some(0));
        let help = stdout(&o);
        for flag in ["--gamma0", "--lambda", "--delta", "--omega-ph", "--g-p", "--out", "--format", "--jobs", "--config"] {
            assert!(help.contains(flag), "{sub:?} help lacks {flag}");
        }
        assert!(help.contains("units of the cavity coupling γ₀"), "{sub:?}");
    }
}

#[test]
fn rates_output_is_deterministic_and_full_precision() {
    let a = jch(&["rates", "--g-p", "1", "--t-samples", "11"]);
    let b = jch(&["rates", "--g-p", "1", "--t-samples", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 12);
    assert!(text.starts_with("t,Gamma,S,gamma,Phi,flag"));
    let second: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(second[1].split('e').next().unwrap().len(), 18 + usize::from(second[1].starts_with('-')));
}

#[test]
fn config_file_and_flags_layer_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("jch.toml");
    std::fs::write(&cfg, "lambda = 0.5\ndelta = 3\nformat = \"json\"\n").unwrap();
    let run = |extra: &[&str], env: bool| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_jch"));
        c.args(["rates", "--t-samples", "3"]).args(extra);
        if env {
            c.env("JCH_CONFIG", &cfg);
        } else {
            c.env_remove("JCH_CONFIG");
        }
        let o = c.output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    let from_env = run(&[], true);
    assert_eq!(from_env["params"]["model"]["lambda"], 0.5);
    assert_eq!(from_env["params"]["model"]["delta"], 3.0);
    let flagged = run(&["--lambda", "2"], true);
    assert_eq!(flagged["params"]["model"]["lambda"], 2.0);
    assert_eq!(flagged["params"]["model"]["delta"], 3.0);
    let explicit = run(&["--config", cfg.to_str().unwrap(), "--delta", "1"], false);
    assert_eq!(explicit["params"]["model"]["lambda"], 0.5);
    assert_eq!(explicit["params"]["model"]["delta"], 1.0);
}

#[test]
fn bad_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "lamda = 1\n").unwrap();
    let o = jch(&["rates", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lamda"));
}

#[test]
fn explicit_sweep_writes_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let o = jch(&[
        "sweep",
        "--axis1",
        "delta=0,5,10",
        "--axis2",
        "lambda=0.1,1",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(text.starts_with("delta,lambda,N,flag"));
}

#[test]
fn preset_override_selects_one_panel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1a.json");
    let o = jch(&[
        "sweep",
        "--preset",
        "fig1",
        "--g-p",
        "0",
        "--t-samples",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["params"]["name"], "fig1-gp0");
    assert_eq!(v["values"].as_array().unwrap().len(), 15);
}

#[test]
fn multi_panel_preset_writes_hashed_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = jch(&[
        "sweep",
        "--preset",
        "fig1",
        "--t-samples",
        "5",
        "--format",
        "svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 2);
    assert!(names[0].starts_with("fig1-gp0-") && names[0].ends_with(".svg"));
    assert!(names[1].starts_with("fig1-gp2-"));
    let svg = std::fs::read_to_string(dir.path().join(&names[0])).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 15);
}

#[test]
fn partial_sweep_failure_still_succeeds() {
    let o = jch(&["sweep", "--axis1", "g-p=0,40", "--t-max", "1", "--t-samples", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("1 of 2 cells failed"));
    assert!(stdout(&o).contains("NaN"));
}

#[test]
fn oracle_subcommands_run() {
    let q = jch(&["oracle", "quadrature", "--g-p", "1", "--t-max", "2", "--t-samples", "5", "--compare"]);
    assert_eq!(q.status.code(), Some(0), "{}", stderr(&q));
    assert!(stdout(&q).starts_with("t,Gamma,S,Gamma_series,S_series,abs_dev,flag"));

    let p = jch(&["oracle", "polaron", "--g-p", "0.5", "--compare"]);
    assert_eq!(p.status.code(), Some(0), "{}", stderr(&p));
    assert_eq!(stdout(&p).lines().count(), 1 + 4);

    let e = jch(&[
        "oracle", "exact", "--gamma0", "0.1", "--modes", "40", "--n-ph-max", "4", "--t-max", "1", "--t-samples", "3",
        "--compare",
    ]);
    assert_eq!(e.status.code(), Some(0), "{}", stderr(&e));
    assert!(stderr(&e).contains("deviation ratio"));
}

#[test]
fn unwritable_output_reports_path() {
    let o = jch(&["rates", "--out", "/nonexistent/dir/r.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/dir/r.csv"));
}

#[test]
fn coherence_starts_at_initial_value() {
    let o = jch(&["coherence", "--a", "0.6", "--t-samples", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((first[1].parse::<f64>().unwrap() - 0.96).abs() < 1e-15);
}
