use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diracwell")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn critical_depths() {
    let v = json(&["critical", "--m", "1", "--a", "0.7"]);
    let r = &v["result"];
    assert!((r["V_1c"].as_f64().unwrap() - 3.45673).abs() < 5e-5);
    assert!((r["V_odd1"].as_f64().unwrap() - 1.45673).abs() < 5e-5);
    assert_eq!(v["config"]["a"], 0.7);
}

#[test]
fn free_phase_vanishes() {
    let out = run(&["phase", "--V", "0", "--points", "20", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 20);
    for r in rows {
        let cols: Vec<f64> = r.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[1], cols[2]), (0.0, 0.0));
    }
}

#[test]
fn csv_header_records_config() {
    let out = run(&["charge", "--a", "0.9", "--points", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# a = 0.9"));
    assert!(text.contains("# subcommand = \"charge\""));
}

#[test]
fn emission_is_one_pair() {
    let v = json(&["emit", "--eps-max", "3", "--L", "150", "--format", "json"]);
    let total = v["result"]["spectrum"]["total"].as_f64().unwrap();
    assert!(total > 0.99 && total <= 1.0 + 1e-9, "{total}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("diracwell-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# sample\nm = 1\na = 0.5\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&["critical", "--config", c]);
    assert_eq!(v["config"]["a"], 0.5);
    let v = json(&["critical", "--config", c, "--a", "0.7"]);
    assert_eq!(v["config"]["a"], 0.7);
}

#[test]
fn output_file_and_gnuplot() {
    let dir = std::env::temp_dir().join(format!("diracwell-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("levels.csv");
    let p = path.to_str().unwrap();
    let out = run(&["spectrum", "--V", "4", "--points", "5", "--output", p, "--gnuplot"]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().contains("V,parity,index,E"));
    assert!(std::fs::read_to_string(format!("{p}.gp")).unwrap().starts_with("# spectrum"));
}

#[test]
fn deterministic_levinson() {
    let a = run(&["levinson", "--draws", "8", "--seed", "7"]);
    let b = run(&["levinson", "--draws", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_is_a_usage_error() {
    assert_eq!(run(&["critical", "--a=-1"]).status.code(), Some(2));
    assert_eq!(run(&["emit", "--occupation", "half"]).status.code(), Some(2));
    assert_eq!(run(&["critical", "--config", "/nonexistent/diracwell.cfg"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_names_module() {
    let out = run(&["delay", "--V", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[scattering]"));
}
