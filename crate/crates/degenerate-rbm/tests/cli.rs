use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn drbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drbm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("drbm-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn classify_skew_flags() {
    let o = drbm(&["classify", "--mu1", "1/4", "--mu2", "3/4", "--r1", "1", "--r2", "-3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "Rational");
    assert_eq!(v["gamma"], "-1");
    let text = stdout(&o);
    let at: Vec<usize> = ["gamma", "gamma1", "gamma2", "s1", "s2", "verdict", "trigger"]
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn density_export_reaches_boundary_mass() {
    let o = drbm(&["eval-density", "--preset", "symmetric", "--vmax", "20", "--points", "400"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("v,nu1,mass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 400);
    let mass: f64 = rows.last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((mass - 2.0).abs() < 1e-8, "{mass}");
    let first = rows[0].split(',').next().unwrap();
    assert_eq!(first.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn validate_skew_passes() {
    let o = drbm(&["validate", "--preset", "skew"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn exit_codes() {
    assert_eq!(drbm(&["classify", "--mu1", "0.25", "--mu2", "3/4", "--r1", "1", "--r2", "-3"]).status.code(), Some(2));
    let o = drbm(&["classify", "--mu1", "1/2", "--mu2", "1/2", "--r1", "-2", "--r2", "-2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("H1"));
    assert_eq!(drbm(&["classify", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(drbm(&["classify", "--preset", "skew", "--set", "colour=red"]).status.code(), Some(2));
    assert_eq!(drbm(&["eval-density", "--preset", "transcendental"]).status.code(), Some(3));
    assert_eq!(drbm(&["export-plots", "--preset", "transcendental"]).status.code(), Some(3));
}

#[test]
fn config_file_overrides_and_flags() {
    let d = scratch("config");
    let cfg = d.join("run.cfg");
    fs::write(&cfg, "# skew drifts\nmu1 = 1/4\nmu2 = 3/4\nr1 = 1\nr2 = -1/2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let a: serde_json::Value = serde_json::from_str(&stdout(&drbm(&["classify", "--config", c]))).unwrap();
    let b: serde_json::Value =
        serde_json::from_str(&stdout(&drbm(&["classify", "--config", c, "--set", "r2=-3"]))).unwrap();
    let f: serde_json::Value =
        serde_json::from_str(&stdout(&drbm(&["classify", "--config", c, "--set", "r2=-1/3", "--r2", "-3"]))).unwrap();
    assert_ne!(a["gamma"], "-1");
    assert_eq!(b["gamma"], "-1");
    assert_eq!(f["gamma"], "-1");
}

#[test]
fn laplace_grid_csv() {
    let o = drbm(&["eval-laplace", "--preset", "skew", "--xs", "-1,-0.5", "--ys", "-2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,y,phi,phi1,phi2"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn simulate_writes_summary_and_histograms_deterministically() {
    let d = scratch("sim");
    let out = d.join("sim.json");
    let args = ["simulate", "--preset", "skew", "--horizon", "20", "--seed", "3", "-o", out.to_str().unwrap()];
    assert_eq!(drbm(&args).status.code(), Some(0));
    let first = fs::read_to_string(&out).unwrap();
    assert_eq!(drbm(&args).status.code(), Some(0));
    assert_eq!(first, fs::read_to_string(&out).unwrap());
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["laplace_grid"].as_array().unwrap().len(), 9);
    let h = fs::read_to_string(d.join("sim_hist1.csv")).unwrap();
    assert_eq!(h.lines().count(), 201);
    assert!(d.join("sim_hist2.csv").exists());
}

#[test]
fn plot_sweep_covers_admissible_drifts() {
    let o = drbm(&["export-plots", "--preset", "symmetric", "--sweep", "5", "--points", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut mus: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    mus.dedup();
    assert!(mus.len() >= 4, "{mus:?}");
}
