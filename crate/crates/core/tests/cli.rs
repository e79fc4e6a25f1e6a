use std::path::Path;
use std::process::{Command, Output};

fn mdx(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdx"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("MDX_SEED")
        .output()
        .expect("run mdx")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn verify_writes_deterministic_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = mdx(a.path(), &["verify"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(mdx(b.path(), &["verify"]).status.code(), Some(0));
    // Reports differ only in the output directory they record.
    let load = |dir: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&read(&dir.join("report.json"))).unwrap();
        v["config"].as_object_mut().unwrap().remove("output_dir");
        v
    };
    let v = load(a.path());
    assert_eq!(v, load(b.path()));
    assert_eq!(v["seed"], 42);
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["summary"]["findings"].as_u64().unwrap() >= 3);
}

#[test]
fn invalid_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"dist":{"nu":0.5,"gamma":1.0,"c3":1.0}}"#).unwrap();
    let out = mdx(dir.path(), &["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"unknown":1}"#).unwrap();
    assert_eq!(mdx(dir.path(), &["--config", cfg.to_str().unwrap(), "verify"]).status.code(), Some(2));
    assert_eq!(mdx(dir.path(), &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn average_table_has_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdx(dir.path(), &["average", "--p-min", "0", "--p-max", "1.2", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = read(&dir.path().join("average.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,numeric_beta,numeric_xi,analytic_gamma,eq5_value,convergent"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][5], "true");
    assert_eq!(rows[4][5], "false");
    assert_eq!(rows[4][1], "");
    let eq5: f64 = rows[4][4].parse().unwrap();
    assert!((eq5 - 2.44f64.sqrt()).abs() < 1e-15);
    assert_eq!(mdx(dir.path(), &["average", "--p-min", "1", "--p-max", "0"]).status.code(), Some(2));
}

#[test]
fn maxent_reports_solution_or_infeasibility() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdx(dir.path(), &["maxent", "--c1", "1.5", "--c2", "-0.0182450"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["nu"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert!((v["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(mdx(dir.path(), &["maxent", "--c1", "1", "--c2", "-1"]).status.code(), Some(1));
}

#[test]
fn fisher_scan_ends_with_limit_row() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mdx(dir.path(), &["fisher"]).status.code(), Some(0));
    let csv = read(&dir.path().join("fisher.csv"));
    let last = csv.lines().last().unwrap();
    let c: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(last.starts_with("limit,"));
    assert!((c - 4.0).abs() < 1e-3);
    assert_eq!(mdx(dir.path(), &["fisher", "--q-grid", "10,30"]).status.code(), Some(2));
    assert_eq!(mdx(dir.path(), &["fisher", "--q-grid", "14,10"]).status.code(), Some(2));
}

#[test]
fn geometry_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = mdx(dir.path(), &["geometry", "--beta1", "1", "--beta2", "7.38905609893065"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["distance"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(mdx(dir.path(), &["geometry", "--beta1", "0", "--beta2", "1"]).status.code(), Some(2));

    assert_eq!(mdx(dir.path(), &["figures"]).status.code(), Some(0));
    let f1 = read(&dir.path().join("figure1.csv"));
    let f2 = read(&dir.path().join("figure2.csv"));
    assert!(f1.lines().count() > 100);
    assert!(f2.lines().count() > 50);
}
