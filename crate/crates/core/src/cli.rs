//! The `mdx` command line.
//!
//! Exit codes: 0 on success, 1 when a solver fails or reports infeasible
//! input, 2 for usage and configuration errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::averaging::dispersion_scan;
use crate::config::RunConfig;
use crate::error::Error;
use crate::fisher::fisher_scan;
use crate::geometry::{figure2_data, geodesic_distance, MetricScale};
use crate::maxent::{solve_multipliers, ConstraintTargets};
use crate::verify::{run_verification, seed_from_env};

#[derive(Debug, Parser)]
#[command(name = "mdx", version, about = "Numerical checks for ensemble-averaged multiplicative Hamiltonians")]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for reports and tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check and write report.json.
    Verify,
    /// Tabulate the ensemble average over a momentum grid into average.csv.
    Average(AverageArgs),
    /// Solve for the density matching two constraint values.
    Maxent(MaxentArgs),
    /// Scan the regulated Fisher metric over cutoffs into fisher.csv.
    Fisher(FisherArgs),
    /// Geodesic distance between two values of beta.
    Geometry(GeometryArgs),
    /// Write figure1.csv and figure2.csv.
    Figures,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    pub p_max: f64,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct MaxentArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: f64,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    /// Comma-separated increasing cutoffs Q.
    #[arg(long, value_delimiter = ',')]
    pub q_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long)]
    pub beta1: f64,
    #[arg(long)]
    pub beta2: f64,
    /// Include the extrapolated Fisher constant in the distance.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::InvalidParams(_) | Error::InsufficientData(_) | Error::UnknownCandidate(_) => 2,
            Error::NonConvergence { .. }
            | Error::DivergenceDetected(_)
            | Error::NoBracket { .. }
            | Error::Infeasible(_)
            | Error::OverflowGuard { .. }
            | Error::RouteMismatch { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Seventeen significant digits, independent of locale.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(tol) = cli.tol {
        config.quadrature.rel_tol = tol;
    }
    if let Command::Fisher(FisherArgs { q_grid: Some(grid), .. }) = &cli.command {
        config.fisher_q_grid = grid.clone();
    }
    config.validate()?;
    Ok(config)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create output directory {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / last })
                .collect()
        }
    }
}

pub fn average_csv(config: &RunConfig, args: &AverageArgs) -> Result<String, Failure> {
    if args.n == 0 || !args.p_min.is_finite() || !args.p_max.is_finite() || args.p_min > args.p_max {
        return Err(usage(format!(
            "momentum range needs finite p-min <= p-max and n >= 1, got [{}, {}] with n = {}",
            args.p_min, args.p_max, args.n
        )));
    }
    let grid = linspace(args.p_min, args.p_max, args.n);
    let rows = dispersion_scan(&grid, &config.model, &config.dist, &config.quadrature)?;
    let mut csv = String::from("p,numeric_beta,numeric_xi,analytic_gamma,eq5_value,convergent\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt_float(r.p),
            fmt_opt(r.numeric_beta),
            fmt_opt(r.numeric_xi),
            fmt_opt(r.analytic_gamma),
            fmt_float(r.sqrt_dispersion),
            r.convergent
        );
    }
    Ok(csv)
}

pub fn fisher_csv(config: &RunConfig, beta: f64) -> Result<String, Failure> {
    let scan = fisher_scan(beta, &config.model, &config.fisher_q_grid, &config.quadrature)?;
    let mut csv = String::from("q,c1_moment,c2_moment,var_q2,g_beta2\n");
    for p in &scan.points {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_float(p.q),
            fmt_float(p.c1_moment),
            fmt_float(p.c2_moment),
            fmt_float(p.var_q2),
            fmt_float(p.g_beta2)
        );
    }
    let _ = writeln!(csv, "limit,,,,{}", fmt_float(scan.limit_c));
    Ok(csv)
}

/// `β ∈ −[0.05, 6]` then `[0.05, 6]`, with `ρ(β)`.
pub fn figure1_csv(config: &RunConfig) -> String {
    let half = linspace(0.05, 6.0, 200);
    let mut csv = String::from("beta,rho\n");
    for b in half.iter().rev().map(|b| -b).chain(half.iter().copied()) {
        let _ = writeln!(csv, "{},{}", fmt_float(b), fmt_float(config.dist.density(b)));
    }
    csv
}

pub fn figure2_csv() -> String {
    let mut csv = String::from("u,beta\n");
    for row in figure2_data(&linspace(-3.0, 3.0, 100)) {
        let _ = writeln!(csv, "{},{}", fmt_float(row.u), fmt_float(row.beta));
    }
    csv
}

#[derive(Serialize)]
struct GeometryOutput {
    beta1: f64,
    beta2: f64,
    u1: f64,
    u2: f64,
    distance: f64,
    metric_constant: f64,
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let config = resolve_config(cli)?;
    let out = &config.output_dir;
    match &cli.command {
        Command::Verify => {
            let report = run_verification(&config, seed_from_env());
            let path = write_output(out, "report.json", &report.to_json())?;
            let s = report.summary;
            println!(
                "{} checks: {} passed, {} failed, {} findings; wrote {}",
                s.total,
                s.passed,
                s.failed,
                s.findings,
                path.display()
            );
            for c in report.checks.iter().filter(|c| c.status == crate::report::Status::Fail) {
                eprintln!("FAIL {}::{} measured {} expected {} tol {}", c.module, c.name, c.measured, c.expected, c.tolerance);
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Average(args) => {
            let path = write_output(out, "average.csv", &average_csv(&config, args)?)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Maxent(args) => {
            let targets = ConstraintTargets::new(args.c1, args.c2)?;
            let solution = solve_multipliers(&targets)?;
            print!("{}", to_json(&solution));
            Ok(0)
        }
        Command::Fisher(args) => {
            let path = write_output(out, "fisher.csv", &fisher_csv(&config, args.beta)?)?;
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Geometry(args) => {
            let distance = geodesic_distance(args.beta1, args.beta2)?;
            let scale = if args.raw {
                let scan = fisher_scan(1.0, &config.model, &config.fisher_q_grid, &config.quadrature)?;
                MetricScale::raw(scan.limit_c)?
            } else {
                MetricScale::NORMALIZED
            };
            let output = GeometryOutput {
                beta1: args.beta1,
                beta2: args.beta2,
                u1: args.beta1.ln(),
                u2: args.beta2.ln(),
                distance: scale.0.sqrt() * distance,
                metric_constant: scale.0,
            };
            print!("{}", to_json(&output));
            Ok(0)
        }
        Command::Figures => {
            let a = write_output(out, "figure1.csv", &figure1_csv(&config))?;
            let b = write_output(out, "figure2.csv", &figure2_csv())?;
            println!("wrote {} and {}", a.display(), b.display());
            Ok(0)
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("mdx: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 0.0, 1), vec![0.0]);
        let g = linspace(0.0, 0.9, 10);
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[9], 0.9);
        assert!((g[6] - 0.6).abs() < 1e-15);
        assert!(linspace(1.0, 2.0, 0).is_empty());
        assert_eq!(linspace(0.0, 1.4, 8)[5], 1.0);
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.25] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(1.25), "1.2500000000000000e0");
    }

    #[test]
    fn average_table() {
        let config = RunConfig::default();
        let csv = average_csv(&config, &AverageArgs { p_min: 0.0, p_max: 1.4, n: 8 }).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        for line in &lines[1..] {
            let cols: Vec<&str> = line.split(',').collect();
            let p: f64 = cols[0].parse().unwrap();
            assert_eq!(cols[5] == "false", p >= 1.0, "{line}");
        }
        assert!(average_csv(&config, &AverageArgs { p_min: 1.0, p_max: 0.0, n: 3 }).is_err());
        assert!(average_csv(&config, &AverageArgs { p_min: 0.0, p_max: 1.0, n: 0 }).is_err());
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(Failure::from(Error::Infeasible("x".into())).code, 1);
        assert_eq!(Failure::from(Error::InvalidParams("x".into())).code, 2);
        assert_eq!(run(["mdx", "bogus"]), 2);
        assert_eq!(run(["mdx", "maxent", "--c1", "1.0", "--c2", "-2.0"]), 1);
        assert_eq!(run(["mdx", "geometry", "--beta1", "0", "--beta2", "1"]), 2);
    }

    #[test]
    fn figure_tables() {
        let f1 = figure1_csv(&RunConfig::default());
        assert_eq!(f1.lines().count(), 401);
        let f2 = figure2_csv();
        assert_eq!(f2.lines().count(), 101);
        assert!(f2.lines().nth(1).unwrap().starts_with("-3.0000000000000000e0,"));
    }
}
