//! Command-line front end: flat key=value configuration, subcommands and
//! exit codes.

pub mod checks;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::density::{nu1, nu2};
use crate::error::{Error, Result};
use crate::laplace::{CaseTag, StationaryLaplace};
use crate::model::{analyze, fmt_rational, parse_rational, ModelParams, Preset, Rational, Trigger, Verdict};
use crate::simulate::{simulate, Estimator, SimConfig};
use crate::specfun::C64;

use checks::{CheckOptions, Status};

/// Accepted configuration keys with a short description.
pub const SCHEMA: &[(&str, &str)] = &[
    ("preset", "symmetric | skew | appendix-r1 | appendix-r2 | transcendental"),
    ("mu1", "drift of the first gap, p/q"),
    ("mu2", "drift of the second gap, p/q"),
    ("sigma1", "noise scale of the first gap, p/q (default 1)"),
    ("sigma2", "noise scale of the second gap, p/q (default 1)"),
    ("r1", "reflection coefficient, p/q"),
    ("r2", "reflection coefficient, p/q"),
    ("output", "output path (stdout when absent)"),
    ("xs", "comma-separated x values for eval-laplace"),
    ("ys", "comma-separated y values for eval-laplace"),
    ("axis", "1 for nu1, 2 for nu2"),
    ("vmax", "right end of the density grid"),
    ("points", "number of density grid points"),
    ("sweep", "number of mu1 values in export-plots"),
    ("dt", "time step"),
    ("horizon", "simulated time"),
    ("burn-in", "discarded initial time (default horizon / 10)"),
    ("paths", "number of independent paths"),
    ("seed", "random seed"),
    ("estimator", "time-average | ensemble"),
    ("bins", "histogram bins"),
    ("blocks", "time blocks for standard errors"),
    ("monte-carlo-horizon", "enables the Monte Carlo checks of validate"),
];

#[derive(Debug, Parser)]
#[command(name = "drbm", version, about = "Stationary distribution of the degenerate reflected Brownian motion in the quadrant")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponents, decoupling constants and differential nature
    Classify(ModelArgs),
    /// CSV of the Laplace transforms on a grid
    EvalLaplace(LaplaceArgs),
    /// CSV of a boundary density with its cumulative mass
    EvalDensity(DensityArgs),
    /// Monte Carlo summary as JSON, histograms as CSV
    Simulate(SimulateArgs),
    /// Runs the invariant suite for one parameter set
    Validate(ValidateArgs),
    /// Boundary densities along the admissible drift sweep
    ExportPlots(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Flat key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Overrides a configuration key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r2: Option<String>,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub xs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ys: Option<String>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long)]
    pub vmax: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long)]
    pub horizon: Option<String>,
    #[arg(long)]
    pub burn_in: Option<String>,
    #[arg(long)]
    pub paths: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub estimator: Option<String>,
    #[arg(long)]
    pub bins: Option<String>,
    #[arg(long)]
    pub blocks: Option<String>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long)]
    pub monte_carlo_horizon: Option<String>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long)]
    pub vmax: Option<String>,
    #[arg(long)]
    pub points: Option<String>,
}

/// Resolved configuration: file, then `--set` overrides, then flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

fn config_error(m: impl Into<String>) -> Error {
    Error::Config(m.into())
}

impl Settings {
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_error(format!("line {}: expected key=value", i + 1)))?;
            s.insert(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, key: &str, value: &str) -> Result<()> {
        if !SCHEMA.iter().any(|(k, _)| *k == key) {
            return Err(config_error(format!("unknown key {key:?}")));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_error(format!("bad value {v:?} for {key}"))),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed(key, default)
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.parsed(key, default)
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        self.parsed(key, default)
    }

    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| config_error(format!("bad number {t:?} in {key}"))))
                .collect(),
        }
    }

    fn rational(&self, key: &str) -> Result<Option<Rational>> {
        self.get(key).map(parse_rational).transpose()
    }

    /// Preset values, then individual keys.
    pub fn params(&self) -> Result<ModelParams> {
        let base = self.get("preset").map(str::parse::<Preset>).transpose()?.map(Preset::params);
        let pick = |key: &str, from: Option<Rational>| -> Result<Rational> {
            self.rational(key)?
                .or(from)
                .ok_or_else(|| config_error(format!("missing {key} (give --{key} or --preset)")))
        };
        let b = base.as_ref();
        let p = ModelParams::new(
            pick("mu1", b.map(|p| p.mu1))?,
            pick("mu2", b.map(|p| p.mu2))?,
            pick("sigma1", Some(b.map_or(Rational::one(), |p| p.sigma1)))?,
            pick("sigma2", Some(b.map_or(Rational::one(), |p| p.sigma2)))?,
            pick("r1", b.map(|p| p.r1))?,
            pick("r2", b.map(|p| p.r2))?,
        );
        if p.sigma1 <= Rational::zero() || p.sigma2 <= Rational::zero() {
            return Err(Error::NonPositiveSigma);
        }
        let report = p.validate();
        if !report.passed() {
            return Err(Error::Hypothesis(report));
        }
        Ok(p)
    }
}

fn settings(model: &ModelArgs, extra: &[(&str, &Option<String>)]) -> Result<Settings> {
    let mut s = match &model.config {
        Some(path) => Settings::parse_file(
            &fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?,
        )?,
        None => Settings::default(),
    };
    for o in &model.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| config_error(format!("expected KEY=VALUE, got {o:?}")))?;
        s.insert(k.trim(), v.trim())?;
    }
    let flags = [
        ("preset", &model.preset),
        ("mu1", &model.mu1),
        ("mu2", &model.mu2),
        ("sigma1", &model.sigma1),
        ("sigma2", &model.sigma2),
        ("r1", &model.r1),
        ("r2", &model.r2),
    ];
    for (k, v) in flags.iter().chain(extra) {
        if let Some(v) = v {
            s.insert(k, v)?;
        }
    }
    if let Some(o) = &model.output {
        s.insert("output", &o.to_string_lossy())?;
    }
    Ok(s)
}

/// Exit status for an error: 2 configuration or hypotheses, 3 unsupported
/// case, 1 anything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::UnknownPreset(_)
        | Error::NonPositiveSigma
        | Error::Hypothesis(_)
        | Error::Config(_) => 2,
        Error::UnsupportedCase(_) => 3,
        _ => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub gamma: Option<String>,
    pub gamma1: Option<String>,
    pub gamma2: Option<String>,
    pub s1: Option<String>,
    pub s2: Option<String>,
    pub verdict: Verdict,
    pub trigger: Trigger,
    pub case: CaseTag,
}

pub fn classify(params: &ModelParams) -> Result<Classification> {
    let (_, c) = analyze(params)?;
    let class = c.classify();
    let tag = crate::laplace::build_case(&c)?.tag;
    let f = |q: Option<Rational>| q.as_ref().map(fmt_rational);
    Ok(Classification {
        gamma: f(c.gamma),
        gamma1: f(c.gamma1),
        gamma2: f(c.gamma2),
        s1: f(c.s1),
        s2: f(c.s2),
        verdict: class.verdict,
        trigger: class.trigger,
        case: tag,
    })
}

pub fn laplace_csv(params: &ModelParams, xs: &[f64], ys: &[f64]) -> Result<String> {
    let l = StationaryLaplace::new(params)?;
    let mut out = String::from("x,y,phi,phi1,phi2\n");
    for &x in xs {
        for &y in ys {
            let (cx, cy) = (C64::new(x, 0.0), C64::new(y, 0.0));
            let phi = l.phi(cx, cy)?.re;
            let p1 = l.phi1(cy)?.re;
            let p2 = l.phi2(cx)?.re;
            writeln!(out, "{x:.16e},{y:.16e},{phi:.16e},{p1:.16e},{p2:.16e}").unwrap();
        }
    }
    Ok(out)
}

/// The drift interval `(lo, hi)` of `mu1` with `mu1 + mu2 = 1` allowed by
/// the recurrence condition.
pub fn admissible_mu1(r1: Rational, r2: Rational) -> (Rational, Rational) {
    let one = Rational::one();
    let (mut lo, mut hi) = (Rational::zero(), one);
    let a = one + r2;
    if a > Rational::zero() {
        lo = lo.max(r2 / a);
    } else if a < Rational::zero() {
        hi = hi.min(r2 / a);
    }
    let b = one + r1;
    if b > Rational::zero() {
        hi = hi.min(one / b);
    }
    (lo, hi)
}

/// Long-format CSV `mu1,v,nu1,mass` over `sweep` interior drifts. Drifts
/// without a density are reported in the second component.
pub fn plot_sweep(params: &ModelParams, sweep: usize, vmax: f64, points: usize) -> Result<(String, Vec<String>)> {
    let n = params.normalize()?;
    let (lo, hi) = admissible_mu1(n.r1, n.r2);
    let mut out = String::from("mu1,v,nu1,mass\n");
    let mut skipped = Vec::new();
    let mut any = false;
    for k in 1..=sweep {
        let mu1 = lo + (hi - lo) * Rational::new(k as i128, sweep as i128 + 1);
        let p = ModelParams::unit(mu1, Rational::one() - mu1, n.r1, n.r2);
        match nu1(&p) {
            Ok(d) => {
                any = true;
                let m = crate::model::to_float(&mu1);
                for (v, f, c) in d.curve(vmax, points)? {
                    writeln!(out, "{m:.16e},{v:.16e},{f:.16e},{c:.16e}").unwrap();
                }
            }
            Err(e @ (Error::UnsupportedCase(_) | Error::Internal(_))) => {
                skipped.push(format!("mu1={}: {e}", fmt_rational(&mu1)))
            }
            Err(e) => return Err(e),
        }
    }
    if !any {
        return Err(Error::UnsupportedCase(format!(
            "none of the {sweep} drifts has a density, e.g. {}",
            skipped.first().map_or("", String::as_str)
        )));
    }
    Ok((out, skipped))
}

fn emit(s: &Settings, text: &str, stdout: &mut dyn std::io::Write) -> Result<()> {
    match s.get("output") {
        Some(p) => fs::write(p, text).map_err(|e| config_error(format!("{p}: {e}"))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Internal(e.to_string())),
    }
}

fn sibling(path: &str, suffix: &str) -> PathBuf {
    let p = Path::new(path);
    let stem = p.file_stem().map_or("summary".into(), |s| s.to_string_lossy().into_owned());
    p.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Runs one command; returns the exit status of a completed run.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> Result<i32> {
    match &cli.command {
        Command::Classify(m) => {
            let s = settings(m, &[])?;
            emit(&s, &json(&classify(&s.params()?)?), stdout)?;
        }
        Command::EvalLaplace(a) => {
            let s = settings(&a.model, &[("xs", &a.xs), ("ys", &a.ys)])?;
            let grid = [-2.0, -1.25, -0.5];
            let csv = laplace_csv(&s.params()?, &s.list("xs", &grid)?, &s.list("ys", &grid)?)?;
            emit(&s, &csv, stdout)?;
        }
        Command::EvalDensity(a) => {
            let s = settings(&a.model, &[("axis", &a.axis), ("vmax", &a.vmax), ("points", &a.points)])?;
            let p = s.params()?;
            let d = match s.usize("axis", 1)? {
                1 => nu1(&p)?,
                2 => nu2(&p)?,
                other => return Err(config_error(format!("axis must be 1 or 2, got {other}"))),
            };
            emit(&s, &d.curve_csv(s.f64("vmax", 20.0)?, s.usize("points", 400)?)?, stdout)?;
        }
        Command::Simulate(a) => {
            let s = settings(
                &a.model,
                &[
                    ("dt", &a.dt),
                    ("horizon", &a.horizon),
                    ("burn-in", &a.burn_in),
                    ("paths", &a.paths),
                    ("seed", &a.seed),
                    ("estimator", &a.estimator),
                    ("bins", &a.bins),
                    ("blocks", &a.blocks),
                ],
            )?;
            let mut cfg = SimConfig::new(s.params()?).with_horizon(s.f64("horizon", 2000.0)?);
            cfg.dt = s.f64("dt", cfg.dt)?;
            cfg.burn_in = s.f64("burn-in", cfg.burn_in)?;
            cfg.paths = s.usize("paths", 1)?;
            cfg.seed = s.u64("seed", 0)?;
            cfg.bins = s.usize("bins", cfg.bins)?;
            cfg.blocks = s.usize("blocks", cfg.blocks)?;
            cfg.estimator = match s.get("estimator").unwrap_or("time-average") {
                "time-average" => Estimator::TimeAverage,
                "ensemble" => Estimator::EnsembleAtHorizon,
                e => return Err(config_error(format!("unknown estimator {e:?}"))),
            };
            let summary = simulate(&cfg)?;
            emit(&s, &json(&summary), stdout)?;
            if let Some(out) = s.get("output") {
                for (h, name) in [(&summary.boundary_histogram1, "hist1"), (&summary.boundary_histogram2, "hist2")] {
                    let path = sibling(out, name);
                    fs::write(&path, h.csv()).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
                }
            }
        }
        Command::Validate(a) => {
            let s = settings(
                &a.model,
                &[("seed", &a.seed), ("dt", &a.dt), ("monte-carlo-horizon", &a.monte_carlo_horizon)],
            )?;
            let opts = CheckOptions {
                seed: s.u64("seed", 7)?,
                dt: s.f64("dt", 1e-4)?,
                monte_carlo_horizon: s.get("monte-carlo-horizon").map(|_| s.f64("monte-carlo-horizon", 0.0)).transpose()?,
            };
            let results = checks::run_all(&s.params()?, &opts)?;
            let mut text = String::new();
            for r in &results {
                writeln!(text, "{}", r.line()).unwrap();
            }
            emit(&s, &text, stdout)?;
            if results.iter().any(|r| r.status == Status::Fail) {
                return Ok(4);
            }
        }
        Command::ExportPlots(a) => {
            let s = settings(&a.model, &[("sweep", &a.sweep), ("vmax", &a.vmax), ("points", &a.points)])?;
            let (csv, skipped) =
                plot_sweep(&s.params()?, s.usize("sweep", 9)?, s.f64("vmax", 20.0)?, s.usize("points", 200)?)?;
            for line in skipped {
                writeln!(stderr, "skipped {line}").ok();
            }
            emit(&s, &csv, stdout)?;
        }
    }
    Ok(0)
}
