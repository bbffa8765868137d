//! Invariant suite run by `validate` on a single parameter set.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::density::{
    laplace_quadrature_oracle, mittag_leffler_cos, mittag_leffler_cos_closed, mittag_leffler_sin,
    mittag_leffler_sin_closed, nu1, nu2, DensityForm, LateralDensity,
};
use crate::error::{Error, Result};
use crate::laplace::{consistency_check, StationaryLaplace};
use crate::model::{analyze, rat, to_float, ModelParams, Verdict};
use crate::simulate::{compare_empirical_boundary, simulate, SimConfig};
use crate::specfun::{decoupling_rational, DecouplingGamma, Representation, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &'static str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        let status = if value <= tolerance { Status::Pass } else { Status::Fail };
        CheckResult { name, status, value, tolerance, detail: detail.into() }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        CheckResult { name, status: Status::Skipped, value: f64::NAN, tolerance: f64::NAN, detail: detail.into() }
    }

    fn error(name: &'static str, e: Error) -> Self {
        CheckResult { name, status: Status::Fail, value: f64::NAN, tolerance: f64::NAN, detail: e.to_string() }
    }

    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => return format!("SKIP {:<24} {}", self.name, self.detail),
        };
        format!("{tag} {:<24} value={:.3e} tol={:.1e} {}", self.name, self.value, self.tolerance, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    pub monte_carlo_horizon: Option<f64>,
    pub dt: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: 7, monte_carlo_horizon: None, dt: 1e-4 }
    }
}

fn random_s(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn wrap(name: &'static str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| CheckResult::error(name, e))
}

pub fn kernel_uniformization(l: &StationaryLaplace, rng: &mut ChaCha8Rng) -> CheckResult {
    let sc = l.phi1.surface;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = loop {
            let s = random_s(rng, 10.0);
            if s.norm() <= 10.0 {
                break s;
            }
        };
        let (x, y) = sc.uniformize(s);
        worst = worst.max(sc.kernel(x, y).norm() / (1.0 + s.norm().powi(4)));
    }
    CheckResult::measured("kernel-uniformization", worst, 1e-9, "1000 points, |s| <= 10")
}

pub fn difference_equation(l: &StationaryLaplace, rng: &mut ChaCha8Rng) -> CheckResult {
    wrap("difference-equation", || {
        let sc = l.phi1.surface;
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 100 {
            let s = random_s(rng, 4.0);
            let (Ok(r), Ok(a), Ok(b)) = (
                l.phi1.difference_residual(s),
                l.phi1.unnormalized(s),
                l.phi1.unnormalized(sc.eta(s)),
            ) else {
                continue;
            };
            n += 1;
            worst = worst.max(r).max((a - b).norm() / a.norm());
        }
        Ok(CheckResult::measured("difference-equation", worst, 1e-9, format!("{:?}", l.phi1.case.tag)))
    })
}

pub fn surface_equation(l: &StationaryLaplace, rng: &mut ChaCha8Rng) -> CheckResult {
    wrap("surface-equation", || {
        let sc = l.phi1.surface;
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 200 {
            let s = random_s(rng, 2.0);
            if sc.membership(s).in_delta() {
                n += 1;
                worst = worst.max(l.surface_residual(s)?);
            }
        }
        Ok(CheckResult::measured("surface-equation", worst, 1e-8, "200 points in the strip intersection"))
    })
}

pub fn normalization(l: &StationaryLaplace) -> CheckResult {
    wrap("normalization", || {
        let z = C64::new(0.0, 0.0);
        let (m1, m2) = l.boundary_masses();
        let e1 = (l.phi1(z)?.re - m1).abs() / m1;
        let e2 = (l.phi2(z)?.re - m2).abs() / m2;
        if l.phi(z, z)? != C64::new(1.0, 0.0) {
            return Ok(CheckResult::measured("normalization", f64::INFINITY, 1e-12, "phi(0,0) != 1"));
        }
        Ok(CheckResult::measured("normalization", e1.max(e2), 1e-12, format!("masses {m1} {m2}")))
    })
}

pub fn decoupling_forms(params: &ModelParams, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let (_, c) = match analyze(params) {
        Ok(v) => v,
        Err(e) => return vec![CheckResult::error("decoupling-cross-form", e)],
    };
    let g = DecouplingGamma::new(&c);
    let cross = wrap("decoupling-cross-form", || {
        let Some(r) = decoupling_rational(&c)? else {
            return Ok(CheckResult::skipped("decoupling-cross-form", "no rational decoupling"));
        };
        let mut worst: f64 = 0.0;
        let mut n = 0;
        while n < 100 {
            let s = random_s(rng, 4.0);
            let (Ok(a), b) = (g.eval(s), r.eval(s)) else { continue };
            if !(b.norm().is_finite() && b.norm() > 1e-8 && b.norm() < 1e8) {
                continue;
            }
            n += 1;
            worst = worst.max((a - b).norm() / b.norm());
        }
        Ok(CheckResult::measured("decoupling-cross-form", worst, 1e-11, "Gamma quotient vs rational form"))
    });
    let asym = wrap("decoupling-asymptotics", || {
        let Some(gamma) = c.gamma else {
            return Ok(CheckResult::skipped("decoupling-asymptotics", "gamma undefined for r = -1"));
        };
        let gamma = to_float(&gamma);
        let mut worst: f64 = 0.0;
        for theta in [0.0, PI / 4.0, PI / 2.0, -PI / 3.0] {
            let s = C64::from_polar(1e3, theta);
            let l = g.log_eval(s)?.ok_or_else(|| Error::Internal("zero of D".into()))?;
            worst = worst.max(((l - 2.0 * gamma * s.ln()).exp() - 1.0).norm());
        }
        Ok(CheckResult::measured("decoupling-asymptotics", worst, 0.05, "D(s) / s^(2 gamma) at |s| = 1000"))
    });
    vec![cross, asym]
}

pub fn consistency(params: &ModelParams) -> CheckResult {
    wrap("consistency", || {
        let (_, c) = analyze(params)?;
        match consistency_check(&c) {
            Ok(v) => Ok(CheckResult::measured("consistency", v, 1e-9, "special vs reflection form")),
            Err(Error::Precondition(m)) => Ok(CheckResult::skipped("consistency", m)),
            Err(e) => Err(e),
        }
    })
}

fn theta_of(d: &LateralDensity) -> Option<&crate::density::ThetaOperatorSeries> {
    match &d.normalized.form {
        DensityForm::Theta(t) => Some(t),
        DensityForm::Exponential(_) => None,
    }
}

pub fn theta_checks(d: Option<&LateralDensity>) -> Vec<CheckResult> {
    let Some(t) = d.and_then(theta_of) else {
        return vec![
            CheckResult::skipped("theta-duality", "no theta-type density"),
            CheckResult::skipped("theta-flatness", "no theta-type density"),
            CheckResult::skipped("theta-laplace", "no theta-type density"),
        ];
    };
    let s = &t.series;
    let duality = wrap("theta-duality", || {
        let mut worst: f64 = 0.0;
        for k in 0..50 {
            let v = 0.05 * 400f64.powf(k as f64 / 49.0);
            let a = s.eval(v, Representation::Direct)?;
            let b = s.eval(v, Representation::PoissonSummed)?;
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        Ok(CheckResult::measured("theta-duality", worst, 1e-10, format!("{:?}", s.kind)))
    });
    let flat = wrap("theta-flatness", || {
        let h = 1e-4;
        let f = |v: f64| s.eval(v, Representation::PoissonSummed);
        let v0 = 1e-3;
        let d4 = (f(v0 + 2.0 * h)? - 4.0 * f(v0 + h)? + 6.0 * f(v0)? - 4.0 * f(v0 - h)? + f(v0 - 2.0 * h)?) / h.powi(4);
        Ok(CheckResult::measured("theta-flatness", d4.abs(), 1e-8, "fourth difference at v = 1e-3"))
    });
    let lap = wrap("theta-laplace", || {
        let tail = to_float(&s.min_active_rate());
        let tail = if tail > 0.0 { tail } else { 1.0 };
        let mut worst: f64 = 0.0;
        for y in [-6.0, -3.0, -1.0] {
            let q = laplace_quadrature_oracle(&|v| s.eval(v, Representation::Auto), y, tail)?;
            let c = s.laplace_with_operator(C64::new(y, 0.0)).re;
            worst = worst.max((q - c).abs() / c.abs());
        }
        Ok(CheckResult::measured("theta-laplace", worst, 1e-6, "quadrature vs closed form"))
    });
    vec![duality, flat, lap]
}

pub fn mittag_leffler(rng: &mut ChaCha8Rng) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let z = C64::new(rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0));
        let a = rng.random_range(0.1..3.0);
        let c = mittag_leffler_cos_closed(z, a);
        worst = worst.max((mittag_leffler_cos(z, a, 10_000) - c).norm() / c.norm().max(1.0));
        let c = mittag_leffler_sin_closed(z);
        worst = worst.max((mittag_leffler_sin(z, 10_000) - c).norm() / c.norm().max(1.0));
    }
    CheckResult::measured("mittag-leffler", worst, 1e-4, "partial sums with N = 10^4")
}

fn density_oracle(name: &'static str, d: Result<LateralDensity>, phi: impl Fn(f64) -> Result<f64>) -> CheckResult {
    let d = match d {
        Ok(d) => d,
        Err(Error::UnsupportedCase(m)) => return CheckResult::skipped(name, m),
        Err(e) => return CheckResult::error(name, e),
    };
    wrap(name, || {
        let mut worst: f64 = 0.0;
        for y in [-5.0, -2.0, -1.0, -0.5, -0.1] {
            let b = phi(y)?;
            worst = worst.max((d.quadrature_laplace(y)? - b).abs() / b.abs());
        }
        let mass = (d.quadrature_mass()? - d.mass()).abs() / d.mass();
        if mass > 1e-8 {
            return Ok(CheckResult::measured(name, mass, 1e-8, "total mass"));
        }
        Ok(CheckResult::measured(name, worst, 1e-6, format!("mass error {mass:.1e}")))
    })
}

pub fn homogeneity(params: &ModelParams, rng: &mut ChaCha8Rng) -> CheckResult {
    wrap("homogeneity", || {
        let (s1, s2, k) = (rat(3, 2), rat(2, 3), rat(7, 5));
        let n = params.normalize()?;
        let scaled = ModelParams::new(n.mu1 * k * s1, n.mu2 * k * s2, s1, s2, n.r1 * s2 / s1, n.r2 * s1 / s2);
        let mut worst: f64 = 0.0;
        for p in [params.clone(), scaled] {
            let l = StationaryLaplace::new(&p)?;
            let sc = &l.normalized.scale;
            let (q, a, b) = (to_float(&sc.q), to_float(&sc.sigma1), to_float(&sc.sigma2));
            for _ in 0..20 {
                let x = C64::new(rng.random_range(-3.0..-0.05), 0.0);
                let y = C64::new(rng.random_range(-3.0..-0.05), 0.0);
                let lhs = l.phi(x, y)?;
                let rhs = l.phi_normalized(a * x / q, b * y / q)?;
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
        }
        Ok(CheckResult::measured("homogeneity", worst, 1e-10, "given and rescaled parameters"))
    })
}

pub fn classification(params: &ModelParams) -> CheckResult {
    wrap("classification", || {
        let (_, c) = analyze(params)?;
        let class = c.classify();
        let rational = decoupling_rational(&c)?.is_some();
        let neg_int = c.gamma.is_some_and(|g| g.is_integer() && g < rat(0, 1));
        let expected = match (rational, neg_int) {
            (true, true) => Verdict::Rational,
            (true, false) => Verdict::DAlgebraicNotDFinite,
            (false, _) => Verdict::DTranscendental,
        };
        let ok = expected == class.verdict;
        Ok(CheckResult {
            name: "classification",
            status: if ok { Status::Pass } else { Status::Fail },
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: format!("{:?} via {:?}", class.verdict, class.trigger),
        })
    })
}

pub fn monte_carlo(params: &ModelParams, l: &StationaryLaplace, opts: &CheckOptions) -> Vec<CheckResult> {
    let Some(horizon) = opts.monte_carlo_horizon else {
        return vec![
            CheckResult::skipped("monte-carlo-laplace", "enable with monte-carlo-horizon"),
            CheckResult::skipped("monte-carlo-boundary", "enable with monte-carlo-horizon"),
        ];
    };
    let mut cfg = SimConfig::new(params.clone()).with_horizon(horizon);
    cfg.dt = opts.dt;
    cfg.seed = opts.seed;
    let summary = match simulate(&cfg) {
        Ok(s) => s,
        Err(e) => return vec![CheckResult::error("monte-carlo-laplace", e)],
    };
    let grid = wrap("monte-carlo-laplace", || {
        let mut worst: f64 = 0.0;
        for e in &summary.laplace_grid {
            let exact = l.phi(C64::new(e.x, 0.0), C64::new(e.y, 0.0))?.re;
            worst = worst.max((e.estimate - exact).abs() / e.stderr);
        }
        Ok(CheckResult::measured("monte-carlo-laplace", worst, 3.0, "max |z| over the grid"))
    });
    let boundary = match nu1(params) {
        Ok(d) => wrap("monte-carlo-boundary", || {
            let cmp = compare_empirical_boundary(&summary.boundary_histogram1, &|v| d.eval(v), d.mass())?;
            Ok(CheckResult::measured("monte-carlo-boundary", cmp.l1, 0.05, format!("L1, sup|z| {:.2}", cmp.sup_z)))
        }),
        Err(Error::UnsupportedCase(m)) => CheckResult::skipped("monte-carlo-boundary", m),
        Err(e) => CheckResult::error("monte-carlo-boundary", e),
    };
    vec![grid, boundary]
}

/// Every check for one parameter set, in a fixed order.
pub fn run_all(params: &ModelParams, opts: &CheckOptions) -> Result<Vec<CheckResult>> {
    let l = StationaryLaplace::new(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = vec![
        kernel_uniformization(&l, &mut rng),
        difference_equation(&l, &mut rng),
        surface_equation(&l, &mut rng),
        normalization(&l),
    ];
    out.extend(decoupling_forms(params, &mut rng));
    out.push(consistency(params));
    let d1 = nu1(params);
    out.extend(theta_checks(d1.as_ref().ok()));
    out.push(mittag_leffler(&mut rng));
    out.push(density_oracle("density-oracle-nu1", d1, |y| Ok(l.phi1(C64::new(y, 0.0))?.re)));
    out.push(density_oracle("density-oracle-nu2", nu2(params), |x| Ok(l.phi2(C64::new(x, 0.0))?.re)));
    out.push(homogeneity(params, &mut rng));
    out.push(classification(params));
    out.extend(monte_carlo(params, &l, opts));
    Ok(out)
}
