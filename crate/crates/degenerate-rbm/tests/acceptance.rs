mod common;

use std::time::Instant;

use degenerate_rbm::cli::checks::{self, Status};
use degenerate_rbm::cli::plot_sweep;
use degenerate_rbm::density::{
    laplace_quadrature_oracle, mittag_leffler_cos, mittag_leffler_cos_closed, mittag_leffler_sin,
    mittag_leffler_sin_closed, nu1,
};
use degenerate_rbm::laplace::{consistency_check, CaseTag, StationaryLaplace};
use degenerate_rbm::model::{analyze, fmt_rational, parse_rational, rat, to_float, ModelParams, Preset};
use degenerate_rbm::simulate::{compare_empirical_boundary, simulate, SimConfig};
use degenerate_rbm::specfun::{decoupling_rational, DecouplingGamma, Representation, ThetaSeries, C64};
use degenerate_rbm::Error;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome { pass: value <= tol, detail: format!("{what} {value:.3e} (tol {tol:.0e})") }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    Outcome { pass: a.pass && b.pass, detail: format!("{}; {}", a.detail, b.detail) }
}

fn random_s(rng: &mut impl Rng, r: f64) -> C64 {
    C64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn kernel() -> Outcome {
    let mut rng = common::rng(101);
    let mut worst: f64 = 0.0;
    for p in Preset::ALL {
        let l = StationaryLaplace::new(&p.params()).unwrap();
        let r = checks::kernel_uniformization(&l, &mut rng);
        worst = worst.max(r.value);
    }
    within(worst, 1e-9, "max |K| / (1 + |s|^4)")
}

fn difference_equation() -> Outcome {
    let mut rng = common::rng(102);
    let mut worst: f64 = 0.0;
    let mut tags = 0;
    for (_, sets) in common::parameter_sets(3) {
        tags += 1;
        for p in sets {
            let l = StationaryLaplace::new(&p).unwrap();
            let mut n = 0;
            while n < 100 {
                if let Ok(r) = l.phi1.difference_residual(random_s(&mut rng, 4.0)) {
                    worst = worst.max(r);
                    n += 1;
                }
            }
        }
    }
    let mut o = within(worst, 1e-9, "max relative residual");
    o.detail += &format!(" over {tags} case tags x 3 sets");
    o
}

fn surface_equation() -> Outcome {
    let mut rng = common::rng(103);
    let mut worst: f64 = 0.0;
    for (_, sets) in common::parameter_sets(3) {
        for p in sets {
            let l = StationaryLaplace::new(&p).unwrap();
            let r = checks::surface_equation(&l, &mut rng);
            worst = worst.max(if r.status == Status::Fail && r.value.is_nan() { f64::INFINITY } else { r.value });
        }
    }
    within(worst, 1e-8, "max relative residual")
}

fn normalization() -> Outcome {
    let mut rng = common::rng(104);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    let mut sets: Vec<ModelParams> = Preset::ALL.iter().map(|p| p.params()).collect();
    sets.extend((0..20).map(|_| common::random_general_params(&mut rng)));
    let z = C64::new(0.0, 0.0);
    for p in sets {
        let l = StationaryLaplace::new(&p).unwrap();
        let (m1, m2) = l.boundary_masses();
        worst = worst.max((l.phi1(z).unwrap().re - m1).abs() / m1);
        worst = worst.max((l.phi2(z).unwrap().re - m2).abs() / m2);
        exact &= l.phi(z, z).unwrap() == C64::new(1.0, 0.0);
    }
    let mut o = within(worst, 1e-12, "max relative error of phi1(0), phi2(0)");
    o.pass &= exact;
    o.detail += if exact { "; phi(0,0) = 1 exactly" } else { "; phi(0,0) != 1" };
    o
}

fn decoupling() -> Outcome {
    let mut rng = common::rng(105);
    let (mut cross, mut asym): (f64, f64) = (0.0, 0.0);
    let mut covered = 0;
    for (_, sets) in common::parameter_sets(3) {
        for p in sets {
            let (_, c) = analyze(&p).unwrap();
            let g = DecouplingGamma::new(&c);
            if let Some(r) = decoupling_rational(&c).unwrap() {
                covered += 1;
                let mut n = 0;
                while n < 100 {
                    let s = random_s(&mut rng, 4.0);
                    let (Ok(a), b) = (g.eval(s), r.eval(s)) else { continue };
                    if b.norm().is_finite() && b.norm() > 1e-8 && b.norm() < 1e8 {
                        cross = cross.max((a - b).norm() / b.norm());
                        n += 1;
                    }
                }
            }
            if let Some(gamma) = c.gamma {
                for theta in [0.0, 0.7, 1.5, -1.0] {
                    let s = C64::from_polar(1e3, theta);
                    let l = g.log_eval(s).unwrap().unwrap();
                    asym = asym.max(((l - 2.0 * to_float(&gamma) * s.ln()).exp() - 1.0).norm());
                }
            }
        }
    }
    let mut o = both(
        within(cross, 1e-11, "Gamma vs rational form"),
        within(asym, 0.05, "|D(s)/s^(2 gamma) - 1| at |s| = 1000"),
    );
    o.detail += &format!(" ({covered} rational sets)");
    o
}

fn consistency() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [Preset::Symmetric, Preset::Skew] {
        let (_, c) = analyze(&p.params()).unwrap();
        worst = worst.max(consistency_check(&c).unwrap());
    }
    within(worst, 1e-9, "relative variation of the ratio (gamma = 3, gamma = -1)")
}

fn theta() -> Outcome {
    let mut duality: f64 = 0.0;
    let mut flat: f64 = 0.0;
    for t in [
        ThetaSeries::theta_a(rat(7, 2), rat(1, 2)),
        ThetaSeries::theta_a(rat(5, 3), rat(1, 3)),
        ThetaSeries::theta_b(rat(1, 2)),
        ThetaSeries::theta_b(rat(2, 3)),
    ] {
        for k in 0..50 {
            let v = 0.05 * 400f64.powf(k as f64 / 49.0);
            let a = t.eval(v, Representation::Direct).unwrap();
            let b = t.eval(v, Representation::PoissonSummed).unwrap();
            duality = duality.max((a - b).abs() / a.abs().max(1.0));
        }
        let f = |v: f64| t.eval(v, Representation::PoissonSummed).unwrap();
        let (h, v0) = (1e-4, 1e-3);
        let d4 = (f(v0 + 2.0 * h) - 4.0 * f(v0 + h) + 6.0 * f(v0) - 4.0 * f(v0 - h) + f(v0 - 2.0 * h)) / h.powi(4);
        flat = flat.max(d4.abs());
    }
    both(within(duality, 1e-10, "direct vs Poisson-summed"), within(flat, 1e-8, "fourth difference at 1e-3"))
}

fn laplace_of_theta() -> Outcome {
    let mut worst: f64 = 0.0;
    for t in [
        ThetaSeries::theta_a(rat(7, 2), rat(1, 2)),
        ThetaSeries::theta_a(rat(5, 3), rat(1, 3)),
        ThetaSeries::theta_b(rat(1, 2)),
        ThetaSeries::theta_b(rat(2, 3)),
    ] {
        let tail = to_float(&t.min_active_rate());
        let tail = if tail > 0.0 { tail } else { 1.0 };
        for y in [-6.0, -3.0, -1.0] {
            let q = laplace_quadrature_oracle(&|v| t.eval(v, Representation::Auto), y, tail).unwrap();
            let c = t.laplace_closed_form(C64::new(y, 0.0)).re;
            worst = worst.max((q - c).abs() / c.abs());
        }
    }
    let mut rng = common::rng(108);
    let mut ml: f64 = 0.0;
    for _ in 0..20 {
        let z = C64::new(rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0));
        let a = rng.random_range(0.1..3.0);
        let c = mittag_leffler_cos_closed(z, a);
        ml = ml.max((mittag_leffler_cos(z, a, 10_000) - c).norm() / c.norm().max(1.0));
        let c = mittag_leffler_sin_closed(z);
        ml = ml.max((mittag_leffler_sin(z, 10_000) - c).norm() / c.norm().max(1.0));
    }
    both(within(worst, 1e-6, "quadrature vs closed form"), within(ml, 1e-4, "Mittag-Leffler partial sums"))
}

fn density_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut mass: f64 = 0.0;
    let mut tags: Vec<CaseTag> = Vec::new();
    for (tag, sets) in common::parameter_sets(3) {
        for p in sets {
            let d = match nu1(&p) {
                Ok(d) => d,
                Err(Error::UnsupportedCase(_)) => continue,
                Err(e) => return Outcome { pass: false, detail: format!("{tag:?}: {e}") },
            };
            let l = StationaryLaplace::new(&p).unwrap();
            for y in [-5.0, -2.0, -1.0, -0.5, -0.1] {
                let b = l.phi1(C64::new(y, 0.0)).unwrap().re;
                worst = worst.max((d.quadrature_laplace(y).unwrap() - b).abs() / b.abs());
            }
            mass = mass.max((d.quadrature_mass().unwrap() - d.mass()).abs() / d.mass());
            if !tags.contains(&tag) {
                tags.push(tag);
            }
        }
    }
    let family = |t: &CaseTag| match t {
        CaseTag::RationalCase => 0,
        CaseTag::GammaPosIntCase => 1,
        CaseTag::Gamma12Case(_) => 2,
        CaseTag::R1MinusOne { .. } => 3,
        CaseTag::R2MinusOne { .. } => 4,
        CaseTag::GeneralCase(_) => 5,
    };
    let mut families: Vec<i32> = tags.iter().map(family).collect();
    families.sort();
    families.dedup();
    let mut o = both(within(worst, 1e-6, "transform"), within(mass, 1e-8, "mass"));
    o.pass &= families == [0, 1, 2, 3, 4];
    o.detail += &format!(" over {} supported tags", tags.len());
    o
}

fn homogeneity() -> Outcome {
    let mut rng = common::rng(110);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = common::random_general_params(&mut rng);
        let l = StationaryLaplace::new(&p).unwrap();
        let s = &l.normalized.scale;
        let (q, a, b) = (to_float(&s.q), to_float(&s.sigma1), to_float(&s.sigma2));
        for _ in 0..20 {
            let x = C64::new(rng.random_range(-3.0..-0.05), 0.0);
            let y = C64::new(rng.random_range(-3.0..-0.05), 0.0);
            let lhs = l.phi(x, y).unwrap();
            let rhs = l.phi_normalized(a * x / q, b * y / q).unwrap();
            worst = worst.max((lhs - rhs).norm() / rhs.norm());
        }
    }
    within(worst, 1e-10, "max relative difference")
}

fn classification() -> Outcome {
    let fixture = include_str!("fixtures/classification.csv");
    let mut wrong = Vec::new();
    let mut n = 0;
    for row in fixture.lines().skip(1) {
        n += 1;
        let f: Vec<&str> = row.split(',').collect();
        let q = |i: usize| parse_rational(f[i]).unwrap();
        let (_, c) = analyze(&ModelParams::new(q(0), q(1), q(2), q(3), q(4), q(5))).unwrap();
        let class = c.classify();
        let got = [
            c.gamma.as_ref().map_or(String::new(), fmt_rational),
            format!("{:?}", class.verdict),
            format!("{:?}", class.trigger),
        ];
        if got[0] != f[6] || got[1] != f[9] || got[2] != f[10] {
            wrong.push(row.to_string());
        }
    }
    Outcome { pass: wrong.is_empty() && n == 15, detail: format!("{}/{n} fixture sets match", n - wrong.len()) }
}

fn monte_carlo() -> Outcome {
    let params = Preset::Skew.params();
    let cfg = SimConfig::new(params.clone());
    let s = simulate(&cfg).unwrap();
    let l = StationaryLaplace::new(&params).unwrap();
    let mut zmax: f64 = 0.0;
    for e in &s.laplace_grid {
        let exact = l.phi(C64::new(e.x, 0.0), C64::new(e.y, 0.0)).unwrap().re;
        zmax = zmax.max((e.estimate - exact).abs() / e.stderr);
    }
    let d = nu1(&params).unwrap();
    let cmp = compare_empirical_boundary(&s.boundary_histogram1, &|v| d.eval(v), d.mass()).unwrap();
    let mut sweep_ok = true;
    for p in [Preset::Skew, Preset::Symmetric] {
        sweep_ok &= plot_sweep(&p.params(), 5, 20.0, 40).is_ok_and(|(csv, skipped)| {
            skipped.is_empty() && csv.lines().skip(1).all(|r| r.split(',').nth(2).unwrap().parse::<f64>().unwrap() >= -1e-12)
        });
    }
    let mut o = both(within(zmax, 3.0, "grid max |z|"), within(cmp.l1, 0.05, "nu1 histogram L1"));
    o.pass &= sweep_ok;
    o.detail += &format!(
        "; sup|z| {:.2}; local time {:.4} vs {:.4}; drift sweep {}",
        cmp.sup_z,
        s.total_local_time1,
        l.boundary_masses().0 / 2.0,
        if sweep_ok { "ok" } else { "failed" }
    );
    o
}

type Criterion = (&'static str, f64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("kernel uniformization", 1.0, kernel),
        ("difference equation", 10.0, difference_equation),
        ("functional equation on the surface", f64::INFINITY, surface_equation),
        ("normalization", f64::INFINITY, normalization),
        ("decoupling cross-form and asymptotics", f64::INFINITY, decoupling),
        ("consistency with reflection form", f64::INFINITY, consistency),
        ("theta duality and flatness", f64::INFINITY, theta),
        ("Laplace of theta and Mittag-Leffler", f64::INFINITY, laplace_of_theta),
        ("density to transform oracle", f64::INFINITY, density_oracle),
        ("homogeneity", f64::INFINITY, homogeneity),
        ("classification fixture", f64::INFINITY, classification),
        ("Monte Carlo end to end", 300.0, monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut o = f();
        let secs = t.elapsed().as_secs_f64();
        if secs > *budget {
            o.pass = false;
            o.detail += &format!("; over the {budget} s budget");
        }
        failed += usize::from(!o.pass);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {} ({secs:.2} s)", i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
