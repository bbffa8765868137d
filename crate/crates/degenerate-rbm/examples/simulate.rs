use degenerate_rbm::density::nu1;
use degenerate_rbm::laplace::StationaryLaplace;
use degenerate_rbm::simulate::{compare_empirical_boundary, simulate, SimConfig};
use degenerate_rbm::Preset;
use num_complex::Complex64;

fn main() -> degenerate_rbm::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset: Preset = args.next().unwrap_or_else(|| "skew".into()).parse()?;
    let horizon: f64 = args.next().map_or(200.0, |h| h.parse().expect("horizon"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let params = preset.params();
    let mut cfg = SimConfig::new(params.clone()).with_horizon(horizon);
    cfg.seed = seed;
    if let Some(dt) = args.next() {
        cfg.dt = dt.parse().expect("dt");
    }
    let summary = simulate(&cfg)?;
    let lap = StationaryLaplace::new(&params)?;
    println!("{:>6} {:>6} {:>12} {:>12} {:>9}", "x", "y", "estimate", "phi", "z");
    for e in &summary.laplace_grid {
        let exact = lap.phi(Complex64::new(e.x, 0.0), Complex64::new(e.y, 0.0))?.re;
        let z = (e.estimate - exact) / e.stderr;
        println!("{:>6.2} {:>6.2} {:>12.6} {:>12.6} {:>9.3}", e.x, e.y, e.estimate, exact, z);
    }
    let (m1, m2) = lap.boundary_masses();
    println!("local time rates {:.5} {:.5} vs {:.5} {:.5}", summary.total_local_time1, summary.total_local_time2, m1 / 2.0, m2 / 2.0);
    match nu1(&params) {
        Ok(d) => {
            let cmp = compare_empirical_boundary(&summary.boundary_histogram1, &|v| d.eval(v), d.mass())?;
            println!("nu1 histogram: L1 {:.4}, sup|z| {:.2}", cmp.l1, cmp.sup_z);
        }
        Err(e) => println!("nu1 unavailable: {e}"),
    }
    Ok(())
}
