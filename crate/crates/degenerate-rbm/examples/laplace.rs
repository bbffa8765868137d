use degenerate_rbm::laplace::StationaryLaplace;
use degenerate_rbm::model::rat;
use degenerate_rbm::specfun::C64;
use degenerate_rbm::{ModelParams, Preset};

fn main() -> degenerate_rbm::Result<()> {
    let preset: Preset = std::env::args().nth(1).unwrap_or_else(|| "symmetric".into()).parse()?;
    let l = StationaryLaplace::new(&preset.params())?;
    println!("{} -> {:?}", preset.name(), l.phi1.case.tag);
    println!("{:>6} {:>14} {:>14}", "y", "phi1(y)", "phi(y,y)");
    for y in [-0.1, -0.5, -1.0, -2.0, -5.0] {
        let z = C64::new(y, 0.0);
        println!("{y:>6} {:>14.10} {:>14.10}", l.phi1(z)?.re, l.phi(z, z)?.re);
    }

    let s = C64::new(0.3, 1.1);
    println!("difference equation residual at {s}: {:.2e}", l.phi1.difference_residual(s)?);
    println!("functional equation residual at {s}: {:.2e}", l.surface_residual(s)?);

    let scaled = ModelParams::new(rat(3, 4), rat(2, 5), rat(3, 2), rat(2, 3), rat(-1, 4), rat(-1, 2));
    let l = StationaryLaplace::new(&scaled)?;
    let z = C64::new(-1.0, 0.0);
    println!("non-normalized: masses {:?}, phi(-1,-1) = {:.10}", l.boundary_masses(), l.phi(z, z)?.re);
    Ok(())
}
