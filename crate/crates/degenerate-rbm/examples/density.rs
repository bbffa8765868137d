use degenerate_rbm::density::{nu1, nu2};
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    for preset in Preset::ALL {
        let p = preset.params();
        match nu1(&p) {
            Ok(d) => {
                let q = d.quadrature_mass()?;
                println!("{:<15} nu1 mass {:.12} (quadrature {q:.12})", preset.name(), d.mass());
                for v in [0.1, 0.5, 1.0, 2.0, 4.0] {
                    println!("    nu1({v}) = {:.10}", d.eval(v)?);
                }
                let d2 = nu2(&p)?;
                println!("    nu2 mass {:.12}", d2.mass());
            }
            Err(e) => println!("{:<15} {e}", preset.name()),
        }
    }
    Ok(())
}
