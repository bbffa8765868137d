use degenerate_rbm::model::rat;
use degenerate_rbm::specfun::{Representation, ThetaSeries, C64};

fn main() -> degenerate_rbm::Result<()> {
    let series = [ThetaSeries::theta_a(rat(7, 2), rat(1, 2)), ThetaSeries::theta_b(rat(1, 2))];
    for t in &series {
        println!("{:?}", t.kind);
        for v in [0.05, 0.2, 1.0, 5.0, 20.0] {
            let a = t.eval(v, Representation::Direct)?;
            let b = t.eval(v, Representation::PoissonSummed)?;
            println!("  v={v:<5} direct {a:>22.15e}  poisson {b:>22.15e}");
        }
        println!("  Laplace at y=-1: {:.12}", t.laplace_closed_form(C64::new(-1.0, 0.0)).re);
    }
    Ok(())
}
