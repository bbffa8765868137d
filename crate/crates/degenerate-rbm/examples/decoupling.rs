use degenerate_rbm::model::analyze;
use degenerate_rbm::specfun::{decoupling_rational, DecouplingGamma, C64};
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    for preset in Preset::ALL {
        let (_, c) = analyze(&preset.params())?;
        let g = DecouplingGamma::new(&c);
        let s = C64::new(0.7, 0.9);
        match decoupling_rational(&c)? {
            Some(r) => println!(
                "{:<15} P roots {:?}, Q roots {:?}, eps {}: gamma form {:.12}, rational form {:.12}",
                preset.name(),
                r.p_roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
                r.q_roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
                r.epsilon,
                g.eval(s)?,
                r.eval(s)
            ),
            None => println!("{:<15} no rational decoupling, D({s}) = {:.12}", preset.name(), g.eval(s)?),
        }
    }
    Ok(())
}
