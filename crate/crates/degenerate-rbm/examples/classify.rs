use degenerate_rbm::cli::classify;
use degenerate_rbm::model::{parse_rational, ModelParams};
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let sets: Vec<(String, ModelParams)> = if args.len() == 4 {
        let q: Vec<_> = args.iter().map(|a| parse_rational(a)).collect::<Result<_, _>>()?;
        vec![(args.join(" "), ModelParams::unit(q[0], q[1], q[2], q[3]))]
    } else {
        Preset::ALL.iter().map(|p| (p.name().to_string(), p.params())).collect()
    };
    for (name, p) in sets {
        let c = classify(&p)?;
        println!(
            "{name:<16} gamma={:<6} gamma1={:<6} gamma2={:<6} {:?} ({:?})",
            c.gamma.unwrap_or("-".into()),
            c.gamma1.unwrap_or("-".into()),
            c.gamma2.unwrap_or("-".into()),
            c.verdict,
            c.trigger
        );
    }
    Ok(())
}
