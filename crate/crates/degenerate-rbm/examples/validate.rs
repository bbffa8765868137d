use degenerate_rbm::cli::checks::{run_all, CheckOptions};
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    let preset: Preset = std::env::args().nth(1).unwrap_or_else(|| "skew".into()).parse()?;
    let opts = CheckOptions { monte_carlo_horizon: std::env::args().nth(2).map(|h| h.parse().expect("horizon")), ..Default::default() };
    for r in run_all(&preset.params(), &opts)? {
        println!("{}", r.line());
    }
    Ok(())
}
