use degenerate_rbm::cli::{admissible_mu1, plot_sweep};
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    let preset: Preset = std::env::args().nth(1).unwrap_or_else(|| "symmetric".into()).parse()?;
    let p = preset.params();
    let (lo, hi) = admissible_mu1(p.r1, p.r2);
    eprintln!("mu1 in ({lo}, {hi})");
    let (csv, skipped) = plot_sweep(&p, 7, 10.0, 100)?;
    for s in skipped {
        eprintln!("skipped {s}");
    }
    let path = std::env::temp_dir().join(format!("nu1_sweep_{}.csv", preset.name()));
    std::fs::write(&path, csv).expect("writable temp dir");
    eprintln!("wrote {}", path.display());
    Ok(())
}
