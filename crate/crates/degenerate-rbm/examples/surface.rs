use degenerate_rbm::model::analyze;
use degenerate_rbm::specfun::C64;
use degenerate_rbm::surface::SurfaceContext;
use degenerate_rbm::Preset;

fn main() -> degenerate_rbm::Result<()> {
    let (_, c) = analyze(&Preset::Transcendental.params())?;
    let sc = SurfaceContext::new(&c);
    println!("branch points s- = {}, s+ = {}", sc.s_minus, sc.s_plus);
    for s in [C64::new(0.1, 0.5), C64::new(-0.4, 1.2), C64::new(1.3, -0.8)] {
        let (x, y) = sc.uniformize(s);
        println!(
            "s={s:.2}  x={x:.4}  y={y:.4}  K={:.1e}  G={:.6}  in delta: {}",
            sc.kernel(x, y).norm(),
            sc.step_coefficient(s)?,
            sc.membership(s).in_delta()
        );
        println!("    zeta s={:.2} keeps x, eta s={:.2} keeps y", sc.zeta(s), sc.eta(s));
    }
    Ok(())
}
