//! A zero-winding field has no jumps: its lifting variation equals the
//! integral of the angle gradient.

use liftbv::field::{refinement_study, synth, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let cfg = PipelineConfig {
        synthetic: Some("smooth".into()),
        trials: 4,
        ..Default::default()
    };
    let exact = synth::smooth_gradient_integral();
    let (levels, change) = refinement_study(&cfg, &[16, 32, 64])?;
    for l in &levels {
        println!(
            "{:>4}²  |Dv| {:.6}  jump {:.1e}  error {:.3}%",
            l.resolution,
            l.total,
            l.jump,
            100.0 * (l.total - exact).abs() / exact
        );
    }
    println!("closed form {exact:.6}, change between last two levels {:.4}%", 100.0 * change);
    Ok(())
}
