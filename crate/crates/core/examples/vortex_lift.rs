//! Lift the unit-degree vortex at 128² and inspect its jump curve.

use liftbv::field::{run_pipeline, synth, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let cfg = PipelineConfig {
        synthetic: Some("vortex".into()),
        resolution: 128,
        loops: vec![synth::vortex_loop()],
        ..Default::default()
    };
    let run = run_pipeline(&cfg)?;
    let r = &run.report;
    println!("shift {:?}", r.shift);
    println!("jump facets {} labelled {:?}", r.jumps.facets, r.jumps.labels);
    println!("cut length  {:.5}", r.jumps.measure);
    println!("jump part   {:.5} (2pi x length = {:.5})", r.bv.jump, std::f64::consts::TAU * r.jumps.measure);
    println!("ac part     {:.5}", r.bv.ac);
    println!("|Du|        {:.5}", r.field_tv);
    for m in &r.monodromy {
        println!("loop monodromy {} (direct lift: {})", m.from_labels, m.direct);
    }
    for c in &r.checks {
        println!("{:<5} {}", if c.pass { "ok" } else { "FAIL" }, c.name);
    }
    println!("took {} ms", r.elapsed_ms);
    Ok(())
}
