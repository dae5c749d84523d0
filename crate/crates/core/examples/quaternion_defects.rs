//! Two defects of a cubic-symmetric frame field whose monodromies do not
//! commute: going around A then B differs from B then A.

use liftbv::field::{run_pipeline, synth, PipelineConfig};

fn main() -> anyhow::Result<()> {
    let (ab, ba) = synth::defect_loops();
    let cfg = PipelineConfig {
        synthetic: Some("two_defect".into()),
        resolution: 32,
        trials: 4,
        loops: vec![ab, ba],
        ..Default::default()
    };
    let run = run_pipeline(&cfg)?;
    let r = &run.report;
    println!("facets {} with labels {:?} (estimated shadow: {})", r.jumps.facets, r.jumps.labels, r.jumps.approximate);
    println!("largest geodesic jump {:.4} against bound {:.4}", r.jumps.max_geodesic_jump, run.lifted.jump_bound);
    for (name, m) in ["A then B", "B then A"].iter().zip(&r.monodromy) {
        println!("{name}: {} (direct lift: {})", m.from_labels, m.direct);
    }
    Ok(())
}
