//! Write a sampled field, corrupt one sample and read it back.

use liftbv::field::{ingest, synth, write_field, SampledField};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("vortex.field");
    let mut f = synth::vortex(8)?;
    f.samples[5] = vec![1e9, 0.0];
    write_field(&f, &path)?;
    let g = ingest(&path)?;
    println!("{} samples, {} clamped, sample 5 is now {:?}", g.samples.len(), g.clamped, g.samples[5]);

    let text = std::fs::read_to_string(&path)?.replacen("1000000000 0", "NaN 0", 1);
    match SampledField::parse(&text) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
