//! Build the grid and closed-form scaffolds for the circle and audit them.

use std::time::Instant;

use liftbv::scaffold::{audit_scaffold, build_analytic_scaffold, build_generic_scaffold, Scaffold};

fn show(s: &Scaffold, samples: usize) {
    let t0 = Instant::now();
    let r = audit_scaffold(s, samples, 2024);
    println!("{}", r.scaffold);
    println!("  identity residual  {:.3e}", r.identity_residual);
    println!(
        "  C0 estimates       {:.4} -> {:.4} (growth {:.2}%)",
        r.c0_estimates[0],
        r.c0_estimates[1],
        100.0 * r.c0_growth
    );
    println!(
        "  C1 estimates       {:.4} -> {:.4} (growth {:.2}%)",
        r.c1_estimates[0],
        r.c1_estimates[1],
        100.0 * r.c1_growth
    );
    println!("  certified          {:?}", r.certified);
    for f in &r.flags {
        println!("  flag: {f}");
    }
    println!("  took {:.2?}", t0.elapsed());
}

fn main() -> anyhow::Result<()> {
    let grid = build_generic_scaffold("circle", 8, 2.0, Some(0.25))?;
    println!(
        "grid scaffold: {} cubes in W, {} singular members",
        grid.w_cubes().len(),
        grid.members().len()
    );
    show(&grid, 10_000);
    show(&build_analytic_scaffold("circle", 2.0, Some(0.25))?, 10_000);
    show(&build_analytic_scaffold("so3_mod_v4", 2.0, None)?, 2_000);
    Ok(())
}
