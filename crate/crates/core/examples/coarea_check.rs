//! The coarea inequality for straight-line homotopies of affine maps.

use liftbv::transversal::{coarea_bound_check, random_coarea_checks};

fn main() -> anyhow::Result<()> {
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let r = coarea_bound_check(&id, &[0.0, 0.0], &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], 200)?;
    println!("identity map: {:.4} <= {:.4}", r.lhs, r.rhs);
    for (d, res) in [(2, 64), (3, 24)] {
        let all = random_coarea_checks(d, 20, 1, res)?;
        let worst = all
            .iter()
            .map(|i| i.check.lhs / i.check.rhs)
            .fold(0.0, f64::max);
        let held = all.iter().filter(|i| i.check.holds).count();
        println!("d = {d}: {held}/{} hold, largest lhs/rhs {worst:.3}", all.len());
    }
    Ok(())
}
