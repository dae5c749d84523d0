//! Acceptance criteria. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use liftbv::covers::{self, DeckElement, Q8};
use liftbv::error::LiftError;
use liftbv::field::{interpolate_pa, run_pipeline, standard_suite, synth, PipelineConfig, PipelineRun};
use liftbv::lift::{
    direct_monodromy, lift_vertices, loop_monodromy, sbv_check, JumpFacet, PathOpts,
};
use liftbv::polygeom::linalg::dist;
use liftbv::scaffold::{
    arclength, audit_scaffold, build_analytic_scaffold, build_generic_scaffold,
};
use liftbv::transversal::{
    averaged_bounds_doubling, coarea_bound_check, random_coarea_checks, relative_change,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn retraction_audit() -> Outcome {
    let start = Instant::now();
    let s = build_generic_scaffold("circle", 8, 2.0, None).map_err(err)?;
    let r = audit_scaffold(&s, 10_000, 1);
    let secs = start.elapsed().as_secs_f64();
    ensure(
        r.identity_residual <= 1e-9 && r.c0_growth < 0.05 && r.c1_growth < 0.05 && secs < 30.0,
        format!(
            "identity residual {:.2e}, C0 change {:.2}%, C1 change {:.2}%, {secs:.1}s",
            r.identity_residual,
            100.0 * r.c0_growth,
            100.0 * r.c1_growth
        ),
    )
}

fn segment_image_bound() -> Outcome {
    let s = build_analytic_scaffold("circle", 2.0, None).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        worst = worst.max(arclength(&s, &a, &b, 1e-6).map_err(err)?);
    }
    let g = build_generic_scaffold("circle", 8, 2.0, None).map_err(err)?;
    let r = audit_scaffold(&g, 10_000, 1);
    let audited = r.c1_estimates[0].max(r.c1_estimates[1]);
    ensure(
        worst <= PI + 1e-3 && audited <= r.certified.c1,
        format!(
            "analytic max length {worst:.6} (pi + 1e-3 = {:.6}); generic audited {audited:.4} <= certified {:.4}",
            PI + 1e-3,
            r.certified.c1
        ),
    )
}

fn coarea_oracle() -> Outcome {
    let start = Instant::now();
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let base = coarea_bound_check(&id, &[0.0, 0.0], &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], 200)
        .map_err(err)?;
    let mut held = 0;
    for (d, res) in [(2, 64), (3, 24)] {
        held += random_coarea_checks(d, 100, 5, res)
            .map_err(err)?
            .iter()
            .filter(|i| i.check.holds)
            .count();
    }
    let secs = start.elapsed().as_secs_f64();
    let near = (base.lhs - 1.5304).abs() <= 1e-2 && (base.rhs - 8.657).abs() <= 1e-2;
    ensure(
        base.holds && near && held == 200 && secs < 120.0,
        format!(
            "identity lhs {:.4} rhs {:.4}; {held}/200 random maps hold; {secs:.1}s",
            base.lhs, base.rhs
        ),
    )
}

fn averaged_bounds() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for cfg in standard_suite() {
        let field = liftbv::field::load_field(&cfg).map_err(err)?;
        let target = covers::target(&field.header.target).map_err(err)?;
        let s = liftbv::field::build_scaffold(&cfg, &field.header.target).map_err(err)?;
        if !s.is_polyhedral() {
            continue;
        }
        let (u, _) = interpolate_pa(&field).map_err(err)?;
        let anchor = liftbv::lift::default_anchor(&u, target).map_err(err)?;
        let (half, full) = averaged_bounds_doubling(&u, &anchor, &s, 200, 7).map_err(err)?;
        let dg = relative_change(half.grad_ratio, full.grad_ratio);
        let dt = relative_change(half.t_ratio, full.t_ratio);
        ok &= half.holds && full.holds && dg <= 0.1 && dt <= 0.1;
        details.push(format!(
            "{} grad {:.3}/{:.1} shadow {:.3}/{:.1} (doubling {:.1}%, {:.1}%)",
            cfg.synthetic.as_deref().unwrap_or("?"),
            full.grad_ratio,
            full.grad_bound,
            full.t_ratio,
            full.shadow_bound.unwrap_or(f64::NAN),
            100.0 * dg,
            100.0 * dt
        ));
    }
    ensure(ok, details.join("; "))
}

fn nontrivial(target: &str) -> DeckElement {
    match target {
        "circle" => DeckElement::Lattice(vec![1]),
        "clifford_torus" => DeckElement::Lattice(vec![1, -2]),
        _ => DeckElement::Unit(Q8 { neg: false, axis: 1 }),
    }
}

fn lifting_identity(runs: &[(PipelineConfig, PipelineRun)]) -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_step: f64 = 0.0;
    let mut anchors_ok = true;
    for (_, run) in runs {
        let lf = &run.lifted;
        let s = &run.scaffold;
        let t = s.target();
        let (u, _) = interpolate_pa(&run.field).map_err(err)?;
        worst_res = worst_res.max(lf.residual);
        let coarse = lift_vertices(&u, s, &lf.shift, &lf.anchor, &lf.anchor_lift, PathOpts::default())
            .map_err(err)?;
        let fine_opts = PathOpts {
            max_step: PathOpts::default().max_step / 2.0,
            ..Default::default()
        };
        let fine = lift_vertices(&u, s, &lf.shift, &lf.anchor, &lf.anchor_lift, fine_opts)
            .map_err(err)?;
        for (a, b) in coarse.iter().zip(&fine) {
            worst_step = worst_step.max(t.dist_cover(a, b));
        }
        let g = nontrivial(t.id());
        let other = t.apply(&g, &lf.anchor_lift);
        let moved = lift_vertices(&u, s, &lf.shift, &lf.anchor, &other, PathOpts::default())
            .map_err(err)?;
        for (a, b) in coarse.iter().zip(&moved) {
            anchors_ok &= t.deck_identify(a, b).map_err(err)? == g;
        }
    }
    ensure(
        worst_res <= 1e-6 && worst_step < 1e-8 && anchors_ok,
        format!(
            "{} runs: sup residual {worst_res:.2e}, step-halving change {worst_step:.2e}, anchor change global: {anchors_ok}",
            runs.len()
        ),
    )
}

/// Number of connected components of a set of segment facets.
fn components(facets: &[JumpFacet]) -> usize {
    let n = facets.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let touch = facets[i]
                .vertices
                .iter()
                .any(|a| facets[j].vertices.iter().any(|b| dist(a, b) < 1e-8));
            if touch {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

fn vortex_end_to_end() -> Outcome {
    let start = Instant::now();
    let cfg = PipelineConfig {
        synthetic: Some("vortex".into()),
        resolution: 128,
        ..Default::default()
    };
    let run = run_pipeline(&cfg).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let lf = &run.lifted;
    let labels_ok = lf.facets.iter().all(|f| f.label == DeckElement::Lattice(vec![1]));
    let curves = components(&lf.facets);
    let length: f64 = lf.facets.iter().map(|f| f.measure).sum();
    let predicted = 2.0 * PI * length;
    let rel = (lf.bv.jump - predicted).abs() / predicted;
    let c = run.scaffold.constants.measure_bound.unwrap_or(f64::NAN);
    let bound = c * run.report.field_tv;
    ensure(
        labels_ok && curves == 1 && rel <= 0.05 && lf.bv.total <= bound && secs < 120.0,
        format!(
            "{curves} curve(s), labels generator: {labels_ok}, jump {:.4} vs 2pi*{length:.4} ({:.2}%), |Dv| {:.3} <= {bound:.1}, {secs:.1}s",
            lf.bv.jump,
            100.0 * rel,
            lf.bv.total
        ),
    )
}

fn smooth_control() -> Outcome {
    let cfg = PipelineConfig {
        synthetic: Some("smooth".into()),
        resolution: 64,
        ..Default::default()
    };
    let run = run_pipeline(&cfg).map_err(err)?;
    let want = synth::smooth_gradient_integral();
    let rel = (run.lifted.bv.total - want).abs() / want;
    ensure(
        run.lifted.facets.is_empty() && rel <= 0.02,
        format!(
            "{} jump facets, |Dv| {:.5} vs closed form {want:.5} ({:.3}%)",
            run.lifted.facets.len(),
            run.lifted.bv.total,
            100.0 * rel
        ),
    )
}

fn non_abelian(runs: &[(PipelineConfig, PipelineRun)]) -> Outcome {
    let (_, run) = runs
        .iter()
        .find(|(c, _)| c.synthetic.as_deref() == Some("two_defect"))
        .ok_or("two-defect run missing")?;
    let lf = &run.lifted;
    let t = covers::target("so3_mod_v4").map_err(err)?;
    let (u, _) = interpolate_pa(&run.field).map_err(err)?;
    let (ab, ba) = synth::defect_loops();
    let gab = loop_monodromy(lf, &ab).map_err(err)?;
    let gba = loop_monodromy(lf, &ba).map_err(err)?;
    let dab = direct_monodromy(&u, &run.scaffold, lf, &ab).map_err(err)?;
    let dba = direct_monodromy(&u, &run.scaffold, lf, &ba).map_err(err)?;
    let mut constant = true;
    for f in &lf.facets {
        for smp in &f.samples {
            let here = t.deck_identify(&smp.minus, &smp.plus).map_err(err)?;
            constant &= here == f.label;
        }
    }
    let max_jump = lf.facets.iter().map(|f| f.max_geodesic_jump).fold(0.0, f64::max);
    ensure(
        gab.name() == "k" && gba.name() == "-k" && dab == gab && dba == gba && constant
            && max_jump <= lf.jump_bound,
        format!(
            "A then B = {gab}, B then A = {gba} (direct {dab}, {dba}); labels constant per facet: {constant}; max jump {max_jump:.4} <= {:.4}",
            lf.jump_bound
        ),
    )
}

fn sbv_clause(runs: &[(PipelineConfig, PipelineRun)]) -> Outcome {
    let all = runs.iter().all(|(_, r)| {
        let b = &r.lifted.bv;
        sbv_check(&r.lifted).pass && b.cantor == 0.0 && b.total == b.ac + b.jump
    });
    let mut corrupt = runs[0].1.lifted.clone();
    corrupt.bv.cantor = 1e-12;
    let caught = !sbv_check(&corrupt).pass;
    let mut corrupt = runs[0].1.lifted.clone();
    corrupt.bv.total += 1e-9;
    let caught_total = !sbv_check(&corrupt).pass;
    ensure(
        all && caught && caught_total,
        format!(
            "{} runs with zero Cantor part and exact decomposition: {all}; corrupted records rejected: {}",
            runs.len(),
            caught && caught_total
        ),
    )
}

fn jump_bound(runs: &[(PipelineConfig, PipelineRun)]) -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (_, r) in runs {
        for f in &r.lifted.facets {
            ok &= f.max_geodesic_jump <= r.lifted.jump_bound;
            worst = worst.max(f.max_geodesic_jump / r.lifted.jump_bound);
        }
    }
    let shrunk = PipelineConfig {
        synthetic: Some("vortex".into()),
        resolution: 32,
        trials: 4,
        jump_bound_scale: 0.1,
        ..Default::default()
    };
    let aborted = matches!(
        run_pipeline(&shrunk).map(|_| ()).map_err(|e| e.root().clone()),
        Err(LiftError::BoundViolation { .. })
    );
    ensure(
        ok && aborted,
        format!("max jump / bound {worst:.4} over the suite; shrunk bound aborts: {aborted}"),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |name: &str, out: Outcome| {
        match out {
            Ok(d) => println!("PASS [{name}] {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL [{name}] {d}");
            }
        }
    };
    report("1 retraction audit", retraction_audit());
    report("2 segment-image bound", segment_image_bound());
    report("3 coarea oracle", coarea_oracle());
    report("4 averaged bounds", averaged_bounds());
    let runs: Result<Vec<(PipelineConfig, PipelineRun)>, String> = standard_suite()
        .into_iter()
        .map(|c| run_pipeline(&c).map(|r| (c, r)).map_err(err))
        .collect();
    match runs {
        Ok(runs) => {
            report("5 lifting identity and uniqueness", lifting_identity(&runs));
            report("6 vortex end-to-end", vortex_end_to_end());
            report("7 smooth control", smooth_control());
            report("8 non-abelian monodromy", non_abelian(&runs));
            report("9 SBV clause", sbv_clause(&runs));
            report("10 jump bound", jump_bound(&runs));
        }
        Err(e) => {
            for name in ["5 lifting identity and uniqueness", "8 non-abelian monodromy", "9 SBV clause", "10 jump bound"] {
                report(name, Err(format!("suite run failed: {e}")));
            }
            report("6 vortex end-to-end", vortex_end_to_end());
            report("7 smooth control", smooth_control());
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
