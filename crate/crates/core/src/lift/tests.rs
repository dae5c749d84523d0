use super::*;
use crate::covers::{self, DeckElement, Q8};
use crate::field::{interpolate_pa, synth, SampledField};
use crate::scaffold::build_analytic_scaffold;

fn setup(f: SampledField, big_m: f64) -> (PiecewiseAffineMap, Scaffold) {
    let (u, _) = interpolate_pa(&f).unwrap();
    let mut s = build_analytic_scaffold(&f.header.target, big_m, Some(0.25)).unwrap();
    s.certify(500, 1);
    (u, s)
}

fn quick() -> LiftConfig {
    LiftConfig {
        trials: 4,
        seed: 3,
        ..Default::default()
    }
}

#[test]
fn vortex_has_one_generator_labelled_curve() {
    let (u, s) = setup(synth::vortex(32).unwrap(), 2.0);
    let lf = lift_pa_field(&u, &s, &quick()).unwrap();
    assert!(!lf.facets.is_empty());
    for f in &lf.facets {
        assert_eq!(f.label.name(), "g");
        assert!(f.max_geodesic_jump <= lf.jump_bound);
    }
    let length: f64 = lf.facets.iter().map(|f| f.measure).sum();
    let want = 2.0 * std::f64::consts::PI * length;
    assert!((lf.bv.jump - want).abs() <= 0.05 * want, "{} vs {want}", lf.bv.jump);
    assert!(lf.residual <= 1e-6);
    assert!(sbv_check(&lf).pass);
}

#[test]
fn smooth_field_has_no_jumps() {
    let (u, s) = setup(synth::smooth(32).unwrap(), 2.0);
    let lf = lift_pa_field(&u, &s, &quick()).unwrap();
    assert!(lf.facets.is_empty());
    let want = synth::smooth_gradient_integral();
    assert!((lf.bv.total - want).abs() <= 0.02 * want, "{} vs {want}", lf.bv.total);
}

#[test]
fn step_halving_does_not_change_the_lift() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let t = s.target();
    let anchor = default_anchor(&u, t).unwrap();
    let (y, _, _) = crate::transversal::select_shift(&u, &anchor, &s, 4, 2).unwrap();
    let w = t.lift_point(&s.eval_retraction(&y, &anchor).unwrap());
    let coarse = lift_vertices(&u, &s, &y, &anchor, &w, PathOpts::default()).unwrap();
    let fine = PathOpts {
        max_step: PathOpts::default().max_step / 2.0,
        ..Default::default()
    };
    let fine = lift_vertices(&u, &s, &y, &anchor, &w, fine).unwrap();
    for (a, b) in coarse.iter().zip(&fine) {
        assert!(t.dist_cover(a, b) < 1e-8);
    }
}

#[test]
fn anchor_lifts_differ_by_one_deck_element() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let t = s.target();
    let cfg = LiftConfig {
        normalize: false,
        ..quick()
    };
    let a = lift_pa_field(&u, &s, &cfg).unwrap();
    let g = DeckElement::Lattice(vec![3]);
    let cfg2 = LiftConfig {
        anchor: Some(a.anchor.clone()),
        anchor_lift: Some(t.apply(&g, &a.anchor_lift)),
        ..cfg
    };
    let b = lift_pa_field(&u, &s, &cfg2).unwrap();
    for (va, vb) in a.values.iter().zip(&b.values) {
        assert_eq!(t.deck_identify(va, vb).unwrap(), g);
    }
}

#[test]
fn normalization_is_a_global_deck_element() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let t = s.target();
    let raw = lift_pa_field(&u, &s, &LiftConfig { normalize: false, ..quick() }).unwrap();
    let norm = lift_pa_field(&u, &s, &quick()).unwrap();
    let back = t.inverse(&norm.normalization);
    for (a, b) in raw.values.iter().zip(&norm.values) {
        assert_eq!(t.deck_identify(a, b).unwrap(), back);
    }
    assert_eq!(raw.bv, norm.bv);
}

#[test]
fn shrunk_bound_aborts_in_strict_mode() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let cfg = LiftConfig {
        jump_bound_override: Some(1.0),
        ..quick()
    };
    let err = lift_pa_field(&u, &s, &cfg).unwrap_err();
    assert!(matches!(err.root(), LiftError::BoundViolation { .. }), "{err}");
    let lax = lift_pa_field(&u, &s, &LiftConfig { strict: false, ..cfg }).unwrap();
    assert!(!lax.bound_violations.is_empty());
}

#[test]
fn corrupted_records_fail_the_sbv_check() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let lf = lift_pa_field(&u, &s, &quick()).unwrap();
    assert!(sbv_check(&lf).pass);
    let mut bad = lf.clone();
    bad.bv.cantor = 1e-12;
    assert!(!sbv_check(&bad).pass);
    let mut bad = lf.clone();
    bad.bv.total += 1e-9;
    assert!(!sbv_check(&bad).pass);
    let mut bad = lf;
    bad.facets[0].samples[0].plus[0] += 1e-6;
    assert!(!sbv_check(&bad).pass);
}

#[test]
fn vortex_loop_monodromy() {
    let (u, s) = setup(synth::vortex(16).unwrap(), 2.0);
    let lf = lift_pa_field(&u, &s, &quick()).unwrap();
    let lp = synth::vortex_loop();
    assert_eq!(loop_monodromy(&lf, &lp).unwrap().name(), "g");
    let rev: Vec<Vec<f64>> = lp.iter().rev().cloned().collect();
    assert_eq!(loop_monodromy(&lf, &rev).unwrap().name(), "g^-1");
    assert_eq!(direct_monodromy(&u, &s, &lf, &lp).unwrap().name(), "g");
}

#[test]
fn two_defects_do_not_commute() {
    let (u, s) = setup(synth::two_defect(24).unwrap(), 2.0);
    let (anchor, w) = synth::two_defect_anchor();
    let cfg = LiftConfig {
        anchor: Some(anchor),
        anchor_lift: Some(w),
        ..quick()
    };
    let lf = lift_pa_field(&u, &s, &cfg).unwrap();
    let t = covers::target("so3_mod_v4").unwrap();
    for f in &lf.facets {
        assert!(matches!(f.label, DeckElement::Unit(q) if q != Q8::ONE));
        assert!(f.max_geodesic_jump <= lf.jump_bound);
    }
    let (ab, ba) = synth::defect_loops();
    let gab = loop_monodromy(&lf, &ab).unwrap();
    let gba = loop_monodromy(&lf, &ba).unwrap();
    assert_eq!(gab.name(), "k");
    assert_eq!(gba.name(), "-k");
    assert_eq!(t.compose(&gab, &t.inverse(&gba)), t.parse_element("-1").unwrap());
    assert_eq!(direct_monodromy(&u, &s, &lf, &ab).unwrap(), gab);
}
