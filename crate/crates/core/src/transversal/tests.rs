use super::*;
use crate::polygeom::kuhn_triangulate;
use crate::scaffold::{build_analytic_scaffold, build_generic_scaffold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vortex(res: usize) -> PiecewiseAffineMap {
    let tri = kuhn_triangulate(&[-1.0, -1.0], &[1.0, 1.0], &[res, res]).unwrap();
    let h = 2.0 / res as f64;
    let c = [0.618 * h / 2.0, 0.382 * h / 2.0];
    let vals = tri
        .vertices()
        .iter()
        .map(|x| {
            let (a, b) = (x[0] - c[0], x[1] - c[1]);
            let r = a.hypot(b);
            vec![a / r, b / r]
        })
        .collect();
    PiecewiseAffineMap::new(tri, vals).unwrap()
}

fn constant(res: usize, c: &[f64]) -> PiecewiseAffineMap {
    let tri = kuhn_triangulate(&[-1.0, -1.0], &[1.0, 1.0], &[res, res]).unwrap();
    let n = tri.vertices().len();
    PiecewiseAffineMap::new(tri, vec![c.to_vec(); n]).unwrap()
}

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[test]
fn vortex_shadow_is_a_polyline() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let u = vortex(16);
    let anchor = [1.0, 0.0];
    let y = [0.031, -0.017];
    let ss = singular_sets(&u, &anchor, &s, &y).unwrap();
    assert!(ss.certified, "{:?}", ss.defect);
    assert_eq!(ss.t_y.intrinsic_dim(), Some(1));
    assert_eq!(ss.s_y.intrinsic_dim(), Some(0));
    assert_eq!(ss.s_pieces.len(), 1);
    assert!(ss.t_measure > 0.5);
    // every point of T_y sends its homotopy segment through the shifted origin
    let h = Homotopy::new(&u, &anchor).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in &ss.t_pieces {
        let v = p.polytope.vertices();
        for _ in 0..50 {
            let x = lerp(&v[0], &v[1], rng.gen());
            let a = sub(&u.eval_on(p.simplex, &x), &y);
            let b = sub(&anchor, &y);
            assert!(cross(&a, &b).abs() < 1e-9);
            assert!(dot(&a, &b) < 0.0);
            assert!(in_forbidden_set(&h, &s, &y, 0.0, &x));
        }
    }
}

#[test]
fn constant_field_has_empty_sets() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let u = constant(8, &[0.6, 0.8]);
    let ss = singular_sets(&u, &[1.0, 0.0], &s, &[0.05, 0.02]).unwrap();
    assert!(ss.certified);
    assert!(ss.s_y.is_empty() && ss.t_y.is_empty());
    assert_eq!(ss.t_measure, 0.0);
}

#[test]
fn vertex_on_singular_set_is_rejected() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let tri = kuhn_triangulate(&[-1.0, -1.0], &[1.0, 1.0], &[4, 4]).unwrap();
    let vals = tri.vertices().iter().map(|x| vec![0.1 * x[0], 0.1 * x[1]]).collect();
    let u = PiecewiseAffineMap::new(tri, vals).unwrap();
    // vertex (0.5, 0.5) maps to (0.05, 0.05)
    let ss = singular_sets(&u, &[1.0, 0.0], &s, &[0.05, 0.05]).unwrap();
    assert!(!ss.certified);
}

#[test]
fn field_outside_cube_is_rejected() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let u = constant(2, &[3.0, 0.0]);
    assert!(matches!(
        singular_sets(&u, &[1.0, 0.0], &s, &[0.0, 0.0]),
        Err(LiftError::InvalidArgument(_))
    ));
}

#[test]
fn forbidden_set_examples() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let u = vortex(8);
    let anchor = [1.0, 0.0];
    let h = Homotopy::new(&u, &anchor).unwrap();
    let y = [0.02, 0.01];
    assert!(!in_forbidden_set(&h, &s, &y, 1.0, &[0.3, 0.4]));
    // right half: segment to the anchor stays away from the origin
    assert!(!in_forbidden_set(&h, &s, &y, 0.0, &[0.7, 0.1]));
    let ss = singular_sets(&u, &anchor, &s, &y).unwrap();
    let on_t = ss.t_pieces[0].polytope.centroid().unwrap();
    assert!(in_forbidden_set(&h, &s, &y, 0.0, &on_t));
    assert_eq!(h.eval(0.0, &[0.5, 0.5]), u.eval(&[0.5, 0.5]));
    assert_eq!(h.eval(1.0, &[0.5, 0.5]), anchor.to_vec());
}

#[test]
fn generic_scaffold_dimensions() {
    let s = build_generic_scaffold("circle", 8, 2.0, Some(0.25)).unwrap();
    let u = vortex(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut certified = 0;
    for _ in 0..100 {
        let y = select::draw_shift(&mut rng, 2, s.sigma());
        let ss = singular_sets(&u, &[1.0, 0.0], &s, &y).unwrap();
        if ss.certified {
            certified += 1;
            assert!(ss.s_y.intrinsic_dim().map_or(true, |k| k == 0));
            assert!(ss.t_y.intrinsic_dim().map_or(true, |k| k == 1));
        }
    }
    assert!(certified >= 95);
}

#[test]
fn coarea_identity_instance() {
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let r = coarea_bound_check(&id, &[0.0, 0.0], &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], 200)
        .unwrap();
    assert!((r.lhs - 1.5304).abs() < 0.01, "{}", r.lhs);
    assert!((r.rhs - 8.657).abs() < 0.01, "{}", r.rhs);
    assert!(r.holds);
    let zero = vec![vec![0.0; 2]; 2];
    let r = coarea_bound_check(&zero, &[0.3, 0.1], &[0.3, 0.1], &[-1.0, -1.0], &[1.0, 1.0], 8)
        .unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    assert!(r.holds);
}

#[test]
fn select_shift_on_vortex() {
    let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
    let u = vortex(16);
    let (y, ss, diag) = select_shift(&u, &[1.0, 0.0], &s, 16, 3).unwrap();
    assert!(norm(&y) < s.sigma());
    assert!(ss.certified);
    assert!(ss.t_measure <= 2.0 * diag.median_t_measure);
    assert_eq!(diag.trials.len(), 16);
    let u = constant(4, &[0.0, 1.0]);
    let (_, ss, diag) = select_shift(&u, &[1.0, 0.0], &s, 4, 3).unwrap();
    assert_eq!(diag.accepted, 0);
    assert_eq!(ss.t_measure, 0.0);
}

#[test]
fn selection_fails_when_every_shift_is_degenerate() {
    // vertex values on the singular set with a shift ball below tolerance
    let s = build_analytic_scaffold("circle", 2.0, Some(1e-10)).unwrap();
    let u = constant(4, &[0.0, 0.0]);
    assert!(matches!(
        select_shift(&u, &[1.0, 0.0], &s, 8, 1),
        Err(LiftError::SelectionFailure(8))
    ));
}
