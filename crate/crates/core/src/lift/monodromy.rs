use super::path::{cylinder_lift, segment_lift};
use super::LiftedField;
use crate::covers::{self, DeckElement};
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{dot, sub};
use crate::polygeom::PiecewiseAffineMap;
use crate::scaffold::Scaffold;
use crate::transversal::Homotopy;

fn cross(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Deck element of a closed polygonal loop in the plane, as the ordered
/// product of the labels of the jump facets it crosses. The loop runs
/// through `pts` and back to `pts[0]`.
pub fn loop_monodromy(lf: &LiftedField, pts: &[Vec<f64>]) -> Result<DeckElement> {
    let t = covers::target(&lf.target_id)?;
    if pts.len() < 2 || pts.iter().any(|p| p.len() != 2) {
        return Err(LiftError::InvalidArgument(
            "loops are closed polygons in the plane".into(),
        ));
    }
    let mut g = t.identity();
    for i in 0..pts.len() {
        let (p, q) = (&pts[i], &pts[(i + 1) % pts.len()]);
        let dir = sub(q, p);
        let mut hits: Vec<(f64, DeckElement)> = Vec::new();
        for f in &lf.facets {
            if f.vertices.len() != 2 {
                continue;
            }
            let (a, b) = (&f.vertices[0], &f.vertices[1]);
            let e = sub(b, a);
            let den = cross(&dir, &e);
            let ap = sub(a, p);
            if den.abs() < 1e-14 {
                if cross(&ap, &dir).abs() < 1e-12 {
                    return Err(LiftError::IllPosedLoop);
                }
                continue;
            }
            let s = cross(&ap, &e) / den;
            let r = cross(&ap, &dir) / den;
            if !(-1e-12..=1.0 + 1e-12).contains(&s) || !(-1e-12..=1.0 + 1e-12).contains(&r) {
                continue;
            }
            let tol = 1e-9;
            if r < tol || r > 1.0 - tol || s.abs() < tol || (s - 1.0).abs() < tol {
                return Err(LiftError::IllPosedLoop);
            }
            let factor = if dot(&dir, &f.normal) > 0.0 {
                t.inverse(&f.label)
            } else {
                f.label.clone()
            };
            hits.push((s, factor));
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, f) in hits {
            g = t.compose(&g, &f);
        }
    }
    Ok(g)
}

/// Monodromy of the same loop from a direct fine-step lift of `ρ_y∘u`
/// along it, starting at the lifting's value at `pts[0]`.
pub fn direct_monodromy(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    lf: &LiftedField,
    pts: &[Vec<f64>],
) -> Result<DeckElement> {
    let t = s.target();
    let h = Homotopy::new(u, &lf.anchor)?;
    let opts = super::PathOpts {
        max_step: 1.0 / 256.0,
        ..Default::default()
    };
    let w0 = cylinder_lift(&h, s, &lf.shift, &pts[0], &lf.anchor_lift, opts)?;
    let w0 = t.apply(&t.inverse(&lf.normalization), &w0);
    let mut w = w0.clone();
    for i in 0..pts.len() {
        let (p, q) = (&pts[i], &pts[(i + 1) % pts.len()]);
        w = segment_lift(u, s, &lf.shift, p, q, &w, opts)?;
    }
    t.deck_identify(&w0, &w)
}
