use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{JumpFacet, LiftedField};
use crate::covers::CoverTarget;
use crate::error::Result;
use crate::polygeom::linalg::{dist, lerp};
use crate::polygeom::{simplex_rule, PiecewiseAffineMap};
use crate::scaffold::Scaffold;
use crate::transversal::retracted_grad;

/// The total variation measure of the lifting split into its parts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BvRecord {
    /// `∫ |∇v|`, equal to `∫ |∇(ρ_y∘u)|` off the jump set.
    pub ac: f64,
    /// `∫_{T_y} |v⁺ - v⁻| dH^{d-1}` in the cover's ambient norm.
    pub jump: f64,
    pub total: f64,
    /// Always zero for piecewise-affine input.
    pub cantor: f64,
    /// The jump integral with the intrinsic distance of the cover.
    pub geodesic_jump: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SbvReport {
    pub cantor_zero: bool,
    pub identity_holds: bool,
    /// Largest finite-difference Lipschitz ratio of `v` over edges not
    /// crossing the jump set.
    pub lipschitz_max: f64,
    pub lipschitz_finite: bool,
    pub pass: bool,
}

fn simplex_estimate(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    si: usize,
    pts: &[Vec<f64>],
    vol: f64,
) -> Result<f64> {
    let d = pts.len() - 1;
    let mut acc = 0.0;
    for (b, w) in simplex_rule(d) {
        let x: Vec<f64> = (0..d)
            .map(|k| pts.iter().zip(&b).map(|(p, l)| p[k] * l).sum())
            .collect();
        acc += w * retracted_grad(u, s, y, si, &x)?;
    }
    Ok(acc * vol)
}

fn children(pts: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    match pts.len() {
        2 => {
            let m = lerp(&pts[0], &pts[1], 0.5);
            vec![vec![pts[0].clone(), m.clone()], vec![m, pts[1].clone()]]
        }
        3 => {
            let m01 = lerp(&pts[0], &pts[1], 0.5);
            let m12 = lerp(&pts[1], &pts[2], 0.5);
            let m02 = lerp(&pts[0], &pts[2], 0.5);
            vec![
                vec![pts[0].clone(), m01.clone(), m02.clone()],
                vec![m01.clone(), pts[1].clone(), m12.clone()],
                vec![m02.clone(), m12.clone(), pts[2].clone()],
                vec![m01, m12, m02],
            ]
        }
        _ => Vec::new(),
    }
}

fn adaptive(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    si: usize,
    pts: &[Vec<f64>],
    vol: f64,
    coarse: f64,
    depth: usize,
) -> Result<f64> {
    let kids = children(pts);
    if depth == 0 || kids.is_empty() {
        return Ok(coarse);
    }
    let cv = vol / kids.len() as f64;
    let parts: Vec<f64> = kids
        .iter()
        .map(|k| simplex_estimate(u, s, y, si, k, cv))
        .collect::<Result<_>>()?;
    let fine: f64 = parts.iter().sum();
    if (fine - coarse).abs() <= 1e-4 * fine.abs() + 1e-12 {
        return Ok(fine);
    }
    let mut total = 0.0;
    for (k, c) in kids.iter().zip(parts) {
        total += adaptive(u, s, y, si, k, cv, c, depth - 1)?;
    }
    Ok(total)
}

/// `∫ |∇(ρ_y∘u)|` by order-2 quadrature with adaptive subdivision.
pub(crate) fn ac_part(u: &PiecewiseAffineMap, s: &Scaffold, y: &[f64], depth: usize) -> Result<f64> {
    let tri = u.triangulation();
    let parts: Vec<Result<f64>> = (0..tri.simplices().len())
        .into_par_iter()
        .map(|si| {
            let pts: Vec<Vec<f64>> = tri.simplex_points(si).iter().map(|p| p.to_vec()).collect();
            let vol = tri.simplex_volume(si);
            let coarse = simplex_estimate(u, s, y, si, &pts, vol)?;
            adaptive(u, s, y, si, &pts, vol, coarse, depth)
        })
        .collect();
    parts.into_iter().sum()
}

/// Assemble the measure from the gradient integral and the jump facets.
pub fn bv_measure(ac: f64, facets: &[JumpFacet]) -> BvRecord {
    // the empty sum of f64 is -0.0
    let jump = facets
        .iter()
        .flat_map(|f| f.samples.iter().map(|s| s.weight * s.ambient))
        .sum::<f64>()
        + 0.0;
    let geodesic_jump = facets
        .iter()
        .flat_map(|f| f.samples.iter().map(|s| s.weight * s.geodesic))
        .sum::<f64>()
        + 0.0;
    BvRecord {
        ac,
        jump,
        total: ac + jump,
        cantor: 0.0,
        geodesic_jump,
    }
}

/// Largest ratio `dist_E(v(a), v(b)) / |a - b|` over triangulation edges
/// whose endpoints lie on one sheet.
pub(crate) fn lipschitz_statistic(
    t: &dyn CoverTarget,
    u: &PiecewiseAffineMap,
    values: &[Vec<f64>],
) -> f64 {
    let verts = u.triangulation().vertices();
    u.triangulation()
        .edges()
        .par_iter()
        .filter_map(|&(a, b)| {
            let pb = t.project(&values[b]);
            let pa = t.project(&values[a]);
            if t.dist_n(&pa, &pb) >= 0.5 * t.r_inj() {
                return None;
            }
            let w = t.lift_step(&values[a], &pb).ok()?;
            if !t.deck_identify(&w, &values[b]).ok()?.is_identity() {
                return None;
            }
            Some(t.dist_cover(&values[a], &values[b]) / dist(&verts[a], &verts[b]))
        })
        .reduce(|| 0.0, f64::max)
}

/// The SBV structure of the lifting: no Cantor part, `total = ac + jump`,
/// and `v` Lipschitz away from the jump set.
pub fn sbv_check(lf: &LiftedField) -> SbvReport {
    let cantor_zero = lf.bv.cantor == 0.0;
    let recomputed = bv_measure(lf.bv.ac, &lf.facets);
    let identity_holds = lf.bv.total == lf.bv.ac + lf.bv.jump
        && recomputed.jump == lf.bv.jump
        && recomputed.geodesic_jump == lf.bv.geodesic_jump
        && lf
            .facets
            .iter()
            .flat_map(|f| &f.samples)
            .all(|s| s.ambient == crate::polygeom::linalg::dist(&s.minus, &s.plus));
    let lipschitz_finite = lf.lipschitz.is_finite();
    SbvReport {
        cantor_zero,
        identity_holds,
        lipschitz_max: lf.lipschitz,
        lipschitz_finite,
        pass: cantor_zero && identity_holds && lipschitz_finite,
    }
}
