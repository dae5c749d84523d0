//! Generic shifts: the straight-line homotopy to a constant, the preimages
//! of the shifted singular set under it, and the selection of a shift.

mod average;
mod coarea;
mod select;

pub use average::{
    averaged_bounds, averaged_bounds_doubling, relative_change, weighted_tv, AveragedBounds,
};
pub use coarea::{coarea_bound_check, random_coarea_checks, CoareaCheck, CoareaInstance};
pub(crate) use select::retracted_grad;
pub use select::{retracted_tv, select_shift, ShiftDiagnostics, TrialRecord};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{dist, dot, inverse, lerp, norm, sub};
use crate::polygeom::{HPolytope, Halfspace, PiecewiseAffineMap, PolyChain, EPS_GEO};
use crate::scaffold::Scaffold;

/// `U(t, x) = (1 - t) u(x) + t u*`.
#[derive(Clone, Copy)]
pub struct Homotopy<'a> {
    u: &'a PiecewiseAffineMap,
    anchor: &'a [f64],
}

impl<'a> Homotopy<'a> {
    pub fn new(u: &'a PiecewiseAffineMap, anchor: &'a [f64]) -> Result<Self> {
        if anchor.len() != u.target_dim() {
            return Err(LiftError::InvalidArgument(format!(
                "anchor has dimension {}, field has {}",
                anchor.len(),
                u.target_dim()
            )));
        }
        Ok(Self { u, anchor })
    }

    pub fn base(&self) -> &'a PiecewiseAffineMap {
        self.u
    }

    pub fn anchor(&self) -> &'a [f64] {
        self.anchor
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        self.mix(t, &self.u.eval(x))
    }

    /// `U(t, x)` with `x` known to lie in simplex `s`.
    pub fn eval_on(&self, s: usize, t: f64, x: &[f64]) -> Vec<f64> {
        self.mix(t, &self.u.eval_on(s, x))
    }

    fn mix(&self, t: f64, ux: &[f64]) -> Vec<f64> {
        if t == 1.0 {
            return self.anchor.to_vec();
        }
        ux.iter()
            .zip(self.anchor)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect()
    }
}

/// One polytope of `S_y` or `T_y`, with the simplex and singular member it
/// came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowPiece {
    pub simplex: usize,
    pub member: usize,
    pub polytope: HPolytope,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularSets {
    pub shift: Vec<f64>,
    /// `{x : u(x) - y ∈ X}`, generically of dimension `d - 2`.
    pub s_y: PolyChain,
    /// `{x : U(t, x) - y ∈ X for some t}`, generically of dimension `d - 1`.
    pub t_y: PolyChain,
    pub s_pieces: Vec<ShadowPiece>,
    pub t_pieces: Vec<ShadowPiece>,
    /// `H^{d-1}(T_y)`.
    pub t_measure: f64,
    pub certified: bool,
    /// Set when `T_y` was estimated from samples rather than computed.
    pub approximate: bool,
    /// Why the certificate failed.
    pub defect: Option<String>,
}

impl SingularSets {
    fn empty(d: usize, y: &[f64]) -> Self {
        Self {
            shift: y.to_vec(),
            s_y: PolyChain::new(d),
            t_y: PolyChain::new(d),
            s_pieces: Vec::new(),
            t_pieces: Vec::new(),
            t_measure: 0.0,
            certified: true,
            approximate: false,
            defect: None,
        }
    }

    fn reject(&mut self, why: String) {
        self.certified = false;
        if self.defect.is_none() {
            self.defect = Some(why);
        }
    }
}

/// A simplex as a polytope, with its barycentric coordinates as affine
/// functionals `λ_i(x) = g_i·x + c_i`.
pub(crate) fn simplex_polytope(pts: &[&[f64]]) -> Result<(HPolytope, Vec<(Vec<f64>, f64)>)> {
    let d = pts.len() - 1;
    let edges: Vec<Vec<f64>> = (0..d)
        .map(|k| (0..d).map(|i| pts[i + 1][k] - pts[0][k]).collect())
        .collect();
    let inv = inverse(&edges)
        .ok_or_else(|| LiftError::InvalidArgument("degenerate simplex".into()))?;
    let mut bary: Vec<(Vec<f64>, f64)> = inv
        .iter()
        .map(|r| (r.clone(), -dot(r, pts[0])))
        .collect();
    let g0: Vec<f64> = (0..d).map(|k| -bary.iter().map(|(g, _)| g[k]).sum::<f64>()).collect();
    let c0 = 1.0 - bary.iter().map(|(_, c)| c).sum::<f64>();
    bary.insert(0, (g0, c0));
    let hs = bary
        .iter()
        .map(|(g, c)| Halfspace::new(g.iter().map(|v| -v).collect(), *c))
        .collect();
    Ok((HPolytope::new(d, hs, vec![])?, bary))
}

fn lift_cols(h: &Halfspace, lead: f64) -> Halfspace {
    let mut n = Vec::with_capacity(h.normal.len() + 1);
    n.push(lead);
    n.extend_from_slice(&h.normal);
    Halfspace::new(n, h.offset)
}

/// Set of `x` in the simplex whose homotopy segment `[u(x) - y, u* - y]`
/// meets the polytope `k`, built in `(r, x)`-space with `r = 1/(1-t)` and
/// projected to `x`.
pub(crate) fn shadow_in_simplex(
    simplex: &HPolytope,
    jac: &[Vec<f64>],
    offset: &[f64],
    anchor: &[f64],
    k: &HPolytope,
    r_max: f64,
) -> Result<HPolytope> {
    let d = simplex.dim();
    // w(x) = A x + b - c where c = anchor (both already shifted by -y)
    let b: Vec<f64> = sub(offset, anchor);
    // K' = K - c; s w ∈ K' with r = 1/s  <=>  a·w <= r (β - a·c)
    let row = |h: &Halfspace| -> Halfspace {
        let beta = h.offset - dot(&h.normal, anchor);
        let mut n = vec![-beta];
        for j in 0..d {
            n.push((0..jac.len()).map(|i| h.normal[i] * jac[i][j]).sum());
        }
        Halfspace::new(n, -dot(&h.normal, &b))
    };
    let ineqs: Vec<Halfspace> = k
        .inequalities()
        .iter()
        .map(row)
        .chain(simplex.inequalities().iter().map(|h| lift_cols(h, 0.0)))
        .chain([
            Halfspace::new(unit(d + 1, 0, -1.0), -1.0),
            Halfspace::new(unit(d + 1, 0, 1.0), r_max),
        ])
        .collect();
    let eqs: Vec<Halfspace> = k.equalities().iter().map(row).collect();
    let lifted = HPolytope::new(d + 1, ineqs, eqs)?;
    if d == 1 {
        // project onto the single x coordinate by hand
        let v = lifted.vertices();
        if v.is_empty() {
            return Ok(HPolytope::empty(1));
        }
        let lo = v.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let hi = v.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        return Ok(HPolytope::from_box(&[lo], &[hi]));
    }
    lifted.fm_project(0)
}

fn unit(n: usize, k: usize, v: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = v;
    e
}

fn boxes_overlap(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>), tol: f64) -> bool {
    a.0.iter()
        .zip(&a.1)
        .zip(b.0.iter().zip(&b.1))
        .all(|((alo, ahi), (blo, bhi))| alo - tol <= *bhi && blo - tol <= *ahi)
}

/// Piece is degenerate when it lies in a facet of its simplex or passes
/// through a simplex vertex.
fn touches_degenerately(piece: &HPolytope, bary: &[(Vec<f64>, f64)], pts: &[&[f64]]) -> bool {
    let v = piece.vertices();
    let tol = 1e3 * EPS_GEO;
    let in_facet = bary
        .iter()
        .any(|(g, c)| v.iter().all(|x| (dot(g, x) + c).abs() <= tol));
    in_facet || pts.iter().any(|p| piece.contains(p, tol))
}

/// `S_y` and `T_y` for a piecewise-affine field and a polyhedral scaffold.
/// Non-polyhedral scaffolds get an estimated `T_y` from the lifting engine.
pub fn singular_sets(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    y: &[f64],
) -> Result<SingularSets> {
    let lambda = s.lambda();
    if u.values().iter().flatten().any(|v| v.abs() > lambda + EPS_GEO) {
        return Err(LiftError::InvalidArgument(format!(
            "field leaves the cube of half-width {lambda}"
        )));
    }
    if y.len() != s.m() || u.target_dim() != s.m() {
        return Err(LiftError::InvalidArgument("dimension mismatch".into()));
    }
    if norm(y) >= s.sigma() {
        return Err(LiftError::InvalidArgument("shift outside the σ-ball".into()));
    }
    if !s.is_polyhedral() {
        return crate::lift::sampled_singular_sets(u, anchor, s, y);
    }
    exact_singular_sets(u, anchor, s, y)
}

fn exact_singular_sets(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    y: &[f64],
) -> Result<SingularSets> {
    let tri = u.triangulation();
    let d = tri.dim();
    let mut out = SingularSets::empty(d, y);
    let c = sub(anchor, y);
    let members: Vec<(HPolytope, (Vec<f64>, Vec<f64>))> = s
        .members()
        .iter()
        .filter_map(|k| k.bbox().map(|bb| (k.clone(), bb)))
        .collect();
    for (i, (k, _)) in members.iter().enumerate() {
        if k.distance_to(&c) <= EPS_GEO {
            out.reject(format!("anchor lies on singular member {i}"));
            return Ok(out);
        }
    }
    let shifted: Vec<Vec<f64>> = u.values().iter().map(|v| sub(v, y)).collect();
    for (vi, v) in shifted.iter().enumerate() {
        if members.iter().any(|(k, _)| k.distance_to(v) <= EPS_GEO) {
            out.reject(format!("vertex {vi} maps onto the shifted singular set"));
            return Ok(out);
        }
    }

    type Found = (Vec<ShadowPiece>, Vec<ShadowPiece>, Option<String>);
    let per_simplex = |si: usize| -> Result<Found> {
        let mut found: Found = (Vec::new(), Vec::new(), None);
        let verts = &tri.simplices()[si];
        let img: Vec<&[f64]> = verts.iter().map(|&v| shifted[v].as_slice()).collect();
        let mut lo = c.clone();
        let mut hi = c.clone();
        for p in &img {
            for j in 0..p.len() {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
        }
        let hull_box = (lo, hi);
        let pts = tri.simplex_points(si);
        let mut cache: Option<(HPolytope, Vec<(Vec<f64>, f64)>)> = None;
        let jac = u.jacobian(si);
        // u(x) - y = J x + off
        let off: Vec<f64> = (0..jac.len())
            .map(|i| {
                img[0][i]
                    - jac[i]
                        .iter()
                        .zip(pts[0])
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            })
            .collect();
        let w_max = img.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
        for (mi, (k, kb)) in members.iter().enumerate() {
            if !boxes_overlap(&hull_box, kb, 1e3 * EPS_GEO) {
                continue;
            }
            if cache.is_none() {
                cache = Some(simplex_polytope(&pts)?);
            }
            let (hpoly, bary) = cache.as_ref().unwrap();
            let r_max = w_max / k.distance_to(&c) + 1.0;
            let t_piece = shadow_in_simplex(hpoly, jac, &off, &c, k, r_max)?;
            let Some(tdim) = t_piece.intrinsic_dim() else {
                continue;
            };
            if tdim + 1 != d || touches_degenerately(&t_piece, bary, &pts) {
                found.2.get_or_insert(format!(
                    "shadow piece of dimension {tdim} in simplex {si} is not in general position"
                ));
                continue;
            }
            found.1.push(ShadowPiece {
                simplex: si,
                member: mi,
                polytope: t_piece,
            });
            let s_piece = k.preimage(jac, &off, d).intersect(hpoly).pruned();
            if let Some(sdim) = s_piece.intrinsic_dim() {
                if sdim + 2 != d || touches_degenerately(&s_piece, bary, &pts) {
                    found.2.get_or_insert(format!(
                        "preimage piece of dimension {sdim} in simplex {si} is not in general position"
                    ));
                    continue;
                }
                found.0.push(ShadowPiece {
                    simplex: si,
                    member: mi,
                    polytope: s_piece,
                });
            }
        }
        Ok(found)
    };
    let results: Vec<Result<Found>> = (0..tri.simplices().len())
        .into_par_iter()
        .map(per_simplex)
        .collect();
    for r in results {
        let (sp, tp, defect) = r?;
        if let Some(why) = defect {
            out.reject(why);
        }
        for p in sp {
            out.s_y.push(p.polytope.clone(), out.s_pieces.len() as i64)?;
            out.s_pieces.push(p);
        }
        for p in tp {
            out.t_measure += if d == 1 {
                1.0
            } else {
                p.polytope.haus_measure(d - 1)?
            };
            out.t_y.push(p.polytope.clone(), out.t_pieces.len() as i64)?;
            out.t_pieces.push(p);
        }
    }
    Ok(out)
}

/// Whether `(t, x)` lies in the forbidden set: the rest of the homotopy
/// segment `{U(s, x) - y : s ∈ [t, 1]}` meets the singular set.
pub fn in_forbidden_set(h: &Homotopy, s: &Scaffold, y: &[f64], t: f64, x: &[f64]) -> bool {
    let a = sub(&h.eval(t, x), y);
    let b = sub(h.anchor(), y);
    if !s.is_polyhedral() {
        return sampled_segment_hits(s, &a, &b);
    }
    s.members().iter().any(|k| segment_meets(k, &a, &b, 1e-8))
}

/// Exact test for the segment `a -> b` meeting `k`, as an interval in the
/// segment parameter.
pub(crate) fn segment_meets(k: &HPolytope, a: &[f64], b: &[f64], tol: f64) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let dir = sub(b, a);
    for h in k.inequalities() {
        let (a0, a1) = (dot(&h.normal, a) - h.offset, dot(&h.normal, &dir));
        // a0 + λ a1 <= tol
        if a1.abs() <= 1e-15 {
            if a0 > tol {
                return false;
            }
        } else if a1 > 0.0 {
            hi = hi.min((tol - a0) / a1);
        } else {
            lo = lo.max((tol - a0) / a1);
        }
    }
    for h in k.equalities() {
        let (a0, a1) = (dot(&h.normal, a) - h.offset, dot(&h.normal, &dir));
        if a1.abs() <= 1e-15 {
            if a0.abs() > tol {
                return false;
            }
        } else {
            let (p, q) = ((-tol - a0) / a1, (tol - a0) / a1);
            lo = lo.max(p.min(q));
            hi = hi.min(p.max(q));
        }
    }
    lo <= hi
}

fn sampled_segment_hits(s: &Scaffold, a: &[f64], b: &[f64]) -> bool {
    let n = 4096;
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..=n {
        let d = s.dist_to_singular(&lerp(a, b, i as f64 / n as f64));
        if d < best.0 {
            best = (d, i);
        }
    }
    // golden-section refinement around the best sample
    let (mut l, mut r) = (
        best.1.saturating_sub(1) as f64 / n as f64,
        ((best.1 + 1).min(n)) as f64 / n as f64,
    );
    let f = |t: f64| s.dist_to_singular(&lerp(a, b, t));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (m1, m2) = (r - g * (r - l), l + g * (r - l));
        if f(m1) < f(m2) {
            r = m2;
        } else {
            l = m1;
        }
    }
    f(0.5 * (l + r)).min(best.0) <= 1e-8
}

#[cfg(test)]
mod tests;
