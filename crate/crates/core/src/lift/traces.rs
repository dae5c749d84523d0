use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::facets::FacetGeometry;
use super::path::cylinder_lift;
use super::{JumpFacet, LiftConfig};
use crate::covers::DeckElement;
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{axpy, dist, scale};
use crate::scaffold::Scaffold;
use crate::transversal::{Homotopy, SingularSets};

/// One-sided limits of the lifting at a point of a jump facet.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceSample {
    pub x: Vec<f64>,
    /// Quadrature weight (share of the facet measure).
    pub weight: f64,
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
    /// `dist_E(v⁻, v⁺)`.
    pub geodesic: f64,
    /// `|v⁺ - v⁻|` in the ambient coordinates of the cover.
    pub ambient: f64,
    /// Gap between the extrapolated one-sided values and the traces.
    pub extrapolation_gap: f64,
}

const SPLIT_ROUNDS: usize = 3;

fn preferred(l: &DeckElement) -> bool {
    match l {
        DeckElement::Lattice(k) => k.iter().find(|v| **v != 0).map_or(true, |v| *v > 0),
        DeckElement::Unit(q) => !q.neg || q.axis == 0,
    }
}

struct Ctx<'a> {
    h: &'a Homotopy<'a>,
    s: &'a Scaffold,
    y: &'a [f64],
    w_anchor: &'a [f64],
    cfg: &'a LiftConfig,
}

impl Ctx<'_> {
    fn clamp(&self, x: Vec<f64>) -> Vec<f64> {
        let (lo, hi) = self.h.base().triangulation().bounds();
        x.iter()
            .enumerate()
            .map(|(k, v)| v.clamp(lo[k], hi[k]))
            .collect()
    }

    fn side(&self, x: &[f64], n: &[f64], e: f64) -> Result<Vec<f64>> {
        let p = self.clamp(axpy(x, e, n));
        cylinder_lift(self.h, self.s, self.y, &p, self.w_anchor, self.cfg.path)
    }

    fn sample(&self, x: &[f64], weight: f64, n: &[f64], eps: f64) -> Result<(TraceSample, DeckElement)> {
        let t = self.s.target();
        let p0 = self.s.eval_retraction(self.y, &self.h.base().eval(x))?;
        let (p1, p2) = (self.side(x, n, eps)?, self.side(x, n, eps / 2.0)?);
        let (m1, m2) = (self.side(x, n, -eps)?, self.side(x, n, -eps / 2.0)?);
        let plus = t.lift_step(&p2, &p0)?;
        let minus = t.lift_step(&m2, &p0)?;
        let rich = |a: &[f64], b: &[f64]| -> Vec<f64> { axpy(&scale(b, 2.0), -1.0, a) };
        let gap = dist(&rich(&p1, &p2), &plus).max(dist(&rich(&m1, &m2), &minus));
        let label = t.deck_identify(&minus, &plus)?;
        Ok((
            TraceSample {
                x: x.to_vec(),
                weight,
                geodesic: t.dist_cover(&minus, &plus),
                ambient: dist(&minus, &plus),
                minus,
                plus,
                extrapolation_gap: gap,
            },
            label,
        ))
    }

    /// Traces over one facet, splitting it while labels disagree.
    fn facet(&self, simplex: usize, verts: Vec<Vec<f64>>, round: usize) -> Result<Vec<JumpFacet>> {
        let tri = self.h.base().triangulation();
        let d = tri.dim();
        let geo = FacetGeometry::new(verts, d)?;
        let pts = tri.simplex_points(simplex);
        let mut h_s: f64 = 0.0;
        for a in &pts {
            for b in &pts {
                h_s = h_s.max(dist(a, b));
            }
        }
        let scale_len = if geo.diameter > 0.0 { geo.diameter.min(h_s) } else { h_s };
        let eps = scale_len / 64.0;
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (x, w) in geo.quadrature(self.cfg.trace_samples) {
            let (smp, l) = self.sample(&x, w, &geo.normal, eps)?;
            samples.push(smp);
            labels.push(l);
        }
        if labels.iter().any(|l| *l != labels[0]) {
            let parts = geo.split();
            if round >= SPLIT_ROUNDS || parts.len() < 2 {
                return Err(LiftError::FacetSplit(simplex));
            }
            let mut out = Vec::new();
            for p in parts {
                out.extend(self.facet(simplex, p, round + 1)?);
            }
            return Ok(out);
        }
        let t = self.s.target();
        let mut label = labels[0].clone();
        if label.is_identity() {
            return Ok(Vec::new());
        }
        let mut normal = geo.normal.clone();
        if !preferred(&label) {
            label = t.inverse(&label);
            normal = scale(&normal, -1.0);
            for smp in samples.iter_mut() {
                std::mem::swap(&mut smp.minus, &mut smp.plus);
            }
        }
        let max_geodesic_jump = samples.iter().map(|s| s.geodesic).fold(0.0, f64::max);
        Ok(vec![JumpFacet {
            simplex,
            vertices: geo.vertices,
            normal,
            measure: geo.measure,
            label,
            samples,
            max_geodesic_jump,
            approximate: false,
        }])
    }
}

/// The jump complex: traces and labels on every piece of `T_y`. Pieces whose
/// two sides agree are dropped.
pub(crate) fn jump_complex(
    h: &Homotopy,
    s: &Scaffold,
    y: &[f64],
    w_anchor: &[f64],
    ss: &SingularSets,
    cfg: &LiftConfig,
) -> Result<Vec<JumpFacet>> {
    let ctx = Ctx {
        h,
        s,
        y,
        w_anchor,
        cfg,
    };
    let per: Vec<Result<Vec<JumpFacet>>> = ss
        .t_pieces
        .par_iter()
        .map(|p| {
            let mut f = ctx.facet(p.simplex, p.polytope.vertices().to_vec(), 0)?;
            for jf in f.iter_mut() {
                jf.approximate = ss.approximate;
            }
            Ok(f)
        })
        .collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// Traces, label and largest geodesic jump on a single facet given by its
/// vertices inside simplex `simplex`.
#[allow(clippy::too_many_arguments)]
pub fn jump_traces(
    h: &Homotopy,
    s: &Scaffold,
    y: &[f64],
    w_anchor: &[f64],
    simplex: usize,
    vertices: Vec<Vec<f64>>,
    cfg: &LiftConfig,
) -> Result<Vec<JumpFacet>> {
    Ctx {
        h,
        s,
        y,
        w_anchor,
        cfg,
    }
    .facet(simplex, vertices, 0)
}
