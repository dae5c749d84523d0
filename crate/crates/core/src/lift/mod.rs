//! The lifting engine: path lifting through the straight-line homotopy,
//! jump facets with deck labels, the BV measure of the lifting, loop
//! monodromy and normalization into a fundamental domain.

mod facets;
mod measure;
mod monodromy;
mod path;
mod sampled;
mod traces;

pub use measure::{bv_measure, sbv_check, BvRecord, SbvReport};
pub use monodromy::{direct_monodromy, loop_monodromy};
pub use path::{cylinder_lift, lift_path, segment_lift, PathOpts};
pub use traces::{jump_traces, TraceSample};
pub(crate) use sampled::sampled_singular_sets;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covers::{CoverTarget, DeckElement};
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{dist, norm, scale};
use crate::polygeom::PiecewiseAffineMap;
use crate::scaffold::Scaffold;
use crate::transversal::{select_shift, Homotopy, ShiftDiagnostics, SingularSets};

#[derive(Clone, Debug)]
pub struct LiftConfig {
    pub trials: usize,
    pub seed: u64,
    /// Abort on a jump larger than the certified bound.
    pub strict: bool,
    /// Gauss nodes per jump segment.
    pub trace_samples: usize,
    /// Constant the homotopy ends at; defaults to the N-point nearest the
    /// mean of the field.
    pub anchor: Option<Vec<f64>>,
    /// Lift of the anchor; defaults to the target's canonical fiber point.
    pub anchor_lift: Option<Vec<f64>>,
    pub normalize: bool,
    pub path: PathOpts,
    /// Maximum subdivision depth for the gradient quadrature.
    pub quad_depth: usize,
    /// Overrides the certified jump bound (negative controls).
    pub jump_bound_override: Option<f64>,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            trials: 16,
            seed: 0,
            strict: true,
            trace_samples: 2,
            anchor: None,
            anchor_lift: None,
            normalize: true,
            path: PathOpts::default(),
            quad_depth: 3,
            jump_bound_override: None,
        }
    }
}

/// A jump facet of the lifting: a piece of `T_y` with the one-sided traces
/// and the deck element relating them (`v⁺ = label · v⁻`, with `+` on the
/// side the normal points to).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpFacet {
    pub simplex: usize,
    pub vertices: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub measure: f64,
    pub label: DeckElement,
    pub samples: Vec<TraceSample>,
    pub max_geodesic_jump: f64,
    pub approximate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftedField {
    pub target_id: String,
    pub scaffold: String,
    pub shift: Vec<f64>,
    pub anchor: Vec<f64>,
    pub anchor_lift: Vec<f64>,
    /// Lifted values at the triangulation vertices.
    pub values: Vec<Vec<f64>>,
    pub facets: Vec<JumpFacet>,
    pub bv: BvRecord,
    /// Deck element removed by normalization.
    pub normalization: DeckElement,
    pub jump_bound: f64,
    /// Facets whose jump exceeds `jump_bound`.
    pub bound_violations: Vec<usize>,
    /// Sup over vertices of `dist_N(π(v), ρ_y(u))`.
    pub residual: f64,
    /// Largest Lipschitz ratio of `v` over edges off the jump set.
    pub lipschitz: f64,
    pub t_measure: f64,
    pub approximate: bool,
    pub diagnostics: ShiftDiagnostics,
}

/// The N-point nearest the mean of the field's vertex values.
pub fn default_anchor(u: &PiecewiseAffineMap, t: &dyn CoverTarget) -> Result<Vec<f64>> {
    let n = u.values().len() as f64;
    let mut mean = vec![0.0; u.target_dim()];
    for v in u.values() {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n;
        }
    }
    t.tubular_project(&mean)
        .or_else(|| u.values().iter().find_map(|v| t.tubular_project(v)))
        .ok_or_else(|| LiftError::InvalidArgument("no anchor on N for this field".into()))
}

/// Lift every vertex of the field through the homotopy.
pub fn lift_vertices(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    anchor: &[f64],
    w_anchor: &[f64],
    opts: PathOpts,
) -> Result<Vec<Vec<f64>>> {
    let h = Homotopy::new(u, anchor)?;
    u.triangulation()
        .vertices()
        .par_iter()
        .map(|x| cylinder_lift(&h, s, y, x, w_anchor, opts))
        .collect()
}

/// Full lifting of a piecewise-affine field: shift selection, vertex lifts,
/// jump facets, measures and normalization.
pub fn lift_pa_field(u: &PiecewiseAffineMap, s: &Scaffold, cfg: &LiftConfig) -> Result<LiftedField> {
    let t = s.target();
    let anchor = match &cfg.anchor {
        Some(a) => a.clone(),
        None => default_anchor(u, t)?,
    };
    let w_anchor = match &cfg.anchor_lift {
        Some(w) => w.clone(),
        None => t.lift_point(&anchor),
    };
    if t.dist_n(&t.project(&w_anchor), &anchor) > 1e-9 {
        return Err(LiftError::InvalidArgument(
            "anchor lift does not lie over the anchor".into(),
        ));
    }
    let (y, ss, diagnostics) =
        select_shift(u, &anchor, s, cfg.trials, cfg.seed).map_err(|e| e.at("shift"))?;
    lift_with_shift(u, s, cfg, &anchor, &w_anchor, &y, &ss, diagnostics)
}

/// The lifting for a fixed shift and its singular sets.
#[allow(clippy::too_many_arguments)]
pub fn lift_with_shift(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    cfg: &LiftConfig,
    anchor: &[f64],
    w_anchor: &[f64],
    y: &[f64],
    ss: &SingularSets,
    diagnostics: ShiftDiagnostics,
) -> Result<LiftedField> {
    let t = s.target();
    let values =
        lift_vertices(u, s, y, anchor, w_anchor, cfg.path).map_err(|e| e.at("lift"))?;
    let residual = values
        .iter()
        .zip(u.values())
        .map(|(w, z)| {
            s.eval_retraction(y, z)
                .map(|p| t.dist_n(&t.project(w), &p))
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let h = Homotopy::new(u, anchor)?;
    let mut facets = traces::jump_complex(&h, s, y, w_anchor, ss, cfg).map_err(|e| e.at("traces"))?;
    let jump_bound = cfg.jump_bound_override.unwrap_or(s.constants.jump_bound);
    let bound_violations: Vec<usize> = facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.max_geodesic_jump > jump_bound)
        .map(|(i, _)| i)
        .collect();
    if cfg.strict {
        if let Some(&i) = bound_violations.first() {
            return Err(LiftError::BoundViolation {
                jump: facets[i].max_geodesic_jump,
                bound: jump_bound,
            }
            .at("jump-bound"));
        }
    }
    let ac = measure::ac_part(u, s, y, cfg.quad_depth).map_err(|e| e.at("measure"))?;
    let mut values = values;
    let mut normalization = t.identity();
    if cfg.normalize {
        normalization = normalize_values(t, &mut values, &mut facets)?;
    }
    let bv = bv_measure(ac, &facets);
    let lipschitz = measure::lipschitz_statistic(t, u, &values);
    Ok(LiftedField {
        target_id: t.id().to_string(),
        scaffold: s.label(),
        shift: y.to_vec(),
        anchor: anchor.to_vec(),
        anchor_lift: w_anchor.to_vec(),
        values,
        facets,
        bv,
        normalization,
        jump_bound,
        bound_violations,
        residual,
        lipschitz,
        t_measure: ss.t_measure,
        approximate: ss.approximate,
        diagnostics,
    })
}

/// Geodesic median of points of the cover (Weiszfeld iteration in the
/// ambient coordinates, pulled back onto the cover for curved covers).
pub fn geodesic_median(t: &dyn CoverTarget, pts: &[Vec<f64>]) -> Vec<f64> {
    let mut m = pts[0].clone();
    for _ in 0..200 {
        let mut num = vec![0.0; m.len()];
        let mut den = 0.0;
        for p in pts {
            let d = dist(p, &m).max(1e-12);
            num = num.iter().zip(p).map(|(a, b)| a + b / d).collect();
            den += 1.0 / d;
        }
        let next = scale(&num, 1.0 / den);
        let moved = dist(&next, &m);
        m = next;
        if moved < 1e-12 {
            break;
        }
    }
    if !t.on_cover(&m, 1e-9) {
        // curved cover: radial pull-back onto the sphere
        let n = norm(&m);
        if n > 1e-12 {
            m = scale(&m, 1.0 / n);
        } else {
            m = pts[0].clone();
        }
    }
    m
}

/// Move the lifting so its median lies in the fundamental domain; labels are
/// conjugated accordingly. Returns the deck element removed.
fn normalize_values(
    t: &dyn CoverTarget,
    values: &mut [Vec<f64>],
    facets: &mut [JumpFacet],
) -> Result<DeckElement> {
    let stride = (values.len() / 512).max(1);
    let sample: Vec<Vec<f64>> = values.iter().step_by(stride).cloned().collect();
    let w_star = geodesic_median(t, &sample);
    let phi = t.normalize(&w_star).map_err(|e| e.at("normalize"))?;
    if phi.is_identity() {
        return Ok(phi);
    }
    let inv = t.inverse(&phi);
    for v in values.iter_mut() {
        *v = t.apply(&inv, v);
    }
    for f in facets.iter_mut() {
        f.label = t.compose(&inv, &t.compose(&f.label, &phi));
        for smp in f.samples.iter_mut() {
            smp.minus = t.apply(&inv, &smp.minus);
            smp.plus = t.apply(&inv, &smp.plus);
        }
    }
    Ok(phi)
}

/// Sup over vertices of the lifting residual `dist_N(π(v), ρ_y(u))`.
pub fn lifting_residual(lf: &LiftedField, u: &PiecewiseAffineMap, s: &Scaffold) -> f64 {
    let t = s.target();
    lf.values
        .iter()
        .zip(u.values())
        .map(|(w, z)| {
            s.eval_retraction(&lf.shift, z)
                .map(|p| t.dist_n(&t.project(w), &p))
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max)
}


#[cfg(test)]
mod tests;
