use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{singular_sets, SingularSets};
use crate::covers::gaussian;
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{axpy, norm, sub};
use crate::polygeom::{simplex_rule, PiecewiseAffineMap};
use crate::scaffold::Scaffold;

const FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub y: Vec<f64>,
    /// `‖∇(ρ_y∘u)‖₁ + H^{d-1}(T_y)`; `None` for rejected draws.
    pub score: Option<f64>,
    pub grad_l1: Option<f64>,
    pub t_measure: Option<f64>,
    pub certified: bool,
    pub defect: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftDiagnostics {
    pub seed: u64,
    pub trials: Vec<TrialRecord>,
    pub median_score: f64,
    pub median_grad: f64,
    pub median_t_measure: f64,
    pub accepted: usize,
}

/// Frobenius norm of `∇(ρ_y∘u)` at a point of simplex `si`, by central
/// differences along the columns of the field's Jacobian.
pub(crate) fn retracted_grad(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    si: usize,
    x: &[f64],
) -> Result<f64> {
    let z = u.eval_on(si, x);
    let jac = u.jacobian(si);
    let mut sq = 0.0;
    for k in 0..u.domain_dim() {
        let col: Vec<f64> = jac.iter().map(|r| r[k]).collect();
        if norm(&col) == 0.0 {
            continue;
        }
        let p = s.eval_retraction(y, &axpy(&z, FD_STEP, &col))?;
        let m = s.eval_retraction(y, &axpy(&z, -FD_STEP, &col))?;
        let g = sub(&p, &m);
        sq += g.iter().map(|v| v * v).sum::<f64>() / (4.0 * FD_STEP * FD_STEP);
    }
    Ok(sq.sqrt())
}

/// `‖∇(ρ_y∘u)‖_{L¹}` by order-2 quadrature on every simplex.
pub fn retracted_tv(u: &PiecewiseAffineMap, s: &Scaffold, y: &[f64]) -> Result<f64> {
    let tri = u.triangulation();
    let rule = simplex_rule(tri.dim());
    let parts: Vec<Result<f64>> = (0..tri.simplices().len())
        .into_par_iter()
        .map(|si| {
            let pts = tri.simplex_points(si);
            let vol = tri.simplex_volume(si);
            let mut acc = 0.0;
            for (b, w) in &rule {
                let x: Vec<f64> = (0..tri.dim())
                    .map(|k| pts.iter().zip(b).map(|(p, l)| p[k] * l).sum())
                    .collect();
                acc += w * retracted_grad(u, s, y, si, &x)?;
            }
            Ok(acc * vol)
        })
        .collect();
    parts.into_iter().sum()
}

/// Uniform draw from the open ball of radius `r`.
pub(crate) fn draw_shift(rng: &mut ChaCha8Rng, m: usize, r: f64) -> Vec<f64> {
    let dir: Vec<f64> = (0..m).map(|_| gaussian(rng)).collect();
    let n = norm(&dir).max(1e-300);
    let rad = r * rng.gen::<f64>().powf(1.0 / m as f64);
    dir.iter().map(|v| v * rad / n).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Draw `trials` shifts, score them, and accept the first certified draw
/// whose score and both of its parts are within twice the median over the
/// certified draws.
pub fn select_shift(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    trials: usize,
    seed: u64,
) -> Result<(Vec<f64>, SingularSets, ShiftDiagnostics)> {
    if trials == 0 {
        return Err(LiftError::InvalidArgument("need at least one trial".into()));
    }
    let run = |i: usize| -> Result<(TrialRecord, Option<SingularSets>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let y = draw_shift(&mut rng, s.m(), s.sigma());
        let ss = singular_sets(u, anchor, s, &y)?;
        let mut rec = TrialRecord {
            index: i,
            y: y.clone(),
            score: None,
            grad_l1: None,
            t_measure: None,
            certified: ss.certified,
            defect: ss.defect.clone(),
        };
        if !ss.certified {
            return Ok((rec, None));
        }
        match retracted_tv(u, s, &y) {
            Ok(g) => {
                rec.grad_l1 = Some(g);
                rec.t_measure = Some(ss.t_measure);
                rec.score = Some(g + ss.t_measure);
                Ok((rec, Some(ss)))
            }
            Err(e) => {
                rec.certified = false;
                rec.defect = Some(e.to_string());
                Ok((rec, None))
            }
        }
    };
    let mut results = (0..trials)
        .into_par_iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?;
    let ok: Vec<&TrialRecord> = results.iter().map(|r| &r.0).filter(|r| r.certified).collect();
    let med = |f: fn(&TrialRecord) -> Option<f64>| median(ok.iter().filter_map(|r| f(r)).collect());
    let (ms, mg, mt) = (med(|r| r.score), med(|r| r.grad_l1), med(|r| r.t_measure));
    let within = |v: Option<f64>, m: f64| v.is_some_and(|v| v <= 2.0 * m + 1e-12);
    let pick = results.iter().position(|(r, _)| {
        r.certified && within(r.score, ms) && within(r.grad_l1, mg) && within(r.t_measure, mt)
    });
    let Some(k) = pick else {
        return Err(LiftError::SelectionFailure(trials));
    };
    let ss = results[k].1.take();
    let trials_out: Vec<TrialRecord> = results.into_iter().map(|r| r.0).collect();
    let rec = trials_out[k].clone();
    Ok((
        rec.y,
        ss.expect("certified trial keeps its sets"),
        ShiftDiagnostics {
            seed,
            trials: trials_out,
            median_score: ms,
            median_grad: mg,
            median_t_measure: mt,
            accepted: k,
        },
    ))
}
