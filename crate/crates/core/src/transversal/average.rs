use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::select::draw_shift;
use super::{retracted_tv, singular_sets};
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::dist;
use crate::polygeom::{simplex_rule, PiecewiseAffineMap};
use crate::scaffold::Scaffold;

/// Means over random shifts of the retracted gradient norm and of the
/// shadow measure, compared with their certified bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AveragedBounds {
    pub shifts: usize,
    /// Draws that landed on the singular set and were skipped.
    pub rejected: usize,
    pub field_tv: f64,
    /// `∫ |u - u*| |∇u|`.
    pub weighted_tv: f64,
    pub mean_grad: f64,
    pub mean_t_measure: f64,
    /// `mean_grad / ‖∇u‖`.
    pub grad_ratio: f64,
    /// `mean_t_measure / ∫ |u - u*| |∇u|`.
    pub t_ratio: f64,
    pub grad_bound: f64,
    pub shadow_bound: Option<f64>,
    pub holds: bool,
}

/// `∫ |u - anchor| |∇u|` by the same quadrature as the retracted norms.
pub fn weighted_tv(u: &PiecewiseAffineMap, anchor: &[f64]) -> f64 {
    let tri = u.triangulation();
    let rule = simplex_rule(tri.dim());
    (0..tri.simplices().len())
        .map(|si| {
            let pts = tri.simplex_points(si);
            let mut acc = 0.0;
            for (b, w) in &rule {
                let x: Vec<f64> = (0..tri.dim())
                    .map(|k| pts.iter().zip(b).map(|(p, l)| p[k] * l).sum())
                    .collect();
                acc += w * dist(&u.eval_on(si, &x), anchor);
            }
            acc * tri.simplex_volume(si) * u.grad_norm(si)
        })
        .sum()
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

fn draws(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    shifts: usize,
    seed: u64,
) -> Result<Vec<Option<(f64, f64)>>> {
    if !s.is_polyhedral() {
        return Err(LiftError::InvalidArgument(
            "averaged shadow measures need a polyhedral singular set".into(),
        ));
    }
    (0..shifts)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let y = draw_shift(&mut rng, s.m(), s.sigma());
            let grad = match retracted_tv(u, s, &y) {
                Ok(g) => g,
                Err(LiftError::NearSingular(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let ss = singular_sets(u, anchor, s, &y)?;
            Ok(Some((grad, ss.t_measure)))
        })
        .collect()
}

fn summarize(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    draws: &[Option<(f64, f64)>],
) -> Result<AveragedBounds> {
    let kept: Vec<(f64, f64)> = draws.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(LiftError::SelectionFailure(draws.len()));
    }
    let n = kept.len() as f64;
    let mean_grad = kept.iter().map(|v| v.0).sum::<f64>() / n;
    let mean_t_measure = kept.iter().map(|v| v.1).sum::<f64>() / n;
    let field_tv = u.tv_l1();
    let wtv = weighted_tv(u, anchor);
    let grad_bound = s.constants.grad_bound;
    let shadow_bound = s.constants.shadow_bound;
    let holds = mean_grad <= grad_bound * field_tv
        && shadow_bound.map_or(true, |c| mean_t_measure <= c * wtv);
    Ok(AveragedBounds {
        shifts: draws.len(),
        rejected: draws.len() - kept.len(),
        field_tv,
        weighted_tv: wtv,
        mean_grad,
        mean_t_measure,
        grad_ratio: ratio(mean_grad, field_tv),
        t_ratio: ratio(mean_t_measure, wtv),
        grad_bound,
        shadow_bound,
        holds,
    })
}

/// Average over `shifts` draws from the shift ball. Draw `i` uses stream
/// `i` of the seeded generator, so a run with `2n` shifts extends the one
/// with `n`.
pub fn averaged_bounds(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    shifts: usize,
    seed: u64,
) -> Result<AveragedBounds> {
    summarize(u, anchor, s, &draws(u, anchor, s, shifts, seed)?)
}

/// [`averaged_bounds`] at `shifts` and `2·shifts`, sharing the draws.
pub fn averaged_bounds_doubling(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    shifts: usize,
    seed: u64,
) -> Result<(AveragedBounds, AveragedBounds)> {
    let all = draws(u, anchor, s, 2 * shifts, seed)?;
    Ok((summarize(u, anchor, s, &all[..shifts])?, summarize(u, anchor, s, &all)?))
}

/// Relative change between two averaged constants.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
