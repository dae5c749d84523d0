use std::collections::HashMap;

use rayon::prelude::*;

use super::path::{cylinder_lift, segment_lift, PathOpts};
use super::lift_vertices;
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{dist, dot, lerp, sub};
use crate::polygeom::{HPolytope, Halfspace, PiecewiseAffineMap, PolyChain};
use crate::scaffold::Scaffold;
use crate::transversal::{Homotopy, ShadowPiece, SingularSets};

const BISECTIONS: usize = 16;
// step cap for lifts along a single mesh edge
const EDGE_STEP: f64 = 1.0;

fn segment_polytope(a: &[f64], b: &[f64]) -> Result<HPolytope> {
    let e = sub(b, a);
    let n = vec![-e[1], e[0]];
    HPolytope::new(
        2,
        vec![
            Halfspace::new(e.clone(), dot(&e, b)),
            Halfspace::new(e.iter().map(|v| -v).collect(), -dot(&e, a)),
        ],
        vec![Halfspace::new(n.clone(), dot(&n, a))],
    )
}

/// Where along the edge `a -> b` the lifting jumps, if it does: the edge is
/// continued from the lift at `a` and compared with the lift at `b`, then
/// the jump is bracketed by bisection.
#[allow(clippy::too_many_arguments)]
fn edge_crossing(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    h: &Homotopy,
    w_anchor: &[f64],
    xa: &[f64],
    xb: &[f64],
    va: &[f64],
    vb: &[f64],
    opts: PathOpts,
) -> Result<Option<Vec<f64>>> {
    let t = s.target();
    let edge_opts = PathOpts {
        max_step: EDGE_STEP,
        ..opts
    };
    let end = segment_lift(u, s, y, xa, xb, va, edge_opts)?;
    if t.deck_identify(&end, vb)?.is_identity() {
        return Ok(None);
    }
    // invariant: the continuation from `xa` agrees with the lifting at `lo`
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut w_lo = va.to_vec();
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let xm = lerp(xa, xb, mid);
        let direct = match cylinder_lift(h, s, y, &xm, w_anchor, opts) {
            Ok(v) => v,
            Err(LiftError::NearJump) => {
                lo = mid;
                hi = mid;
                break;
            }
            Err(e) => return Err(e),
        };
        let cont = segment_lift(u, s, y, &lerp(xa, xb, lo), &xm, &w_lo, edge_opts)?;
        if t.deck_identify(&cont, &direct)?.is_identity() {
            lo = mid;
            w_lo = direct;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lerp(xa, xb, 0.5 * (lo + hi))))
}

/// Estimate `T_y` for a scaffold without a polyhedral singular set: jumps of
/// the vertex lifts along triangulation edges are located by bisection and
/// joined inside each triangle. `S_y` is not estimated.
pub(crate) fn sampled_singular_sets(
    u: &PiecewiseAffineMap,
    anchor: &[f64],
    s: &Scaffold,
    y: &[f64],
) -> Result<SingularSets> {
    let tri = u.triangulation();
    let d = tri.dim();
    if d > 2 {
        return Err(LiftError::InvalidArgument(
            "estimated shadow sets support domains of dimension <= 2".into(),
        ));
    }
    let t = s.target();
    let opts = PathOpts::default();
    let w_anchor = t.lift_point(&s.eval_retraction(y, anchor)?);
    let h = Homotopy::new(u, anchor)?;
    let mut out = SingularSets {
        shift: y.to_vec(),
        s_y: PolyChain::new(d),
        t_y: PolyChain::new(d),
        s_pieces: Vec::new(),
        t_pieces: Vec::new(),
        t_measure: 0.0,
        certified: true,
        approximate: true,
        defect: None,
    };
    let values = match lift_vertices(u, s, y, anchor, &w_anchor, opts) {
        Ok(v) => v,
        Err(LiftError::NearJump) => {
            out.certified = false;
            out.defect = Some("a vertex lies on the shadow set".into());
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let verts = tri.vertices();
    let edges = tri.edges();
    let found: Vec<Result<Option<((usize, usize), Vec<f64>)>>> = edges
        .par_iter()
        .map(|&(a, b)| {
            edge_crossing(
                u, s, y, &h, &w_anchor, &verts[a], &verts[b], &values[a], &values[b], opts,
            )
            .map(|c| c.map(|p| ((a.min(b), a.max(b)), p)))
        })
        .collect();
    let mut crossings: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    for f in found {
        if let Some((k, p)) = f? {
            crossings.insert(k, p);
        }
    }
    for (si, simplex) in tri.simplices().iter().enumerate() {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for i in 0..simplex.len() {
            for j in i + 1..simplex.len() {
                let k = (simplex[i].min(simplex[j]), simplex[i].max(simplex[j]));
                if let Some(p) = crossings.get(&k) {
                    pts.push(p.clone());
                }
            }
        }
        let mut pieces: Vec<HPolytope> = Vec::new();
        match (d, pts.len()) {
            (_, 0) => {}
            (1, _) => pieces.push(HPolytope::from_box(&pts[0], &pts[0])),
            (_, 2) => pieces.push(segment_polytope(&pts[0], &pts[1])?),
            _ => {
                let c: Vec<f64> = (0..2)
                    .map(|k| tri.simplex_points(si).iter().map(|p| p[k]).sum::<f64>() / 3.0)
                    .collect();
                for p in &pts {
                    pieces.push(segment_polytope(p, &c)?);
                }
            }
        }
        for p in pieces {
            out.t_measure += if d == 1 {
                1.0
            } else {
                let v = p.vertices();
                if v.len() == 2 {
                    dist(&v[0], &v[1])
                } else {
                    0.0
                }
            };
            out.t_y.push(p.clone(), out.t_pieces.len() as i64)?;
            out.t_pieces.push(ShadowPiece {
                simplex: si,
                member: 0,
                polytope: p,
            });
        }
    }
    Ok(out)
}
