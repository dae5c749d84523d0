use crate::error::{LiftError, Result};
use crate::polygeom::linalg::lerp;
use crate::polygeom::PiecewiseAffineMap;
use crate::scaffold::Scaffold;
use crate::transversal::Homotopy;

/// Step control for path lifting.
#[derive(Clone, Copy, Debug)]
pub struct PathOpts {
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for PathOpts {
    fn default() -> Self {
        Self {
            max_step: 1.0 / 8.0,
            min_step: 1e-12,
        }
    }
}

/// Lift the path `τ -> f(τ)`, `τ ∈ [0, 1]`, starting at `w0` over `f(0)`.
/// A step is taken only when both halves move less than `r_inj/4` on N.
pub fn lift_path(
    s: &Scaffold,
    f: &dyn Fn(f64) -> Result<Vec<f64>>,
    w0: &[f64],
    opts: PathOpts,
) -> Result<Vec<f64>> {
    let t = s.target();
    let r = t.r_inj() / 4.0;
    let mut tau = 0.0;
    let mut dt = opts.max_step;
    let mut p = f(0.0).map_err(|_| LiftError::NearJump)?;
    let mut w = w0.to_vec();
    while tau < 1.0 {
        let (t1, step) = if 1.0 - tau <= dt {
            (1.0, 1.0 - tau)
        } else {
            (tau + dt, dt)
        };
        let probe = f(tau + 0.5 * step).and_then(|pm| Ok((pm, f(t1)?)));
        match probe {
            Ok((pm, p1)) if t.dist_n(&p, &pm) < r && t.dist_n(&pm, &p1) < r => {
                w = t.lift_step(&w, &pm)?;
                w = t.lift_step(&w, &p1)?;
                tau = t1;
                p = p1;
                dt = (2.0 * dt).min(opts.max_step);
            }
            Ok(_) | Err(LiftError::NearSingular(_)) | Err(LiftError::SingularPoint) => {
                dt *= 0.5;
                if dt < opts.min_step {
                    return Err(LiftError::NearJump);
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(w)
}

/// `v(x)`: lift of `t -> ρ_y(U(t, x))` from `t = 1` (at `w_anchor`) down to
/// `t = 0`.
pub fn cylinder_lift(
    h: &Homotopy,
    s: &Scaffold,
    y: &[f64],
    x: &[f64],
    w_anchor: &[f64],
    opts: PathOpts,
) -> Result<Vec<f64>> {
    let t = s.target();
    let start = s.eval_retraction(y, h.anchor())?;
    if t.dist_n(&t.project(w_anchor), &start) > 1e-9 {
        return Err(LiftError::InvalidArgument(
            "anchor lift does not lie over the anchor".into(),
        ));
    }
    let ux = h.base().eval(x);
    let anchor = h.anchor();
    let f = |tau: f64| {
        let z: Vec<f64> = ux
            .iter()
            .zip(anchor)
            .map(|(a, b)| tau * a + (1.0 - tau) * b)
            .collect();
        s.eval_retraction(y, &z)
    };
    lift_path(s, &f, w_anchor, opts)
}

/// Continue a lift `w0` at `a` along the straight segment to `b`.
pub fn segment_lift(
    u: &PiecewiseAffineMap,
    s: &Scaffold,
    y: &[f64],
    a: &[f64],
    b: &[f64],
    w0: &[f64],
    opts: PathOpts,
) -> Result<Vec<f64>> {
    let f = |tau: f64| s.eval_retraction(y, &u.eval(&lerp(a, b, tau)));
    lift_path(s, &f, w0, opts)
}
