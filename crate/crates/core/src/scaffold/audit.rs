//! Empirical audit of a scaffold and certification of its constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analytic, Constants, Scaffold, ScaffoldKind};
use crate::error::Result;
use crate::polygeom::linalg::{add, dist, lerp, norm, scale, sub};

/// Finite-difference step for gradient statistics.
const FD_STEP: f64 = 1e-6;
const SAFETY: f64 = 1.25;
const STABLE_GROWTH: f64 = 0.05;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    pub scaffold: String,
    pub samples: usize,
    pub seed: u64,
    /// `max |ρ(z) - z|` over samples `z ∈ N`.
    pub identity_residual: f64,
    /// `sup |∇ρ|·dist(z, X)` at `samples` and `2·samples` points.
    pub c0_estimates: [f64; 2],
    pub c0_growth: f64,
    pub c0_stable: bool,
    /// `sup length(ρ∘γ)` over `samples/10` segments at tolerance `1e-4`, then
    /// over twice as many at `5e-5`.
    pub c1_estimates: [f64; 2],
    pub c1_growth: f64,
    pub c1_stable: bool,
    /// Lipschitz estimate of the inverse correction on N.
    pub l_corr: f64,
    /// Members of X possibly within `2σ` of one point.
    pub n_near: usize,
    pub certified: Constants,
    pub flags: Vec<String>,
}

fn rng_for(seed: u64, stream: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos(i as u128 * 64);
    r
}

fn uniform_point(rng: &mut impl Rng, m: usize, half: f64) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(-half..half)).collect()
}

/// Frobenius norm of `∇ρ(z)` by central differences.
pub fn grad_norm(s: &Scaffold, z: &[f64], h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..z.len() {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[k] += h;
        zm[k] -= h;
        let d = sub(&s.rho(&zp)?, &s.rho(&zm)?);
        acc += d.iter().map(|v| v * v).sum::<f64>() / (4.0 * h * h);
    }
    Ok(acc.sqrt())
}

/// Length of `ρ∘γ` for the segment `a -> b` by adaptive bisection: an
/// interval is split while its midpoint changes the length by more than
/// `tol/16`.
pub fn arclength(s: &Scaffold, a: &[f64], b: &[f64], tol: f64) -> Result<f64> {
    let t = s.target();
    let n0 = 64usize;
    let pts: Vec<Vec<f64>> = (0..=n0)
        .map(|i| s.rho(&lerp(a, b, i as f64 / n0 as f64)))
        .collect::<Result<_>>()?;
    let local = tol / 16.0;
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, Vec<f64>, Vec<f64>, u32)> = Vec::new();
    for i in 0..n0 {
        stack.push((
            i as f64 / n0 as f64,
            (i + 1) as f64 / n0 as f64,
            pts[i].clone(),
            pts[i + 1].clone(),
            0,
        ));
        while let Some((ta, tb, va, vb, depth)) = stack.pop() {
            let tm = 0.5 * (ta + tb);
            let vm = s.rho(&lerp(a, b, tm))?;
            let (d1, d2) = (t.dist_n(&va, &vm), t.dist_n(&vm, &vb));
            let inc = d1 + d2 - t.dist_n(&va, &vb);
            if inc > local && depth < 48 {
                stack.push((tm, tb, vm.clone(), vb, depth + 1));
                stack.push((ta, tm, va, vm, depth + 1));
            } else {
                total += d1 + d2;
            }
        }
    }
    Ok(total)
}

/// Mean of `1/|P y|` for `y` uniform in the unit m-ball and `P` the
/// projection onto a coordinate 2-plane.
pub fn kappa(m: usize) -> f64 {
    let k = (m as f64 - 2.0) / 2.0;
    let n = 20_000;
    // midpoint rule; integrand is bounded on [0, 1]
    let num: f64 = (0..n)
        .map(|i| {
            let r = (i as f64 + 0.5) / n as f64;
            (1.0 - r * r).powf(k)
        })
        .sum::<f64>()
        / n as f64;
    num * 2.0 * (k + 1.0)
}

fn unit_ball_volume(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(m - 2) * 2.0 * std::f64::consts::PI / m as f64,
    }
}

/// Random point within `r` of the singular set.
fn near_singular(s: &Scaffold, rng: &mut ChaCha8Rng, r: f64) -> Vec<f64> {
    let m = s.m();
    let base = if s.members().is_empty() {
        analytic::singular_sample(s.target_id(), rng)
            .unwrap_or_else(|| uniform_point(rng, m, s.big_m()))
    } else {
        let p = &s.members()[rng.gen_range(0..s.members().len())];
        let verts = p.vertices();
        let mut w: Vec<f64> = verts.iter().map(|_| rng.gen::<f64>()).collect();
        let tot: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= tot);
        let mut x = vec![0.0; m];
        for (v, wi) in verts.iter().zip(&w) {
            x = add(&x, &scale(v, *wi));
        }
        x
    };
    let dir = uniform_point(rng, m, 1.0);
    let dn = norm(&dir).max(1e-12);
    add(&base, &scale(&dir, r / dn))
        .into_iter()
        .map(|v| v.clamp(-s.big_m(), s.big_m()))
        .collect()
}

/// Random point near a vertex of the grid (grid scaffolds only).
fn near_vertex(s: &Scaffold, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let h = s.big_m() / s.q().max(1) as f64;
    let cells = 2 * s.q().max(1) as i64;
    let u: f64 = rng.gen();
    let r = 0.25 * h * u * u;
    let dir = uniform_point(rng, s.m(), 1.0);
    let dn = norm(&dir).max(1e-12);
    (0..s.m())
        .map(|k| {
            let v = -s.big_m() + h * rng.gen_range(0..=cells) as f64;
            (v + dir[k] * r / dn).clamp(-s.big_m(), s.big_m())
        })
        .collect()
}

fn c0_sample(s: &Scaffold, seed: u64, i: usize) -> f64 {
    let mut rng = rng_for(seed, 2, i);
    let z = match (i % 3, s.kind()) {
        (1, _) => {
            let r = s.sigma().min(s.big_m() / 8.0) * rng.gen::<f64>();
            near_singular(s, &mut rng, r)
        }
        (2, ScaffoldKind::GenericGrid) => near_vertex(s, &mut rng),
        _ => uniform_point(&mut rng, s.m(), s.big_m()),
    };
    let d = s.dist_to_singular(&z);
    if d < 1e3 * FD_STEP || z.iter().any(|v| v.abs() > s.big_m() - FD_STEP) {
        return 0.0;
    }
    grad_norm(s, &z, FD_STEP).map_or(0.0, |g| g * d)
}

fn c1_sample(s: &Scaffold, seed: u64, i: usize, tol: f64) -> f64 {
    let mut rng = rng_for(seed, 3, i);
    let big_m = s.big_m();
    let (a, b) = if i % 2 == 0 {
        (
            uniform_point(&mut rng, s.m(), big_m),
            uniform_point(&mut rng, s.m(), big_m),
        )
    } else {
        let r = 1e-3 * s.sigma() * rng.gen::<f64>();
        let p = near_singular(s, &mut rng, r);
        let dir = uniform_point(&mut rng, s.m(), 1.0);
        let dir = scale(&dir, 1.0 / norm(&dir).max(1e-12));
        // longest chord through p inside the cube, in both directions
        let reach = |sgn: f64| {
            (0..s.m())
                .map(|k| {
                    let d = sgn * dir[k];
                    if d > 0.0 {
                        (big_m - p[k]) / d
                    } else if d < 0.0 {
                        (-big_m - p[k]) / d
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(f64::INFINITY, f64::min)
        };
        let (fa, fb) = (rng.gen::<f64>(), rng.gen::<f64>());
        (
            add(&p, &scale(&dir, -reach(-1.0) * fa)),
            add(&p, &scale(&dir, reach(1.0) * fb)),
        )
    };
    arclength(s, &a, &b, tol).unwrap_or(0.0)
}

fn l_corr_sample(s: &Scaffold, seed: u64, i: usize) -> f64 {
    let t = s.target();
    let mut rng = rng_for(seed, 4, i);
    let n1 = t.sample_n(&mut rng);
    let w = t.lift_point(&n1);
    let dir = t.sample_cover(&mut rng);
    let step = 1e-4 / t.dist_cover(&w, &dir).max(1e-4);
    let n2 = t.project(&t.cover_geodesic(&w, &dir, step));
    let r = s.sigma() * rng.gen::<f64>().powf(1.0 / s.m() as f64) * 0.999;
    let d = uniform_point(&mut rng, s.m(), 1.0);
    let y = scale(&d, r / norm(&d).max(1e-12));
    match (s.rho(&sub(&n1, &y)), s.rho(&sub(&n2, &y))) {
        (Ok(p1), Ok(p2)) => {
            let down = dist(&p1, &p2);
            if down > 0.0 {
                dist(&n1, &n2) / down
            } else {
                0.0
            }
        }
        _ => 0.0,
    }
}

fn growth(a: f64, b: f64) -> f64 {
    if a <= 0.0 {
        if b <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (b - a) / a
    }
}

/// Audit `s` with `samples` points on N and `samples`/`2·samples` gradient
/// samples, and derive certified constants.
pub fn audit_scaffold(s: &Scaffold, samples: usize, seed: u64) -> AuditReport {
    let t = s.target();
    let samples = samples.max(10);
    let identity_residual = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, 1, i);
            let z = t.sample_n(&mut rng);
            s.rho(&z).map_or(f64::INFINITY, |r| dist(&r, &z))
        })
        .reduce(|| 0.0, f64::max);

    let c0_all: Vec<f64> = (0..2 * samples)
        .into_par_iter()
        .map(|i| c0_sample(s, seed, i))
        .collect();
    let c0a = c0_all[..samples].iter().copied().fold(0.0, f64::max);
    let c0b = c0_all.iter().copied().fold(0.0, f64::max);

    let segs = (samples / 10).max(10);
    let c1a = (0..segs)
        .into_par_iter()
        .map(|i| c1_sample(s, seed, i, 1e-4))
        .reduce(|| 0.0, f64::max);
    let c1b = (0..2 * segs)
        .into_par_iter()
        .map(|i| c1_sample(s, seed, i, 5e-5))
        .reduce(|| 0.0, f64::max);

    let l_corr = (0..256)
        .into_par_iter()
        .map(|i| l_corr_sample(s, seed, i))
        .reduce(|| 0.0, f64::max)
        .max(1.0)
        * SAFETY;

    let m = s.m();
    let n_near = match s.kind() {
        ScaffoldKind::GenericGrid => {
            let h = s.big_m() / s.q() as f64;
            let per_axis = (4.0 * s.sigma() / h).ceil() as usize + 1;
            per_axis.pow(m as u32) * m * (m - 1) / 2
        }
        ScaffoldKind::Analytic => s.members().len().max(1),
    };

    let c0 = SAFETY * c0a.max(c0b);
    let c1 = SAFETY * c1a.max(c1b);
    let jump_bound = 2.0 * c1 + 1.0;
    let sigma = s.sigma();
    let grad_bound = l_corr * c0 * (n_near as f64 * kappa(m) + 1.0) / sigma;
    let shadow_bound = s.is_polyhedral().then(|| {
        2.0 * s.members().len() as f64 * unit_ball_volume(m - 2) * sigma.powi(m as i32 - 2)
            / (unit_ball_volume(m) * sigma.powi(m as i32))
    });
    let diam = 2.0 * (m as f64).sqrt() * s.lambda();
    let measure_bound =
        shadow_bound.map(|cs| 4.0 * jump_bound.max(1.0) * (grad_bound + cs * diam));

    let c0_growth = growth(c0a, c0b);
    let c1_growth = growth(c1a, c1b);
    let mut flags = Vec::new();
    if identity_residual > 1e-9 {
        flags.push(format!("identity residual {identity_residual:e} exceeds 1e-9"));
    }
    if c0_growth >= STABLE_GROWTH {
        flags.push(format!("C0 grew by {:.2}% under doubling", 100.0 * c0_growth));
    }
    if c1_growth >= STABLE_GROWTH {
        flags.push(format!("C1 grew by {:.2}% under doubling", 100.0 * c1_growth));
    }
    AuditReport {
        scaffold: s.label(),
        samples,
        seed,
        identity_residual,
        c0_estimates: [c0a, c0b],
        c0_growth,
        c0_stable: c0_growth < STABLE_GROWTH,
        c1_estimates: [c1a, c1b],
        c1_growth,
        c1_stable: c1_growth < STABLE_GROWTH,
        l_corr,
        n_near,
        certified: Constants {
            c0,
            c1,
            jump_bound,
            grad_bound,
            shadow_bound,
            measure_bound,
            certified: flags.is_empty(),
        },
        flags,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_planar_is_two() {
        assert!((kappa(2) - 2.0).abs() < 1e-9);
        assert!((kappa(4) - 8.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }
}
