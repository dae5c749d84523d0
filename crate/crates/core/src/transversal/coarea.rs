use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shadow_in_simplex;
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::dist;
use crate::polygeom::{HPolytope, Halfspace};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoareaCheck {
    /// `∫ H^{d-1}(τ(V⁻¹(z)) ∩ Ω) dz` over the plane.
    pub lhs: f64,
    /// `2 ∫_Ω |v - v*| |∇v|`.
    pub rhs: f64,
    pub holds: bool,
}

/// Check the coarea inequality for the homotopy `V(t, x) = (1-t) v(x) + t v*`
/// of an affine map `v(x) = A x + b` from the box `[lo, hi]` to the plane.
/// Both integrals use a `resolution`-point midpoint rule per axis; the slice
/// measures are exact.
pub fn coarea_bound_check(
    a: &[Vec<f64>],
    b: &[f64],
    v_star: &[f64],
    lo: &[f64],
    hi: &[f64],
    resolution: usize,
) -> Result<CoareaCheck> {
    let d = lo.len();
    if !(2..=3).contains(&d) || a.len() != 2 || b.len() != 2 || v_star.len() != 2 {
        return Err(LiftError::InvalidArgument(
            "coarea check needs a map from a 2- or 3-box to the plane".into(),
        ));
    }
    if resolution == 0 {
        return Err(LiftError::InvalidArgument("resolution must be positive".into()));
    }
    let v = |x: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|i| b[i] + a[i].iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
            .collect()
    };
    let frob = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();

    // right-hand side: midpoint rule on the box
    let n_cells = resolution.pow(d as u32);
    let cell_vol: f64 = (0..d).map(|k| (hi[k] - lo[k]) / resolution as f64).product();
    let rhs: f64 = (0..n_cells)
        .into_par_iter()
        .map(|mut idx| {
            let x: Vec<f64> = (0..d)
                .map(|k| {
                    let i = idx % resolution;
                    idx /= resolution;
                    lo[k] + (i as f64 + 0.5) * (hi[k] - lo[k]) / resolution as f64
                })
                .collect();
            dist(&v(&x), v_star)
        })
        .sum::<f64>()
        * cell_vol
        * frob
        * 2.0;

    // left-hand side: midpoint rule over the bounding box of V's image
    let corners: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { hi[k] } else { lo[k] }).collect())
        .collect();
    let images: Vec<Vec<f64>> = corners.iter().map(|c| v(c)).collect();
    let mut zlo = v_star.to_vec();
    let mut zhi = v_star.to_vec();
    for p in &images {
        for j in 0..2 {
            zlo[j] = zlo[j].min(p[j]);
            zhi[j] = zhi[j].max(p[j]);
        }
    }
    let (dz0, dz1) = (
        (zhi[0] - zlo[0]) / resolution as f64,
        (zhi[1] - zlo[1]) / resolution as f64,
    );
    if dz0 * dz1 <= 0.0 {
        let lhs = 0.0;
        return Ok(CoareaCheck {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + 1e-6) + 1e-9,
        });
    }
    let omega = HPolytope::from_box(lo, hi);
    let w_max = images.iter().map(|p| dist(p, v_star)).fold(0.0, f64::max);
    let lhs = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| -> Result<f64> {
            let z = [
                zlo[0] + (idx % resolution) as f64 * dz0 + 0.5 * dz0,
                zlo[1] + (idx / resolution) as f64 * dz1 + 0.5 * dz1,
            ];
            let gap = dist(&z, v_star);
            if gap <= 1e-12 {
                return Ok(0.0);
            }
            let point = HPolytope::new(
                2,
                vec![],
                vec![
                    Halfspace::new(vec![1.0, 0.0], z[0]),
                    Halfspace::new(vec![0.0, 1.0], z[1]),
                ],
            )?;
            let slice = shadow_in_simplex(&omega, a, b, v_star, &point, w_max / gap + 1.0)?;
            match slice.intrinsic_dim() {
                Some(k) if k + 1 == d => slice.haus_measure(d - 1),
                _ => Ok(0.0),
            }
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum::<f64>()
        * dz0
        * dz1;
    Ok(CoareaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6) + 1e-9,
    })
}

/// One instance of [`random_coarea_checks`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoareaInstance {
    pub dim: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub v_star: Vec<f64>,
    pub check: CoareaCheck,
}

/// `count` seeded random affine maps from `[-1, 1]^dim` to the plane, with
/// entries of `A` in `[-2, 2]` and `b`, `v*` in `[-1, 1]²`.
pub fn random_coarea_checks(
    dim: usize,
    count: usize,
    seed: u64,
    resolution: usize,
) -> Result<Vec<CoareaInstance>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(dim as u64);
    let lo = vec![-1.0; dim];
    let hi = vec![1.0; dim];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let a: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let b: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v_star: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let check = coarea_bound_check(&a, &b, &v_star, &lo, &hi, resolution)?;
        out.push(CoareaInstance {
            dim,
            a,
            b,
            v_star,
            check,
        });
    }
    Ok(out)
}
