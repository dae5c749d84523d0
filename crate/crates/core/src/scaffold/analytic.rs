//! Closed-form retractions for the bundled targets.

use std::f64::consts::SQRT_2;

use nalgebra::Matrix3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::covers::quat::to_rot;
use crate::covers::{self, So3};
use crate::error::{LiftError, Result};
use crate::polygeom::{HPolytope, Halfspace};

pub(crate) fn rho(target_id: &str, z: &[f64]) -> Result<Vec<f64>> {
    let t = covers::target(target_id)?;
    match target_id {
        "so3" => So3::polar(z).map(|(r, _)| r),
        _ => t.tubular_project(z),
    }
    .ok_or(LiftError::SingularPoint)
}

/// Distance to the singular set of the closed-form retraction.
pub(crate) fn dist(target_id: &str, z: &[f64]) -> f64 {
    match target_id {
        "circle" => z[0].hypot(z[1]),
        "clifford_torus" => z[0].hypot(z[1]).min(z[2].hypot(z[3])),
        "so3" => So3::polar(z).map_or(0.0, |(_, gap)| gap / SQRT_2),
        "so3_mod_v4" => covers::degeneracy_distance(z),
        _ => f64::INFINITY,
    }
}

/// Polyhedral description of the singular set inside `[-M, M]^m`, when it
/// has one.
pub(crate) fn members(target_id: &str, big_m: f64) -> Option<Vec<HPolytope>> {
    let unit = |m: usize, k: usize| {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        e
    };
    match target_id {
        "circle" => Some(vec![HPolytope::new(
            2,
            vec![],
            vec![Halfspace::new(unit(2, 0), 0.0), Halfspace::new(unit(2, 1), 0.0)],
        )
        .expect("valid constraints")]),
        "clifford_torus" => {
            let plane = |zero: [usize; 2]| {
                let mut lo = vec![-big_m; 4];
                let mut hi = vec![big_m; 4];
                for k in zero {
                    lo[k] = 0.0;
                    hi[k] = 0.0;
                }
                HPolytope::from_box(&lo, &hi)
            };
            Some(vec![plane([0, 1]), plane([2, 3])])
        }
        _ => None,
    }
}

/// Random point of a non-polyhedral singular set.
pub(crate) fn singular_sample(target_id: &str, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let t = covers::target(target_id).ok()?;
    let rot = |rng: &mut ChaCha8Rng| {
        let r = to_rot(&covers::quat::as_quat(&t.sample_cover(rng)));
        Matrix3::from_fn(|i, j| r[i][j])
    };
    match target_id {
        "so3" => {
            let (u, v) = (rot(rng), rot(rng));
            let a = rng.gen_range(0.0..0.6);
            let b = rng.gen_range(0.0..0.6);
            let m = u * Matrix3::from_diagonal(&[a, b, -b].into()) * v.transpose();
            Some(m.transpose().as_slice().to_vec())
        }
        "so3_mod_v4" => {
            let q = rot(rng);
            let a = rng.gen_range(-1.0..1.0);
            let b = rng.gen_range(-1.0..1.0);
            let s = q.transpose() * Matrix3::from_diagonal(&[a, a, b].into()) * q;
            Some(covers::so3_v4_sym_to_vec(&s))
        }
        _ => None,
    }
}
