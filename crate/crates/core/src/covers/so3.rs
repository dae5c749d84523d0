use std::f64::consts::PI;

use nalgebra::Matrix3;

use super::quat::{self, as_quat, qmul, qnormalize, sphere_dist, Q8};
use super::{gaussian, CoverTarget, DeckElement};
use crate::error::{LiftError, Result};

/// `S³ -> SO(3) ⊂ R⁹`, unit quaternion to rotation matrix (row-major).
#[derive(Clone, Copy, Debug, Default)]
pub struct So3;

pub(super) fn unit(a: &DeckElement) -> Q8 {
    match a {
        DeckElement::Unit(u) => *u,
        _ => panic!("foreign deck element"),
    }
}

pub(super) fn left_apply(a: &DeckElement, w: &[f64]) -> Vec<f64> {
    qmul(&unit(a).quat(), &as_quat(w)).to_vec()
}

/// Deck element of `group` carrying `a` closest to `b`.
pub(super) fn identify_in(group: &[Q8], a: &[f64], b: &[f64]) -> Result<DeckElement> {
    let aq = as_quat(a);
    let mut best = (f64::INFINITY, Q8::ONE);
    for g in group {
        let c = qmul(&g.quat(), &aq);
        let r = c
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        if r < best.0 {
            best = (r, *g);
        }
    }
    if best.0 > 1e-6 {
        return Err(LiftError::NotSameFiber(best.0));
    }
    Ok(DeckElement::Unit(best.1))
}

/// Quotient distance on `S³/group`.
pub(super) fn orbit_dist(group: &[Q8], a: &[f64], b: &[f64]) -> f64 {
    let aq = as_quat(a);
    group
        .iter()
        .map(|g| sphere_dist(&qmul(&g.quat(), &aq), b))
        .fold(f64::INFINITY, f64::min)
}

pub(super) fn sample_s3(rng: &mut dyn rand::RngCore) -> Vec<f64> {
    let v = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
    qnormalize(&v).to_vec()
}

pub(super) fn on_s3(w: &[f64], tol: f64) -> bool {
    w.len() == 4 && (quat::qdot(w, w).sqrt() - 1.0).abs() <= tol
}

fn mat(z: &[f64]) -> Matrix3<f64> {
    Matrix3::from_row_slice(&z[..9])
}

fn flat(r: &[[f64; 3]; 3]) -> Vec<f64> {
    r.iter().flat_map(|row| row.iter().copied()).collect()
}

const SIGNS: [Q8; 2] = [Q8 { neg: false, axis: 0 }, Q8 { neg: true, axis: 0 }];

impl So3 {
    /// Nearest rotation together with the gap `σ₂ + s·σ₃` that vanishes
    /// exactly where the nearest rotation is not unique.
    pub fn polar(z: &[f64]) -> Option<(Vec<f64>, f64)> {
        let m = mat(z);
        let svd = m.svd(true, true);
        let (u, vt) = (svd.u?, svd.v_t?);
        let mut sv: Vec<(f64, usize)> = svd
            .singular_values
            .iter()
            .copied()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        sv.sort_by(|a, b| b.0.total_cmp(&a.0));
        let s = (u * vt).determinant().signum();
        let mut d = Matrix3::identity();
        d[(sv[2].1, sv[2].1)] = s;
        let r = u * d * vt;
        let gap = sv[1].0 + s * sv[2].0;
        if gap <= 0.0 {
            return None;
        }
        Some((r.transpose().as_slice().to_vec(), gap))
    }
}

impl CoverTarget for So3 {
    fn id(&self) -> &'static str {
        "so3"
    }
    fn m(&self) -> usize {
        9
    }
    fn ell(&self) -> usize {
        4
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        flat(&quat::to_rot(&as_quat(w)))
    }

    fn dist_cover(&self, a: &[f64], b: &[f64]) -> f64 {
        sphere_dist(a, b)
    }

    fn dist_n(&self, a: &[f64], b: &[f64]) -> f64 {
        orbit_dist(&SIGNS, &self.lift_point(a), &self.lift_point(b))
    }

    fn tubular_project(&self, z: &[f64]) -> Option<Vec<f64>> {
        So3::polar(z).map(|(r, _)| r)
    }

    fn reach(&self) -> f64 {
        1.0
    }

    fn r_inj(&self) -> f64 {
        PI / 2.0
    }

    fn lift_point(&self, z: &[f64]) -> Vec<f64> {
        let r = [
            [z[0], z[1], z[2]],
            [z[3], z[4], z[5]],
            [z[6], z[7], z[8]],
        ];
        quat::from_rot(&r).to_vec()
    }

    fn on_cover(&self, w: &[f64], tol: f64) -> bool {
        on_s3(w, tol)
    }

    fn cover_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        quat::slerp(a, b, t).to_vec()
    }

    fn n_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        let wa = self.lift_point(a);
        let mut wb = self.lift_point(b);
        if quat::qdot(&wa, &wb) < 0.0 {
            wb.iter_mut().for_each(|v| *v = -*v);
        }
        self.project(&quat::slerp(&wa, &wb, t))
    }

    fn identity(&self) -> DeckElement {
        DeckElement::Unit(Q8::ONE)
    }

    fn compose(&self, a: &DeckElement, b: &DeckElement) -> DeckElement {
        DeckElement::Unit(unit(a).mul(unit(b)))
    }

    fn inverse(&self, a: &DeckElement) -> DeckElement {
        DeckElement::Unit(unit(a).inv())
    }

    fn apply(&self, a: &DeckElement, w: &[f64]) -> Vec<f64> {
        left_apply(a, w)
    }

    fn elements(&self) -> Vec<DeckElement> {
        SIGNS.iter().map(|u| DeckElement::Unit(*u)).collect()
    }

    fn parse_element(&self, s: &str) -> Option<DeckElement> {
        Q8::parse(s).filter(|u| u.axis == 0).map(DeckElement::Unit)
    }

    fn generator(&self) -> DeckElement {
        DeckElement::Unit(SIGNS[1])
    }

    fn deck_identify(&self, a: &[f64], b: &[f64]) -> Result<DeckElement> {
        identify_in(&SIGNS, a, b)
    }

    fn normalize(&self, _w: &[f64]) -> Result<DeckElement> {
        Ok(self.identity())
    }

    fn in_fundamental_domain(&self, w: &[f64], tol: f64) -> bool {
        on_s3(w, tol.max(1e-9))
    }

    fn sample_n(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        self.project(&sample_s3(rng))
    }

    fn sample_cover(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        sample_s3(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antipodes_share_rotation() {
        let t = So3;
        let w = qnormalize(&[0.2, 0.4, -0.1, 0.8]);
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        let (a, b) = (t.project(&w), t.project(&neg));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!(t.normalize(&w).unwrap().is_identity());
    }

    #[test]
    fn polar_fixes_rotations() {
        let t = So3;
        let z = t.project(&qnormalize(&[0.5, -0.1, 0.3, 0.2]));
        let p = t.tubular_project(&z).unwrap();
        assert!(z.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}
