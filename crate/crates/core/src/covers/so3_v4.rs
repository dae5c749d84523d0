use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::{Matrix3, SymmetricEigen};

use super::quat::{self, as_quat, Q8};
use super::so3::{identify_in, left_apply, on_s3, orbit_dist, sample_s3, unit};
use super::{CoverTarget, DeckElement};
use crate::error::Result;

/// Eigenvalues of the invariant tensor; distinct, so its stabilizer in
/// SO(3) is exactly the Klein four-group of diagonal sign flips.
pub const SPECTRUM: [f64; 3] = [-1.0, 0.0, 1.0];

/// `S³ -> SO(3)/V₄`, realized as `q ↦ R(q)ᵀ·diag(SPECTRUM)·R(q)` in the
/// orthonormal coordinates `(S11, S22, S33, √2 S12, √2 S13, √2 S23)` of
/// symmetric 3×3 matrices. Deck group Q8 acts by left multiplication.
#[derive(Clone, Copy, Debug, Default)]
pub struct So3ModV4;

pub fn sym_to_vec(s: &Matrix3<f64>) -> Vec<f64> {
    vec![
        s[(0, 0)],
        s[(1, 1)],
        s[(2, 2)],
        SQRT_2 * s[(0, 1)],
        SQRT_2 * s[(0, 2)],
        SQRT_2 * s[(1, 2)],
    ]
}

pub fn vec_to_sym(z: &[f64]) -> Matrix3<f64> {
    let (a, b, c) = (
        z[3] * FRAC_1_SQRT_2,
        z[4] * FRAC_1_SQRT_2,
        z[5] * FRAC_1_SQRT_2,
    );
    Matrix3::new(z[0], a, b, a, z[1], c, b, c, z[2])
}

/// Eigenvalues ascending with matching unit eigenvectors.
pub fn sorted_eigen(z: &[f64]) -> ([f64; 3], [[f64; 3]; 3]) {
    let e = SymmetricEigen::new(vec_to_sym(z));
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let mut vals = [0.0; 3];
    let mut vecs = [[0.0; 3]; 3];
    for (k, &i) in idx.iter().enumerate() {
        vals[k] = e.eigenvalues[i];
        for r in 0..3 {
            vecs[k][r] = e.eigenvectors[(r, i)];
        }
    }
    (vals, vecs)
}

/// Smallest eigenvalue gap divided by √2: the Frobenius distance to the set
/// of symmetric matrices with a repeated eigenvalue.
pub fn degeneracy_distance(z: &[f64]) -> f64 {
    let (v, _) = sorted_eigen(z);
    (v[1] - v[0]).min(v[2] - v[1]) / SQRT_2
}

/// Lexicographically largest member of the Q8 orbit of `w`.
pub fn canonical(w: &[f64]) -> [f64; 4] {
    let q = as_quat(w);
    Q8::all()
        .iter()
        .map(|g| quat::qmul(&g.quat(), &q))
        .max_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap()
}

impl CoverTarget for So3ModV4 {
    fn id(&self) -> &'static str {
        "so3_mod_v4"
    }
    fn m(&self) -> usize {
        6
    }
    fn ell(&self) -> usize {
        4
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        let r = quat::to_rot(&as_quat(w));
        let r = Matrix3::from_fn(|i, j| r[i][j]);
        let d = Matrix3::from_diagonal(&SPECTRUM.into());
        sym_to_vec(&(r.transpose() * d * r))
    }

    fn dist_cover(&self, a: &[f64], b: &[f64]) -> f64 {
        quat::sphere_dist(a, b)
    }

    fn dist_n(&self, a: &[f64], b: &[f64]) -> f64 {
        orbit_dist(&Q8::all(), &self.lift_point(a), &self.lift_point(b))
    }

    fn tubular_project(&self, z: &[f64]) -> Option<Vec<f64>> {
        let (vals, vecs) = sorted_eigen(z);
        if vals[1] - vals[0] <= 1e-300 || vals[2] - vals[1] <= 1e-300 {
            return None;
        }
        let mut s = Matrix3::zeros();
        for k in 0..3 {
            let v = nalgebra::Vector3::from(vecs[k]);
            s += SPECTRUM[k] * v * v.transpose();
        }
        Some(sym_to_vec(&s))
    }

    fn reach(&self) -> f64 {
        FRAC_1_SQRT_2
    }

    fn r_inj(&self) -> f64 {
        PI / 4.0
    }

    fn lift_point(&self, z: &[f64]) -> Vec<f64> {
        let (_, mut rows) = sorted_eigen(z);
        let r = Matrix3::from_fn(|i, j| rows[i][j]);
        if r.determinant() < 0.0 {
            rows[2] = rows[2].map(|v| -v);
        }
        quat::from_rot(&rows).to_vec()
    }

    fn on_cover(&self, w: &[f64], tol: f64) -> bool {
        on_s3(w, tol)
    }

    fn cover_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        quat::slerp(a, b, t).to_vec()
    }

    fn n_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        let wa = self.lift_point(a);
        let wb0 = as_quat(&self.lift_point(b));
        let wb = Q8::all()
            .iter()
            .map(|g| quat::qmul(&g.quat(), &wb0))
            .max_by(|x, y| quat::qdot(&wa, x).total_cmp(&quat::qdot(&wa, y)))
            .unwrap();
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
        Q8::all().iter().map(|u| DeckElement::Unit(*u)).collect()
    }

    fn parse_element(&self, s: &str) -> Option<DeckElement> {
        Q8::parse(s).map(DeckElement::Unit)
    }

    fn generator(&self) -> DeckElement {
        DeckElement::Unit(Q8 {
            neg: false,
            axis: 1,
        })
    }

    fn deck_identify(&self, a: &[f64], b: &[f64]) -> Result<DeckElement> {
        identify_in(&Q8::all(), a, b)
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
    fn quotient_invariance() {
        let t = So3ModV4;
        let w = quat::qnormalize(&[0.3, 0.1, -0.7, 0.2]);
        let i = Q8::parse("i").unwrap().quat();
        let a = t.project(&w);
        let b = t.project(&quat::qmul(&i, &w));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        let g = t.deck_identify(&w, &quat::qmul(&i, &w)).unwrap();
        assert_eq!(g.name(), "i");
    }

    #[test]
    fn lift_point_is_in_fiber() {
        let t = So3ModV4;
        let w = quat::qnormalize(&[-0.4, 0.5, 0.1, 0.6]);
        let z = t.project(&w);
        let l = t.lift_point(&z);
        assert!(t.deck_identify(&l, &w).is_ok());
        let p = t.tubular_project(&z).unwrap();
        assert!(z.iter().zip(&p).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!((degeneracy_distance(&z) - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn canonical_is_orbit_invariant() {
        let w = quat::qnormalize(&[0.3, -0.2, 0.5, 0.1]);
        let c = canonical(&w);
        for g in Q8::all() {
            assert_eq!(canonical(&quat::qmul(&g.quat(), &w)), c);
        }
    }
}
