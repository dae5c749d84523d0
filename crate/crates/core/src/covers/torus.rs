use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use rand::Rng;

use super::{wrap_angle, CoverTarget, DeckElement};
use crate::error::{LiftError, Result};

const R: f64 = FRAC_1_SQRT_2;

/// `R² -> S¹×S¹ ⊂ R⁴`, each factor a circle of radius `1/√2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CliffordTorus;

fn angles(z: &[f64]) -> [f64; 2] {
    [z[1].atan2(z[0]), z[3].atan2(z[2])]
}

fn lattice(a: &DeckElement) -> &[i64] {
    match a {
        DeckElement::Lattice(k) if k.len() == 2 => k,
        _ => panic!("foreign deck element"),
    }
}

impl CoverTarget for CliffordTorus {
    fn id(&self) -> &'static str {
        "clifford_torus"
    }
    fn m(&self) -> usize {
        4
    }
    fn ell(&self) -> usize {
        2
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        let (s0, c0) = w[0].sin_cos();
        let (s1, c1) = w[1].sin_cos();
        vec![R * c0, R * s0, R * c1, R * s1]
    }

    fn dist_cover(&self, a: &[f64], b: &[f64]) -> f64 {
        R * (a[0] - b[0]).hypot(a[1] - b[1])
    }

    fn dist_n(&self, a: &[f64], b: &[f64]) -> f64 {
        let (x, y) = (angles(a), angles(b));
        R * wrap_angle(y[0] - x[0]).hypot(wrap_angle(y[1] - x[1]))
    }

    fn tubular_project(&self, z: &[f64]) -> Option<Vec<f64>> {
        let r0 = z[0].hypot(z[1]);
        let r1 = z[2].hypot(z[3]);
        if r0 < 1e-300 || r1 < 1e-300 {
            return None;
        }
        Some(vec![R * z[0] / r0, R * z[1] / r0, R * z[2] / r1, R * z[3] / r1])
    }

    fn reach(&self) -> f64 {
        R
    }

    fn r_inj(&self) -> f64 {
        PI * R
    }

    fn lift_point(&self, z: &[f64]) -> Vec<f64> {
        angles(z).to_vec()
    }

    fn on_cover(&self, w: &[f64], _tol: f64) -> bool {
        w.len() == 2 && w.iter().all(|v| v.is_finite())
    }

    fn cover_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    fn n_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        let (x, y) = (angles(a), angles(b));
        self.project(&[
            x[0] + t * wrap_angle(y[0] - x[0]),
            x[1] + t * wrap_angle(y[1] - x[1]),
        ])
    }

    fn identity(&self) -> DeckElement {
        DeckElement::Lattice(vec![0, 0])
    }

    fn compose(&self, a: &DeckElement, b: &DeckElement) -> DeckElement {
        let (x, y) = (lattice(a), lattice(b));
        DeckElement::Lattice(vec![x[0] + y[0], x[1] + y[1]])
    }

    fn inverse(&self, a: &DeckElement) -> DeckElement {
        let x = lattice(a);
        DeckElement::Lattice(vec![-x[0], -x[1]])
    }

    fn apply(&self, a: &DeckElement, w: &[f64]) -> Vec<f64> {
        let x = lattice(a);
        vec![w[0] + TAU * x[0] as f64, w[1] + TAU * x[1] as f64]
    }

    fn elements(&self) -> Vec<DeckElement> {
        let mut out = Vec::new();
        for a in -3..=3 {
            for b in -3..=3 {
                out.push(DeckElement::Lattice(vec![a, b]));
            }
        }
        out
    }

    fn parse_element(&self, s: &str) -> Option<DeckElement> {
        let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
        let mut it = inner.split(',').map(|p| p.trim().parse::<i64>());
        let a = it.next()?.ok()?;
        let b = it.next()?.ok()?;
        if it.next().is_some() {
            return None;
        }
        Some(DeckElement::Lattice(vec![a, b]))
    }

    fn generator(&self) -> DeckElement {
        DeckElement::Lattice(vec![1, 0])
    }

    fn lift_step(&self, w: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let r = self.r_inj();
        let dist = self.dist_n(&self.project(w), z);
        if !(dist < r) {
            return Err(LiftError::StepTooLarge { dist, r_inj: r });
        }
        let a = angles(z);
        Ok(vec![
            w[0] + wrap_angle(a[0] - w[0]),
            w[1] + wrap_angle(a[1] - w[1]),
        ])
    }

    fn deck_identify(&self, a: &[f64], b: &[f64]) -> Result<DeckElement> {
        let mut k = vec![0; 2];
        for i in 0..2 {
            let v = (b[i] - a[i]) / TAU;
            let res = (v - v.round()).abs() * TAU;
            if res > 1e-6 {
                return Err(LiftError::NotSameFiber(res));
            }
            k[i] = v.round() as i64;
        }
        Ok(DeckElement::Lattice(k))
    }

    fn normalize(&self, w: &[f64]) -> Result<DeckElement> {
        let k: Vec<f64> = w.iter().map(|v| (v / TAU).round()).collect();
        if k.iter().any(|v| !v.is_finite() || v.abs() > super::circle::WINDOW as f64) {
            return Err(LiftError::NormalizationFailure(
                "lattice shift outside the search window".into(),
            ));
        }
        Ok(DeckElement::Lattice(k.iter().map(|v| *v as i64).collect()))
    }

    fn in_fundamental_domain(&self, w: &[f64], tol: f64) -> bool {
        w.iter().all(|v| v.abs() <= PI + tol)
    }

    fn sample_n(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        self.project(&[rng.gen_range(-PI..PI), rng.gen_range(-PI..PI)])
    }

    fn sample_cover(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        vec![rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)]
    }
}
