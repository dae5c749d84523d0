use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::{wrap_angle, CoverTarget, DeckElement};
use crate::error::{LiftError, Result};

/// Largest winding accepted by normalization before the data is considered
/// corrupt.
pub const WINDOW: i64 = 1_000_000;

/// `R -> S¹ ⊂ R²`, `θ ↦ (cos θ, sin θ)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Circle;

fn angle(z: &[f64]) -> f64 {
    z[1].atan2(z[0])
}

impl CoverTarget for Circle {
    fn id(&self) -> &'static str {
        "circle"
    }
    fn m(&self) -> usize {
        2
    }
    fn ell(&self) -> usize {
        1
    }

    fn project(&self, w: &[f64]) -> Vec<f64> {
        let (s, c) = w[0].sin_cos();
        vec![c, s]
    }

    fn dist_cover(&self, a: &[f64], b: &[f64]) -> f64 {
        (a[0] - b[0]).abs()
    }

    fn dist_n(&self, a: &[f64], b: &[f64]) -> f64 {
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        cross.atan2(dot).abs()
    }

    fn tubular_project(&self, z: &[f64]) -> Option<Vec<f64>> {
        let r = z[0].hypot(z[1]);
        if r < 1e-300 {
            None
        } else {
            Some(vec![z[0] / r, z[1] / r])
        }
    }

    fn reach(&self) -> f64 {
        1.0
    }

    fn r_inj(&self) -> f64 {
        PI
    }

    fn lift_point(&self, z: &[f64]) -> Vec<f64> {
        vec![angle(z)]
    }

    fn on_cover(&self, w: &[f64], _tol: f64) -> bool {
        w.len() == 1 && w[0].is_finite()
    }

    fn cover_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        vec![a[0] + t * (b[0] - a[0])]
    }

    fn n_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
        let d = wrap_angle(angle(b) - angle(a));
        self.project(&[angle(a) + t * d])
    }

    fn identity(&self) -> DeckElement {
        DeckElement::Lattice(vec![0])
    }

    fn compose(&self, a: &DeckElement, b: &DeckElement) -> DeckElement {
        match (a, b) {
            (DeckElement::Lattice(x), DeckElement::Lattice(y)) => {
                DeckElement::Lattice(vec![x[0] + y[0]])
            }
            _ => panic!("foreign deck element"),
        }
    }

    fn inverse(&self, a: &DeckElement) -> DeckElement {
        match a {
            DeckElement::Lattice(x) => DeckElement::Lattice(vec![-x[0]]),
            _ => panic!("foreign deck element"),
        }
    }

    fn apply(&self, a: &DeckElement, w: &[f64]) -> Vec<f64> {
        match a {
            DeckElement::Lattice(x) => vec![w[0] + TAU * x[0] as f64],
            _ => panic!("foreign deck element"),
        }
    }

    fn elements(&self) -> Vec<DeckElement> {
        (-8..=8).map(|k| DeckElement::Lattice(vec![k])).collect()
    }

    fn parse_element(&self, s: &str) -> Option<DeckElement> {
        let k = match s.trim() {
            "e" => 0,
            "g" => 1,
            other => other.strip_prefix("g^")?.parse().ok()?,
        };
        Some(DeckElement::Lattice(vec![k]))
    }

    fn generator(&self) -> DeckElement {
        DeckElement::Lattice(vec![1])
    }

    fn lift_step(&self, w: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let dist = self.dist_n(&self.project(w), z);
        if !(dist < PI) {
            return Err(LiftError::StepTooLarge { dist, r_inj: PI });
        }
        Ok(vec![w[0] + wrap_angle(angle(z) - w[0])])
    }

    fn deck_identify(&self, a: &[f64], b: &[f64]) -> Result<DeckElement> {
        let k = (b[0] - a[0]) / TAU;
        let kr = k.round();
        let res = (k - kr).abs() * TAU;
        if res > 1e-6 {
            return Err(LiftError::NotSameFiber(res));
        }
        Ok(DeckElement::Lattice(vec![kr as i64]))
    }

    fn normalize(&self, w: &[f64]) -> Result<DeckElement> {
        let k = (w[0] / TAU).round();
        if !k.is_finite() || k.abs() > WINDOW as f64 {
            return Err(LiftError::NormalizationFailure(format!(
                "winding {k} outside the search window"
            )));
        }
        Ok(DeckElement::Lattice(vec![k as i64]))
    }

    fn in_fundamental_domain(&self, w: &[f64], tol: f64) -> bool {
        w[0].abs() <= PI + tol
    }

    fn sample_n(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        self.project(&[rng.gen_range(-PI..PI)])
    }

    fn sample_cover(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        vec![rng.gen_range(-60.0..60.0)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_and_steps() {
        let c = Circle;
        assert_eq!(c.project(&[0.0]), vec![1.0, 0.0]);
        let w = c.lift_step(&[0.0], &[0.1f64.cos(), 0.1f64.sin()]).unwrap();
        assert!((w[0] - 0.1).abs() < 1e-15);
        assert!(matches!(
            c.lift_step(&[0.0], &[-1.0, 0.0]),
            Err(LiftError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn identify_and_normalize() {
        let c = Circle;
        let g = c.deck_identify(&[0.3], &[0.3 + 2.0 * TAU]).unwrap();
        assert_eq!(g.name(), "g^2");
        assert!(matches!(
            c.deck_identify(&[0.0], &[0.5]),
            Err(LiftError::NotSameFiber(_))
        ));
        assert_eq!(c.normalize(&[7.0]).unwrap(), DeckElement::Lattice(vec![1]));
        assert!(c.normalize(&[-PI / 2.0]).unwrap().is_identity());
        assert!(matches!(
            c.normalize(&[1e8]),
            Err(LiftError::NormalizationFailure(_))
        ));
        let id = c.compose(&DeckElement::Lattice(vec![1]), &DeckElement::Lattice(vec![-1]));
        assert!(id.is_identity());
    }
}
