//! Covering-space targets: an embedded manifold N, its universal cover, the
//! covering projection, the deck group and local path lifting.

mod circle;
pub mod quat;
mod so3;
mod so3_v4;
mod torus;

pub use circle::Circle;
pub use quat::Q8;
pub use so3::So3;
pub use so3_v4::{
    canonical as q8_orbit_representative, degeneracy_distance, sym_to_vec as so3_v4_sym_to_vec,
    So3ModV4,
};
pub use torus::CliffordTorus;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LiftError, Result};

/// A deck transformation, stored exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeckElement {
    /// Translation by `2π·k` on a flat cover (one entry per circle factor).
    Lattice(Vec<i64>),
    /// Left multiplication by a unit of Q8 (or ±1 for the double cover).
    Unit(Q8),
}

impl DeckElement {
    pub fn name(&self) -> String {
        match self {
            DeckElement::Lattice(k) if k.len() == 1 => match k[0] {
                0 => "e".into(),
                1 => "g".into(),
                n => format!("g^{n}"),
            },
            DeckElement::Lattice(k) => format!(
                "({})",
                k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            ),
            DeckElement::Unit(u) => u.name(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            DeckElement::Lattice(k) => k.iter().all(|v| *v == 0),
            DeckElement::Unit(u) => *u == Q8::ONE,
        }
    }
}

impl std::fmt::Display for DeckElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

/// A covering `π: 𝓔 -> N` with both spaces embedded in Euclidean space.
/// Distances are intrinsic, and chosen so that `π` is a local isometry.
pub trait CoverTarget: Send + Sync {
    fn id(&self) -> &'static str;
    /// Ambient dimension of N.
    fn m(&self) -> usize;
    /// Ambient dimension of the cover.
    fn ell(&self) -> usize;

    fn project(&self, w: &[f64]) -> Vec<f64>;
    fn dist_cover(&self, a: &[f64], b: &[f64]) -> f64;
    fn dist_n(&self, a: &[f64], b: &[f64]) -> f64;

    /// Nearest point of N; `None` on the medial set.
    fn tubular_project(&self, z: &[f64]) -> Option<Vec<f64>>;
    /// Radius of the tubular neighbourhood on which `tubular_project` is
    /// single-valued and Lipschitz.
    fn reach(&self) -> f64;
    fn r_inj(&self) -> f64;
    /// Some point of the fiber over `z`.
    fn lift_point(&self, z: &[f64]) -> Vec<f64>;

    fn on_cover(&self, w: &[f64], tol: f64) -> bool;
    fn cover_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64>;
    /// Minimizing geodesic on N, ties broken deterministically.
    fn n_geodesic(&self, a: &[f64], b: &[f64], t: f64) -> Vec<f64>;

    fn identity(&self) -> DeckElement;
    fn compose(&self, a: &DeckElement, b: &DeckElement) -> DeckElement;
    fn inverse(&self, a: &DeckElement) -> DeckElement;
    fn apply(&self, a: &DeckElement, w: &[f64]) -> Vec<f64>;
    /// Every element for finite groups; a generator window otherwise.
    fn elements(&self) -> Vec<DeckElement>;
    fn parse_element(&self, s: &str) -> Option<DeckElement>;
    fn generator(&self) -> DeckElement;

    /// The unique deck element mapping `a` to `b`.
    fn deck_identify(&self, a: &[f64], b: &[f64]) -> Result<DeckElement>;
    /// `φ` with `φ⁻¹(w) ∈ E_*`.
    fn normalize(&self, w: &[f64]) -> Result<DeckElement>;
    fn in_fundamental_domain(&self, w: &[f64], tol: f64) -> bool;

    fn sample_n(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
    fn sample_cover(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;

    fn on_n(&self, z: &[f64], tol: f64) -> bool {
        match self.tubular_project(z) {
            Some(p) => crate::polygeom::linalg::dist(&p, z) <= tol,
            None => false,
        }
    }

    fn cover_project(&self, w: &[f64]) -> Result<Vec<f64>> {
        if !self.on_cover(w, 1e-9) {
            return Err(LiftError::InvalidArgument("point is not on the cover".into()));
        }
        Ok(self.project(w))
    }

    /// One step of unique path lifting: the point of the fiber over `z`
    /// within `r_inj` of `w`.
    fn lift_step(&self, w: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let r = self.r_inj();
        let dist = self.dist_n(&self.project(w), z);
        if !(dist < r) {
            return Err(LiftError::StepTooLarge { dist, r_inj: r });
        }
        let base = self.lift_point(z);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for g in self.nearby_elements(w, &base) {
            let c = self.apply(&g, &base);
            let d = self.dist_cover(w, &c);
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, c));
            }
        }
        let (d, c) = best.expect("deck group is nonempty");
        if !(d < r) {
            return Err(LiftError::StepTooLarge { dist: d, r_inj: r });
        }
        Ok(c)
    }

    /// Deck elements worth trying when searching the fiber through `base`
    /// for the point closest to `w`.
    fn nearby_elements(&self, _w: &[f64], _base: &[f64]) -> Vec<DeckElement> {
        self.elements()
    }
}

static CIRCLE: Circle = Circle;
static TORUS: CliffordTorus = CliffordTorus;
static SO3: So3 = So3;
static SO3_V4: So3ModV4 = So3ModV4;

pub const TARGET_IDS: [&str; 4] = ["circle", "clifford_torus", "so3", "so3_mod_v4"];

/// Look up a bundled target by id.
pub fn target(id: &str) -> Result<&'static dyn CoverTarget> {
    match id {
        "circle" => Ok(&CIRCLE),
        "clifford_torus" => Ok(&TORUS),
        "so3" => Ok(&SO3),
        "so3_mod_v4" => Ok(&SO3_V4),
        other => Err(LiftError::UnknownTarget(other.to_string())),
    }
}

pub(crate) fn gaussian(rng: &mut dyn rand::RngCore) -> f64 {
    // Box-Muller; keeps the trait object-safe without rand_distr
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    // into [-π, π)
    let t = std::f64::consts::TAU;
    let r = (a + std::f64::consts::PI).rem_euclid(t) - std::f64::consts::PI;
    if r >= std::f64::consts::PI {
        r - t
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn unknown_target() {
        assert!(matches!(target("klein"), Err(LiftError::UnknownTarget(_))));
    }

    #[test]
    fn deck_invariance_and_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for id in TARGET_IDS {
            let t = target(id).unwrap();
            for _ in 0..200 {
                let w = t.sample_cover(&mut rng);
                let w2 = t.sample_cover(&mut rng);
                let z = t.project(&w);
                for g in t.elements() {
                    let gw = t.apply(&g, &w);
                    assert!(close(&t.project(&gw), &z, 1e-9), "{id} {g}");
                    let d0 = t.dist_cover(&w, &w2);
                    let d1 = t.dist_cover(&gw, &t.apply(&g, &w2));
                    assert!((d0 - d1).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn group_axioms() {
        for id in TARGET_IDS {
            let t = target(id).unwrap();
            let els = t.elements();
            let e = t.identity();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let w = t.sample_cover(&mut rng);
            for a in &els {
                assert_eq!(&t.compose(&e, a), a);
                assert!(t.compose(a, &t.inverse(a)).is_identity());
                assert_eq!(t.parse_element(&a.name()).as_ref(), Some(a));
                for b in &els {
                    let ab = t.compose(a, b);
                    let lhs = t.apply(&ab, &w);
                    let rhs = t.apply(a, &t.apply(b, &w));
                    assert!(close(&lhs, &rhs, 1e-9));
                    for c in els.iter().take(5) {
                        assert_eq!(t.compose(&ab, c), t.compose(a, &t.compose(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn fundamental_domain_covers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in TARGET_IDS {
            let t = target(id).unwrap();
            for _ in 0..2000 {
                let w = t.sample_cover(&mut rng);
                let phi = t.normalize(&w).unwrap();
                let back = t.apply(&t.inverse(&phi), &w);
                assert!(t.in_fundamental_domain(&back, 1e-12), "{id}");
            }
        }
    }

    #[test]
    fn deck_identify_recovers_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for id in TARGET_IDS {
            let t = target(id).unwrap();
            let w = t.sample_cover(&mut rng);
            for g in t.elements() {
                assert_eq!(t.deck_identify(&w, &t.apply(&g, &w)).unwrap(), g);
            }
        }
    }

    #[test]
    fn lifting_is_locally_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for id in TARGET_IDS {
            let t = target(id).unwrap();
            let w = t.sample_cover(&mut rng);
            let dir = t.sample_cover(&mut rng);
            let w2 = t.cover_geodesic(&w, &dir, 1e-3 / t.dist_cover(&w, &dir).max(1e-3));
            let up = t.dist_cover(&w, &w2);
            let down = t.dist_n(&t.project(&w), &t.project(&w2));
            assert!((up - down).abs() <= 1e-6 * up, "{id}: {up} vs {down}");
            let back = t.lift_step(&w, &t.project(&w2)).unwrap();
            assert!(t.dist_cover(&back, &w2) < 1e-9);
        }
    }
}
