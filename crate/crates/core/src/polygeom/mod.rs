//! Low-dimensional polyhedral geometry: H-polytopes with Fourier–Motzkin
//! projection and exact Hausdorff measures, Kuhn triangulations and
//! piecewise-affine maps on them.

mod kuhn;
pub mod linalg;
mod pam;
mod polytope;
mod quad;

pub use kuhn::{kuhn_triangulate, Triangulation};
pub use pam::PiecewiseAffineMap;
pub use quad::simplex_rule;
pub use polytope::{affine_dim, hull_measure_in_hull, HPolytope, Halfspace};

use serde::{Deserialize, Serialize};

use crate::error::{LiftError, Result};

/// Absolute tolerance for incidence and emptiness tests.
pub const EPS_GEO: f64 = 1e-9;

/// A list of polytopes sharing one ambient and one intrinsic dimension, each
/// with an integer tag (source member, orientation, ...).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PolyChain {
    ambient: usize,
    intrinsic: Option<usize>,
    members: Vec<(HPolytope, i64)>,
}

impl PolyChain {
    pub fn new(ambient: usize) -> Self {
        Self {
            ambient,
            intrinsic: None,
            members: Vec::new(),
        }
    }

    /// Append a nonempty polytope. The first member fixes the intrinsic
    /// dimension; later members must match it.
    pub fn push(&mut self, p: HPolytope, tag: i64) -> Result<()> {
        if p.dim() != self.ambient {
            return Err(LiftError::InvalidArgument(format!(
                "member ambient dimension {} != chain dimension {}",
                p.dim(),
                self.ambient
            )));
        }
        let j = p
            .intrinsic_dim()
            .ok_or_else(|| LiftError::InvalidArgument("empty chain member".into()))?;
        match self.intrinsic {
            None => self.intrinsic = Some(j),
            Some(k) if k != j => {
                return Err(LiftError::InvalidArgument(format!(
                    "member of dimension {j} in a chain of dimension {k}"
                )))
            }
            _ => {}
        }
        self.members.push((p, tag));
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn intrinsic_dim(&self) -> Option<usize> {
        self.intrinsic
    }

    pub fn members(&self) -> &[(HPolytope, i64)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Total j-dimensional measure of the members.
    pub fn measure(&self) -> f64 {
        match self.intrinsic {
            None => 0.0,
            Some(j) => self
                .members
                .iter()
                .map(|(p, _)| p.haus_measure(j).unwrap_or(0.0))
                .sum(),
        }
    }
}
