use serde::{Deserialize, Serialize};

use super::kuhn::Triangulation;
use super::linalg;
use crate::error::{LiftError, Result};

/// A continuous map `Q^d -> R^m`, affine on each simplex of a Kuhn
/// triangulation and determined by its vertex values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PiecewiseAffineMap {
    tri: Triangulation,
    values: Vec<Vec<f64>>,
    /// Per simplex: Jacobian rows (m rows of length d).
    jacobians: Vec<Vec<Vec<f64>>>,
}

impl PiecewiseAffineMap {
    pub fn new(tri: Triangulation, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != tri.vertices().len() {
            return Err(LiftError::InvalidArgument(format!(
                "{} values for {} vertices",
                values.len(),
                tri.vertices().len()
            )));
        }
        let m = values.first().map(|v| v.len()).unwrap_or(0);
        if values.iter().any(|v| v.len() != m) {
            return Err(LiftError::InvalidArgument("ragged vertex values".into()));
        }
        let d = tri.dim();
        let jacobians = tri
            .simplices()
            .iter()
            .map(|s| {
                let x0 = &tri.vertices()[s[0]];
                let e: Vec<Vec<f64>> = (1..=d)
                    .map(|i| linalg::sub(&tri.vertices()[s[i]], x0))
                    .collect();
                // rows of e are edge vectors; J e_i^T = du_i  =>  J = dU E^{-T}
                let einv = linalg::inverse(&e).expect("Kuhn simplices are non-degenerate");
                let u0 = &values[s[0]];
                let du: Vec<Vec<f64>> = (1..=d).map(|i| linalg::sub(&values[s[i]], u0)).collect();
                (0..m)
                    .map(|r| {
                        (0..d)
                            .map(|c| (0..d).map(|i| du[i][r] * einv[c][i]).sum())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            tri,
            values,
            jacobians,
        })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn target_dim(&self) -> usize {
        self.values.first().map(|v| v.len()).unwrap_or(0)
    }

    pub fn domain_dim(&self) -> usize {
        self.tri.dim()
    }

    /// Jacobian of simplex `s`, as `m` rows of length `d`.
    pub fn jacobian(&self, s: usize) -> &[Vec<f64>] {
        &self.jacobians[s]
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let (s, bary) = self.tri.locate(x);
        self.eval_bary(s, &bary)
    }

    pub fn eval_bary(&self, s: usize, bary: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.target_dim()];
        for (&v, w) in self.tri.simplices()[s].iter().zip(bary) {
            for (o, u) in out.iter_mut().zip(&self.values[v]) {
                *o += w * u;
            }
        }
        out
    }

    /// Evaluate the affine extension of simplex `s` at `x`.
    pub fn eval_on(&self, s: usize, x: &[f64]) -> Vec<f64> {
        let x0 = &self.tri.vertices()[self.tri.simplices()[s][0]];
        let u0 = &self.values[self.tri.simplices()[s][0]];
        let dx = linalg::sub(x, x0);
        self.jacobians[s]
            .iter()
            .zip(u0)
            .map(|(row, u)| u + linalg::dot(row, &dx))
            .collect()
    }

    /// Frobenius norm of the Jacobian on simplex `s`.
    pub fn grad_norm(&self, s: usize) -> f64 {
        self.jacobians[s]
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖∇u‖_{L¹}` with the Frobenius norm.
    pub fn tv_l1(&self) -> f64 {
        (0..self.tri.simplices().len())
            .map(|s| self.tri.simplex_volume(s) * self.grad_norm(s))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygeom::kuhn_triangulate;

    #[test]
    fn affine_data_reproduced() {
        let t = kuhn_triangulate(&[-1.0, -1.0], &[1.0, 1.0], &[4, 3]).unwrap();
        let a = [[0.3, -1.2], [2.0, 0.5], [0.0, 1.0]];
        let b = [0.1, -0.4, 2.0];
        let vals = t
            .vertices()
            .iter()
            .map(|x| (0..3).map(|r| a[r][0] * x[0] + a[r][1] * x[1] + b[r]).collect())
            .collect();
        let u = PiecewiseAffineMap::new(t, vals).unwrap();
        for s in 0..u.triangulation().simplices().len() {
            for r in 0..3 {
                for c in 0..2 {
                    assert!((u.jacobian(s)[r][c] - a[r][c]).abs() < 1e-12);
                }
            }
        }
        let y = u.eval(&[0.37, -0.21]);
        assert!((y[0] - (0.3 * 0.37 + 1.2 * 0.21 + 0.1)).abs() < 1e-12);
    }
}
