//! Small dense linear-algebra helpers on `Vec<f64>` rows.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Solve the square system `rows · x = rhs`; `None` when the matrix is
/// numerically singular.
pub fn solve(rows: &[&[f64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let lu = m.lu();
    let det = lu.determinant();
    if !det.is_finite() || det.abs() < 1e-12 {
        return None;
    }
    lu.solve(&DVector::from_column_slice(rhs))
        .map(|x| x.iter().copied().collect())
}

/// Orthonormal basis (rows) of the span of `vectors`, using singular values
/// above `tol`.
pub fn span_basis(vectors: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(vectors.len(), n, |i, j| vectors[i][j]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Unit normals of the orthogonal complement of `basis` in R^n.
pub fn complement_basis(basis: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = basis.to_vec();
    let mut comp = Vec::new();
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for b in &out {
            let c = dot(&e, b);
            e = axpy(&e, -c, b);
        }
        let l = norm(&e);
        if l > 1e-8 {
            let e = scale(&e, 1.0 / l);
            out.push(e.clone());
            comp.push(e);
        }
    }
    comp
}

/// Rank of a set of rows with relative tolerance.
pub fn rank(rows: &[Vec<f64>], n: usize, tol: f64) -> usize {
    span_basis(rows, n, tol).len()
}

/// Determinant of a small square matrix given as rows.
pub fn det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Inverse of a small square matrix given as rows.
pub fn inverse(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    m.try_inverse()
        .map(|inv| (0..n).map(|i| inv.row(i).iter().copied().collect()).collect())
}
