//! Bounded convex polytopes in H-representation.
//!
//! All polytopes handled here are bounded, so emptiness and intrinsic
//! dimension are decided from the vertex set. Vertices are enumerated by
//! brute force over constraint subsets, which is fine at the ambient
//! dimensions used in this crate (at most five).

use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::linalg::{self, dot, norm};
use super::EPS_GEO;
use crate::error::{LiftError, Result};

/// The constraint `normal · x <= offset` (or `=` when used as an equality).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    fn normalized(&self) -> Option<Halfspace> {
        let n = norm(&self.normal);
        if n <= 1e-14 || !n.is_finite() {
            return None;
        }
        Some(Halfspace {
            normal: linalg::scale(&self.normal, 1.0 / n),
            offset: self.offset / n,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HPolytope {
    dim: usize,
    ineqs: Vec<Halfspace>,
    eqs: Vec<Halfspace>,
    /// Set when a constraint degenerated to `0 <= negative` or `0 = nonzero`.
    infeasible: bool,
    #[serde(skip)]
    vertex_cache: OnceLock<Vec<Vec<f64>>>,
}

impl PartialEq for HPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.ineqs == other.ineqs
            && self.eqs == other.eqs
            && self.infeasible == other.infeasible
    }
}

impl HPolytope {
    /// Build a polytope from inequalities `a·x <= b` and equalities `a·x = b`.
    /// Normals are rescaled to unit length; a zero normal is rejected.
    pub fn new(dim: usize, ineqs: Vec<Halfspace>, eqs: Vec<Halfspace>) -> Result<Self> {
        let mut p = Self::unconstrained(dim);
        for h in ineqs {
            p.check_dim(&h)?;
            let hn = h.normalized().ok_or_else(|| {
                LiftError::InvalidArgument("zero normal vector in inequality".into())
            })?;
            p.ineqs.push(hn);
        }
        for h in eqs {
            p.check_dim(&h)?;
            let hn = h.normalized().ok_or_else(|| {
                LiftError::InvalidArgument("zero normal vector in equality".into())
            })?;
            p.eqs.push(hn);
        }
        Ok(p)
    }

    fn check_dim(&self, h: &Halfspace) -> Result<()> {
        if h.normal.len() != self.dim {
            return Err(LiftError::InvalidArgument(format!(
                "constraint of dimension {} in a {}-dimensional polytope",
                h.normal.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn unconstrained(dim: usize) -> Self {
        HPolytope {
            dim,
            ineqs: Vec::new(),
            eqs: Vec::new(),
            infeasible: false,
            vertex_cache: OnceLock::new(),
        }
    }

    /// The empty polytope in R^dim.
    pub fn empty(dim: usize) -> Self {
        let mut p = Self::unconstrained(dim);
        p.infeasible = true;
        p
    }

    /// Axis-aligned box `lo <= x <= hi`; coordinates with `lo == hi` become
    /// equalities.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut p = Self::unconstrained(dim);
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            if (hi[k] - lo[k]).abs() <= 0.0 {
                p.eqs.push(Halfspace::new(e, lo[k]));
            } else {
                p.ineqs.push(Halfspace::new(e.clone(), hi[k]));
                p.ineqs.push(Halfspace::new(linalg::scale(&e, -1.0), -lo[k]));
            }
        }
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            p.infeasible = true;
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Halfspace] {
        &self.ineqs
    }

    pub fn equalities(&self) -> &[Halfspace] {
        &self.eqs
    }

    /// Add constraints, consuming `self`. Zero normals are checked: a
    /// satisfied one is dropped, a violated one marks the polytope empty.
    pub fn with_constraints(mut self, ineqs: Vec<Halfspace>, eqs: Vec<Halfspace>) -> Self {
        self.vertex_cache = OnceLock::new();
        for h in ineqs {
            match h.normalized() {
                Some(hn) => self.ineqs.push(hn),
                None => {
                    if h.offset < -EPS_GEO {
                        self.infeasible = true;
                    }
                }
            }
        }
        for h in eqs {
            match h.normalized() {
                Some(hn) => self.eqs.push(hn),
                None => {
                    if h.offset.abs() > EPS_GEO {
                        self.infeasible = true;
                    }
                }
            }
        }
        self
    }

    /// Intersection with another polytope of the same ambient dimension.
    pub fn intersect(&self, other: &HPolytope) -> HPolytope {
        let mut p = self.clone().with_constraints(other.ineqs.clone(), other.eqs.clone());
        p.infeasible |= other.infeasible;
        p
    }

    /// Translate by `v`: returns `{x + v : x in P}`.
    pub fn translate(&self, v: &[f64]) -> HPolytope {
        let shift = |h: &Halfspace| Halfspace::new(h.normal.clone(), h.offset + dot(&h.normal, v));
        let mut p = Self::unconstrained(self.dim);
        p.ineqs = self.ineqs.iter().map(shift).collect();
        p.eqs = self.eqs.iter().map(shift).collect();
        p.infeasible = self.infeasible;
        p
    }

    /// Preimage `{x in R^n : A x + b in P}` where `a` has `self.dim()` rows of
    /// length `n`.
    pub fn preimage(&self, a: &[Vec<f64>], b: &[f64], n: usize) -> HPolytope {
        let pull = |h: &Halfspace| {
            let mut normal = vec![0.0; n];
            for (r, row) in a.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    normal[j] += h.normal[r] * v;
                }
            }
            Halfspace::new(normal, h.offset - dot(&h.normal, b))
        };
        let mut p = Self::unconstrained(n);
        p.infeasible = self.infeasible;
        p.with_constraints(
            self.ineqs.iter().map(pull).collect(),
            self.eqs.iter().map(pull).collect(),
        )
    }

    /// Image under an orthogonal map `x -> Q x`.
    pub fn rotate(&self, q: &[Vec<f64>]) -> HPolytope {
        let n = self.dim;
        let push = |h: &Halfspace| {
            let normal = (0..n).map(|i| dot(&q[i], &h.normal)).collect();
            Halfspace::new(normal, h.offset)
        };
        let mut p = Self::unconstrained(n);
        p.infeasible = self.infeasible;
        p.ineqs = self.ineqs.iter().map(push).collect();
        p.eqs = self.eqs.iter().map(push).collect();
        p
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        !self.infeasible
            && self.ineqs.iter().all(|h| h.eval(x) <= tol)
            && self.eqs.iter().all(|h| h.eval(x).abs() <= tol)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    /// Vertices of the polytope (cached after the first call).
    pub fn vertices(&self) -> &[Vec<f64>] {
        self.vertex_cache.get_or_init(|| self.enumerate_vertices())
    }

    fn enumerate_vertices(&self) -> Vec<Vec<f64>> {
        if self.infeasible {
            return Vec::new();
        }
        let n = self.dim;
        if n == 0 {
            return vec![Vec::new()];
        }
        let eqs = match independent_equalities(&self.eqs, n) {
            Some(e) => e,
            None => return Vec::new(),
        };
        if eqs.len() > n {
            return Vec::new();
        }
        let k = n - eqs.len();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut try_subset = |subset: &[&Halfspace]| {
            let rows: Vec<&[f64]> = eqs
                .iter()
                .chain(subset.iter().copied())
                .map(|h| h.normal.as_slice())
                .collect();
            let rhs: Vec<f64> = eqs
                .iter()
                .chain(subset.iter().copied())
                .map(|h| h.offset)
                .collect();
            if let Some(x) = linalg::solve(&rows, &rhs) {
                if x.iter().all(|v| v.is_finite()) && self.contains(&x, EPS_GEO) {
                    if !out.iter().any(|v| linalg::dist(v, &x) <= EPS_GEO) {
                        out.push(x);
                    }
                }
            }
        };
        if k == 0 {
            try_subset(&[]);
        } else {
            for subset in self.ineqs.iter().combinations(k) {
                try_subset(&subset);
            }
        }
        out
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn intrinsic_dim(&self) -> Option<usize> {
        affine_dim(self.vertices(), self.dim)
    }

    pub fn centroid(&self) -> Option<Vec<f64>> {
        let v = self.vertices();
        if v.is_empty() {
            return None;
        }
        let mut c = vec![0.0; self.dim];
        for p in v {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        Some(linalg::scale(&c, 1.0 / v.len() as f64))
    }

    /// Axis-aligned bounding box of the vertex set.
    pub fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let v = self.vertices();
        if v.is_empty() {
            return None;
        }
        let mut lo = v[0].clone();
        let mut hi = v[0].clone();
        for p in v {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    /// Euclidean distance from `x` to the polytope's vertex hull, computed by
    /// projected-gradient descent on the barycentric simplex of vertices.
    /// Exact for points and segments; accurate to ~1e-12 otherwise.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let v = self.vertices();
        match v.len() {
            0 => f64::INFINITY,
            1 => linalg::dist(x, &v[0]),
            2 => segment_distance(x, &v[0], &v[1]),
            _ => hull_distance(x, v),
        }
    }

    /// Remove redundant inequalities and turn implicit equalities into
    /// equalities. Redundancy is decided by vertex incidence: an inequality
    /// survives only if its tight vertices span a facet of the polytope.
    pub fn pruned(&self) -> HPolytope {
        let verts = self.vertices().to_vec();
        if verts.is_empty() {
            return HPolytope::empty(self.dim);
        }
        let n = self.dim;
        let k = affine_dim(&verts, n).unwrap_or(0);
        let mut eqs: Vec<Halfspace> = self.eqs.clone();
        let mut kept: Vec<(Halfspace, Vec<usize>)> = Vec::new();
        for h in &self.ineqs {
            let tight: Vec<usize> = (0..verts.len())
                .filter(|&i| h.eval(&verts[i]).abs() <= 1e3 * EPS_GEO)
                .collect();
            if tight.len() == verts.len() {
                eqs.push(h.clone());
                continue;
            }
            if k == 0 {
                continue;
            }
            let pts: Vec<Vec<f64>> = tight.iter().map(|&i| verts[i].clone()).collect();
            if affine_dim(&pts, n) != Some(k - 1) {
                continue;
            }
            if kept.iter().any(|(_, t)| *t == tight) {
                continue;
            }
            kept.push((h.clone(), tight));
        }
        let eqs = independent_subset(&eqs, n);
        let mut p = Self::unconstrained(n);
        p.ineqs = kept.into_iter().map(|(h, _)| h).collect();
        p.eqs = eqs;
        let _ = p.vertex_cache.set(verts);
        p
    }

    /// Fourier–Motzkin elimination of coordinate `axis`: the exact shadow of
    /// the polytope in the remaining coordinates, with redundant inequalities
    /// pruned.
    pub fn fm_project(&self, axis: usize) -> Result<HPolytope> {
        let n = self.dim;
        if n < 2 {
            return Err(LiftError::InvalidArgument(
                "projection needs ambient dimension >= 2".into(),
            ));
        }
        if axis >= n {
            return Err(LiftError::InvalidArgument(format!(
                "axis {axis} out of range for dimension {n}"
            )));
        }
        if self.is_empty() {
            return Ok(HPolytope::empty(n - 1));
        }
        let drop = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .filter(|(i, _)| *i != axis)
                .map(|(_, x)| *x)
                .collect()
        };
        let pivot = self
            .eqs
            .iter()
            .enumerate()
            .filter(|(_, h)| h.normal[axis].abs() > 1e-9)
            .max_by(|a, b| a.1.normal[axis].abs().total_cmp(&b.1.normal[axis].abs()));

        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        if let Some((pi, piv)) = pivot {
            // x_axis = (offset - rest·x) / c ; substitute everywhere
            let c = piv.normal[axis];
            let subst = |h: &Halfspace| {
                let f = h.normal[axis] / c;
                let normal: Vec<f64> = h
                    .normal
                    .iter()
                    .zip(&piv.normal)
                    .map(|(a, p)| a - f * p)
                    .collect();
                Halfspace::new(drop(&normal), h.offset - f * piv.offset)
            };
            for h in &self.ineqs {
                ineqs.push(subst(h));
            }
            for (i, h) in self.eqs.iter().enumerate() {
                if i != pi {
                    eqs.push(subst(h));
                }
            }
        } else {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for h in &self.ineqs {
                let c = h.normal[axis];
                if c > 1e-12 {
                    pos.push(h);
                } else if c < -1e-12 {
                    neg.push(h);
                } else {
                    ineqs.push(Halfspace::new(drop(&h.normal), h.offset));
                }
            }
            for p in &pos {
                for q in &neg {
                    let (cp, cq) = (p.normal[axis], -q.normal[axis]);
                    let normal: Vec<f64> = p
                        .normal
                        .iter()
                        .zip(&q.normal)
                        .map(|(a, b)| cq * a + cp * b)
                        .collect();
                    ineqs.push(Halfspace::new(drop(&normal), cq * p.offset + cp * q.offset));
                }
            }
            for h in &self.eqs {
                eqs.push(Halfspace::new(drop(&h.normal), h.offset));
            }
        }
        let p = Self::unconstrained(n - 1).with_constraints(ineqs, eqs);
        Ok(p.pruned())
    }

    /// Exact j-dimensional Hausdorff measure of a j-dimensional polytope.
    pub fn haus_measure(&self, j: usize) -> Result<f64> {
        let verts = self.vertices();
        match affine_dim(verts, self.dim) {
            Some(k) if k == j => Ok(hull_measure_in_hull(verts, self.dim, j)),
            Some(k) => Err(LiftError::InvalidArgument(format!(
                "polytope has intrinsic dimension {k}, not {j}"
            ))),
            None => Err(LiftError::InvalidArgument(
                "empty polytope has no intrinsic dimension".into(),
            )),
        }
    }
}

/// Affine dimension of a point set, `None` when empty.
pub fn affine_dim(points: &[Vec<f64>], n: usize) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(p, first)).collect();
    Some(linalg::rank(&diffs, n, 1e-9))
}

/// Measure of the convex hull of `points` (affine dimension `j`) inside its
/// own affine hull.
pub fn hull_measure_in_hull(points: &[Vec<f64>], n: usize, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let o = &points[0];
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| linalg::sub(p, o)).collect();
    let basis = linalg::span_basis(&diffs, n, 1e-9);
    let local: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let d = linalg::sub(p, o);
            basis.iter().map(|b| dot(b, &d)).collect()
        })
        .collect();
    hull_volume(&local, j)
}

/// Volume of the convex hull of full-dimensional points in R^j.
pub fn hull_volume(points: &[Vec<f64>], j: usize) -> f64 {
    match j {
        0 => 1.0,
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        }
        2 => polygon_area(points),
        _ => facet_recursion_volume(points, j),
    }
}

fn polygon_area(points: &[Vec<f64>]) -> f64 {
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / points.len() as f64;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / points.len() as f64;
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| {
        (a.1 - cy)
            .atan2(a.0 - cx)
            .total_cmp(&(b.1 - cy).atan2(b.0 - cx))
    });
    let mut area = 0.0;
    for i in 0..pts.len() {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % pts.len()];
        area += x0 * y1 - x1 * y0;
    }
    0.5 * area.abs()
}

/// Pyramid decomposition over the hull facets, found by brute force over
/// affinely independent j-subsets.
fn facet_recursion_volume(points: &[Vec<f64>], j: usize) -> f64 {
    let c = {
        let mut c = vec![0.0; j];
        for p in points {
            for k in 0..j {
                c[k] += p[k];
            }
        }
        linalg::scale(&c, 1.0 / points.len() as f64)
    };
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut vol = 0.0;
    for subset in (0..points.len()).combinations(j) {
        let base = &points[subset[0]];
        let diffs: Vec<Vec<f64>> = subset[1..]
            .iter()
            .map(|&i| linalg::sub(&points[i], base))
            .collect();
        let span = linalg::span_basis(&diffs, j, 1e-9);
        if span.len() != j - 1 {
            continue;
        }
        let normal = match linalg::complement_basis(&span, j).into_iter().next() {
            Some(n) => n,
            None => continue,
        };
        let off = dot(&normal, base);
        let side: Vec<f64> = points.iter().map(|p| dot(&normal, p) - off).collect();
        let (normal, off) = if side.iter().all(|s| *s <= 1e-9) {
            (normal, off)
        } else if side.iter().all(|s| *s >= -1e-9) {
            (linalg::scale(&normal, -1.0), -off)
        } else {
            continue;
        };
        if planes
            .iter()
            .any(|(n, o)| linalg::dist(n, &normal) < 1e-7 && (o - off).abs() < 1e-7)
        {
            continue;
        }
        let facet: Vec<Vec<f64>> = points
            .iter()
            .filter(|p| (dot(&normal, p) - off).abs() <= 1e-9)
            .cloned()
            .collect();
        let area = hull_measure_in_hull(&facet, j, j - 1);
        let height = off - dot(&normal, &c);
        vol += height * area / j as f64;
        planes.push((normal, off));
    }
    vol
}

fn independent_equalities(eqs: &[Halfspace], n: usize) -> Option<Vec<Halfspace>> {
    let sel = independent_subset(eqs, n);
    if sel.len() < eqs.len() {
        // every dropped equality must hold on the affine set cut out by `sel`
        let m = nalgebra::DMatrix::from_fn(sel.len(), n, |i, j| sel[i].normal[j]);
        let b = nalgebra::DVector::from_iterator(sel.len(), sel.iter().map(|h| h.offset));
        let x: Vec<f64> = m.svd(true, true).solve(&b, 1e-12).ok()?.iter().copied().collect();
        if eqs.iter().any(|h| h.eval(&x).abs() > 1e3 * EPS_GEO) {
            return None;
        }
    }
    Some(sel)
}

fn independent_subset(eqs: &[Halfspace], n: usize) -> Vec<Halfspace> {
    let mut sel: Vec<Halfspace> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for h in eqs {
        let mut trial = rows.clone();
        trial.push(h.normal.clone());
        if linalg::rank(&trial, n, 1e-9) > rows.len() {
            rows = trial;
            sel.push(h.clone());
        }
    }
    sel
}

fn segment_distance(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = linalg::sub(b, a);
    let l2 = dot(&ab, &ab);
    let t = if l2 > 0.0 {
        (dot(&linalg::sub(x, a), &ab) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    linalg::dist(x, &linalg::axpy(a, t, &ab))
}

fn hull_distance(x: &[f64], verts: &[Vec<f64>]) -> f64 {
    // Frank–Wolfe on the barycentric simplex; converges quickly for the tiny
    // vertex sets used here.
    let mut p = verts[0].clone();
    for it in 0..2000 {
        let g = linalg::sub(&p, x);
        let (best, _) = verts
            .iter()
            .enumerate()
            .map(|(i, v)| (i, dot(&g, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let d = linalg::sub(&verts[best], &p);
        let gap = -dot(&g, &d);
        if gap <= 1e-15 {
            break;
        }
        let dd = dot(&d, &d);
        let step = if dd > 0.0 { (gap / dd).clamp(0.0, 1.0) } else { 0.0 };
        p = linalg::axpy(&p, step, &d);
        if it > 10 && step < 1e-14 {
            break;
        }
    }
    linalg::dist(x, &p)
}
