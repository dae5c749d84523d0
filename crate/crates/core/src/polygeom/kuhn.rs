//! Kuhn (Freudenthal) triangulation of an axis-aligned box.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::linalg;
use crate::error::{LiftError, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Triangulation {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
    vertices: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
}

/// Split every grid cell of the box into `d!` simplices, one per ordering of
/// the axes. Neighbouring cells agree on shared facets, so the result is a
/// conforming triangulation.
pub fn kuhn_triangulate(lo: &[f64], hi: &[f64], res: &[usize]) -> Result<Triangulation> {
    let d = lo.len();
    if !(1..=3).contains(&d) || hi.len() != d || res.len() != d {
        return Err(LiftError::InvalidArgument(format!(
            "box dimension must be 1, 2 or 3 (got {d})"
        )));
    }
    if res.iter().any(|&r| r == 0) {
        return Err(LiftError::InvalidArgument(
            "resolution must be >= 1 on every axis".into(),
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
        return Err(LiftError::InvalidArgument("degenerate box".into()));
    }
    let strides = strides(res);
    let nv: usize = res.iter().map(|r| r + 1).product();
    let h: Vec<f64> = (0..d).map(|k| (hi[k] - lo[k]) / res[k] as f64).collect();
    let vertices: Vec<Vec<f64>> = (0..nv)
        .map(|idx| {
            let ijk = unflatten(idx, &strides, res);
            (0..d).map(|k| grid_coord(lo[k], hi[k], res[k], ijk[k], h[k])).collect()
        })
        .collect();
    let perms: Vec<Vec<usize>> = (0..d).permutations(d).collect();
    let ncell: usize = res.iter().product();
    let mut simplices = Vec::with_capacity(ncell * perms.len());
    for cell in 0..ncell {
        let c = unflatten_cells(cell, res);
        for perm in &perms {
            let mut v = c.clone();
            let mut s = Vec::with_capacity(d + 1);
            s.push(flatten(&v, &strides));
            for &axis in perm {
                v[axis] += 1;
                s.push(flatten(&v, &strides));
            }
            simplices.push(s);
        }
    }
    Ok(Triangulation {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        res: res.to_vec(),
        vertices,
        simplices,
    })
}

fn grid_coord(lo: f64, hi: f64, r: usize, i: usize, h: f64) -> f64 {
    if i == r {
        hi
    } else {
        lo + h * i as f64
    }
}

fn strides(res: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(res.len());
    let mut acc = 1;
    for r in res {
        s.push(acc);
        acc *= r + 1;
    }
    s
}

fn unflatten(mut idx: usize, _strides: &[usize], res: &[usize]) -> Vec<usize> {
    res.iter()
        .map(|r| {
            let i = idx % (r + 1);
            idx /= r + 1;
            i
        })
        .collect()
}

fn unflatten_cells(mut idx: usize, res: &[usize]) -> Vec<usize> {
    res.iter()
        .map(|r| {
            let i = idx % r;
            idx /= r;
            i
        })
        .collect()
}

fn flatten(ijk: &[usize], strides: &[usize]) -> usize {
    ijk.iter().zip(strides).map(|(i, s)| i * s).sum()
}

/// Rank of a permutation of `0..d` in lexicographic order.
fn perm_rank(perm: &[usize]) -> usize {
    let d = perm.len();
    let mut rank = 0;
    for i in 0..d {
        let smaller = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank = rank * (d - i) + smaller;
    }
    rank
}

impl Triangulation {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn resolution(&self) -> &[usize] {
        &self.res
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn vertex_index(&self, ijk: &[usize]) -> usize {
        flatten(ijk, &strides(&self.res))
    }

    pub fn simplex_points(&self, s: usize) -> Vec<&[f64]> {
        self.simplices[s]
            .iter()
            .map(|&v| self.vertices[v].as_slice())
            .collect()
    }

    /// Volume of simplex `s`.
    pub fn simplex_volume(&self, s: usize) -> f64 {
        let pts = self.simplex_points(s);
        let d = self.dim();
        let rows: Vec<Vec<f64>> = (1..=d).map(|i| linalg::sub(pts[i], pts[0])).collect();
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        linalg::det(&rows).abs() / fact
    }

    pub fn box_volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Simplex containing `x` and its barycentric coordinates (ordered as the
    /// simplex's vertex list). Points outside the box are clamped.
    pub fn locate(&self, x: &[f64]) -> (usize, Vec<f64>) {
        let d = self.dim();
        let mut cell = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for k in 0..d {
            let h = (self.hi[k] - self.lo[k]) / self.res[k] as f64;
            let t = ((x[k] - self.lo[k]) / h).clamp(0.0, self.res[k] as f64);
            let c = (t.floor() as usize).min(self.res[k] - 1);
            cell.push(c);
            frac.push((t - c as f64).clamp(0.0, 1.0));
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(a.cmp(&b)));
        let mut cell_idx = 0;
        let mut mult = 1;
        for k in 0..d {
            cell_idx += cell[k] * mult;
            mult *= self.res[k];
        }
        let nperm: usize = (1..=d).product();
        let s = cell_idx * nperm + perm_rank(&order);
        let mut bary = Vec::with_capacity(d + 1);
        bary.push(1.0 - frac[order[0]]);
        for i in 0..d {
            let next = if i + 1 < d { frac[order[i + 1]] } else { 0.0 };
            bary.push(frac[order[i]] - next);
        }
        (s, bary)
    }

    /// Map from each facet (sorted vertex list) to the simplices containing it.
    pub fn facet_map(&self) -> std::collections::HashMap<Vec<usize>, Vec<usize>> {
        let mut map: std::collections::HashMap<Vec<usize>, Vec<usize>> =
            std::collections::HashMap::new();
        for (si, s) in self.simplices.iter().enumerate() {
            for skip in 0..s.len() {
                let mut f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v)
                    .collect();
                f.sort_unstable();
                map.entry(f).or_default().push(si);
            }
        }
        map
    }

    /// True when every vertex of the facet lies on one common face of the box.
    pub fn is_boundary_facet(&self, facet: &[usize]) -> bool {
        (0..self.dim()).any(|k| {
            let on = |b: f64| facet.iter().all(|&v| self.vertices[v][k] == b);
            on(self.lo[k]) || on(self.hi[k])
        })
    }

    /// Interior edges (vertex pairs shared by simplices), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .simplices
            .iter()
            .flat_map(|s| {
                s.iter()
                    .tuple_combinations()
                    .map(|(&a, &b)| (a.min(b), a.max(b)))
                    .collect::<Vec<_>>()
            })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}
