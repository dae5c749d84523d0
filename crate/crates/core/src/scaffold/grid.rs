//! The cubical grid on `[-M, M]^m`, its skeleton cascade and the dual
//! `(m-2)`-skeleton carrying the singular set.

use crate::covers::CoverTarget;
use crate::error::{LiftError, Result};
use crate::polygeom::{linalg, HPolytope};

/// Radial retraction of the punctured box `lo..hi` onto its relative
/// boundary, from the box centre. Axes with `lo == hi` are left alone.
pub fn radial_retract(lo: &[f64], hi: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let mut mx: f64 = 0.0;
    let mut any_free = false;
    for k in 0..z.len() {
        let hw = (hi[k] - lo[k]) / 2.0;
        if hw > 0.0 {
            any_free = true;
            let u = (z[k] - (lo[k] + hw)) / hw;
            mx = mx.max(u.abs());
        }
    }
    if !any_free {
        return Err(LiftError::InvalidArgument("face has no free axis".into()));
    }
    if mx <= 1e-12 {
        return Err(LiftError::SingularPoint);
    }
    if mx > 1.0 + 1e-12 {
        return Err(LiftError::InvalidArgument("point outside the face".into()));
    }
    Ok((0..z.len())
        .map(|k| {
            let hw = (hi[k] - lo[k]) / 2.0;
            if hw > 0.0 {
                let c = lo[k] + hw;
                c + (z[k] - c) / mx
            } else {
                z[k]
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    /// Coordinate on grid line `r`.
    Fixed(i64),
    /// Coordinate strictly inside cell `i`.
    Free(i64),
}

/// Grid geometry and the W mask, independent of the target.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub m: usize,
    pub big_m: f64,
    pub q: usize,
    pub h: f64,
    pub w_mask: Vec<bool>,
}

impl Grid {
    pub fn new(m: usize, big_m: f64, q: usize) -> Self {
        let n = (2 * q).pow(m as u32);
        Grid {
            m,
            big_m,
            q,
            h: big_m / q as f64,
            w_mask: vec![false; n],
        }
    }

    pub fn cells(&self) -> i64 {
        2 * self.q as i64
    }

    pub fn cube_count(&self) -> usize {
        self.w_mask.len()
    }

    pub fn cube_index(&self, c: &[i64]) -> Option<usize> {
        let n = self.cells();
        let mut idx = 0usize;
        let mut mult = 1usize;
        for &v in c {
            if v < 0 || v >= n {
                return None;
            }
            idx += v as usize * mult;
            mult *= n as usize;
        }
        Some(idx)
    }

    pub fn cube_from_index(&self, mut idx: usize) -> Vec<i64> {
        let n = self.cells() as usize;
        (0..self.m)
            .map(|_| {
                let v = idx % n;
                idx /= n;
                v as i64
            })
            .collect()
    }

    pub fn in_w(&self, c: &[i64]) -> bool {
        self.cube_index(c).map_or(false, |i| self.w_mask[i])
    }

    pub fn cube_bounds(&self, c: &[i64]) -> (Vec<f64>, Vec<f64>) {
        let lo: Vec<f64> = c.iter().map(|&i| self.line(i)).collect();
        let hi: Vec<f64> = c.iter().map(|&i| self.line(i + 1)).collect();
        (lo, hi)
    }

    pub fn line(&self, r: i64) -> f64 {
        if r == self.cells() {
            self.big_m
        } else {
            -self.big_m + self.h * r as f64
        }
    }

    pub fn centre(&self, c: &[i64]) -> Vec<f64> {
        c.iter().map(|&i| self.line(i) + self.h / 2.0).collect()
    }

    /// Minimal grid face containing `z`; coordinates within `1e-9·h` of a
    /// grid line are moved onto it.
    pub fn snap(&self, z: &mut [f64]) -> Vec<Slot> {
        let n = self.cells();
        z.iter_mut()
            .map(|x| {
                let t = ((*x + self.big_m) / self.h).clamp(0.0, n as f64);
                let r = t.round();
                if (t - r).abs() <= 1e-9 {
                    *x = self.line(r as i64);
                    Slot::Fixed(r as i64)
                } else {
                    Slot::Free((t.floor() as i64).clamp(0, n - 1))
                }
            })
            .collect()
    }

    /// True when the face is a face of some cube of W.
    pub fn face_in_w(&self, face: &[Slot]) -> bool {
        let mut cube = vec![0i64; self.m];
        self.face_in_w_rec(face, 0, &mut cube)
    }

    fn face_in_w_rec(&self, face: &[Slot], k: usize, cube: &mut Vec<i64>) -> bool {
        if k == face.len() {
            return self.in_w(cube);
        }
        let choices: &[i64] = match face[k] {
            Slot::Free(i) => {
                cube[k] = i;
                return self.face_in_w_rec(face, k + 1, cube);
            }
            Slot::Fixed(r) => &[r - 1, r],
        };
        for &c in choices {
            cube[k] = c;
            if self.face_in_w_rec(face, k + 1, cube) {
                return true;
            }
        }
        false
    }

    /// Dual-skeleton members: for each cube outside W and each pair of axes
    /// `a < b`, the slice of the cube through its centre in those two axes.
    pub fn singular_members(&self) -> Vec<HPolytope> {
        let mut out = Vec::new();
        for idx in 0..self.cube_count() {
            if self.w_mask[idx] {
                continue;
            }
            let c = self.cube_from_index(idx);
            let (lo, hi) = self.cube_bounds(&c);
            let ctr = self.centre(&c);
            for a in 0..self.m {
                for b in a + 1..self.m {
                    let mut lo2 = lo.clone();
                    let mut hi2 = hi.clone();
                    lo2[a] = ctr[a];
                    hi2[a] = ctr[a];
                    lo2[b] = ctr[b];
                    hi2[b] = ctr[b];
                    out.push(HPolytope::from_box(&lo2, &hi2));
                }
            }
        }
        out
    }

    /// Distance from `z` to the dual skeleton outside W (ring search).
    pub fn dist_to_singular(&self, z: &[f64]) -> f64 {
        let n = self.cells();
        let home: Vec<i64> = z
            .iter()
            .map(|x| (((x + self.big_m) / self.h).floor() as i64).clamp(0, n - 1))
            .collect();
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            if ring as f64 * self.h - self.h >= best || ring > n {
                return best;
            }
            self.visit_ring(&home, ring, &mut |c| {
                if !self.in_w(c) {
                    best = best.min(self.cube_member_dist(c, z));
                }
            });
            ring += 1;
        }
    }

    fn visit_ring(&self, home: &[i64], ring: i64, f: &mut dyn FnMut(&[i64])) {
        let m = self.m;
        let side = 2 * ring + 1;
        let total = side.pow(m as u32);
        let mut c = vec![0i64; m];
        for mut k in 0..total {
            let mut cheb = 0;
            for (d, slot) in c.iter_mut().enumerate() {
                let off = k % side - ring;
                k /= side;
                cheb = cheb.max(off.abs());
                *slot = home[d] + off;
            }
            if cheb == ring && self.cube_index(&c).is_some() {
                f(&c);
            }
        }
    }

    fn cube_member_dist(&self, c: &[i64], z: &[f64]) -> f64 {
        let (lo, hi) = self.cube_bounds(c);
        let ctr = self.centre(c);
        let box_d: Vec<f64> = (0..self.m)
            .map(|k| (lo[k] - z[k]).max(z[k] - hi[k]).max(0.0))
            .collect();
        let cen_d: Vec<f64> = (0..self.m).map(|k| (z[k] - ctr[k]).abs()).collect();
        let base: f64 = box_d.iter().map(|v| v * v).sum();
        let mut best = f64::INFINITY;
        for a in 0..self.m {
            for b in a + 1..self.m {
                let d2 = base - box_d[a] * box_d[a] - box_d[b] * box_d[b]
                    + cen_d[a] * cen_d[a]
                    + cen_d[b] * cen_d[b];
                best = best.min(d2.max(0.0).sqrt());
            }
        }
        best
    }
}

/// Result of the skeleton cascade at one point.
#[derive(Clone, Debug)]
pub struct CascadeOutcome {
    /// Point of `R₁ ∪ (R_j ∩ W)` reached.
    pub point: Vec<f64>,
    /// Whether the final face belongs to W.
    pub in_w: bool,
    /// Number of face lookups performed.
    pub lookups: usize,
}

impl Grid {
    /// Push `z` down the skeleton with radial retractions until it reaches a
    /// face of W or the 1-skeleton.
    pub fn cascade(&self, z: &[f64]) -> Result<CascadeOutcome> {
        let mut z: Vec<f64> = z
            .iter()
            .map(|x| x.clamp(-self.big_m, self.big_m))
            .collect();
        let mut lookups = 0;
        loop {
            let face = self.snap(&mut z);
            lookups += 1;
            if self.face_in_w(&face) {
                return Ok(CascadeOutcome {
                    point: z,
                    in_w: true,
                    lookups,
                });
            }
            let free: Vec<usize> = (0..self.m)
                .filter(|&k| matches!(face[k], Slot::Free(_)))
                .collect();
            if free.len() <= 1 {
                return Ok(CascadeOutcome {
                    point: z,
                    in_w: false,
                    lookups,
                });
            }
            let mut mx: f64 = 0.0;
            for &k in &free {
                let Slot::Free(i) = face[k] else { unreachable!() };
                let c = self.line(i) + self.h / 2.0;
                mx = mx.max((z[k] - c).abs());
            }
            if mx <= 1e-12 * self.h {
                return Err(LiftError::SingularPoint);
            }
            let s = (self.h / 2.0) / mx;
            for &k in &free {
                let Slot::Free(i) = face[k] else { unreachable!() };
                let c = self.line(i) + self.h / 2.0;
                z[k] = c + (z[k] - c) * s;
            }
        }
    }

    /// Value of the retraction on a point of the 1-skeleton outside W.
    pub fn edge_value(&self, t: &dyn CoverTarget, z: &[f64]) -> Vec<f64> {
        let mut z = z.to_vec();
        let face = self.snap(&mut z);
        let free = (0..self.m).find(|&k| matches!(face[k], Slot::Free(_)));
        match free {
            None => vertex_value(t, &z, self.h),
            Some(a) => {
                let Slot::Free(i) = face[a] else { unreachable!() };
                let mut v0 = z.clone();
                let mut v1 = z.clone();
                v0[a] = self.line(i);
                v1[a] = self.line(i + 1);
                let s = ((z[a] - v0[a]) / (v1[a] - v0[a])).clamp(0.0, 1.0);
                t.n_geodesic(&vertex_value(t, &v0, self.h), &vertex_value(t, &v1, self.h), s)
            }
        }
    }
}

/// Tubular projection, nudged along a fixed direction on the medial set.
pub(crate) fn vertex_value(t: &dyn CoverTarget, v: &[f64], h: f64) -> Vec<f64> {
    if let Some(p) = t.tubular_project(v) {
        return p;
    }
    let dir: Vec<f64> = (0..v.len()).map(|k| 1.0 + k as f64 * 0.618_033_988_75).collect();
    let dir = linalg::scale(&dir, 1.0 / linalg::norm(&dir));
    let mut eps = 1e-6 * h;
    loop {
        if let Some(p) = t.tubular_project(&linalg::axpy(v, eps, &dir)) {
            return p;
        }
        eps *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_examples() {
        let r = radial_retract(&[-1.0, -1.0], &[1.0, 1.0], &[0.5, 0.25]).unwrap();
        assert_eq!(r, vec![1.0, 0.5]);
        let r = radial_retract(&[-1.0, -1.0], &[1.0, 1.0], &[1.0, 0.3]).unwrap();
        assert_eq!(r, vec![1.0, 0.3]);
        assert_eq!(
            radial_retract(&[-1.0, -1.0], &[1.0, 1.0], &[0.0, 0.0]),
            Err(LiftError::SingularPoint)
        );
    }

    #[test]
    fn ring_search_matches_brute_force() {
        let mut g = Grid::new(3, 1.0, 3);
        for i in 0..g.cube_count() {
            g.w_mask[i] = i % 5 == 0;
        }
        let members = g.singular_members();
        for z in [[0.1, 0.2, -0.7], [0.9, -0.95, 0.33], [0.0, 0.0, 0.0]] {
            let brute = members
                .iter()
                .map(|p| p.distance_to(&z))
                .fold(f64::INFINITY, f64::min);
            assert!((g.dist_to_singular(&z) - brute).abs() < 1e-9);
        }
    }
}
