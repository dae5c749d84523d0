//! Unit quaternions as `[w, x, y, z]` and the exact group Q8.

use serde::{Deserialize, Serialize};

pub type Quat = [f64; 4];

pub fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn qconj(a: &Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

pub fn qdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn qnormalize(a: &[f64]) -> Quat {
    let n = qdot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n, a[3] / n]
}

pub fn as_quat(w: &[f64]) -> Quat {
    [w[0], w[1], w[2], w[3]]
}

/// Great-circle distance on S³.
pub fn sphere_dist(a: &[f64], b: &[f64]) -> f64 {
    // atan2 form stays accurate for nearly equal points
    let d = qdot(a, b);
    let c: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let e = x - d * y;
            e * e
        })
        .sum::<f64>()
        .sqrt();
    c.atan2(d)
}

pub fn slerp(a: &[f64], b: &[f64], t: f64) -> Quat {
    let th = sphere_dist(a, b);
    if th < 1e-12 {
        return qnormalize(&[
            a[0] + t * (b[0] - a[0]),
            a[1] + t * (b[1] - a[1]),
            a[2] + t * (b[2] - a[2]),
            a[3] + t * (b[3] - a[3]),
        ]);
    }
    let s = th.sin();
    let (wa, wb) = (((1.0 - t) * th).sin() / s, (t * th).sin() / s);
    qnormalize(&[
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
        wa * a[3] + wb * b[3],
    ])
}

/// Rotation matrix (row-major) of a unit quaternion.
pub fn to_rot(q: &Quat) -> [[f64; 3]; 3] {
    let [w, x, y, z] = *q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Unit quaternion of a rotation matrix (Shepperd's method).
pub fn from_rot(r: &[[f64; 3]; 3]) -> Quat {
    let tr = r[0][0] + r[1][1] + r[2][2];
    let q = if tr > r[0][0].max(r[1][1]).max(r[2][2]) {
        let s = (1.0 + tr).sqrt() * 2.0;
        [
            0.25 * s,
            (r[2][1] - r[1][2]) / s,
            (r[0][2] - r[2][0]) / s,
            (r[1][0] - r[0][1]) / s,
        ]
    } else if r[0][0] >= r[1][1] && r[0][0] >= r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        [
            (r[2][1] - r[1][2]) / s,
            0.25 * s,
            (r[0][1] + r[1][0]) / s,
            (r[0][2] + r[2][0]) / s,
        ]
    } else if r[1][1] >= r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        [
            (r[0][2] - r[2][0]) / s,
            (r[0][1] + r[1][0]) / s,
            0.25 * s,
            (r[1][2] + r[2][1]) / s,
        ]
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        [
            (r[1][0] - r[0][1]) / s,
            (r[0][2] + r[2][0]) / s,
            (r[1][2] + r[2][1]) / s,
            0.25 * s,
        ]
    };
    qnormalize(&q)
}

/// Rotation by `angle` about a unit `axis`, as a quaternion.
pub fn axis_angle(axis: [f64; 3], angle: f64) -> Quat {
    let (s, c) = (angle / 2.0).sin_cos();
    [c, s * axis[0], s * axis[1], s * axis[2]]
}

/// Element of Q8 = {±1, ±i, ±j, ±k}, stored exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Q8 {
    pub neg: bool,
    /// 0 = 1, 1 = i, 2 = j, 3 = k
    pub axis: u8,
}

impl Q8 {
    pub const ONE: Q8 = Q8 { neg: false, axis: 0 };

    pub fn all() -> [Q8; 8] {
        let mut out = [Q8::ONE; 8];
        for (n, e) in out.iter_mut().enumerate() {
            *e = Q8 {
                neg: n >= 4,
                axis: (n % 4) as u8,
            };
        }
        out
    }

    pub fn mul(self, o: Q8) -> Q8 {
        let (sign, axis) = match (self.axis, o.axis) {
            (0, b) => (false, b),
            (a, 0) => (false, a),
            (a, b) if a == b => (true, 0),
            (a, b) => {
                let c = 6 - a - b;
                // cyclic order i -> j -> k -> i is positive
                (!((a % 3) + 1 == b), c)
            }
        };
        Q8 {
            neg: self.neg ^ o.neg ^ sign,
            axis,
        }
    }

    pub fn inv(self) -> Q8 {
        if self.axis == 0 {
            self
        } else {
            Q8 {
                neg: !self.neg,
                axis: self.axis,
            }
        }
    }

    pub fn quat(self) -> Quat {
        let mut q = [0.0; 4];
        q[self.axis as usize] = if self.neg { -1.0 } else { 1.0 };
        q
    }

    pub fn name(self) -> String {
        let base = ["1", "i", "j", "k"][self.axis as usize];
        if self.neg {
            format!("-{base}")
        } else {
            base.to_string()
        }
    }

    pub fn parse(s: &str) -> Option<Q8> {
        let s = s.trim();
        let (neg, rest) = match s.strip_prefix('-').or_else(|| s.strip_prefix('\u{2212}')) {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let axis = match rest {
            "1" => 0,
            "i" => 1,
            "j" => 2,
            "k" => 3,
            _ => return None,
        };
        Some(Q8 { neg, axis })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q8_table_matches_quaternions() {
        for a in Q8::all() {
            for b in Q8::all() {
                let p = qmul(&a.quat(), &b.quat());
                assert_eq!(p, a.mul(b).quat(), "{} * {}", a.name(), b.name());
            }
            assert_eq!(a.mul(a.inv()), Q8::ONE);
        }
        let (i, j) = (Q8::parse("i").unwrap(), Q8::parse("j").unwrap());
        assert_eq!(i.mul(j).name(), "k");
        assert_eq!(j.mul(i).name(), "-k");
    }

    #[test]
    fn rotation_round_trip() {
        let q = qnormalize(&[0.3, -0.5, 0.7, 0.1]);
        let back = from_rot(&to_rot(&q));
        let d = qdot(&q, &back).abs();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_distance_small_angles() {
        let a = [1.0, 0.0, 0.0, 0.0];
        let b = axis_angle([0.0, 0.0, 1.0], 2e-9);
        assert!((sphere_dist(&a, &b) - 1e-9).abs() < 1e-15);
    }
}
