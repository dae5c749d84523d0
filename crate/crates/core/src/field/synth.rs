//! Synthetic fields on `[-1, 1]^d` used by the test suite and examples.

use std::f64::consts::PI;

use super::{FieldHeader, SampledField, FIELD_FORMAT_VERSION};
use crate::covers::{self, quat};
use crate::error::Result;

/// Default half-width of the cube the samples live in.
pub const LAMBDA: f64 = 1.75;

fn grid_points(d: usize, res: usize) -> Vec<Vec<f64>> {
    let n = res + 1;
    let total = n.pow(d as u32);
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|_| {
                    let i = idx % n;
                    idx /= n;
                    -1.0 + 2.0 * i as f64 / res as f64
                })
                .collect()
        })
        .collect()
}

fn build(target: &str, d: usize, res: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<SampledField> {
    let header = FieldHeader {
        version: FIELD_FORMAT_VERSION,
        target: target.into(),
        lo: vec![-1.0; d],
        hi: vec![1.0; d],
        resolution: vec![res; d],
        lambda: LAMBDA,
    };
    let samples = grid_points(d, res).iter().map(|x| f(x)).collect();
    SampledField::new(header, samples)
}

/// Centre of the vortex: off the grid so no vertex sits on the defect.
pub fn vortex_centre(res: usize) -> [f64; 2] {
    let h = 2.0 / res as f64;
    [0.618 * h / 2.0, 0.382 * h / 2.0]
}

/// `x ↦ (x - c)/|x - c|`, a single vortex of winding one.
pub fn vortex(res: usize) -> Result<SampledField> {
    let c = vortex_centre(res);
    build("circle", 2, res, |x| {
        let (a, b) = (x[0] - c[0], x[1] - c[1]);
        let r = a.hypot(b);
        vec![a / r, b / r]
    })
}

/// Angle of the smooth zero-winding field.
pub fn smooth_angle(x: &[f64]) -> f64 {
    0.7 * x[0] + 0.5 * x[1] * x[1]
}

/// `(cos θ, sin θ)` with `θ = 0.7 x₁ + 0.5 x₂²`.
pub fn smooth(res: usize) -> Result<SampledField> {
    build("circle", 2, res, |x| {
        let t = smooth_angle(x);
        vec![t.cos(), t.sin()]
    })
}

/// `∫_{[-1,1]²} |∇θ|` for the smooth field, in closed form:
/// `2 ∫_{-1}^{1} √(0.49 + t²) dt`.
pub fn smooth_gradient_integral() -> f64 {
    let a: f64 = 0.7;
    let prim = |t: f64| 0.5 * (t * (a * a + t * t).sqrt() + a * a * (t + (a * a + t * t).sqrt()).ln());
    2.0 * (prim(1.0) - prim(-1.0))
}

/// Vortex and antivortex at `(∓0.5, 0.1)`.
pub fn dipole(res: usize) -> Result<SampledField> {
    build("circle", 2, res, |x| {
        let t = (x[1] - 0.1).atan2(x[0] + 0.5) - (x[1] - 0.1).atan2(x[0] - 0.5);
        vec![t.cos(), t.sin()]
    })
}

/// Clifford-torus field: a vortex in the first factor and a smooth angle in
/// the second.
pub fn torus(res: usize) -> Result<SampledField> {
    let t = covers::target("clifford_torus")?;
    let c = vortex_centre(res);
    build("clifford_torus", 2, res, |x| {
        t.project(&[(x[1] - c[1]).atan2(x[0] - c[0]), smooth_angle(x)])
    })
}

/// A constant field.
pub fn constant(target: &str, d: usize, res: usize, value: &[f64]) -> Result<SampledField> {
    covers::target(target)?;
    build(target, d, res, |_| value.to_vec())
}

/// Positions of the two defects of [`two_defect`].
pub const DEFECT_A: [f64; 2] = [-0.4, 0.0];
pub const DEFECT_B: [f64; 2] = [0.4, 0.0];

/// Unit quaternion of the two-defect field: a quarter-turn screw in `i`
/// around `A` (discontinuity to the left of `A`) times one in `j` around
/// `B` (discontinuity to the right of `B`). Both discontinuities are by
/// units of Q8, so the projected field is continuous off the defects.
pub fn two_defect_quat(x: &[f64]) -> quat::Quat {
    let ta = (x[1] - DEFECT_A[1]).atan2(x[0] - DEFECT_A[0]);
    let tb = (-(x[1] - DEFECT_B[1])).atan2(-(x[0] - DEFECT_B[0]));
    let ga = [(ta / 4.0).cos(), (ta / 4.0).sin(), 0.0, 0.0];
    let gb = [(tb / 4.0).cos(), 0.0, (tb / 4.0).sin(), 0.0];
    quat::qmul(&ga, &gb)
}

/// Two non-commuting defects of the `so3_mod_v4` target.
pub fn two_defect(res: usize) -> Result<SampledField> {
    let t = covers::target("so3_mod_v4")?;
    build("so3_mod_v4", 2, res, |x| t.project(&two_defect_quat(x)))
}

/// Anchor for the two-defect field and its lift: the identity quaternion.
pub fn two_defect_anchor() -> (Vec<f64>, Vec<f64>) {
    let t = covers::target("so3_mod_v4").expect("bundled target");
    let w = vec![1.0, 0.0, 0.0, 0.0];
    (t.project(&w), w)
}

/// Closed loops based at the origin that go once around `A` and once
/// around `B`, in either order.
pub fn defect_loops() -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let around_a = |pts: &mut Vec<Vec<f64>>| {
        let [ax, ay] = DEFECT_A;
        pts.push(vec![ax, ay + 0.25]);
        pts.push(vec![ax - 0.25, ay + 0.031]);
        pts.push(vec![ax - 0.25, ay - 0.043]);
        pts.push(vec![ax, ay - 0.25]);
    };
    let around_b = |pts: &mut Vec<Vec<f64>>| {
        let [bx, by] = DEFECT_B;
        pts.push(vec![bx, by - 0.25]);
        pts.push(vec![bx + 0.25, by - 0.037]);
        pts.push(vec![bx + 0.25, by + 0.029]);
        pts.push(vec![bx, by + 0.25]);
    };
    let base = vec![0.0, 0.013];
    let mut ab = vec![base.clone()];
    around_a(&mut ab);
    ab.push(base.clone());
    around_b(&mut ab);
    let mut ba = vec![base.clone()];
    around_b(&mut ba);
    ba.push(base);
    around_a(&mut ba);
    (ab, ba)
}

/// A loop around the vortex centre.
pub fn vortex_loop() -> Vec<Vec<f64>> {
    (0..7)
        .map(|k| {
            let a = 2.0 * PI * (k as f64 + 0.17) / 7.0;
            vec![0.5 * a.cos(), 0.5 * a.sin()]
        })
        .collect()
}
