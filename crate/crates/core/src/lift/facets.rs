use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{add, dist, dot, norm, scale, sub};

/// Gauss–Legendre nodes on `[0, 1]` with weights summing to one.
pub(crate) fn gauss_01(n: usize) -> Vec<(f64, f64)> {
    let (x, w): (&[f64], &[f64]) = match n {
        1 => (&[0.0], &[2.0]),
        2 => (&[-0.577_350_269_189_625_8, 0.577_350_269_189_625_8], &[1.0, 1.0]),
        3 => (
            &[-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4],
            &[0.555_555_555_555_555_6, 0.888_888_888_888_888_9, 0.555_555_555_555_555_6],
        ),
        4 => (
            &[
                -0.861_136_311_594_052_6,
                -0.339_981_043_584_856_3,
                0.339_981_043_584_856_3,
                0.861_136_311_594_052_6,
            ],
            &[
                0.347_854_845_137_453_9,
                0.652_145_154_862_546_1,
                0.652_145_154_862_546_1,
                0.347_854_845_137_453_9,
            ],
        ),
        _ => (
            &[
                -0.906_179_845_938_664,
                -0.538_469_310_105_683,
                0.0,
                0.538_469_310_105_683,
                0.906_179_845_938_664,
            ],
            &[
                0.236_926_885_056_189_1,
                0.478_628_670_499_366_5,
                0.568_888_888_888_888_9,
                0.478_628_670_499_366_5,
                0.236_926_885_056_189_1,
            ],
        ),
    };
    x.iter().zip(w).map(|(a, b)| (0.5 * (a + 1.0), 0.5 * b)).collect()
}

/// A `(d-1)`-dimensional convex facet in `R^d` given by its vertices.
#[derive(Clone, Debug)]
pub(crate) struct FacetGeometry {
    pub vertices: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub measure: f64,
    pub diameter: f64,
}

impl FacetGeometry {
    pub fn new(vertices: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        let bad = || LiftError::InvalidArgument("degenerate jump facet".into());
        let (normal, measure) = match d {
            1 => (vec![1.0], 1.0),
            2 => {
                let e = sub(&vertices[1], &vertices[0]);
                let l = norm(&e);
                if l == 0.0 {
                    return Err(bad());
                }
                (vec![-e[1] / l, e[0] / l], l)
            }
            3 => {
                let mut n = vec![0.0; 3];
                for w in fan(&vertices) {
                    let (a, b) = (sub(&w[1], &w[0]), sub(&w[2], &w[0]));
                    let c = cross3(&a, &b);
                    let c = if dot(&c, &n) < 0.0 { scale(&c, -1.0) } else { c };
                    n = add(&n, &c);
                }
                let l = norm(&n);
                if l == 0.0 {
                    return Err(bad());
                }
                let area: f64 = fan(&vertices)
                    .iter()
                    .map(|w| 0.5 * norm(&cross3(&sub(&w[1], &w[0]), &sub(&w[2], &w[0]))))
                    .sum();
                (scale(&n, 1.0 / l), area)
            }
            _ => return Err(LiftError::InvalidArgument("facets need 1 <= d <= 3".into())),
        };
        let mut diameter: f64 = 0.0;
        for a in &vertices {
            for b in &vertices {
                diameter = diameter.max(dist(a, b));
            }
        }
        Ok(Self {
            vertices,
            normal,
            measure,
            diameter,
        })
    }

    /// Interior quadrature nodes with weights summing to the facet measure.
    pub fn quadrature(&self, n: usize) -> Vec<(Vec<f64>, f64)> {
        match self.vertices.len() {
            1 => vec![(self.vertices[0].clone(), 1.0)],
            2 if self.normal.len() == 2 => gauss_01(n)
                .into_iter()
                .map(|(t, w)| {
                    let x = add(
                        &scale(&self.vertices[0], 1.0 - t),
                        &scale(&self.vertices[1], t),
                    );
                    (x, w * self.measure)
                })
                .collect(),
            _ => {
                let mut out = Vec::new();
                for w in fan(&self.vertices) {
                    let area = 0.5 * norm(&cross3(&sub(&w[1], &w[0]), &sub(&w[2], &w[0])));
                    for i in 0..3 {
                        let mut b = [1.0 / 6.0; 3];
                        b[i] = 2.0 / 3.0;
                        let x: Vec<f64> = (0..3)
                            .map(|k| (0..3).map(|j| b[j] * w[j][k]).sum())
                            .collect();
                        out.push((x, area / 3.0));
                    }
                }
                out
            }
        }
    }

    /// Split into smaller facets: halves of a segment, fan triangles of a
    /// polygon.
    pub fn split(&self) -> Vec<Vec<Vec<f64>>> {
        match (self.vertices.len(), self.normal.len()) {
            (2, 2) => {
                let m = scale(&add(&self.vertices[0], &self.vertices[1]), 0.5);
                vec![
                    vec![self.vertices[0].clone(), m.clone()],
                    vec![m, self.vertices[1].clone()],
                ]
            }
            (_, 3) => {
                let c = centroid(&self.vertices);
                let ordered = fan_order(&self.vertices);
                (0..ordered.len())
                    .map(|i| {
                        vec![
                            c.clone(),
                            ordered[i].clone(),
                            ordered[(i + 1) % ordered.len()].clone(),
                        ]
                    })
                    .collect()
            }
            _ => vec![self.vertices.clone()],
        }
    }
}

fn centroid(v: &[Vec<f64>]) -> Vec<f64> {
    let mut c = vec![0.0; v[0].len()];
    for p in v {
        c = add(&c, p);
    }
    scale(&c, 1.0 / v.len() as f64)
}

fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Vertices of a planar convex polygon in R^3, in angular order.
fn fan_order(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let c = centroid(v);
    let e1 = sub(&v[0], &c);
    let mut n = vec![0.0; 3];
    for p in v {
        let k = cross3(&e1, &sub(p, &c));
        if norm(&k) > norm(&n) {
            n = k;
        }
    }
    let e2 = cross3(&n, &e1);
    let mut out: Vec<(f64, Vec<f64>)> = v
        .iter()
        .map(|p| {
            let r = sub(p, &c);
            (dot(&r, &e2).atan2(dot(&r, &e1)), p.clone())
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.into_iter().map(|(_, p)| p).collect()
}

fn fan(v: &[Vec<f64>]) -> Vec<[Vec<f64>; 3]> {
    let o = fan_order(v);
    (1..o.len().saturating_sub(1))
        .map(|i| [o[0].clone(), o[i].clone(), o[i + 1].clone()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_cubics() {
        for n in 2..=5 {
            let s: f64 = gauss_01(n).iter().map(|(x, w)| w * x * x * x).sum();
            assert!((s - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn square_facet_in_space() {
        let v = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let f = FacetGeometry::new(v, 3).unwrap();
        assert!((f.measure - 1.0).abs() < 1e-12);
        assert!((f.normal[2].abs() - 1.0).abs() < 1e-12);
        let q: f64 = f.quadrature(2).iter().map(|(_, w)| w).sum();
        assert!((q - 1.0).abs() < 1e-12);
        assert_eq!(f.split().len(), 4);
    }
}
