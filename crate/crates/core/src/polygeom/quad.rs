/// Order-2 quadrature on a `d`-simplex: barycentric nodes with weights
/// summing to one (multiply by the simplex volume).
pub fn simplex_rule(d: usize) -> Vec<(Vec<f64>, f64)> {
    match d {
        0 => vec![(vec![1.0], 1.0)],
        1 => {
            let g = 0.5 / 3f64.sqrt();
            vec![(vec![0.5 + g, 0.5 - g], 0.5), (vec![0.5 - g, 0.5 + g], 0.5)]
        }
        2 => (0..3)
            .map(|i| {
                let mut b = vec![0.5; 3];
                b[i] = 0.0;
                (b, 1.0 / 3.0)
            })
            .collect(),
        _ => {
            // symmetric rule exact for quadratics on a d-simplex
            let n = d + 1;
            let nf = n as f64;
            let a = (nf + 1.0 - (nf + 1.0).sqrt()) / (nf * (nf + 1.0));
            let b = 1.0 - d as f64 * a;
            (0..n)
                .map(|i| {
                    let mut bary = vec![a; n];
                    bary[i] = b;
                    (bary, 1.0 / n as f64)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // ∫ over the reference simplex of λ0², relative to volume: 2/((d+1)(d+2))
    #[test]
    fn exact_for_quadratics() {
        for d in 1..=5 {
            let r = simplex_rule(d);
            let s: f64 = r.iter().map(|(b, w)| w * b[0] * b[0]).sum();
            let exact = 2.0 / ((d + 1) * (d + 2)) as f64;
            assert!((s - exact).abs() < 1e-12, "d={d}: {s} vs {exact}");
            let s: f64 = r.iter().map(|(b, w)| w * b[0] * b[1]).sum();
            let exact = 1.0 / ((d + 1) * (d + 2)) as f64;
            assert!((s - exact).abs() < 1e-12, "d={d}");
        }
    }
}
