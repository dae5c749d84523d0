//! Retraction scaffolds: a polyhedral singular set `X` of codimension two
//! and a locally Lipschitz retraction `ρ: Q_M \ X -> N`, plus the shifted
//! retractions `ρ_y` and their certified constants.

mod analytic;
mod audit;
mod grid;
mod io;

pub use audit::{arclength, audit_scaffold, grad_norm, kappa, AuditReport};
pub use grid::{radial_retract, CascadeOutcome};
pub use io::{load_scaffold, save_scaffold, SCAFFOLD_FORMAT_VERSION};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::covers::{self, CoverTarget};
use crate::error::{LiftError, Result};
use crate::polygeom::linalg::{axpy, dot, norm, sub};
use crate::polygeom::{HPolytope, EPS_GEO};
use grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaffoldKind {
    GenericGrid,
    Analytic,
}

/// Constants certified by [`audit_scaffold`]. All gradient norms are
/// Frobenius norms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Bound on `|∇ρ(z)|·dist(z, X)`.
    pub c0: f64,
    /// Bound on the length of `ρ∘γ` for straight segments `γ`.
    pub c1: f64,
    /// Bound on the geodesic size of a jump of the lifting.
    pub jump_bound: f64,
    /// Bound on the shift-average of `‖∇(ρ_y∘u)‖₁ / ‖∇u‖₁`.
    pub grad_bound: f64,
    /// Bound on the shift-average of `H^{d-1}(T_y) / ∫|u-u*||∇u|`;
    /// polyhedral singular sets only.
    pub shadow_bound: Option<f64>,
    /// Bound on `|Dv| / ‖∇u‖₁` for the selected shift.
    pub measure_bound: Option<f64>,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scaffold {
    target_id: String,
    kind: ScaffoldKind,
    m: usize,
    big_m: f64,
    sigma: f64,
    lambda: f64,
    q: usize,
    w_cubes: Vec<Vec<i64>>,
    members: Vec<HPolytope>,
    polyhedral: bool,
    pub constants: Constants,
    #[serde(skip)]
    grid: Option<Grid>,
}

fn check_params(t: &dyn CoverTarget, big_m: f64, sigma: f64) -> Result<()> {
    if !(big_m > 0.0) || !(sigma > 0.0) || sigma >= big_m {
        return Err(LiftError::InvalidArgument(format!(
            "need 0 < sigma < M (got M = {big_m}, sigma = {sigma})"
        )));
    }
    let lambda = big_m - sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..4096 {
        let z = t.sample_n(&mut rng);
        if z.iter().any(|v| v.abs() >= lambda) {
            return Err(LiftError::InvalidArgument(format!(
                "N is not inside the cube of half-width {lambda}"
            )));
        }
    }
    Ok(())
}

/// Build the cubical-grid scaffold. `W` is the set of cubes whose centre is
/// within half a diagonal plus `h/4` of N; every such cube must lie inside
/// the tubular neighbourhood of N.
pub fn build_generic_scaffold(
    target_id: &str,
    q: usize,
    big_m: f64,
    sigma: Option<f64>,
) -> Result<Scaffold> {
    let t = covers::target(target_id)?;
    let m = t.m();
    if m > 4 {
        return Err(LiftError::InvalidArgument(format!(
            "grid scaffold needs ambient dimension <= 4 (target `{target_id}` has {m})"
        )));
    }
    if q == 0 {
        return Err(LiftError::InvalidArgument("q must be >= 1".into()));
    }
    let sigma = sigma.unwrap_or(big_m / (8.0 * q as f64));
    check_params(t, big_m, sigma)?;
    let mut g = Grid::new(m, big_m, q);
    let half_diag = g.h * (m as f64).sqrt() / 2.0;
    let margin = g.h / 4.0;
    let reach = t.reach();
    for idx in 0..g.cube_count() {
        let c = g.cube_from_index(idx);
        let ctr = g.centre(&c);
        let dn = match t.tubular_project(&ctr) {
            Some(p) => crate::polygeom::linalg::dist(&p, &ctr),
            None => reach,
        };
        if dn <= half_diag + margin {
            if dn + half_diag >= reach {
                return Err(LiftError::ConstructionFailure {
                    cube: c,
                    reason: format!(
                        "cube reaches {:.4} from N, tubular reach is {reach:.4}",
                        dn + half_diag
                    ),
                });
            }
            g.w_mask[idx] = true;
        }
    }
    let w_cubes = (0..g.cube_count())
        .filter(|&i| g.w_mask[i])
        .map(|i| g.cube_from_index(i))
        .collect();
    let members = g.singular_members();
    Ok(Scaffold {
        target_id: target_id.to_string(),
        kind: ScaffoldKind::GenericGrid,
        m,
        big_m,
        sigma,
        lambda: big_m - sigma,
        q,
        w_cubes,
        members,
        polyhedral: true,
        constants: Constants::default(),
        grid: Some(g),
    })
}

/// Scaffold with a closed-form retraction (nearest-point projection onto N).
pub fn build_analytic_scaffold(target_id: &str, big_m: f64, sigma: Option<f64>) -> Result<Scaffold> {
    let t = covers::target(target_id)?;
    let sigma = sigma.unwrap_or(big_m / 8.0);
    check_params(t, big_m, sigma)?;
    let members = analytic::members(target_id, big_m);
    Ok(Scaffold {
        target_id: target_id.to_string(),
        kind: ScaffoldKind::Analytic,
        m: t.m(),
        big_m,
        sigma,
        lambda: big_m - sigma,
        q: 0,
        w_cubes: Vec::new(),
        polyhedral: members.is_some(),
        members: members.unwrap_or_default(),
        constants: Constants::default(),
        grid: None,
    })
}

impl Scaffold {
    pub fn target_id(&self) -> &str {
        &self.target_id
    }

    pub fn target(&self) -> &'static dyn CoverTarget {
        covers::target(&self.target_id).expect("scaffold built from a registered target")
    }

    pub fn kind(&self) -> ScaffoldKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn w_cubes(&self) -> &[Vec<i64>] {
        &self.w_cubes
    }

    /// Polyhedral members of the singular set (empty when not polyhedral).
    pub fn members(&self) -> &[HPolytope] {
        &self.members
    }

    pub fn is_polyhedral(&self) -> bool {
        self.polyhedral
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match self.kind {
            ScaffoldKind::GenericGrid => format!(
                "{}/grid q={} M={} sigma={}",
                self.target_id, self.q, self.big_m, self.sigma
            ),
            ScaffoldKind::Analytic => format!(
                "{}/analytic M={} sigma={}",
                self.target_id, self.big_m, self.sigma
            ),
        }
    }

    pub(crate) fn rehydrate(&mut self) -> Result<()> {
        if self.kind == ScaffoldKind::GenericGrid {
            let mut g = Grid::new(self.m, self.big_m, self.q);
            for c in &self.w_cubes {
                let idx = g.cube_index(c).ok_or_else(|| {
                    LiftError::InvalidArgument(format!("W cube {c:?} outside the grid"))
                })?;
                g.w_mask[idx] = true;
            }
            self.grid = Some(g);
        }
        Ok(())
    }

    /// Cascade through the skeleton (grid scaffolds only).
    pub fn cascade_retract(&self, z: &[f64]) -> Result<CascadeOutcome> {
        match &self.grid {
            Some(g) => g.cascade(z),
            None => Err(LiftError::InvalidArgument(
                "analytic scaffolds have no skeleton cascade".into(),
            )),
        }
    }

    /// `ρ(z)` together with the number of face lookups it took.
    pub fn rho_counted(&self, z: &[f64]) -> Result<(Vec<f64>, usize)> {
        match &self.grid {
            Some(g) => {
                let t = self.target();
                let out = g.cascade(z)?;
                let v = if out.in_w {
                    grid::vertex_value(t, &out.point, g.h)
                } else {
                    g.edge_value(t, &out.point)
                };
                Ok((v, out.lookups))
            }
            None => analytic::rho(&self.target_id, z).map(|v| (v, 0)),
        }
    }

    /// The retraction `ρ: Q_M \ X -> N`.
    pub fn rho(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.rho_counted(z).map(|(v, _)| v)
    }

    /// Distance from `z` to the singular set.
    pub fn dist_to_singular(&self, z: &[f64]) -> f64 {
        match &self.grid {
            Some(g) => g.dist_to_singular(z),
            None => analytic::dist(&self.target_id, z),
        }
    }

    /// `ρ_y(z)`: the retraction with singular set shifted by `y`, corrected
    /// so that it fixes N.
    pub fn eval_retraction(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let ny = norm(y);
        if ny > 0.0 && ny >= self.sigma {
            return Err(LiftError::InvalidArgument(format!(
                "shift of norm {ny} outside the ball of radius {}",
                self.sigma
            )));
        }
        let zy = sub(z, y);
        let d = self.dist_to_singular(&zy);
        if d <= EPS_GEO {
            return Err(LiftError::NearSingular(d));
        }
        let p = self.rho(&zy).map_err(|e| match e {
            LiftError::SingularPoint => LiftError::NearSingular(0.0),
            e => e,
        })?;
        if ny == 0.0 {
            return Ok(p);
        }
        self.correct(y, &p)
    }

    /// Solve `ρ(n - y) = p` for `n ∈ N`.
    pub fn correct(&self, y: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        if self.kind == ScaffoldKind::Analytic && self.target_id == "circle" {
            let yp = dot(y, p);
            let s = -yp + (yp * yp - dot(y, y) + 1.0).sqrt();
            return Ok(axpy(y, s, p));
        }
        let t = self.target();
        let mut n = p.to_vec();
        let mut alpha = 1.0;
        let mut prev = f64::INFINITY;
        for _ in 0..100 {
            let r = sub(&self.rho(&sub(&n, y))?, p);
            let res = norm(&r);
            if res <= 1e-10 {
                return Ok(n);
            }
            if res > prev {
                alpha *= 0.5;
            }
            prev = res;
            n = t
                .tubular_project(&axpy(&n, -alpha, &r))
                .ok_or(LiftError::ProjectionFailure(res))?;
        }
        Err(LiftError::ProjectionFailure(prev))
    }

    /// Certify the constants from a fresh audit and store them.
    pub fn certify(&mut self, samples: usize, seed: u64) -> AuditReport {
        let report = audit_scaffold(self, samples, seed);
        self.constants = report.certified.clone();
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_circle_shape() {
        let s = build_generic_scaffold("circle", 8, 2.0, Some(0.25)).unwrap();
        assert!(!s.members().is_empty());
        assert!(s.members().iter().all(|p| p.intrinsic_dim() == Some(0)));
        let t = s.target();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let z = t.sample_n(&mut rng);
            let r = s.eval_retraction(&[0.0, 0.0], &z).unwrap();
            assert!(crate::polygeom::linalg::dist(&r, &z) < 1e-9);
        }
    }

    #[test]
    fn generic_circle_too_coarse() {
        let r = build_generic_scaffold("circle", 1, 2.0, None);
        assert!(matches!(r, Err(LiftError::ConstructionFailure { .. })));
    }

    #[test]
    fn torus_members_codim_two() {
        let s = build_generic_scaffold("clifford_torus", 4, 1.0, None).unwrap();
        assert!(s.members().iter().all(|p| p.intrinsic_dim().unwrap() <= 2));
    }

    #[test]
    fn analytic_circle_examples() {
        let s = build_analytic_scaffold("circle", 2.0, Some(0.25)).unwrap();
        assert_eq!(s.eval_retraction(&[0.0, 0.0], &[2.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let y = [0.1, -0.05];
        assert!(matches!(
            s.eval_retraction(&y, &y),
            Err(LiftError::NearSingular(_))
        ));
        let n = s.eval_retraction(&y, &[0.3, 0.8]).unwrap();
        assert!((norm(&n) - 1.0).abs() < 1e-12);
        let back = s.rho(&sub(&n, &y)).unwrap();
        let p = s.rho(&sub(&[0.3, 0.8], &y)).unwrap();
        assert!(crate::polygeom::linalg::dist(&back, &p) < 1e-12);
    }

    #[test]
    fn shifted_retraction_fixes_n() {
        for s in [
            build_generic_scaffold("circle", 8, 2.0, Some(0.25)).unwrap(),
            build_analytic_scaffold("so3_mod_v4", 2.0, None).unwrap(),
        ] {
            let t = s.target();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let y: Vec<f64> = (0..s.m()).map(|k| 0.02 * (k as f64 + 1.0).sin()).collect();
            for _ in 0..50 {
                let z = t.sample_n(&mut rng);
                let r = s.eval_retraction(&y, &z).unwrap();
                assert!(crate::polygeom::linalg::dist(&r, &z) < 1e-8, "{}", s.label());
            }
        }
    }

    #[test]
    fn cascade_locality_and_singularity() {
        let s = build_generic_scaffold("clifford_torus", 4, 1.0, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        use rand::Rng;
        for _ in 0..2000 {
            let z: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if let Ok((_, n)) = s.rho_counted(&z) {
                assert!(n <= 4);
            }
        }
        let c = build_generic_scaffold("circle", 8, 2.0, Some(0.25)).unwrap();
        let ctr = c.members()[0].vertices()[0].clone();
        assert_eq!(c.cascade_retract(&ctr).unwrap_err(), LiftError::SingularPoint);
    }
}
