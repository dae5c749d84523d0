use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ingest, interpolate_pa, synth, SampledField};
use crate::covers::DeckElement;
use crate::error::{LiftError, Result};
use crate::lift::{
    direct_monodromy, lift_pa_field, loop_monodromy, sbv_check, BvRecord, LiftConfig, LiftedField,
    SbvReport,
};
use crate::scaffold::{build_analytic_scaffold, build_generic_scaffold, Constants, Scaffold};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Field file; ignored when `synthetic` is set.
    pub input: Option<PathBuf>,
    /// One of [`SYNTHETIC_FIELDS`], sampled at `resolution`.
    pub synthetic: Option<String>,
    pub resolution: usize,
    /// `analytic` or `grid`.
    pub scaffold: String,
    pub q: usize,
    pub big_m: f64,
    pub sigma: Option<f64>,
    pub audit_samples: usize,
    pub trials: usize,
    pub seed: u64,
    pub strict: bool,
    pub residual_tol: f64,
    pub anchor: Option<Vec<f64>>,
    pub anchor_lift: Option<Vec<f64>>,
    /// Closed polygonal loops whose monodromy is reported.
    pub loops: Vec<Vec<Vec<f64>>>,
    pub output_dir: Option<PathBuf>,
    /// Scale the certified jump bound (negative controls).
    pub jump_bound_scale: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: None,
            synthetic: None,
            resolution: 64,
            scaffold: "analytic".into(),
            q: 8,
            big_m: 2.0,
            sigma: Some(0.25),
            audit_samples: 2000,
            trials: 16,
            seed: 1,
            strict: true,
            residual_tol: 1e-6,
            anchor: None,
            anchor_lift: None,
            loops: Vec::new(),
            output_dir: None,
            jump_bound_scale: 1.0,
        }
    }
}

pub const SYNTHETIC_FIELDS: [&str; 6] = ["vortex", "smooth", "dipole", "torus", "two_defect", "constant"];

/// The fixed set of synthetic runs used for suite-wide checks.
pub fn standard_suite() -> Vec<PipelineConfig> {
    [("vortex", 32), ("smooth", 32), ("dipole", 32), ("torus", 32), ("two_defect", 24)]
        .into_iter()
        .map(|(name, res)| PipelineConfig {
            synthetic: Some(name.into()),
            resolution: res,
            trials: 4,
            audit_samples: 500,
            loops: match name {
                "vortex" => vec![synth::vortex_loop()],
                "two_defect" => {
                    let (ab, ba) = synth::defect_loops();
                    vec![ab, ba]
                }
                _ => Vec::new(),
            },
            ..Default::default()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Bound or tolerance the value is compared against.
    pub limit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpSummary {
    pub facets: usize,
    pub labels: Vec<String>,
    pub measure: f64,
    pub max_geodesic_jump: f64,
    pub approximate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyEntry {
    pub loop_index: usize,
    pub from_labels: String,
    pub direct: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub target: String,
    pub scaffold: String,
    pub constants: Constants,
    pub clamped_samples: usize,
    pub shift: Vec<f64>,
    pub accepted_trial: usize,
    pub median_score: f64,
    pub field_tv: f64,
    pub bv: BvRecord,
    pub tv_ratio: f64,
    pub jumps: JumpSummary,
    pub monodromy: Vec<MonodromyEntry>,
    pub sbv: SbvReport,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

impl PipelineReport {
    /// JSON with the timing field zeroed, for byte comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.elapsed_ms = 0;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }
}

/// The field a configuration names: a synthetic one or an ingested file.
pub fn load_field(cfg: &PipelineConfig) -> Result<SampledField> {
    match cfg.synthetic.as_deref() {
        Some("vortex") => synth::vortex(cfg.resolution),
        Some("smooth") => synth::smooth(cfg.resolution),
        Some("two_defect") => synth::two_defect(cfg.resolution),
        Some("dipole") => synth::dipole(cfg.resolution),
        Some("torus") => synth::torus(cfg.resolution),
        Some("constant") => synth::constant("circle", 2, cfg.resolution, &[0.0, 1.0]),
        Some(other) => Err(LiftError::InvalidArgument(format!(
            "unknown synthetic field `{other}`"
        ))),
        None => {
            let p = cfg
                .input
                .as_ref()
                .ok_or_else(|| LiftError::InvalidArgument("no input field given".into()))?;
            ingest(p)
        }
    }
}

pub fn build_scaffold(cfg: &PipelineConfig, target: &str) -> Result<Scaffold> {
    let mut s = match cfg.scaffold.as_str() {
        "analytic" => build_analytic_scaffold(target, cfg.big_m, cfg.sigma)?,
        "grid" => build_generic_scaffold(target, cfg.q, cfg.big_m, cfg.sigma)?,
        other => {
            return Err(LiftError::InvalidArgument(format!(
                "unknown scaffold kind `{other}`"
            )))
        }
    };
    s.certify(cfg.audit_samples, cfg.seed);
    Ok(s)
}

fn check(name: &str, value: f64, limit: f64) -> Check {
    Check {
        name: name.into(),
        value,
        limit,
        pass: value <= limit,
    }
}

/// Everything the pipeline computes, for callers that need more than the
/// report.
pub struct PipelineRun {
    pub report: PipelineReport,
    pub lifted: LiftedField,
    pub field: SampledField,
    pub scaffold: Scaffold,
}

/// Ingest, interpolate, build and certify the scaffold, lift, measure and
/// check.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun> {
    let start = Instant::now();
    let field = load_field(cfg).map_err(|e| e.at("ingest"))?;
    let (u, stats) = interpolate_pa(&field).map_err(|e| e.at("interpolate"))?;
    let s = build_scaffold(cfg, &field.header.target).map_err(|e| e.at("scaffold"))?;
    let mut anchor = cfg.anchor.clone();
    let mut anchor_lift = cfg.anchor_lift.clone();
    if anchor.is_none() && cfg.synthetic.as_deref() == Some("two_defect") {
        let (a, w) = synth::two_defect_anchor();
        anchor = Some(a);
        anchor_lift = Some(w);
    }
    let lcfg = LiftConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        strict: cfg.strict,
        anchor,
        anchor_lift,
        jump_bound_override: Some(s.constants.jump_bound * cfg.jump_bound_scale),
        ..Default::default()
    };
    let lf = lift_pa_field(&u, &s, &lcfg)?;
    let sbv = sbv_check(&lf);
    let mut monodromy = Vec::new();
    for (i, lp) in cfg.loops.iter().enumerate() {
        let a = loop_monodromy(&lf, lp).map_err(|e| e.at("monodromy"))?;
        let b = direct_monodromy(&u, &s, &lf, lp).map_err(|e| e.at("monodromy"))?;
        monodromy.push(MonodromyEntry {
            loop_index: i,
            from_labels: a.name(),
            direct: b.name(),
        });
    }
    let max_jump = lf.facets.iter().map(|f| f.max_geodesic_jump).fold(0.0, f64::max);
    let mut labels: Vec<String> = lf.facets.iter().map(|f| f.label.name()).collect();
    labels.sort();
    labels.dedup();
    let mut checks = vec![
        check("lifting residual", lf.residual, cfg.residual_tol),
        check("max geodesic jump", max_jump, lf.jump_bound),
        Check {
            name: "sbv structure".into(),
            value: if sbv.pass { 0.0 } else { 1.0 },
            limit: 0.0,
            pass: sbv.pass,
        },
    ];
    if let Some(cm) = s.constants.measure_bound {
        checks.push(check("total variation bound", lf.bv.total, cm * stats.tv));
    }
    for m in &monodromy {
        checks.push(Check {
            name: format!("monodromy oracle, loop {}", m.loop_index),
            value: if m.from_labels == m.direct { 0.0 } else { 1.0 },
            limit: 0.0,
            pass: m.from_labels == m.direct,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    let report = PipelineReport {
        target: field.header.target.clone(),
        scaffold: s.label(),
        constants: s.constants.clone(),
        clamped_samples: field.clamped,
        shift: lf.shift.clone(),
        accepted_trial: lf.diagnostics.accepted,
        median_score: lf.diagnostics.median_score,
        field_tv: stats.tv,
        bv: lf.bv.clone(),
        tv_ratio: if stats.tv > 0.0 { lf.bv.total / stats.tv } else { 0.0 },
        jumps: JumpSummary {
            facets: lf.facets.len(),
            labels,
            measure: lf.facets.iter().map(|f| f.measure).sum(),
            max_geodesic_jump: max_jump,
            approximate: lf.approximate,
        },
        monodromy,
        sbv,
        checks,
        pass,
        elapsed_ms: start.elapsed().as_millis(),
    };
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        fs::write(dir.join("lifted.json"), serde_json::to_string(&lf)?)?;
        fs::write(dir.join("jumps.json"), serde_json::to_string_pretty(&jump_geometry(&lf))?)?;
    }
    Ok(PipelineRun {
        report,
        lifted: lf,
        field,
        scaffold: s,
    })
}

#[derive(Serialize)]
struct FacetExport<'a> {
    vertices: &'a [Vec<f64>],
    label: &'a DeckElement,
    max_geodesic_jump: f64,
}

fn jump_geometry(lf: &LiftedField) -> Vec<FacetExport<'_>> {
    lf.facets
        .iter()
        .map(|f| FacetExport {
            vertices: &f.vertices,
            label: &f.label,
            max_geodesic_jump: f.max_geodesic_jump,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub resolution: usize,
    pub total: f64,
    pub ac: f64,
    pub jump: f64,
}

/// Run a synthetic field at several resolutions; returns the levels and the
/// relative change of `|Dv|` between the last two.
pub fn refinement_study(cfg: &PipelineConfig, levels: &[usize]) -> Result<(Vec<RefinementLevel>, f64)> {
    let mut out = Vec::new();
    for &r in levels {
        let mut c = cfg.clone();
        c.resolution = r;
        c.output_dir = None;
        let run = run_pipeline(&c)?;
        out.push(RefinementLevel {
            resolution: r,
            total: run.lifted.bv.total,
            ac: run.lifted.bv.ac,
            jump: run.lifted.bv.jump,
        });
    }
    let change = match out.len() {
        0 | 1 => 0.0,
        n => {
            let (a, b) = (out[n - 2].total, out[n - 1].total);
            if b == 0.0 {
                a.abs()
            } else {
                (b - a).abs() / b.abs()
            }
        }
    };
    Ok((out, change))
}
