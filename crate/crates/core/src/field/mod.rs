//! Sampled fields: the text file format, ingestion with truncation into the
//! working cube, piecewise-affine interpolation and synthetic test fields.

mod pipeline;
pub mod synth;

pub use pipeline::{
    build_scaffold, load_field, refinement_study, run_pipeline, standard_suite, Check, PipelineConfig, PipelineReport, PipelineRun,
    RefinementLevel, SYNTHETIC_FIELDS,
};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::covers;
use crate::error::{LiftError, Result};
use crate::polygeom::{kuhn_triangulate, PiecewiseAffineMap};

pub const FIELD_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub version: u32,
    pub target: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
    pub lambda: f64,
}

/// Samples of a field at the vertices of a regular grid, axis 0 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub header: FieldHeader,
    pub samples: Vec<Vec<f64>>,
    /// Number of samples moved into the cube by ingestion.
    pub clamped: usize,
}

impl SampledField {
    pub fn new(header: FieldHeader, samples: Vec<Vec<f64>>) -> Result<Self> {
        let want: usize = header.resolution.iter().map(|r| r + 1).product();
        if samples.len() != want {
            return Err(LiftError::InvalidArgument(format!(
                "{} samples for a grid with {want} vertices",
                samples.len()
            )));
        }
        Ok(Self {
            header,
            samples,
            clamped: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.header.lo.len()
    }

    /// Clamp every sample componentwise into `[-Λ, Λ]`; returns the number
    /// of samples that moved.
    pub fn clamp_to_cube(&mut self) -> usize {
        let l = self.header.lambda;
        let mut moved = 0;
        for s in &mut self.samples {
            if s.iter().any(|v| v.abs() > l) {
                moved += 1;
                for v in s.iter_mut() {
                    *v = v.clamp(-l, l);
                }
            }
        }
        self.clamped += moved;
        moved
    }

    /// Text form: a JSON header line, then one sample per line.
    pub fn to_text(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for s in &self.samples {
            let row: Vec<String> = s.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| LiftError::Ingest {
            line: 1,
            msg: "empty file".into(),
        })?;
        let header: FieldHeader = serde_json::from_str(first).map_err(|e| LiftError::Ingest {
            line: 1,
            msg: format!("bad header: {e}"),
        })?;
        let bad = |line: usize, msg: String| LiftError::Ingest { line, msg };
        if header.version != FIELD_FORMAT_VERSION {
            return Err(bad(1, format!("unsupported version {}", header.version)));
        }
        let target = covers::target(&header.target).map_err(|e| bad(1, e.to_string()))?;
        let d = header.lo.len();
        if d == 0 || d > 3 || header.hi.len() != d || header.resolution.len() != d {
            return Err(bad(1, "box and resolution must agree in dimension 1..=3".into()));
        }
        if header.resolution.contains(&0) || header.lo.iter().zip(&header.hi).any(|(a, b)| !(a < b)) {
            return Err(bad(1, "empty box or zero resolution".into()));
        }
        if !(header.lambda > 0.0) {
            return Err(bad(1, "lambda must be positive".into()));
        }
        let m = target.m();
        let mut samples = Vec::new();
        for (i, line) in lines {
            let ln = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| bad(ln, format!("`{tok}` is not a number")))
                })
                .collect::<Result<_>>()?;
            if row.len() != m {
                return Err(bad(ln, format!("expected {m} values, found {}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(bad(ln, "non-finite sample".into()));
            }
            samples.push(row);
        }
        let want: usize = header.resolution.iter().map(|r| r + 1).product();
        if samples.len() != want {
            return Err(bad(
                text.lines().count(),
                format!("{} samples, expected {want}", samples.len()),
            ));
        }
        Ok(Self {
            header,
            samples,
            clamped: 0,
        })
    }
}

/// Read a field file and truncate its samples into the working cube.
pub fn ingest(path: &Path) -> Result<SampledField> {
    let text = fs::read_to_string(path).map_err(|e| LiftError::Ingest {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    let mut f = SampledField::parse(&text)?;
    f.clamp_to_cube();
    Ok(f)
}

pub fn write_field(f: &SampledField, path: &Path) -> Result<()> {
    fs::write(path, f.to_text())?;
    Ok(())
}

/// Interpolation statistics of a field.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterpolationStats {
    /// `‖∇u‖_{L¹}` of the interpolant.
    pub tv: f64,
    /// Largest difference between interpolant and sample at a vertex.
    pub vertex_residual: f64,
}

/// Kuhn-triangulated piecewise-affine interpolant of the samples.
pub fn interpolate_pa(f: &SampledField) -> Result<(PiecewiseAffineMap, InterpolationStats)> {
    let tri = kuhn_triangulate(&f.header.lo, &f.header.hi, &f.header.resolution)?;
    let u = PiecewiseAffineMap::new(tri, f.samples.clone())?;
    let vertex_residual = u
        .triangulation()
        .vertices()
        .iter()
        .zip(&f.samples)
        .map(|(x, s)| {
            u.eval(x)
                .iter()
                .zip(s)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let tv = u.tv_l1();
    Ok((u, InterpolationStats { tv, vertex_residual }))
}

#[cfg(test)]
mod tests;
