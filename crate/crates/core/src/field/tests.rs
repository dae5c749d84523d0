use super::*;
use crate::error::LiftError;

fn circle_header(res: usize) -> FieldHeader {
    FieldHeader {
        version: FIELD_FORMAT_VERSION,
        target: "circle".into(),
        lo: vec![-1.0, -1.0],
        hi: vec![1.0, 1.0],
        resolution: vec![res, res],
        lambda: 1.75,
    }
}

#[test]
fn eight_by_eight_circle_file_has_81_samples() {
    let f = synth::vortex(8).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.field");
    write_field(&f, &p).unwrap();
    let back = ingest(&p).unwrap();
    assert_eq!(back.samples.len(), 81);
    assert_eq!(back.samples, f.samples);
    assert_eq!(back.clamped, 0);
}

#[test]
fn huge_sample_is_clamped_once() {
    let mut samples = vec![vec![1.0, 0.0]; 4];
    samples[2] = vec![1e9, 0.0];
    let mut f = SampledField::new(circle_header(1), samples).unwrap();
    let text = f.to_text();
    assert_eq!(f.clamp_to_cube(), 1);
    assert_eq!(f.samples[2], vec![1.75, 0.0]);
    assert_eq!(f.clamped, 1);
    let mut g = SampledField::parse(&text).unwrap();
    g.clamp_to_cube();
    assert_eq!(g.samples, f.samples);
    // idempotent
    let before = f.samples.clone();
    assert_eq!(f.clamp_to_cube(), 0);
    assert_eq!(f.samples, before);
}

#[test]
fn nan_sample_is_an_ingest_error() {
    let f = SampledField::new(circle_header(1), vec![vec![1.0, 0.0]; 4]).unwrap();
    let text = f.to_text().replacen("1 0", "NaN 0", 1);
    match SampledField::parse(&text) {
        Err(LiftError::Ingest { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected an ingest error, got {other:?}"),
    }
}

#[test]
fn malformed_files_are_rejected() {
    let f = SampledField::new(circle_header(1), vec![vec![1.0, 0.0]; 4]).unwrap();
    let text = f.to_text();
    let short: String = text.lines().take(3).collect::<Vec<_>>().join("\n");
    assert!(matches!(SampledField::parse(&short), Err(LiftError::Ingest { .. })));
    let wide = text.replacen("1 0", "1 0 0", 1);
    assert!(matches!(SampledField::parse(&wide), Err(LiftError::Ingest { line: 2, .. })));
    let unknown = text.replacen("circle", "klein", 1);
    assert!(matches!(SampledField::parse(&unknown), Err(LiftError::Ingest { line: 1, .. })));
    assert!(matches!(SampledField::parse(""), Err(LiftError::Ingest { .. })));
}

#[test]
fn interpolant_reproduces_samples() {
    let f = synth::smooth(16).unwrap();
    let (u, stats) = interpolate_pa(&f).unwrap();
    assert!(stats.vertex_residual < 1e-12);
    assert_eq!(u.values().len(), 17 * 17);
    assert!(stats.tv > 0.0);
}

#[test]
fn smooth_closed_form_matches_quadrature() {
    // midpoint rule on a fine grid
    let n = 2000;
    let h = 2.0 / n as f64;
    let mut sum = 0.0;
    for j in 0..n {
        let t = -1.0 + (j as f64 + 0.5) * h;
        sum += (0.49 + t * t).sqrt() * h;
    }
    assert!((2.0 * sum - synth::smooth_gradient_integral()).abs() < 1e-6);
}

#[test]
fn two_defect_field_lies_on_target() {
    let f = synth::two_defect(8).unwrap();
    let t = crate::covers::target("so3_mod_v4").unwrap();
    for s in &f.samples {
        assert!(t.on_n(s, 1e-9));
    }
}

#[test]
fn pipeline_is_deterministic() {
    let cfg = PipelineConfig {
        synthetic: Some("vortex".into()),
        resolution: 16,
        trials: 4,
        audit_samples: 500,
        ..Default::default()
    };
    let a = run_pipeline(&cfg).unwrap().report;
    let b = run_pipeline(&cfg).unwrap().report;
    assert_eq!(a.canonical_json(), b.canonical_json());
    assert!(a.pass);
}

#[test]
fn pipeline_writes_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        synthetic: Some("vortex".into()),
        resolution: 8,
        trials: 2,
        audit_samples: 300,
        output_dir: Some(dir.path().to_path_buf()),
        ..Default::default()
    };
    run_pipeline(&cfg).unwrap();
    for name in ["report.json", "lifted.json", "jumps.json"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let _: serde_json::Value = serde_json::from_str(&text).unwrap();
    }
}

#[test]
fn config_round_trips_through_json() {
    let cfg: PipelineConfig =
        serde_json::from_str(r#"{"synthetic": "smooth", "resolution": 8, "strict": false}"#).unwrap();
    assert_eq!(cfg.resolution, 8);
    assert!(!cfg.strict);
    assert_eq!(cfg.q, 8);
    let back: PipelineConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back.synthetic.as_deref(), Some("smooth"));
}

#[test]
fn refinement_study_stabilizes() {
    let cfg = PipelineConfig {
        synthetic: Some("smooth".into()),
        trials: 2,
        audit_samples: 300,
        ..Default::default()
    };
    let (levels, change) = refinement_study(&cfg, &[16, 32]).unwrap();
    assert_eq!(levels.len(), 2);
    assert!(change < 0.05, "{change}");
}
