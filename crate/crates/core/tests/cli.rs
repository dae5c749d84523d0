use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn liftbv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftbv"))
        .args(args)
        .current_dir(dir)
        .env("LIFTBV_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn lift_run_and_report_show() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"synthetic": "vortex", "resolution": 16, "trials": 4, "audit_samples": 500}"#,
    )?;
    let o = liftbv(dir.path(), &["lift", "run", "--config", "cfg.json", "--out", "out"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout)?;
    assert!(text.contains("PASS lifting residual"));
    let o = liftbv(dir.path(), &["report", "show", "out/report.json"]);
    assert_eq!(code(&o), 0);
    let o = liftbv(dir.path(), &["report", "show", "out/report.json", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout)?;
    assert_eq!(v["pass"], true);
    Ok(())
}

#[test]
fn shrunk_bound_is_a_check_failure() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"synthetic": "vortex", "resolution": 16, "trials": 4, "audit_samples": 500, "jump_bound_scale": 0.1}"#,
    )?;
    let o = liftbv(dir.path(), &["lift", "run", "--config", "cfg.json"]);
    assert_eq!(code(&o), 2);
    let o = liftbv(dir.path(), &["lift", "run", "--config", "cfg.json", "--lenient"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stdout)?.contains("FAIL max geodesic jump"));
    Ok(())
}

#[test]
fn bad_input_is_an_ingest_error() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    fs::write(
        dir.path().join("nan.field"),
        "{\"version\":1,\"target\":\"circle\",\"lo\":[-1],\"hi\":[1],\"resolution\":[1],\"lambda\":1.75}\nNaN 0\n1 0\n",
    )?;
    fs::write(dir.path().join("cfg.json"), r#"{"input": "nan.field"}"#)?;
    let o = liftbv(dir.path(), &["lift", "run", "--config", "cfg.json"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr)?.contains("line 2"));
    let o = liftbv(dir.path(), &["lift", "run", "--config", "missing.json"]);
    assert_eq!(code(&o), 3);
    Ok(())
}

#[test]
fn degenerate_shift_ball_is_a_selection_failure() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let mut text = String::from(
        "{\"version\":1,\"target\":\"circle\",\"lo\":[-1,-1],\"hi\":[1,1],\"resolution\":[2,2],\"lambda\":1.75}\n",
    );
    for _ in 0..9 {
        text.push_str("0 0\n");
    }
    fs::write(dir.path().join("zero.field"), text)?;
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"input": "zero.field", "sigma": 1e-10, "anchor": [1.0, 0.0], "trials": 8}"#,
    )?;
    let o = liftbv(dir.path(), &["shift", "select", "--config", "cfg.json"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let o = liftbv(dir.path(), &["lift", "run", "--config", "cfg.json"]);
    assert_eq!(code(&o), 4);
    Ok(())
}

#[test]
fn shift_select_writes_a_table() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"synthetic": "dipole", "resolution": 16, "audit_samples": 500}"#,
    )?;
    let o = liftbv(
        dir.path(),
        &["shift", "select", "--config", "cfg.json", "--trials", "6", "--seed", "9", "--out", "t.json"],
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("t.json"))?)?;
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        for key in ["y", "score", "certificate", "t_measure"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
    Ok(())
}

#[test]
fn scaffold_build_and_audit() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let o = liftbv(
        dir.path(),
        &["scaffold", "build", "--target", "circle", "--audit-samples", "500", "--out", "s.json"],
    );
    assert_eq!(code(&o), 0);
    let o = liftbv(dir.path(), &["scaffold", "audit", "s.json", "--samples", "10000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = liftbv(dir.path(), &["scaffold", "build", "--target", "klein", "--out", "k.json"]);
    assert_eq!(code(&o), 3);
    Ok(())
}

#[test]
fn verify_commands() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let o = liftbv(dir.path(), &["verify", "coarea", "--count", "5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout)?.contains("5/5"));
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"synthetic": "vortex", "resolution": 12, "audit_samples": 500}"#,
    )?;
    let o = liftbv(dir.path(), &["verify", "lemma23", "--config", "cfg.json", "--shifts", "40"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    Ok(())
}
