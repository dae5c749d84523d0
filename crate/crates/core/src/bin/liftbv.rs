use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use liftbv::error::LiftError;
use liftbv::field::{build_scaffold, interpolate_pa, load_field, run_pipeline, PipelineConfig, PipelineReport};
use liftbv::lift::default_anchor;
use liftbv::scaffold::{audit_scaffold, build_analytic_scaffold, build_generic_scaffold, load_scaffold, save_scaffold};
use liftbv::transversal::{
    averaged_bounds_doubling, coarea_bound_check, random_coarea_checks, relative_change, select_shift,
};

const OK: u8 = 0;
const CHECK_FAILED: u8 = 2;
const INGEST: u8 = 3;
const CONSTRUCTION: u8 = 4;

#[derive(Parser)]
#[command(name = "liftbv", version, about = "Lift manifold-valued fields through their universal cover")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build or audit a retraction scaffold.
    #[command(subcommand)]
    Scaffold(ScaffoldCmd),
    /// Choose a transversal shift.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Run the lifting pipeline.
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Numerical checks of the underlying inequalities.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Inspect pipeline reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum ScaffoldCmd {
    Build(BuildArgs),
    Audit(AuditArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    target: String,
    /// `grid` or `analytic`.
    #[arg(long, default_value = "grid")]
    kind: String,
    #[arg(long, default_value_t = 8)]
    q: usize,
    #[arg(long, default_value_t = 2.0)]
    big_m: f64,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    audit_samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    scaffold: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum ShiftCmd {
    Select(SelectArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Pipeline configuration naming the field and scaffold.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Where to write the diagnostics table; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LiftCmd {
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report bound violations instead of aborting.
    #[arg(long)]
    lenient: bool,
}

#[derive(Subcommand)]
enum VerifyCmd {
    Coarea(CoareaArgs),
    /// Shift-averaged gradient and shadow-measure bounds.
    Lemma23(AverageArgs),
}

#[derive(Args)]
struct CoareaArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 5)]
    seed: u64,
}

#[derive(Args)]
struct AverageArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 200)]
    shifts: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand)]
enum ReportCmd {
    Show(ShowArgs),
}

#[derive(Args)]
struct ShowArgs {
    report: PathBuf,
    #[arg(long)]
    json: bool,
}

fn exit_code(e: &LiftError) -> u8 {
    match e.root() {
        LiftError::Ingest { .. }
        | LiftError::Io(_)
        | LiftError::UnknownTarget(_)
        | LiftError::InvalidArgument(_) => INGEST,
        LiftError::BoundViolation { .. } => CHECK_FAILED,
        _ => CONSTRUCTION,
    }
}

fn load_config(p: &Path) -> Result<PipelineConfig, LiftError> {
    let text = fs::read_to_string(p).map_err(|e| LiftError::Ingest {
        line: 0,
        msg: format!("{}: {e}", p.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| LiftError::Ingest {
        line: e.line(),
        msg: format!("bad configuration: {e}"),
    })
}

fn print_json<T: Serialize>(v: &T, out: Option<&Path>) -> Result<(), LiftError> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn scaffold_build(a: BuildArgs) -> Result<u8, LiftError> {
    let mut s = match a.kind.as_str() {
        "grid" => build_generic_scaffold(&a.target, a.q, a.big_m, a.sigma)?,
        "analytic" => build_analytic_scaffold(&a.target, a.big_m, a.sigma)?,
        k => return Err(LiftError::InvalidArgument(format!("unknown scaffold kind `{k}`"))),
    };
    let report = s.certify(a.audit_samples, a.seed);
    save_scaffold(&s, &a.out)?;
    println!("{}: c0 {:.4} c1 {:.4} jump bound {:.4}", s.label(), s.constants.c0, s.constants.c1, s.constants.jump_bound);
    for f in &report.flags {
        eprintln!("warning: {f}");
    }
    Ok(OK)
}

fn scaffold_audit(a: AuditArgs) -> Result<u8, LiftError> {
    let s = load_scaffold(&a.scaffold)?;
    let r = audit_scaffold(&s, a.samples, a.seed);
    print_json(&r, None)?;
    let ok = r.identity_residual <= 1e-9 && r.c0_stable && r.c1_stable;
    Ok(if ok { OK } else { CHECK_FAILED })
}

#[derive(Serialize)]
struct ShiftRow {
    y: Vec<f64>,
    score: Option<f64>,
    certificate: bool,
    t_measure: Option<f64>,
}

#[derive(Serialize)]
struct ShiftTable {
    seed: u64,
    accepted: usize,
    y: Vec<f64>,
    rows: Vec<ShiftRow>,
}

fn shift_select(a: SelectArgs) -> Result<u8, LiftError> {
    let mut cfg = load_config(&a.config)?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let field = load_field(&cfg)?;
    let (u, _) = interpolate_pa(&field)?;
    let s = build_scaffold(&cfg, &field.header.target)?;
    let anchor = match &cfg.anchor {
        Some(a) => a.clone(),
        None => default_anchor(&u, s.target())?,
    };
    let (y, _, diag) = select_shift(&u, &anchor, &s, cfg.trials, cfg.seed)?;
    let table = ShiftTable {
        seed: diag.seed,
        accepted: diag.accepted,
        y,
        rows: diag
            .trials
            .into_iter()
            .map(|t| ShiftRow {
                y: t.y,
                score: t.score,
                certificate: t.certified,
                t_measure: t.t_measure,
            })
            .collect(),
    };
    print_json(&table, a.out.as_deref())?;
    Ok(OK)
}

fn print_report(r: &PipelineReport) {
    println!("target {}  scaffold {}", r.target, r.scaffold);
    println!("shift {:?} (trial {})", r.shift, r.accepted_trial);
    println!(
        "|Dv| {:.6} = ac {:.6} + jump {:.6}  (cantor {})",
        r.bv.total, r.bv.ac, r.bv.jump, r.bv.cantor
    );
    println!(
        "jump facets {}  labels [{}]  max geodesic jump {:.6}",
        r.jumps.facets,
        r.jumps.labels.join(", "),
        r.jumps.max_geodesic_jump
    );
    for m in &r.monodromy {
        println!("loop {}: {} (direct {})", m.loop_index, m.from_labels, m.direct);
    }
    for c in &r.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:<28} {:.6e} <= {:.6e}", c.name, c.value, c.limit);
    }
}

fn lift_run(a: RunArgs) -> Result<u8, LiftError> {
    let mut cfg = load_config(&a.config)?;
    if let Some(o) = a.out {
        cfg.output_dir = Some(o);
    }
    if a.lenient {
        cfg.strict = false;
    }
    let run = run_pipeline(&cfg)?;
    print_report(&run.report);
    Ok(if run.report.pass { OK } else { CHECK_FAILED })
}

fn verify_coarea(a: CoareaArgs) -> Result<u8, LiftError> {
    let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
    let base = coarea_bound_check(&id, &[0.0, 0.0], &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], 200)?;
    println!("identity: lhs {:.4} rhs {:.4} holds {}", base.lhs, base.rhs, base.holds);
    let mut ok = base.holds;
    for (d, res) in [(2, 64), (3, 24)] {
        let v = random_coarea_checks(d, a.count, a.seed, res)?;
        let held = v.iter().filter(|i| i.check.holds).count();
        println!("d = {d}: {held}/{} random affine maps satisfy the inequality", v.len());
        ok &= held == v.len();
    }
    Ok(if ok { OK } else { CHECK_FAILED })
}

fn verify_average(a: AverageArgs) -> Result<u8, LiftError> {
    let cfg = load_config(&a.config)?;
    let field = load_field(&cfg)?;
    let (u, _) = interpolate_pa(&field)?;
    let s = build_scaffold(&cfg, &field.header.target)?;
    let anchor = match &cfg.anchor {
        Some(a) => a.clone(),
        None => default_anchor(&u, s.target())?,
    };
    let (half, full) = averaged_bounds_doubling(&u, &anchor, &s, a.shifts, a.seed)?;
    let dg = relative_change(half.grad_ratio, full.grad_ratio);
    let dt = relative_change(half.t_ratio, full.t_ratio);
    print_json(&full, None)?;
    println!("change under doubling: gradient {dg:.4}, shadow {dt:.4}");
    let ok = half.holds && full.holds && dg <= 0.1 && dt <= 0.1;
    Ok(if ok { OK } else { CHECK_FAILED })
}

fn report_show(a: ShowArgs) -> Result<u8, LiftError> {
    let text = fs::read_to_string(&a.report)?;
    let r: PipelineReport = serde_json::from_str(&text).map_err(|e| LiftError::Ingest {
        line: e.line(),
        msg: e.to_string(),
    })?;
    if a.json {
        print_json(&r, None)?;
    } else {
        print_report(&r);
    }
    Ok(if r.pass { OK } else { CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("LIFTBV_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: LIFTBV_THREADS ignored: {e}");
        }
    }
    let res = match cli.cmd {
        Cmd::Scaffold(ScaffoldCmd::Build(a)) => scaffold_build(a),
        Cmd::Scaffold(ScaffoldCmd::Audit(a)) => scaffold_audit(a),
        Cmd::Shift(ShiftCmd::Select(a)) => shift_select(a),
        Cmd::Lift(LiftCmd::Run(a)) => lift_run(a),
        Cmd::Verify(VerifyCmd::Coarea(a)) => verify_coarea(a),
        Cmd::Verify(VerifyCmd::Lemma23(a)) => verify_average(a),
        Cmd::Report(ReportCmd::Show(a)) => report_show(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
