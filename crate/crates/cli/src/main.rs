//! `casurf`: generate, verify and study constant angle surfaces in H²×R.
//!
//! Exit codes: 0 everything passed, 1 a verification failed, 2 bad usage or input.

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use constant_angle::corpus;
use constant_angle::exec::Execution;
use constant_angle::mesh::{self, Chart};
use constant_angle::ode::{self, Branch, ClosedForm};
use constant_angle::surface::{ConstantAngleSurface, SurfaceDescriptor, SurfaceKind};
use constant_angle::verify::{self, CheckId, CheckRecord, GridSpec, Subject, Tolerances, VerificationReport};

use config::{Export, GenerateArgs, OdeArgs, SuiteArgs, VerifyArgs};

#[derive(Parser)]
#[command(name = "casurf", version, about = "Constant angle surfaces in H2xR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface, write its descriptor and optionally a mesh
    Generate(GenerateArgs),
    /// Run the invariant checks on a surface descriptor
    Verify(VerifyArgs),
    /// Integrate the principal curvature ODE and compare with the closed form
    Ode(OdeArgs),
    /// Verify the built-in corpus and the negative controls
    Suite(SuiteArgs),
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Ode(a) => ode_cmd(a),
        Command::Suite(a) => suite(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn exec_mode(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

#[derive(Serialize)]
struct GenerateOutput {
    config: GenerateArgs,
    kind: SurfaceKind,
    u: [f64; 2],
    v: [f64; 2],
    descriptor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mesh: Option<MeshSummary>,
}

#[derive(Serialize)]
struct MeshSummary {
    path: String,
    csv: String,
    vertices: usize,
    faces: usize,
    welded: bool,
}

fn generate(args: GenerateArgs) -> Result<Outcome> {
    let mut cfg = args.resolve()?;
    let theta = cfg.theta.expect("resolved").0;
    let curve = cfg.curve.clone().expect("resolved").build()?;
    let slice = matches!(SurfaceKind::for_angle(theta)?, SurfaceKind::SliceAtT0 { .. });
    // a slice is charted by polar coordinates, so its defaults differ
    let u = *cfg.u.get_or_insert(if slice { config::Range(0.1, 1.0) } else { config::Range(-1.0, 1.0) });
    let v = cfg.v.get_or_insert_with(|| match (slice, curve.period()) {
        (true, _) => config::Range(0.0, std::f64::consts::TAU),
        (false, Some(p)) => config::Range(0.0, p),
        (false, None) => config::Range(-1.0, 1.0),
    });
    let v = (v.0, v.1);
    let u = (u.0, u.1);
    let surface = if cfg.clip == Some(true) {
        ConstantAngleSurface::clipped(theta, curve, u, v)?
    } else {
        ConstantAngleSurface::new(theta, curve, u, v)?
    };

    let out = cfg.out.clone().expect("resolved");
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let desc_path = out.join("surface.json");
    let descriptor = SurfaceDescriptor::from(surface.clone());
    fs::write(&desc_path, serde_json::to_string_pretty(&descriptor)? + "\n")
        .with_context(|| format!("writing {}", desc_path.display()))?;

    let export = cfg.export.expect("resolved");
    let mesh = if export == Export::None {
        None
    } else {
        let m = mesh::tessellate(&surface, cfg.nu.expect("resolved"), cfg.nv.expect("resolved"))?;
        let chart: Chart = cfg.chart.expect("resolved");
        let path = out.join(if export == Export::Obj { "surface.obj" } else { "surface.ply" });
        let mut w = create(&path)?;
        match export {
            Export::Obj => mesh::write_obj(&m, chart, &mut w)?,
            _ => mesh::write_ply(&m, chart, &mut w)?,
        }
        w.flush()?;
        let csv = out.join("vertices.csv");
        let mut w = create(&csv)?;
        mesh::write_csv(&m, &mut w)?;
        w.flush()?;
        Some(MeshSummary {
            path: path.display().to_string(),
            csv: csv.display().to_string(),
            vertices: m.vertices.len(),
            faces: m.faces.len(),
            welded: m.welded,
        })
    };
    let (u0, u1) = surface.u_range();
    let summary = GenerateOutput {
        config: cfg,
        kind: surface.kind(),
        u: [u0, u1],
        v: [v.0, v.1],
        descriptor: desc_path.display().to_string(),
        mesh,
    };
    write_json(&summary, None)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    config: &'a VerifyArgs,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

fn grid_and_tol(
    nu: Option<usize>,
    nv: Option<usize>,
    h: Option<f64>,
    margin: Option<f64>,
    k: Option<f64>,
) -> (GridSpec, Tolerances) {
    let grid = GridSpec {
        nu: nu.expect("resolved"),
        nv: nv.expect("resolved"),
        h: h.expect("resolved"),
        margin: margin.expect("resolved"),
    };
    (grid, Tolerances::default().scaled(k.expect("resolved")))
}

fn print_record(r: &CheckRecord) {
    let mark = if r.pass { "PASS" } else { "FAIL" };
    eprintln!("{mark} {:<20} max {:.3e}  tol {:.1e}", r.name, r.max_residual, r.tolerance);
}

fn verify_cmd(args: VerifyArgs) -> Result<Outcome> {
    let cfg = args.resolve()?;
    let path = cfg.descriptor.clone().expect("resolved");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let subject: Subject = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (grid, tol) = grid_and_tol(cfg.nu, cfg.nv, cfg.h, cfg.margin, cfg.tolerance_scale);
    let exec = exec_mode(cfg.sequential == Some(true));
    let report = match &cfg.checks {
        None => verify::run_all_with(&subject, &grid, &tol, exec)?,
        Some(names) => {
            let mut checks = Vec::new();
            for n in names {
                let Some(id) = CheckId::from_name(n) else {
                    bail!("unknown check {n:?}");
                };
                checks.push(verify::run_check(id, &subject, &grid, &tol, exec)?);
            }
            let pass = checks.iter().all(|c| c.pass);
            VerificationReport { subject: subject.clone(), grid, tolerances: tol, checks, pass }
        }
    };
    report.checks.iter().for_each(print_record);
    write_json(&VerifyOutput { config: &cfg, report: &report }, cfg.json.as_deref())?;
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct OdeOutput {
    config: OdeArgs,
    theta: f64,
    lambda0: f64,
    branch: Branch,
    steps: usize,
    u_end: f64,
    /// max |λ − λ_closed| + max |β/β_closed − 1|; absent after a blowup.
    closed_form_error: Option<f64>,
    closed_form_pole: Option<f64>,
    pass: bool,
}

fn ode_cmd(args: OdeArgs) -> Result<Outcome> {
    let cfg = args.resolve()?;
    let theta = cfg.theta.expect("resolved").0;
    let lambda0 = cfg.lambda0.expect("resolved").value(theta);
    let beta0 = cfg.beta0.expect("resolved");
    let u = cfg.u.expect("resolved");
    let sol = ode::integrate(theta, lambda0, beta0, (u.0, u.1), cfg.step.expect("resolved"))?;
    if let Some(p) = &cfg.csv {
        let mut w = create(p)?;
        ode::write_csv(&sol, &mut w)?;
        w.flush()?;
    }
    let pole = ClosedForm::fit(theta, u.0, sol.lambda[0], beta0)?.pole();
    let err = match sol.branch {
        Branch::Blowup { .. } => None,
        _ => Some(ode::compare_closed_form(&sol)?),
    };
    let pass = err.is_none_or(|e| e <= cfg.max_error.expect("resolved"));
    eprintln!(
        "branch {}  closed-form max error {}",
        sol.branch.name(),
        err.map_or("n/a".into(), |e| format!("{e:.3e}"))
    );
    let out = OdeOutput {
        theta,
        lambda0,
        branch: sol.branch,
        steps: sol.u.len() - 1,
        u_end: *sol.u.last().expect("at least one sample"),
        closed_form_error: err,
        closed_form_pole: pole,
        pass,
        config: cfg,
    };
    write_json(&out, None)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

#[derive(Serialize)]
struct SuiteEntry {
    label: String,
    pass: bool,
    report: VerificationReport,
}

#[derive(Serialize)]
struct ControlEntry {
    check: String,
    subject: Subject,
    /// The corrupted subject failed the check, as it should.
    detected: bool,
    max_residual: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct SuiteOutput {
    config: SuiteArgs,
    surfaces: Vec<SuiteEntry>,
    negative_controls: Vec<ControlEntry>,
    pass: bool,
    elapsed_seconds: f64,
}

fn suite(args: SuiteArgs) -> Result<Outcome> {
    let cfg = args.resolve()?;
    let start = Instant::now();
    let (grid, tol) = grid_and_tol(cfg.nu, cfg.nv, cfg.h, cfg.margin, cfg.tolerance_scale);
    let exec = exec_mode(cfg.sequential == Some(true));
    let mut surfaces = Vec::new();
    for entry in corpus::all()? {
        let report = verify::run_all_with(&Subject::new(entry.surface), &grid, &tol, exec)?;
        let failed: Vec<&str> = report.failed().map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            eprintln!("PASS {}", entry.label);
        } else {
            eprintln!("FAIL {}: {}", entry.label, failed.join(", "));
        }
        surfaces.push(SuiteEntry { label: entry.label, pass: report.pass, report });
    }
    let mut controls = Vec::new();
    for id in CheckId::ALL {
        let subject = verify::negative_control(id);
        let r = verify::run_check(id, &subject, &grid, &tol, exec)?;
        let detected = !r.pass;
        eprintln!("{} negative control {id}", if detected { "PASS" } else { "FAIL" });
        controls.push(ControlEntry {
            check: id.name().into(),
            subject,
            detected,
            max_residual: r.max_residual,
            tolerance: r.tolerance,
        });
    }
    let pass = surfaces.iter().all(|s| s.pass) && controls.iter().all(|c| c.detected);
    let out = SuiteOutput {
        surfaces,
        negative_controls: controls,
        pass,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        config: cfg,
    };
    eprintln!("suite {} in {:.2} s", if pass { "passed" } else { "FAILED" }, out.elapsed_seconds);
    match &out.config.json {
        Some(p) => write_json(&out, Some(p))?,
        None => write_json(&out, None)?,
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}
