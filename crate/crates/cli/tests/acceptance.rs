//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::FRAC_PI_2;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use constant_angle::corpus::{self, CorpusEntry};
use constant_angle::exec::Execution;
use constant_angle::mesh::{read_obj, tessellate, write_obj, Chart};
use constant_angle::ode;
use constant_angle::verify::{self, CheckId, CheckRecord, GridSpec, Subject, Tolerances};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sweep(entries: &[CorpusEntry], id: CheckId) -> Vec<(String, CheckRecord)> {
    let grid = GridSpec::default();
    let tol = Tolerances::default();
    entries
        .iter()
        .map(|e| {
            let r = verify::run_check(id, &Subject::new(e.surface.clone()), &grid, &tol, Execution::default())
                .expect("check runs");
            (e.label.clone(), r)
        })
        .collect()
}

/// Largest residual over the sweep and whether every record stayed below `limit`.
fn worst(records: &[(String, CheckRecord)], limit: f64) -> (bool, f64, String) {
    let (label, r) = records.iter().max_by(|a, b| a.1.max_residual.total_cmp(&b.1.max_residual)).expect("non-empty");
    (records.iter().all(|(_, r)| r.evaluated > 0 && r.max_residual < limit), r.max_residual, label.clone())
}

fn angle_law(general: &[CorpusEntry]) -> Outcome {
    let t = Instant::now();
    let rec = sweep(general, CheckId::Angle);
    let elapsed = t.elapsed();
    let (ok, max, at) = worst(&rec, 1e-10);
    outcome(
        ok && elapsed < Duration::from_secs(2),
        format!("max |<xi,dt> - cos| = {max:.2e} ({at}), {} surfaces in {elapsed:.2?}", rec.len()),
    )
}

fn curvature_law(general: &[CorpusEntry]) -> Outcome {
    let (ok_e, ext, _) = worst(&sweep(general, CheckId::GaussExtrinsic), 1e-9);
    let (ok_i, int, at) = worst(&sweep(general, CheckId::GaussIntrinsic), 1e-4);
    outcome(ok_e && ok_i, format!("extrinsic {ext:.2e} < 1e-9, intrinsic {int:.2e} < 1e-4 ({at})"))
}

fn principal_direction(general: &[CorpusEntry]) -> Outcome {
    let (ok, max, at) = worst(&sweep(general, CheckId::PrincipalDirection), 1e-8);
    outcome(ok, format!("max |A T|/|T| = {max:.2e} ({at})"))
}

fn codazzi_beta(general: &[CorpusEntry]) -> Outcome {
    let (ok_c, c, _) = worst(&sweep(general, CheckId::Codazzi), 1e-6);
    let (ok_b, b, _) = worst(&sweep(general, CheckId::BetaPde), 1e-6);
    let mut regimes = [false; 3];
    for e in general {
        let (lo, hi) = e.surface.curve().curvature_bounds();
        for k in [lo, hi] {
            regimes[if (k.abs() - 1.0).abs() < 1e-12 {
                1
            } else if k.abs() < 1.0 {
                0
            } else {
                2
            }] = true;
        }
    }
    outcome(
        ok_c && ok_b && regimes.iter().all(|&r| r),
        format!("lambda_u residual {c:.2e}, beta_u residual {b:.2e}, regimes |k|<1,=1,>1 covered: {regimes:?}"),
    )
}

fn hyperboloid_shape(general: &[CorpusEntry]) -> Outcome {
    let (ok, max, at) = worst(&sweep(general, CheckId::HyperboloidShape), 1e-8);
    outcome(ok, format!("max |A~ - diag(-cos^2, -1)| = {max:.2e} ({at})"))
}

fn ode_agreement() -> Outcome {
    let mut max_err = 0.0f64;
    let mut ok = true;
    let mut orders = Vec::new();
    for deg in corpus::ANGLES_DEG {
        let th = deg.to_radians();
        let s = th.sin();
        for (l0, want) in [
            (0.0, ode::Branch::Tanh),
            (0.5 * s, ode::Branch::Tanh),
            (s, ode::Branch::Const),
            (-s, ode::Branch::Const),
            (1.2 * s, ode::Branch::Coth),
        ] {
            match ode::integrate(th, l0, 1.0, (0.0, 2.0), 1e-3).and_then(|sol| {
                if sol.branch != want {
                    ok = false;
                }
                ode::compare_closed_form(&sol)
            }) {
                Ok(e) => max_err = max_err.max(e),
                Err(_) => ok = false,
            }
        }
        for l0 in [0.0, 1.2 * s] {
            match ode::convergence_order(th, l0, 1.0, (0.0, 2.0), 1e-1, 1e-2) {
                Ok(p) => orders.push(p),
                Err(_) => ok = false,
            }
        }
    }
    let orders_ok = orders.iter().all(|p| (p - 4.0).abs() < 0.3);
    let (lo, hi) = orders.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &p| (a.min(p), b.max(p)));
    outcome(
        ok && orders_ok && max_err < 1e-9,
        format!("max closed-form error {max_err:.2e}, observed order in [{lo:.3}, {hi:.3}]"),
    )
}

fn minimality(all: &[CorpusEntry]) -> Outcome {
    let rec = sweep(all, CheckId::Minimality);
    let mut ok = rec.iter().all(|(_, r)| r.pass);
    let mut max_a = 0.0f64;
    let mut min_hm = f64::INFINITY;
    for ((_, r), e) in rec.iter().zip(all) {
        let s = e.surface.clone();
        let totally_geodesic = s.theta() == 0.0 || (s.theta() == FRAC_PI_2 && s.curve().is_geodesic());
        if totally_geodesic {
            let a = r.metrics["max_a_norm"];
            ok &= a < 1e-9;
            max_a = max_a.max(a);
        } else if s.theta() < FRAC_PI_2 {
            let hm = r.metrics["max_abs_hm"];
            ok &= hm > 0.05;
            min_hm = min_hm.min(hm);
        }
    }
    outcome(ok, format!("totally geodesic |A| <= {max_a:.2e}; general surfaces max|Hm| >= {min_hm:.3}"))
}

fn negative_controls() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_casurf");
    let dir = tempfile::tempdir().expect("temp dir");
    let mut caught = Vec::new();
    let mut missed = Vec::new();
    for id in CheckId::ALL {
        let path = dir.path().join(format!("{id}.json"));
        std::fs::write(&path, serde_json::to_string(&verify::negative_control(id)).expect("serializable"))
            .expect("write descriptor");
        let o = Command::new(bin)
            .args(["verify", path.to_str().expect("utf-8 path"), "--check", id.name()])
            .output()
            .expect("run verify");
        if o.status.code() == Some(1) {
            caught.push(id.name());
        } else {
            missed.push(id.name());
        }
    }
    let t = Instant::now();
    let suite = Command::new(bin)
        .args(["suite", "--json", dir.path().join("suite.json").to_str().expect("utf-8 path")])
        .output()
        .expect("run suite");
    let elapsed = t.elapsed();
    let suite_ok = suite.status.code() == Some(0) && elapsed < Duration::from_secs(30);
    outcome(
        missed.is_empty() && suite_ok,
        format!(
            "{}/10 corruptions exit 1 (missed: {missed:?}); suite exit {:?} in {elapsed:.2?}",
            caught.len(),
            suite.status.code()
        ),
    )
}

fn mesh_integrity(all: &[CorpusEntry]) -> Outcome {
    let mut hyp = 0.0f64;
    let mut radius = 0.0f64;
    let mut roundtrip = 0.0f64;
    let mut ok = true;
    for e in all {
        let m = match tessellate(&e.surface, 41, 41) {
            Ok(m) => m,
            Err(_) => return outcome(false, format!("{}: tessellation failed", e.label)),
        };
        for p in &m.vertices {
            hyp = hyp.max((p.h.x * p.h.x + p.h.y * p.h.y - p.h.z * p.h.z + 1.0).abs());
        }
        let mut obj = Vec::new();
        ok &= write_obj(&m, Chart::Poincare, &mut obj).is_ok();
        let back = match read_obj(&obj[..]) {
            Ok(b) => b,
            Err(_) => return outcome(false, format!("{}: OBJ did not parse", e.label)),
        };
        ok &= back.faces == m.faces && back.vertices.len() == m.vertices.len();
        for (p, q) in back.vertices.iter().zip(m.chart_vertices(Chart::Poincare)) {
            radius = radius.max(p[0] * p[0] + p[1] * p[1]);
            for k in 0..3 {
                // nine significant digits
                roundtrip = roundtrip.max((p[k] - q[k]).abs() / q[k].abs().max(1e-300));
            }
        }
    }
    ok &= hyp < 1e-9 && radius < 1.0 && roundtrip <= 5e-9 * (1.0 + 1e-6);
    outcome(ok, format!("max |x^2+y^2-z^2+1| = {hyp:.2e}, max disk r^2 = {radius:.4}, OBJ relative round-trip error {roundtrip:.2e}"))
}

fn main() -> ExitCode {
    let general = corpus::general().expect("corpus builds");
    let all = corpus::all().expect("corpus builds");
    let results = [
        ("constant-angle law", angle_law(&general)),
        ("curvature law", curvature_law(&general)),
        ("principal direction", principal_direction(&general)),
        ("codazzi and beta residuals", codazzi_beta(&general)),
        ("hyperboloid shape operator", hyperboloid_shape(&general)),
        ("closed form vs RK4", ode_agreement()),
        ("minimality", minimality(&all)),
        ("negative controls", negative_controls()),
        ("mesh integrity", mesh_integrity(&all)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {} {:<28} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
