use std::f64::consts::FRAC_PI_4;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use constant_angle::curve::HCurve;
use constant_angle::exec::Execution;
use constant_angle::mesh::tessellate_with;
use constant_angle::surface::ConstantAngleSurface;
use constant_angle::verify::{run_all_with, GridSpec, Subject, Tolerances};

fn surface() -> ConstantAngleSurface {
    let c = HCurve::circle(1.0).unwrap();
    let p = c.period().unwrap();
    ConstantAngleSurface::new(FRAC_PI_4, c, (-0.5, 0.5), (0.0, p)).unwrap()
}

fn verify(c: &mut Criterion) {
    let subject = Subject::new(surface());
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("run_all");
    group.sample_size(10);
    for n in [21, 41] {
        let grid = GridSpec::new(n, n);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &grid, |b, g| {
                b.iter(|| run_all_with(&subject, g, &tol, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn mesh(c: &mut Criterion) {
    let s = surface();
    let mut group = c.benchmark_group("tessellate");
    for n in [64, 256] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &n, |b, &n| {
                b.iter(|| tessellate_with(&s, n, n, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, verify, mesh);
criterion_main!(benches);
