//! Sequential vs data-parallel execution on the three hot paths: tower
//! construction, mesh measurement over a deep subdivision, and sampled
//! retraction verification.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use squeeze_core::metric::{mesh, MeasuredComplex};
use squeeze_core::retraction::{build_retraction, verify_retraction, VerifyOptions};
use squeeze_core::sample::SampleSpec;
use squeeze_core::subdivision::{Space, SubdivisionTower, DEFAULT_BUDGET};
use squeeze_core::{ExecMode, SimplicialComplex};

fn modes() -> [(&'static str, ExecMode); 2] {
    [
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ]
}

/// Build a depth-3 tower over the standard 2-simplex from scratch.
fn bench_tower_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower-build-depth3");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let base = Arc::new(SimplicialComplex::standard(2));
                let mut tower = SubdivisionTower::new(base);
                tower.set_mode(mode);
                tower.ensure_depth(3).unwrap();
                tower.complex(3).unwrap().simplex_count()
            })
        });
    }
    group.finish();
}

/// Measure the mesh of the third subdivision of the 3-simplex in base
/// coordinates.
fn bench_mesh_measurement(c: &mut Criterion) {
    let base = Arc::new(SimplicialComplex::standard(3));
    let mut tower = SubdivisionTower::new(base);
    tower.ensure_depth(3).unwrap();
    let tower = Arc::new(tower);
    let space = Space::new(tower, 3).unwrap();

    let mut group = c.benchmark_group("mesh-sd3-delta3");
    group.sample_size(20);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| mesh(&MeasuredComplex::Subdivision(&space), mode).unwrap())
        });
    }
    group.finish();
}

/// Verify a prebuilt retraction of the triangle with moderate sampling.
fn bench_retraction_verify(c: &mut Criterion) {
    let base = Arc::new(SimplicialComplex::standard(2));
    let bundle =
        build_retraction(base, 0.2, None, DEFAULT_BUDGET, ExecMode::default()).unwrap();

    let mut group = c.benchmark_group("verify-retraction-triangle");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            let opts = VerifyOptions {
                samples: SampleSpec::new(2, 8, 5),
                mode,
                ..VerifyOptions::default()
            };
            b.iter(|| verify_retraction(&bundle, &opts).unwrap().samples)
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_tower_build,
    bench_mesh_measurement,
    bench_retraction_verify
);
criterion_main!(benches);
