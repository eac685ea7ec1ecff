//! Sequential vs data-parallel execution of the grid kernels.
//!
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poincare_lorentz::coupled::{CoupledSystem, ParticleState};
use poincare_lorentz::external::ExternalPotential;
use poincare_lorentz::grid::{GridSpec, Spectral, VectorField};
use poincare_lorentz::par::Execution;
use poincare_lorentz::rigid_body::ChargeProfile;
use poincare_lorentz::Vec3;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("curl");
    for n in [32, 64] {
        let grid = GridSpec::new(n, 16.0).unwrap();
        let f = VectorField::from_fn(&grid, |x| [x[1].sin(), (x[2] * 0.5).cos(), (x[0] + x[1]).sin()]);
        for (name, exec) in MODES {
            let sp = Spectral::with_execution(grid, exec);
            group.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| b.iter(|| sp.curl(black_box(f))));
        }
    }
    group.finish();
}

fn coupled(c: &mut Criterion) {
    let mut group = c.benchmark_group("coupled");
    group.sample_size(10);
    let grid = GridSpec::new(32, 16.0).unwrap();
    let profile = ChargeProfile::gaussian(1.0).unwrap();
    let particle = ParticleState::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0));
    for (name, exec) in MODES {
        let sys = CoupledSystem::new(grid, profile, ExternalPotential::UniformB(Vec3::new(0.0, 0.0, 0.5)))
            .unwrap()
            .with_execution(exec);
        let s = sys.coulomb_state(particle).unwrap();
        group.bench_function(BenchmarkId::new("rhs", name), |b| {
            b.iter(|| sys.coupled_rhs(black_box(&s.particle), black_box(&s.fields)).unwrap())
        });
        group.bench_function(BenchmarkId::new("rk4_step", name), |b| {
            b.iter(|| sys.rk4_step(black_box(&s), 0.05).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectral, coupled);
criterion_main!(benches);
