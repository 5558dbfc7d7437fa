use criterion::{black_box, criterion_group, criterion_main, Criterion};
use faddeev_bench::solved;
use faddeev_core::topology::{hopf_grid3d, hopf_reduced, Grid3dSpec};
use faddeev_core::verify::field_equation_residual;
use faddeev_core::{integrate_profile, AnsatzParams, ResidualGrid, SolveConfig};

fn integrate(c: &mut Criterion) {
    let cfg = SolveConfig::default();
    for (m, n) in [(1, 1), (1, 2)] {
        let params = AnsatzParams::new(m, n, 1.0).unwrap();
        c.bench_function(&format!("integrate_profile_{m}{n}"), |b| {
            b.iter(|| integrate_profile(black_box(&params), &cfg).unwrap())
        });
    }
}

fn charge(c: &mut Criterion) {
    let sol = solved(1, 1);
    c.bench_function("hopf_reduced_11", |b| {
        b.iter(|| hopf_reduced(black_box(&sol), 3, 1).unwrap())
    });
    let spec = Grid3dSpec {
        n_rho: 128,
        n_phi: 16,
        n_z: 16,
        axis_excision: 1e-3,
    };
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    group.bench_function("hopf_grid3d_11_128", |b| {
        b.iter(|| hopf_grid3d(black_box(&sol), &spec).unwrap())
    });
    group.finish();
}

fn residual(c: &mut Criterion) {
    let sol = solved(1, 1);
    let grid = ResidualGrid::fraction_window(&sol, 0.1, 0.9, 128);
    c.bench_function("field_equation_residual_11_128", |b| {
        b.iter(|| field_equation_residual(black_box(&sol), &grid).unwrap())
    });
}

criterion_group!(benches, integrate, charge, residual);
criterion_main!(benches);
