use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use catzeno::{
    cat_density_matrix, measured_rates, pn_evolution, propagate_shuttered, CatState, EvolutionKernels, PropagationConfig, ReservoirSpec,
    Scenario, ThermalModel,
};

fn spec(r: f64, g: f64) -> ReservoirSpec {
    ReservoirSpec::ohmic(r, g, ThermalModel::BoseEinstein { theta: 100.0 }).unwrap()
}

fn rates(c: &mut Criterion) {
    let mut group = c.benchmark_group("measured_rates");
    for r in [0.1, 10.0] {
        let s = spec(r, 0.1);
        for x in [0.01, 1.0, 100.0] {
            group.bench_with_input(BenchmarkId::new(format!("r={r}"), x), &x, |b, &x| {
                b.iter(|| measured_rates(black_box(x / s.omega_c), &s).unwrap())
            });
        }
    }
    group.finish();
}

fn number_distribution(c: &mut Criterion) {
    let s = spec(10.0, 0.1);
    let k = EvolutionKernels::from_rates(measured_rates(0.1 / s.omega_c, &s).unwrap());
    let cat = CatState::new(2.0).unwrap();
    let times: Vec<f64> = (0..64).map(|i| i as f64 * 1e-3).collect();
    c.bench_function("pn_evolution/64x80", |b| b.iter(|| pn_evolution(black_box(&times), &k, &cat, 80).unwrap()));
}

fn propagation(c: &mut Criterion) {
    let s = spec(10.0, 1e-2);
    let cat = CatState::new(2.0).unwrap();
    let tau = 0.1 / s.omega_c;
    let mut group = c.benchmark_group("propagate_shuttered");
    group.sample_size(10);
    for n_max in [30, 40] {
        let rho0 = cat_density_matrix(&cat, n_max).unwrap();
        let cfg = PropagationConfig::new(n_max, &s, Scenario::Shuttered { tau }).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &n_max, |b, _| {
            b.iter(|| propagate_shuttered(&rho0, 5, tau, &s, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, rates, number_distribution, propagation);
criterion_main!(benches);
