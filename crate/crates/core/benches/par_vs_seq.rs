//! Data-parallel vs sequential timings for the three batch-heavy paths:
//! sampled diamond-norm probes, rotational-perfection grid sweeps, and
//! unitary-pair searches over random kernels.

use chronoglass::channel::KrausMap;
use chronoglass::exec::indexed_map_mode;
use chronoglass::gentrans::ubb::{ubb_search, UbbOptions};
use chronoglass::matcore::gates;
use chronoglass::measures::diamond::mc_lower_bound;
use chronoglass::sampling::{derived_rng, random_unitary};
use chronoglass::tensors::{chebyshev_thetas, is_rotationally_perfect};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_modes(c: &mut Criterion, group: &str, work: impl Fn(bool) + Copy) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for (label, parallel) in [("parallel", true), ("sequential", false)] {
        g.bench_with_input(BenchmarkId::from_parameter(label), &parallel, |b, &p| {
            b.iter(|| work(p))
        });
    }
    g.finish();
}

fn diamond_probe_batch(c: &mut Criterion) {
    let id = KrausMap::identity(2).unwrap();
    let depol = KrausMap::completely_depolarizing(2).unwrap();
    let diff = KrausMap::difference(&id, &depol).unwrap();
    bench_modes(c, "diamond_probe_batch", |parallel| {
        let bounds = indexed_map_mode(24, parallel, |i| {
            mc_lower_bound(&diff, 20, i as u64).unwrap()
        });
        assert!(bounds.iter().all(|&b| b > 1.0));
    });
}

fn rotational_grid_sweep(c: &mut Criterion) {
    let grid = chebyshev_thetas(512);
    bench_modes(c, "rotational_grid_sweep", |parallel| {
        let verdicts = indexed_map_mode(16, parallel, |i| {
            let mut rng = derived_rng(40, i as u64);
            let d = 2 * (1 + i % 3);
            let block = random_unitary(d, &mut rng);
            // Only symmetric or antisymmetric blocks survive the sweep;
            // generic unitaries exercise the early-exit path.
            is_rotationally_perfect(&block, &grid, 1e-9)
        });
        assert!(verdicts.contains(&false));
        assert!(is_rotationally_perfect(&gates::h(), &grid, 1e-9));
    });
}

fn pair_search_batch(c: &mut Criterion) {
    bench_modes(c, "pair_search_batch", |parallel| {
        let residuals = indexed_map_mode(12, parallel, |i| {
            let mut rng = derived_rng(41, i as u64);
            let w = random_unitary(4, &mut rng);
            let opts = UbbOptions { seed: i as u64, ..UbbOptions::default() };
            ubb_search(&w, &opts).unwrap().map(|p| p.residual)
        });
        assert!(residuals.iter().all(|r| r.is_some()));
    });
}

criterion_group!(benches, diamond_probe_batch, rotational_grid_sweep, pair_search_batch);
criterion_main!(benches);
