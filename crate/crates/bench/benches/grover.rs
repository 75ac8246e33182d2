use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use uniprep::grover::{grover_circuit, run_search, ColoringProblem, GrowthPolicy, Mode};
use uniprep::simulate;

fn bench_repetitions(c: &mut Criterion) {
    let problem = ColoringProblem::line(4, 3).unwrap();
    let mut group = c.benchmark_group("line4x3_four_repetitions");
    for mode in Mode::ALL {
        let circuit = grover_circuit(&problem, mode, 4);
        group.bench_function(mode.as_str(), |b| {
            b.iter(|| simulate(black_box(&circuit)).unwrap())
        });
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let problem = ColoringProblem::line(3, 5).unwrap();
    let mut group = c.benchmark_group("line3x5_search_100_trials");
    group.sample_size(10);
    for mode in Mode::ALL {
        let policy = GrowthPolicy::for_problem(&problem, mode).unwrap();
        group.bench_function(mode.as_str(), |b| {
            b.iter(|| run_search(&problem, mode, &policy, 100, black_box(7)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_repetitions, bench_search);
criterion_main!(benches);
