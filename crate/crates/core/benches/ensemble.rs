use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use satscale::harness::{measure_usa_probability, run_scaling_study, StudyConfig, UsaSampling};
use satscale::{Execution, Family};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn usa_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("usa_probability");
    group.sample_size(10);
    for (name, exec) in MODES {
        let sampling = UsaSampling { exec, ..UsaSampling::default() };
        group.bench_with_input(BenchmarkId::new(name, "locked-1in3/n48"), &sampling, |b, s| {
            b.iter(|| measure_usa_probability(Family::Locked1in3, 48, 200, 1, s).unwrap())
        });
    }
    group.finish();
}

fn small_study(c: &mut Criterion) {
    let mut group = c.benchmark_group("scaling_study");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut config = StudyConfig::new(Family::Xorsat3Reg, vec![16, 24, 32], 24);
        config.exec = exec;
        group.bench_with_input(BenchmarkId::new(name, "xorsat-3reg/16-32"), &config, |b, cfg| {
            b.iter(|| run_scaling_study(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, usa_sampling, small_study);
criterion_main!(benches);
