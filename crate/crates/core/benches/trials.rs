use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use circlabel::layout::Method;
use circlabel::sim::{compare_methods_with, CompareConfig, Execution, Preset, SceneSource};

fn config(trials: usize) -> CompareConfig {
    CompareConfig::new(
        SceneSource::Generated {
            n_objects: 60,
            preset: Preset::Scatter,
            skew: 0.0,
        },
        vec![Method::Ec1, Method::Ec2, Method::Ec3],
        trials,
        0,
    )
}

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("compare_methods");
    group.sample_size(10);
    for n in [8, 32] {
        let cfg = config(n);
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, n), &cfg, |b, cfg| {
                b.iter(|| compare_methods_with(cfg, exec).expect("valid config"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
