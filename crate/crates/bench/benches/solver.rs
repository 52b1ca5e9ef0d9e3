use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use srl_bench::interaction_dataset;
use srl_core::expand::expand;
use srl_core::solver::fit_path;
use srl_core::tuning::{cross_validate, CvSpec, PenaltyScheme};
use srl_core::{ExpansionSpec, PenaltySpec, Scheme, SolverConfig};

fn bench_path(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_path");
    for &(n, p) in &[(100, 10), (300, 20)] {
        let data = interaction_dataset(n, p, 1);
        let design = expand(
            data.x.view(),
            &data.feature_names,
            ExpansionSpec::interactions(),
        )
        .unwrap();
        let y = data.y.to_vec();
        let config = SolverConfig::default();
        for (name, spec) in [
            ("lasso", PenaltySpec::lasso(&design.group_sizes())),
            ("srl", PenaltySpec::srl(&design.group_sizes(), 0.5).unwrap()),
        ] {
            group.bench_with_input(
                BenchmarkId::new(name, format!("n{n}_p{p}")),
                &spec,
                |b, spec| b.iter(|| fit_path(&design, &y, spec, data.family, &config).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_cv(c: &mut Criterion) {
    let mut group = c.benchmark_group("cross_validate");
    group.sample_size(10);
    let data = interaction_dataset(300, 20, 2);
    let config = SolverConfig {
        lambda_min_ratio: Some(1e-2),
        ..SolverConfig::default()
    };
    let cv = CvSpec {
        folds: 10,
        repeats: 1,
        seed: 1,
    };
    group.bench_function("srl_interactions_n300_p20", |b| {
        b.iter(|| {
            cross_validate(
                &data,
                ExpansionSpec::interactions(),
                &PenaltyScheme::new(Scheme::Srl),
                &[0.5],
                &cv,
                &config,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_path, bench_cv);
criterion_main!(benches);
