use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sbmc_core::besw::{build_model, generate_model, property_corpus, GenOptions, ScenarioConfig};
use sbmc_core::checker::{check, CheckOptions};
use sbmc_core::lts::{explore, ExploreLimits};
use sbmc_core::model::{parse_model, typecheck};
use sbmc_core::mucalc::parse_formula;

fn pipeline(c: &mut Criterion) {
    let config = ScenarioConfig::default();
    let text = generate_model(&config, &GenOptions::default());
    let model = typecheck(&parse_model(&text).unwrap()).unwrap();

    c.bench_function("generate and typecheck default model", |b| {
        b.iter(|| typecheck(&parse_model(&generate_model(black_box(&config), &GenOptions::default())).unwrap()).unwrap())
    });

    let mut group = c.benchmark_group("explore default model");
    group.sample_size(10);
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| explore(black_box(&model), ExploreLimits::default(), w).unwrap())
        });
    }
    group.finish();

    let built = build_model(&config, &GenOptions::default(), 4, ExploreLimits::default()).unwrap();
    let sig = built.signature();
    let mut group = c.benchmark_group("check property");
    group.sample_size(10);
    for p in property_corpus().iter().filter(|p| ["P2", "P6", "P9", "P12"].contains(&p.id)) {
        let (_, f) = parse_formula(&p.text, &sig).unwrap();
        group.bench_function(p.id, |b| b.iter(|| check(&built.lts, black_box(&f), &sig, CheckOptions::default()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
