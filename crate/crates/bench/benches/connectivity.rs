use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use infoflow_core::{
    all_measures, estimate, evaluate_spectra, mir_ipdc, partialize, select_order, FrequencyGrid, OrderCriterion,
};
use infoflow_core::oracles::{theorem1_deviation, VerifyConfig, verify};

fn spectra(c: &mut Criterion) {
    let grid = FrequencyGrid::uniform(512).unwrap();
    let mut group = c.benchmark_group("evaluate_spectra");
    for k in [2, 4, 8, 16] {
        let model = infoflow_bench::model(k, 3);
        group.bench_with_input(BenchmarkId::from_parameter(k), &model, |b, m| {
            b.iter(|| evaluate_spectra(m, &grid).unwrap())
        });
    }
    group.finish();

    let model = infoflow_bench::model(8, 3);
    let set = evaluate_spectra(&model, &grid).unwrap();
    c.bench_function("partialize/k8", |b| b.iter(|| partialize(&set).unwrap()));
}

fn measures(c: &mut Criterion) {
    let grid = FrequencyGrid::uniform(512).unwrap();
    let model = infoflow_bench::model(6, 2);
    c.bench_function("all_measures/k6", |b| b.iter(|| all_measures(&model, &grid).unwrap()));
    c.bench_function("mir_ipdc/k6", |b| b.iter(|| mir_ipdc(&model, &grid).unwrap()));

    let small = FrequencyGrid::uniform(128).unwrap();
    let set = evaluate_spectra(&model, &small).unwrap();
    c.bench_function("theorem1_oracle/k6", |b| b.iter(|| theorem1_deviation(&set).unwrap()));
}

fn estimation(c: &mut Criterion) {
    let model = infoflow_bench::model(4, 2);
    let data = infoflow_bench::samples(&model, 20_000);
    c.bench_function("estimate/k4_p2_n20000", |b| b.iter(|| estimate(&data, 2).unwrap()));
    c.bench_function("select_order/k4_pmax6", |b| {
        b.iter(|| select_order(&data, 6, OrderCriterion::Bic).unwrap())
    });
}

fn verification(c: &mut Criterion) {
    let config = VerifyConfig { seed: 7, models: 8, grid_points: 64 };
    c.bench_function("verify/8_models", |b| b.iter(|| verify(&config).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = spectra, measures, estimation, verification
}
criterion_main!(benches);
