use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qisc_core::dataset::{make_dataset, DatasetConfig};
use qisc_core::training::init_params;
use qisc_core::{
    evaluate, loss_and_grad_analytic, AnsatzSpec, Execution, LossKind, Model, Pipeline,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STRATEGIES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn batch_gradient(c: &mut Criterion) {
    let data = make_dataset(&DatasetConfig::default()).unwrap();
    let spec = AnsatzSpec::default();
    let params = init_params(&spec, Default::default(), &mut ChaCha8Rng::seed_from_u64(0));
    let batch = &data.train[..32];
    let mut group = c.benchmark_group("loss_and_grad_batch32");
    for pipeline in [Pipeline::Ico, Pipeline::Definite] {
        for (name, execution) in STRATEGIES {
            let model = Model::new(pipeline, spec)
                .unwrap()
                .with_execution(execution);
            group.bench_with_input(BenchmarkId::new(pipeline.name(), name), &model, |b, m| {
                b.iter(|| loss_and_grad_analytic(m, &params, batch, LossKind::Mse).unwrap())
            });
        }
    }
    group.finish();
}

fn full_set_evaluation(c: &mut Criterion) {
    let data = make_dataset(&DatasetConfig::default()).unwrap();
    let spec = AnsatzSpec::default();
    let params = init_params(&spec, Default::default(), &mut ChaCha8Rng::seed_from_u64(0));
    let mut group = c.benchmark_group("evaluate_train200");
    for (name, execution) in STRATEGIES {
        let model = Model::new(Pipeline::Ico, spec)
            .unwrap()
            .with_execution(execution);
        group.bench_with_input(BenchmarkId::from_parameter(name), &model, |b, m| {
            b.iter(|| evaluate(m, &params, &data.train, LossKind::Mse).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batch_gradient, full_set_evaluation);
criterion_main!(benches);
