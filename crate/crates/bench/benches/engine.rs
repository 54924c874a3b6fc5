use std::hint::black_box;

use argmine_bench::{corpus, random_tensor};
use argmine_core::eval::{cohen_kappa, ConfusionMatrix, Weighting};
use argmine_core::features::{transcript_views, FeatureConfig, FeatureSchema, FeatureSet};
use argmine_core::harness::{run_experiment_with, Experiment};
use argmine_core::models::{encode_char, ModelSpec};
use argmine_core::rng::seeded;
use argmine_core::tensor::{Conv1dPool, Lstm};
use argmine_core::textproc::{analyze, default_tagger, Lexicons};
use criterion::{criterion_group, criterion_main, Criterion};

fn kappa(c: &mut Criterion) {
    let cm = ConfusionMatrix::from_counts(3, vec![400, 80, 30, 60, 250, 40, 20, 35, 180]).unwrap();
    c.bench_function("kappa_quadratic_3x3", |b| {
        b.iter(|| cohen_kappa(black_box(&cm), Weighting::Quadratic).unwrap())
    });
}

fn layers(c: &mut Criterion) {
    let mut rng = seeded(1);
    let mut conv = Conv1dPool::new("conv", 64, 64, 5, &mut rng);
    let x = random_tensor(100, 64, 2);
    c.bench_function("conv1d_pool_forward_100x64", |b| b.iter(|| conv.forward(black_box(&x)).unwrap()));
    let (y, cache) = conv.forward(&x).unwrap();
    let dy = random_tensor(y.rows(), y.cols(), 3);
    c.bench_function("conv1d_pool_backward_100x64", |b| {
        b.iter(|| conv.backward(black_box(&cache), black_box(&dy), true))
    });

    let lstm = Lstm::new("lstm", 50, 75, &mut rng);
    let xs = random_tensor(40, 50, 4);
    c.bench_function("lstm_forward_40x50_h75", |b| b.iter(|| lstm.forward(black_box(&xs)).unwrap()));
}

fn text(c: &mut Criterion) {
    let text = "So I think Fezzik went back to his normal ways, because on page 12 it says he changed.";
    c.bench_function("encode_char_500", |b| b.iter(|| encode_char(black_box(text), 500)));
    let lex = Lexicons::default();
    c.bench_function("analyze_move", |b| b.iter(|| analyze(black_box(text), default_tagger(), &lex)));

    let corpus = corpus(10);
    let toks: Vec<Vec<_>> = corpus
        .transcripts()
        .iter()
        .map(|t| t.moves.iter().map(|m| analyze(&m.text, default_tagger(), &lex)).collect())
        .collect();
    let views: Vec<_> = corpus
        .transcripts()
        .iter()
        .zip(&toks)
        .flat_map(|(t, tk)| transcript_views(&t.id, tk))
        .collect();
    let cfg = FeatureConfig::with_sets(&[FeatureSet::Wlda, FeatureSet::Dialogue]);
    c.bench_function("feature_schema_fit_10_transcripts", |b| {
        b.iter(|| FeatureSchema::fit(black_box(&views), &cfg).unwrap())
    });
    let schema = FeatureSchema::fit(&views, &cfg).unwrap();
    c.bench_function("feature_transform_all_moves", |b| {
        b.iter(|| views.iter().map(|v| schema.transform(v, &lex).dense.len()).sum::<usize>())
    });
}

fn experiments(c: &mut Criterion) {
    let corpus = corpus(6);
    let exp = Experiment::new(ModelSpec::logreg(&[FeatureSet::Wlda, FeatureSet::Dialogue]), 0);
    let mut g = c.benchmark_group("cross_validation");
    g.sample_size(10);
    g.bench_function("logreg_6_transcripts", |b| b.iter(|| run_experiment_with(&corpus, &exp, Some(1)).unwrap()));
    g.finish();
}

criterion_group!(benches, kappa, layers, text, experiments);
criterion_main!(benches);
