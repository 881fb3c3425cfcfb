use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vsl_core::metrics::{solve_assignment, solve_uniform_transport, MatchWeightMatrix, TableProjector};
use vsl_core::{
    interpolate, score_sequence, BoundingBox, CandidateDatabase, Canvas, EmbeddingVector, ExampleConversation,
    KeyframeLayout, Metric, VideoSceneLayout,
};

fn matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> MatchWeightMatrix {
    MatchWeightMatrix::from_fn(r, c, |_, _| rng.random_range(0.0..1.0))
}

fn layout(rng: &mut ChaCha8Rng, objects: u32, keyframes: u32) -> VideoSceneLayout {
    let labels = ["car", "dog", "piano", "violin", "train"];
    let keyframes = (0..keyframes)
        .map(|f| {
            let boxes = (1..=objects)
                .map(|id| {
                    let w = rng.random_range(20.0..120.0);
                    let h = rng.random_range(20.0..120.0);
                    let x = rng.random_range(0.0..454.0 - w);
                    let y = rng.random_range(0.0..256.0 - h);
                    BoundingBox::new(id, labels[id as usize % labels.len()], x, y, w, h)
                })
                .collect();
            KeyframeLayout::new(f, "", boxes)
        })
        .collect();
    VideoSceneLayout { canvas: Canvas::PLANNING, global_caption: "scene".into(), reasoning: None, keyframes }
}

fn assignment(c: &mut Criterion) {
    let mut g = c.benchmark_group("assignment");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [4, 16, 64] {
        let m = matrix(&mut rng, n, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| solve_assignment(black_box(m))));
    }
    g.finish();
}

fn transport(c: &mut Criterion) {
    let mut g = c.benchmark_group("transport");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (r, cols) in [(3, 5), (8, 8), (16, 12)] {
        let m = matrix(&mut rng, r, cols);
        g.bench_with_input(BenchmarkId::from_parameter(format!("{r}x{cols}")), &m, |b, m| {
            b.iter(|| solve_uniform_transport(black_box(m)))
        });
    }
    g.finish();
}

fn knn(c: &mut Criterion) {
    let mut g = c.benchmark_group("knn");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let vsl = layout(&mut rng, 1, 1);
    for n in [1_000, 10_000] {
        let entries = (0..n)
            .map(|i| ExampleConversation {
                id: format!("e{i}"),
                audio_ref: format!("e{i}.wav"),
                embedding: EmbeddingVector((0..512).map(|_| rng.random_range(-1.0..1.0)).collect()),
                reasoning: String::new(),
                vsl: vsl.clone(),
            })
            .collect();
        let db = CandidateDatabase::new(entries).unwrap();
        let q = EmbeddingVector((0..512).map(|_| rng.random_range(-1.0..1.0)).collect());
        g.bench_with_input(BenchmarkId::from_parameter(n), &db, |b, db| b.iter(|| db.knn(black_box(&q), 3).unwrap()));
    }
    g.finish();
}

fn interpolation(c: &mut Criterion) {
    let mut g = c.benchmark_group("interpolate");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let vsl = layout(&mut rng, 5, 5);
    for frames in [16, 64] {
        g.bench_with_input(BenchmarkId::from_parameter(frames), &frames, |b, &n| {
            b.iter(|| interpolate(black_box(&vsl), n).unwrap())
        });
    }
    g.finish();
}

fn sequence_metrics(c: &mut Criterion) {
    let mut g = c.benchmark_group("score_sequence");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (a, b) = (layout(&mut rng, 5, 5), layout(&mut rng, 4, 5));
    let projector = TableProjector::one_hot(["car", "dog", "piano", "violin", "train"]);
    for metric in Metric::ALL {
        g.bench_function(metric.name(), |bch| {
            bch.iter(|| score_sequence(black_box(&a), black_box(&b), metric, &projector).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, assignment, transport, knn, interpolation, sequence_metrics);
criterion_main!(benches);
