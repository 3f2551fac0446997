//! Sequential versus rayon execution of the data-parallel stages: per-pixel
//! gate maps, speculative threshold probes, and whole sweep rows.
//!
//! On a single-core host `ExecMode::Parallel` falls back to the sequential
//! path, so both series should coincide there.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graphpee::codec::{embed_layer_gated, layer_gate_values, preprocess_layer_boundaries, LayerPlan};
use graphpee::par::ExecMode;
use graphpee::sweep::{message_bits, run_sweep_images, SweepConfig};
use graphpee::tensor_gate::{gate_counts, gate_lower_bound, search_threshold};
use graphpee::{pgm, GrayImage, PredictorKind, PredictorParams};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn camera() -> GrayImage {
    pgm::load_pgm(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/camera.pgm")).unwrap()
}

fn crop(img: &GrayImage, size: usize) -> GrayImage {
    GrayImage::from_fn(size, size, |r, c| img.get(r + 128, c + 128))
}

fn gate_map(c: &mut Criterion) {
    let img = camera();
    let layer = LayerPlan::new(1, img.width(), img.height()).unwrap();
    let mut group = c.benchmark_group("gate_map_512");
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| layer_gate_values(&img, &layer, PredictorKind::Quad, mode)));
    }
    group.finish();
}

fn threshold_search(c: &mut Criterion) {
    let mut img = crop(&camera(), 160);
    let layer = LayerPlan::new(1, img.width(), img.height()).unwrap();
    preprocess_layer_boundaries(&mut img, &layer);
    let params = PredictorParams {
        window: 9,
        ..PredictorParams::default()
    };
    let kind = PredictorKind::Quad;
    let gates = layer_gate_values(&img, &layer, kind, ExecMode::Sequential);
    let counts = gate_counts(&gates);
    let mut group = c.benchmark_group("threshold_search_160");
    for target in [300usize, 1200] {
        let payload = message_bits(1, target);
        let lower = gate_lower_bound(&counts, target).unwrap();
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, target), &target, |b, &target| {
                b.iter(|| {
                    search_threshold(lower, target, mode, |tau| {
                        let mut scratch = img.clone();
                        let bits = payload.as_slice();
                        embed_layer_gated(&mut scratch, &layer, &gates, tau, bits, kind, &params, Some(target))
                            .map(|o| o.embeddable)
                    })
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn sweep_rows(c: &mut Criterion) {
    let img = camera();
    let images: Vec<(String, GrayImage)> = vec![("a".into(), crop(&img, 96)), ("b".into(), crop(&img, 112))];
    let cfg = SweepConfig {
        capacities: vec![200, 600],
        predictors: vec![PredictorKind::Quad, PredictorKind::Rhombus],
        params: PredictorParams {
            window: 9,
            ..PredictorParams::default()
        },
        ..SweepConfig::default()
    };
    let mut group = c.benchmark_group("sweep_rows");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| run_sweep_images(&images, &cfg, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, gate_map, threshold_search, sweep_rows);
criterion_main!(benches);
