use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pme_bench::{protocol_config, two_photon_state};
use pme_core::protocols::run_protocol;
use pme_core::{apply_beamsplitter, apply_loss, detect, BeamsplitterSpec, DetectorSpec, ProtocolKind};

fn primitives(c: &mut Criterion) {
    let (state, m) = two_photon_state();
    let bs = BeamsplitterSpec::new(m[0], m[1], 0.5);
    c.bench_function("beamsplitter_two_photon", |b| b.iter(|| apply_beamsplitter(black_box(&state), &bs)));
    c.bench_function("loss_two_photon", |b| b.iter(|| apply_loss(black_box(&state), &m[0], 0.9)));
    let dets = [DetectorSpec::new(0, vec![m[0], m[2]], 0.9), DetectorSpec::new(1, vec![m[1], m[3]], 0.9)];
    c.bench_function("detect_two_detectors", |b| b.iter(|| detect(black_box(&state), &dets)));
}

fn protocols(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_protocol");
    for kind in ProtocolKind::ALL {
        let config = protocol_config(kind);
        group.bench_function(kind.as_str(), |b| b.iter(|| run_protocol(black_box(&config))));
    }
    group.finish();
}

criterion_group!(benches, primitives, protocols);
criterion_main!(benches);
