use caa_core::evaluation::average_log_loss;
use caa_core::observers::MarkovObserver;
use caa_core::par;
use caa_core::sources::{gen_markov_chain, MarkovChainParams, SymbolSequence};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

// One replicate = the losses of Markov observers of orders 0..=4 on one sequence.
fn replicate_losses(seq: &SymbolSequence) -> Vec<f64> {
    (0..=4)
        .map(|k| {
            let mut obs = MarkovObserver::new(k, 1.0, 2).unwrap();
            average_log_loss(&mut obs, seq, 4).unwrap().avg_loss
        })
        .collect()
}

fn bench_replicates(c: &mut Criterion) {
    let params = MarkovChainParams::binary(2, &[0.1, 0.7, 0.4, 0.85]);
    let seqs: Vec<SymbolSequence> =
        (0..16).map(|s| gen_markov_chain(&params, 20_000, s).unwrap()).collect();

    let mut group = c.benchmark_group("markov_ladder_16x20k");
    group.sample_size(20);
    group.bench_with_input(BenchmarkId::new("sequential", 16), &seqs, |b, seqs| {
        b.iter(|| par::map_sequential(black_box(seqs), replicate_losses))
    });
    group.bench_with_input(
        BenchmarkId::new(if par::is_parallel() { "rayon" } else { "rayon-disabled" }, 16),
        &seqs,
        |b, seqs| b.iter(|| par::map(black_box(seqs), replicate_losses)),
    );
    group.finish();
}

criterion_group!(benches, bench_replicates);
criterion_main!(benches);
