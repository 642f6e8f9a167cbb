use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use timtin_workbench::{cyclic, random_config};
use timtin_core::{finite_snr_rates, gdof_of_config, lexicographic_order, tin_symmetric_gdof, user_gdof, zfsc_receivers};

fn configuration_gdof(c: &mut Criterion) {
    let mut group = c.benchmark_group("gdof");
    for (k, n, b) in [(5, 2, 1), (8, 3, 2), (12, 4, 2)] {
        let spec = cyclic(k, 2);
        let tx = random_config(k, n, b, 3);
        let label = format!("K{k}_n{n}_b{b}");
        group.bench_with_input(BenchmarkId::new("joint", &label), &tx, |bch, tx| {
            bch.iter(|| gdof_of_config(&spec, black_box(tx)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("zero_forcing", &label), &tx, |bch, tx| {
            bch.iter(|| {
                let rx = zfsc_receivers(&spec, tx, &lexicographic_order(&tx.stream_counts())).unwrap();
                user_gdof(&spec, black_box(tx), &rx).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("finite_snr", &label), &tx, |bch, tx| {
            bch.iter(|| finite_snr_rates(&spec, black_box(tx), 1e4).unwrap())
        });
    }
    group.finish();
}

fn tin_symmetric(c: &mut Criterion) {
    let spec = cyclic(8, 4);
    c.bench_function("tin/symmetric_K8", |b| b.iter(|| tin_symmetric_gdof(black_box(&spec), 1e-7).unwrap()));
}

criterion_group!(benches, configuration_gdof, tin_symmetric);
criterion_main!(benches);
