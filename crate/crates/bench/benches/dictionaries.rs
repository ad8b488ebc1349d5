use backyard::bins::BinMode;
use backyard::succinct::BinBackend;
use backyard_bench::*;
use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};

const N: u64 = 1 << 14;

fn backyard_ops(c: &mut Criterion) {
    let ks = keys(N, 1 << 40, 1);
    let probes = keys(N, 1 << 40, 2);
    let mut g = c.benchmark_group("backyard");
    g.throughput(Throughput::Elements(N));
    g.sample_size(10);
    for (name, p) in backyard_modes(N) {
        g.bench_with_input(BenchmarkId::new("insert", &name), &p, |b, p| {
            b.iter_batched(
                || backyard::backyard::BackyardDict::new(p.clone(), 1).unwrap(),
                |mut d| {
                    for &x in &ks {
                        d.insert(x).unwrap();
                    }
                    d
                },
                BatchSize::LargeInput,
            )
        });
        let full = filled_backyard(&p, &ks);
        g.bench_function(BenchmarkId::new("lookup", &name), |b| {
            b.iter(|| {
                probes
                    .iter()
                    .chain(&ks)
                    .filter(|&&x| full.contains(x))
                    .count()
            })
        });
        g.bench_function(BenchmarkId::new("delete", &name), |b| {
            b.iter_batched(
                || full.clone(),
                |mut d| {
                    for &x in &ks {
                        d.delete(x).unwrap();
                    }
                    d
                },
                BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

fn succinct_ops(c: &mut Criterion) {
    let (u, n) = (1u64 << 24, 1u64 << 12);
    let ks = keys(n, u, 3);
    let mut g = c.benchmark_group("succinct");
    g.throughput(Throughput::Elements(n));
    g.sample_size(10);
    let configs = [
        ("split/plain", 0.9, BinBackend::Cells(BinMode::Plain)),
        ("split/ranked", 0.9, BinBackend::Ranked),
        ("single/ranked", 0.0, BinBackend::Ranked),
    ];
    for (name, gamma, backend) in configs {
        let p = succinct_params(u, n, gamma, backend);
        g.bench_with_input(BenchmarkId::new("insert", name), &p, |b, p| {
            b.iter_batched(
                || backyard::succinct::SuccinctDict::new(p.clone(), 1).unwrap(),
                |mut d| {
                    for &x in &ks {
                        d.insert(x).unwrap();
                    }
                    d
                },
                BatchSize::LargeInput,
            )
        });
        let full = filled_succinct(&p, &ks);
        g.bench_function(BenchmarkId::new("lookup", name), |b| {
            b.iter(|| ks.iter().filter(|&&x| full.contains(x)).count())
        });
    }
    g.finish();
}

criterion_group!(benches, backyard_ops, succinct_ops);
criterion_main!(benches);
