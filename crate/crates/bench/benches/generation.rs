use hypercolor_bench::criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hypercolor::hrg::{self, HrgParams};

fn bench_generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    for exp in [12u32, 14, 16] {
        let n = 1u64 << exp;
        group.bench_with_input(BenchmarkId::new("band_scan", n), &n, |b, &n| {
            let params = HrgParams::new(n, 0.7, 0.0, 1).unwrap();
            b.iter(|| hrg::generate(&params).unwrap());
        });
    }
    for exp in [9u32, 10, 11] {
        let n = 1u64 << exp;
        group.bench_with_input(BenchmarkId::new("brute_force", n), &n, |b, &n| {
            let params = HrgParams::new(n, 0.7, 0.0, 1).unwrap();
            let g = hrg::generate(&params).unwrap();
            b.iter(|| hrg::brute_force_edges(g.coords(), params.radius()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_generate);
criterion_main!(benches);
