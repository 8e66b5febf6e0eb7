use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use unikit_bench::cubic_hamiltonian;
use unikit_core::{lie_basis, lie_closure, ClosureOptions, Family, SectorDescriptor};

fn bench_closure(c: &mut Criterion) {
    let mut group = c.benchmark_group("lie_closure");
    group.sample_size(10);
    for n in [3, 5, 7] {
        let desc = SectorDescriptor::bosonic(2, n).unwrap();
        let mut seeds = lie_basis(Family::Lob, &desc).unwrap().raw_generators().to_vec();
        seeds.push(cubic_hamiltonian(n));
        group.bench_with_input(BenchmarkId::new("cubic", n), &seeds, |b, seeds| {
            b.iter(|| lie_closure(seeds, &ClosureOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_closure);
criterion_main!(benches);
