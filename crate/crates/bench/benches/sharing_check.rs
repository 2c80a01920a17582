use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use shareq_bench::{element_count, instances, powers_of_two};
use shareq_core::generators::Family;
use shareq_core::{run_check, Backend};

fn family(c: &mut Criterion, name: &str, family: Family, sizes: &[usize]) {
    let mut group = c.benchmark_group(name);
    group.sample_size(20);
    for (n, g, q) in instances(family, sizes, 7) {
        group.throughput(Throughput::Elements(element_count(&g, &q)));
        for (label, backend) in [("queue", Backend::Queue), ("recursive", Backend::Recursive)] {
            group.bench_with_input(BenchmarkId::new(label, n), &(&g, &q), |b, (g, q)| {
                b.iter(|| run_check(black_box(g), black_box(q), backend).is_equal())
            });
        }
    }
    group.finish();
}

fn benches(c: &mut Criterion) {
    family(c, "shared_power", Family::SharedPower, &powers_of_two(8, 16));
    family(c, "unshared_tree", Family::UnsharedTree, &[8, 10, 12, 14]);
    family(c, "random_dag", Family::RandomDag, &powers_of_two(6, 12));
}

criterion_group!(benches_group, benches);
criterion_main!(benches_group);
