use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use padist::groups::bch::BchSeries;
use padist::groups::group_law_check;
use padist::groups::limits::{limit_add, limit_bracket};
use padist::hopf::{coassociativity_check, phi_coordinates, StructureConstants};
use padist_bench::{ctx, group_pairs};

fn bch(c: &mut Criterion) {
    let mut g = c.benchmark_group("bch");
    g.sample_size(10);
    for degree in [6usize, 10, 12] {
        g.bench_with_input(BenchmarkId::new("series", degree), &degree, |b, &d| {
            b.iter(|| BchSeries::new(black_box(d)).unwrap())
        });
    }
    let series = BchSeries::new(10).unwrap();
    for dim in [2usize, 3] {
        let pairs = group_pairs(3, dim, 4, 12);
        g.bench_with_input(
            BenchmarkId::new("group_law_d10", dim),
            &pairs,
            |b, pairs| {
                b.iter(|| {
                    for (x, y) in pairs {
                        black_box(group_law_check(&series, x, y).unwrap());
                    }
                })
            },
        );
    }
    g.finish();
}

fn limits(c: &mut Criterion) {
    let mut g = c.benchmark_group("limits");
    g.sample_size(10);
    let (x, y) = group_pairs(3, 2, 1, 12).remove(0);
    g.bench_function("add_t12", |b| {
        b.iter(|| limit_add(black_box(&x), black_box(&y), 12).unwrap())
    });
    g.bench_function("bracket_t12", |b| {
        b.iter(|| limit_bracket(black_box(&x), black_box(&y), 12).unwrap())
    });
    g.finish();
}

fn hopf(c: &mut Criterion) {
    let mut g = c.benchmark_group("hopf");
    g.sample_size(10);
    let sl2 = StructureConstants::scaled_sl2(ctx(5));
    g.bench_function("phi_sl2_d6", |b| {
        b.iter(|| phi_coordinates(black_box(&sl2), 6).unwrap())
    });
    let phi = phi_coordinates(&sl2, 6).unwrap();
    g.bench_function("coassociativity_sl2_d6", |b| {
        b.iter(|| coassociativity_check(black_box(&phi)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bch, limits, hopf);
criterion_main!(benches);
