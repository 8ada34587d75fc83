use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hopfren::characters::{birkhoff_bch, birkhoff_bogoliubov, Basis, Functional, Kind};
use hopfren::hall::HallSet;
use hopfren::hopf::coproduct_tree;
use hopfren::laurent::LaurentSeries;
use hopfren::rational::q;
use hopfren::words::{qsh_product, Pairing, WordPoly};
use hopfren::{Alphabet, RootedTree};

fn coproduct(c: &mut Criterion) {
    let a = Alphabet::single("a");
    let mut group = c.benchmark_group("coproduct_tree");
    for n in [4u32, 6, 8] {
        let ladder = RootedTree::ladder(&a.letters()[0], n);
        let corolla = RootedTree::corolla(&a.letters()[0], n - 1);
        group.bench_with_input(BenchmarkId::new("ladder", n), &ladder, |b, t| b.iter(|| coproduct_tree(black_box(t))));
        group.bench_with_input(BenchmarkId::new("corolla", n), &corolla, |b, t| b.iter(|| coproduct_tree(black_box(t))));
    }
    group.finish();
}

fn birkhoff(c: &mut Criterion) {
    let mut group = c.benchmark_group("birkhoff");
    for degree in [3u32, 4] {
        let basis = Basis::new(&Alphabet::single("a"), degree).unwrap();
        let phi = Functional::from_tree_fn(Kind::Character, &basis, |t| {
            let d = t.degree() as i32;
            Ok(LaurentSeries::from_terms((-d..=1).map(|k| (k, q(k as i64 + 2, t.vertices() as i64)))))
        })
        .unwrap();
        group.bench_with_input(BenchmarkId::new("bogoliubov", degree), &phi, |b, f| {
            b.iter(|| birkhoff_bogoliubov(black_box(f)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bch", degree), &phi, |b, f| b.iter(|| birkhoff_bch(black_box(f)).unwrap()));
    }
    group.finish();
}

fn quasi_shuffle(c: &mut Criterion) {
    let u = Alphabet::universal(16);
    let p = Pairing::additive(&u).unwrap();
    let x = WordPoly::parse("(1,2,1) + 3*(2,2)", &u).unwrap();
    let y = WordPoly::parse("(1,1,3) - (4)", &u).unwrap();
    c.bench_function("qsh_product", |b| b.iter(|| qsh_product(black_box(&x), black_box(&y), &p).unwrap()));
}

fn hall_set(c: &mut Criterion) {
    let a = Alphabet::parse("a,b").unwrap();
    c.bench_function("hall_set_degree_7", |b| b.iter(|| HallSet::build(black_box(&a), 7).unwrap()));
}

criterion_group!(benches, coproduct, birkhoff, quasi_shuffle, hall_set);
criterion_main!(benches);
