use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use qhexa_bench::{packet, words};
use qhexa_core::conformal::{boost, AccelParams, ObservableSet};
use qhexa_core::hexgeom::{conformal_map, lift, rotate_hexa, SpaceTimePoint};
use qhexa_core::ncalg::{Atom, Basis, NCPoly};
use qhexa_core::repnum::{gradient, Rep};
use qhexa_core::tables;
use std::hint::black_box;

fn algebra(c: &mut Criterion) {
    let mut group = c.benchmark_group("algebra");
    for basis in [Basis::A, Basis::B] {
        let rw = tables::system(basis).unwrap();
        let polys = words(basis, 16, 4);
        group.bench_function(format!("normalize/{basis}"), |b| {
            b.iter(|| polys.iter().map(|p| rw.normalize(black_box(p)).unwrap().len()).sum::<usize>())
        });
        group.bench_function(format!("commutator/{basis}"), |b| {
            b.iter(|| rw.commutator(black_box(&polys[0]), black_box(&polys[1])).unwrap())
        });
    }
    let rw = tables::system(Basis::B).unwrap();
    let obs = ObservableSet::basis_b(&rw).unwrap();
    group.bench_function("composites/B", |b| b.iter(|| ObservableSet::basis_b(black_box(&rw)).unwrap()));
    let alpha = AccelParams::from_ratios([(1, 2), (-1, 3), (0, 1), (1, 5)]);
    let m = NCPoly::atom(Atom::M);
    group.bench_function("boost/M", |b| b.iter(|| boost(&rw, &obs, black_box(&m), &alpha, 6).unwrap()));
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let (grid, psi) = packet(24);
    group.bench_function("gradient/24", |b| b.iter(|| gradient(&grid, black_box(&psi))));
    group.bench_function("position/24", |b| {
        b.iter_batched(
            || Rep::new(grid.clone(), 2.0, 1),
            |rep| rep.atom(Atom::X(1), &psi).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let p = SpaceTimePoint::new([0.3, -0.2, 0.5, 0.1], 1.7).unwrap();
    let a = [0.2, 0.1, 0.0, -0.1];
    c.bench_function("geometry/map", |b| b.iter(|| conformal_map(black_box(&p), black_box(&a)).unwrap()));
    c.bench_function("geometry/lift_rotate", |b| b.iter(|| rotate_hexa(&lift(black_box(&p)), black_box(&a))));
}

criterion_group!(benches, algebra, oracle, geometry);
criterion_main!(benches);
