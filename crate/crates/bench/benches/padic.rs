use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mumford_core::make_field;

fn arithmetic(c: &mut Criterion) {
    for (p, m) in [(2u64, 1u64), (3, 9), (5, 12)] {
        let f = make_field(p, m, 64).unwrap();
        let z = f.root_of_unity(m).unwrap();
        let x = f.int(1 + p as i64) + z.clone();
        let y = f.int(7) - z.clone();
        c.bench_function(&format!("mul Q_{p}(ζ_{m})"), |b| {
            b.iter(|| black_box(&x) * black_box(&y))
        });
        c.bench_function(&format!("inv Q_{p}(ζ_{m})"), |b| {
            b.iter(|| black_box(&x).inv().unwrap())
        });
        c.bench_function(&format!("root of unity Q_{p}(ζ_{m})"), |b| {
            b.iter(|| f.root_of_unity(black_box(m)).unwrap())
        });
    }
}

criterion_group!(benches, arithmetic);
criterion_main!(benches);
