use std::hint::black_box;
use std::sync::Arc;

use cartier_core::ring::{trunc_exp, LaurentPoly, Matrix, PrimeContext, VarSpec};
use criterion::{criterion_group, criterion_main, Criterion};

fn dense(p: u64, vars: &Arc<VarSpec>, degree: i32) -> LaurentPoly {
    LaurentPoly::from_terms(p, vars, (-degree..=degree).map(|e| (vec![e, degree - e.abs()], e as i64 + 2))).unwrap()
}

fn poly_ops(c: &mut Criterion) {
    let vars = VarSpec::new(&["s", "t"], &["s"]).unwrap();
    let f = dense(7, &vars, 12);
    let g = dense(7, &vars, 9);
    c.bench_function("poly mul (25 x 19 terms, p=7)", |b| b.iter(|| black_box(&f) * black_box(&g)));
    c.bench_function("poly pow 7", |b| b.iter(|| black_box(&g).pow(7)));
    c.bench_function("poly frobenius", |b| b.iter(|| black_box(&f).frobenius()));
}

fn matrix_ops(c: &mut Criterion) {
    let ctx = PrimeContext::new(7).unwrap();
    let vars = VarSpec::laurent(&["t"]).unwrap();
    let rank = 6;
    let n = Matrix::from_fn(7, &vars, rank, rank, |i, j| {
        if j > i {
            LaurentPoly::monomial(7, &vars, (i + j) as i64, &[(j as i32) - 2]).unwrap()
        } else {
            LaurentPoly::zero(7, &vars)
        }
    });
    let u = trunc_exp(&n, &ctx).unwrap();
    c.bench_function("trunc_exp rank 6, p=7", |b| b.iter(|| trunc_exp(black_box(&n), &ctx).unwrap()));
    c.bench_function("unipotent inverse rank 6", |b| b.iter(|| black_box(&u).inverse().unwrap()));
    c.bench_function("matrix mul rank 6", |b| b.iter(|| black_box(&u) * black_box(&n)));
}

criterion_group!(benches, poly_ops, matrix_ops);
criterion_main!(benches);
