use std::hint::black_box;

use cartier_core::gallery::gallery;
use cartier_core::identities::symmetrized_f_k;
use cartier_core::sheaves::p_curvature;
use cartier_core::transforms::{cartier, flat_sections, inverse_cartier, roundtrip};
use criterion::{criterion_group, criterion_main, Criterion};

fn transforms(c: &mut Criterion) {
    for (name, p) in [("g2_a1_rank2", 5), ("g5_p1_uniformizing", 3), ("g6_a2_rank3", 5)] {
        let scene = gallery(name, p).unwrap();
        let e = scene.higgs().unwrap().clone();
        let atlas = scene.atlas.clone();
        let flat = inverse_cartier(&e, &atlas).unwrap();
        c.bench_function(&format!("inverse_cartier {name} p={p}"), |b| {
            b.iter(|| inverse_cartier(black_box(&e), &atlas).unwrap())
        });
        c.bench_function(&format!("p_curvature {name} p={p}"), |b| b.iter(|| p_curvature(black_box(&flat)).unwrap()));
        c.bench_function(&format!("cartier {name} p={p}"), |b| b.iter(|| cartier(black_box(&flat), &atlas).unwrap()));
        c.bench_function(&format!("roundtrip {name} p={p}"), |b| {
            b.iter(|| roundtrip(black_box(&e), &atlas, None).unwrap())
        });
    }
    let g7 = gallery("g7_gm_rank1:2", 7).unwrap();
    let h = g7.flat().unwrap().clone();
    c.bench_function("flat_sections g7 c=2 p=7", |b| b.iter(|| flat_sections(black_box(&h), None).unwrap()));
}

fn identities(c: &mut Criterion) {
    c.bench_function("F_4 at p=7", |b| b.iter(|| symmetrized_f_k(7, black_box(4)).unwrap()));
}

criterion_group!(benches, transforms, identities);
criterion_main!(benches);
