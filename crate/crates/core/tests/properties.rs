use std::sync::Arc;

use cartier_core::atlas::standard;
use cartier_core::gallery::{gallery, GALLERY};
use cartier_core::identities::symmetrized_f_k;
use cartier_core::ring::{trunc_exp, LaurentPoly, Matrix, MatrixForm, PrimeContext, VarSpec};
use cartier_core::sheaves::{gauge_connection, p_curvature};
use cartier_core::transforms::roundtrip;
use cartier_core::{emit_scene, parse_scene, FlatSheaf, HiggsSheaf};
use proptest::prelude::*;

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

fn terms(lo: i32, hi: i32) -> impl Strategy<Value = Vec<(i32, i64)>> {
    prop::collection::vec((lo..=hi, -20i64..20), 0..5)
}

fn laurent_t() -> Arc<VarSpec> {
    VarSpec::laurent(&["t"]).unwrap()
}

fn poly(p: u64, vars: &Arc<VarSpec>, terms: &[(i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(p, vars, terms.iter().map(|&(e, c)| (vec![e], c))).unwrap()
}

/// `f N` for the strictly upper triangular all-ones `N` of size `rank`.
fn nilpotent_multiple(f: &LaurentPoly, rank: usize) -> Matrix {
    let zero = LaurentPoly::zero(f.p(), f.vars());
    let rows = (0..rank)
        .map(|i| (0..rank).map(|j| if j > i { f.clone() } else { zero.clone() }).collect())
        .collect();
    Matrix::from_rows(f.p(), f.vars(), rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divide_by_p_inverts_scaling(p in prime(), t in terms(-4, 6)) {
        let vars = laurent_t();
        let f = poly(p, &vars, &t);
        let scaled = f.lift().scale(p);
        prop_assert_eq!(scaled.divide_by_p().unwrap(), f.clone());
        prop_assert_eq!(scaled.reduce().is_zero(), true);
        if !f.is_zero() {
            prop_assert!(f.lift().divide_by_p().is_err());
        }
    }

    #[test]
    fn derivative_to_the_p_vanishes(p in prime(), t in terms(-6, 12)) {
        let vars = laurent_t();
        let mut f = poly(p, &vars, &t);
        for _ in 0..p {
            f = f.derivative(0);
        }
        prop_assert!(f.is_zero());
    }

    #[test]
    fn frobenius_is_the_pth_power_ring_map(p in prime(), a in terms(-3, 4), b in terms(-3, 4)) {
        let vars = laurent_t();
        let (f, g) = (poly(p, &vars, &a), poly(p, &vars, &b));
        prop_assert_eq!(f.frobenius(), f.pow(p as u32));
        prop_assert_eq!((&f * &g).frobenius(), &f.frobenius() * &g.frobenius());
        prop_assert_eq!((&f + &g).frobenius(), &f.frobenius() + &g.frobenius());
        prop_assert_eq!(f.frobenius().frobenius_root().unwrap(), f.clone());
        prop_assert!(f.frobenius().derivative(0).is_zero());
    }

    #[test]
    fn exp_of_negative_is_inverse(p in prime(), t in terms(-2, 4), rank in 1usize..4) {
        let ctx = PrimeContext::new(p).unwrap();
        let rank = rank.min(p as usize - 1);
        let vars = laurent_t();
        let m = nilpotent_multiple(&poly(p, &vars, &t), rank);
        let prod = &trunc_exp(&m, &ctx).unwrap() * &trunc_exp(&-&m, &ctx).unwrap();
        prop_assert!(prod.is_identity());
    }

    #[test]
    fn exp_is_additive_on_commuting_pairs(p in prime(), a in terms(-2, 4), b in terms(-2, 4), rank in 1usize..5) {
        let ctx = PrimeContext::new(p).unwrap();
        let rank = rank.min(p as usize - 1);
        let vars = laurent_t();
        let x = nilpotent_multiple(&poly(p, &vars, &a), rank);
        let y = nilpotent_multiple(&poly(p, &vars, &b), rank);
        let lhs = trunc_exp(&(&x + &y), &ctx).unwrap();
        let rhs = &trunc_exp(&x, &ctx).unwrap() * &trunc_exp(&y, &ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_is_linear(p in prime(), a in terms(0, 4), b in terms(0, 4), g in terms(-2, 3), h in terms(-2, 3)) {
        let vars = VarSpec::laurent(&["t"]).unwrap();
        let field = MatrixForm::new(vec![nilpotent_multiple(&poly(p, &vars, &a), 2)]);
        let other = MatrixForm::new(vec![nilpotent_multiple(&poly(p, &vars, &b), 2)]);
        let g = poly(p, &vars, &g);
        let h = vec![poly(p, &vars, &h)];
        let scaled = field.map(|m| m.scale_poly(&g));
        prop_assert_eq!(scaled.contract(&h), field.contract(&h).scale_poly(&g));
        prop_assert_eq!(field.add(&other).contract(&h), &field.contract(&h) + &other.contract(&h));
    }

    #[test]
    fn p_curvature_is_gauge_natural(p in prime(), a in prop::collection::vec(terms(0, 4), 4), u in terms(0, 3)) {
        let ctx = PrimeContext::new(p).unwrap();
        let atlas = Arc::new(standard::affine(&ctx, &["t"], &[vec!["t^p".to_string()]]).unwrap());
        let vars = atlas.charts()[0].vars.clone();
        let entries: Vec<LaurentPoly> = a.iter().map(|t| poly(p, &vars, t)).collect();
        let conn = Matrix::from_rows(p, &vars, vec![entries[..2].to_vec(), entries[2..].to_vec()]).unwrap();
        let flat = FlatSheaf::new(atlas.clone(), 2, vec![MatrixForm::new(vec![conn])], vec![]).unwrap();
        let one = LaurentPoly::one(p, &vars);
        let zero = LaurentPoly::zero(p, &vars);
        let f = poly(p, &vars, &u);
        let g = Matrix::from_rows(p, &vars, vec![vec![one.clone(), f.clone()], vec![zero.clone(), one.clone()]]).unwrap();
        let g_inv = Matrix::from_rows(p, &vars, vec![vec![one.clone(), -&f], vec![zero, one]]).unwrap();
        let gauged = gauge_connection(flat.connection(0), &g, &g_inv);
        let flat2 = FlatSheaf::new(atlas, 2, vec![gauged], vec![]).unwrap();
        let psi = p_curvature(&flat).unwrap();
        let psi2 = p_curvature(&flat2).unwrap();
        prop_assert_eq!(psi2.fields[0].component(0), &psi.fields[0].component(0).conjugate(&g, &g_inv));
    }

    #[test]
    fn symmetrized_sum_is_symmetric(p in prop::sample::select(vec![3u64, 5]), k in 1usize..4, swap in 0usize..3) {
        prop_assume!(k < p as usize);
        let f = symmetrized_f_k(p, k).unwrap();
        let vars = f.vars().clone();
        let mut images: Vec<LaurentPoly> = (0..k).map(|i| LaurentPoly::var(p, &vars, i)).collect();
        let i = swap % k;
        images.swap(i, (i + 1) % k);
        prop_assert_eq!(f.substitute(&images, &vars).unwrap(), f);
    }

    #[test]
    fn gallery_scenes_reemit_identically(p in prop::sample::select(vec![3u64, 5, 7]), idx in 0..GALLERY.len()) {
        let Ok(scene) = gallery(GALLERY[idx], p) else {
            // g6_a2_rank3_exp3 needs p >= 5.
            prop_assert!(p < 5);
            return Ok(());
        };
        let text = emit_scene(&scene);
        let back = parse_scene(&text).unwrap();
        prop_assert_eq!(emit_scene(&back), text);
        prop_assert_eq!(back, scene);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_affine_higgs_fields_round_trip(p in prop::sample::select(vec![3u64, 5]), f in terms(0, 3), lift in 0usize..2) {
        let ctx = PrimeContext::new(p).unwrap();
        let lifts = [vec!["t^p".to_string()], vec!["t^p + p*t".to_string()]];
        let atlas = Arc::new(standard::affine(&ctx, &["t"], &[lifts[lift].clone()]).unwrap());
        let vars = atlas.charts()[0].vars.clone();
        let theta = MatrixForm::new(vec![nilpotent_multiple(&poly(p, &vars, &f), 2)]);
        let e = HiggsSheaf::new(atlas.clone(), 2, vec![theta], vec![]).unwrap();
        let rt = roundtrip(&e, &atlas, None).unwrap();
        prop_assert!(rt.report.is_pass(), "{}", rt.report.render_text());
        prop_assert!(rt.exact);
        prop_assert_eq!(rt.result, e.negated());
    }
}
