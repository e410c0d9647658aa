use std::sync::Arc;

use cartier_core::atlas::standard;
use cartier_core::gallery::gallery;
use cartier_core::ring::{Matrix, MatrixForm, PrimeContext};
use cartier_core::sheaves::{self, FlatSheaf, HiggsSheaf};
use cartier_core::transforms::{self as tf, Epsilon, LiftChoice};
use cartier_core::{Atlas, Error};

fn affine(p: u64) -> Arc<Atlas> {
    Arc::new(standard::affine(&PrimeContext::new(p).unwrap(), &["t"], &[]).unwrap())
}

fn single(atlas: &Arc<Atlas>, rows: &[&str]) -> MatrixForm {
    MatrixForm::new(vec![Matrix::parse_square(atlas.p(), &atlas.chart(0).vars, rows).unwrap()])
}

fn nilpotent_higgs(p: u64, sign: &str) -> HiggsSheaf {
    let a = affine(p);
    HiggsSheaf::new(a.clone(), 2, vec![single(&a, &["0", sign, "0", "0"])], vec![]).unwrap()
}

#[test]
fn canonical_connection_examples() {
    let a = affine(3);
    let zero = HiggsSheaf::new(a.clone(), 2, vec![single(&a, &["0"; 4])], vec![]).unwrap();
    let h = tf::canonical_connection(&zero).unwrap();
    assert_eq!(h, FlatSheaf::trivial(a.clone(), 2).unwrap());
    assert!(sheaves::p_curvature(&h).unwrap().is_zero());
    assert_eq!(tf::inverse_cartier(&zero, &a).unwrap(), h);

    let g5 = gallery("g5_p1_uniformizing", 3).unwrap();
    let e = g5.higgs().unwrap();
    let zero = e.with_fields(e.data().fields.iter().map(|f| f.map(|m| m.scale(0))).collect()).unwrap();
    let h = tf::canonical_connection(&zero).unwrap();
    assert_eq!(h.transition(0).to_string(), "[[s^3, 0], [0, s^-3]]");
    assert!(tf::canonical_connection(e).is_err());
}

#[test]
fn inverse_cartier_rank_two() {
    let e = nilpotent_higgs(3, "1");
    let a = e.atlas().clone();
    let h = tf::inverse_cartier(&e, &a).unwrap();
    assert_eq!(h.connection(0), &single(&a, &["0", "t^2", "0", "0"]));
    assert!(sheaves::check_flat(&h).is_pass());
    let psi = sheaves::p_curvature(&h).unwrap();
    assert_eq!(psi.fields[0], single(&a, &["0", "-1", "0", "0"]));
    assert_eq!(tf::measure_epsilon(&e, &psi), Epsilon::Minus);
}

#[test]
fn inverse_cartier_projective_line() {
    let scene = gallery("g5_p1_uniformizing", 3).unwrap();
    let e = scene.higgs().unwrap();
    let h = tf::inverse_cartier(e, &scene.atlas).unwrap();
    let report = sheaves::check_flat(&h);
    assert!(report.is_pass(), "{}", report.render_text());
    // G = I + s^5 * s^-6 E21 and F(T) = diag(s^3, s^-3).
    assert_eq!(h.transition(0).to_string(), "[[s^3, 0], [s^2, s^-3]]");
    let psi = sheaves::p_curvature(&h).unwrap();
    assert_eq!(tf::measure_epsilon(e, &psi), Epsilon::Minus);
    assert!(sheaves::check_psi_gluing(&h, &psi).is_pass());
}

#[test]
fn inverse_cartier_rejects_large_exponent() {
    let scene = gallery("g6_a2_rank3_exp3", 5).unwrap();
    let e = scene.higgs().unwrap();
    assert!(tf::inverse_cartier(e, &scene.atlas).is_ok());
    let a = affine(3);
    let jordan = HiggsSheaf::new(a.clone(), 3, vec![single(&a, &["0", "1", "0", "0", "0", "1", "0", "0", "0"])], vec![]).unwrap();
    match tf::inverse_cartier(&jordan, &a) {
        Err(Error::Precondition(m)) => assert!(m.contains("exponent 3"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cartier_examples() {
    let a = affine(3);
    let trivial = FlatSheaf::trivial(a.clone(), 2).unwrap();
    let e = tf::cartier(&trivial, &a).unwrap();
    assert!(e.is_zero());

    let h = tf::inverse_cartier(&nilpotent_higgs(3, "1"), &a).unwrap();
    let trace = tf::cartier_traced(&h, &a, &LiftChoice::first(), None).unwrap();
    assert!(trace.primed.connection(0).is_zero());
    assert!(trace.descent.frames[0].is_identity());
    assert_eq!(trace.higgs, nilpotent_higgs(3, "-1"));
    assert!(trace.report.is_pass());

    let n = FlatSheaf::new(a.clone(), 2, vec![single(&a, &["0", "1", "0", "0"])], vec![]).unwrap();
    let trace = tf::cartier_traced(&n, &a, &LiftChoice::first(), None).unwrap();
    assert!(trace.psi.is_zero());
    assert_eq!(trace.descent.frames[0], Matrix::parse_square(3, &a.chart(0).vars, &["1", "-t", "0", "1"]).unwrap());
    assert!(trace.higgs.is_zero());
}

#[test]
fn flat_section_examples() {
    let a = affine(5);
    let d = tf::flat_sections(&FlatSheaf::trivial(a.clone(), 1).unwrap(), None).unwrap();
    assert!(d.frames[0].is_identity());

    let n = FlatSheaf::new(a.clone(), 2, vec![single(&a, &["0", "1", "0", "0"])], vec![]).unwrap();
    let d = tf::flat_sections(&n, None).unwrap();
    assert_eq!(d.frames[0].to_string(), "[[1, 4*t], [0, 1]]");
    assert!(d.frames[0].det().is_one());

    for p in [3, 5, 7] {
        for c in 0..p {
            let scene = gallery(&format!("g7_gm_rank1:{c}"), p).unwrap();
            let d = tf::flat_sections(scene.flat().unwrap(), None).unwrap();
            let expected = if c == 0 { "[[1]]".to_string() } else { format!("[[{}]]", cartier_core::ring::LaurentPoly::monomial(p, &scene.atlas.chart(0).vars, 1, &[(p - c) as i32]).unwrap()) };
            assert_eq!(d.frames[0].to_string(), expected, "p={p} c={c}");
        }
    }

    let curved = tf::inverse_cartier(&nilpotent_higgs(3, "1"), &affine(3)).unwrap();
    assert!(matches!(tf::flat_sections(&curved, None), Err(Error::Precondition(_))));
}

#[test]
fn gauge_examples() {
    let e = nilpotent_higgs(5, "1");
    let w = tf::gauge_compare(&e, &e, None).unwrap();
    assert!(w.matrices[0].is_identity());

    let neg = nilpotent_higgs(5, "-1");
    let w = tf::gauge_compare(&e, &neg, None).unwrap();
    tf::verify_higgs_witness(&e, &neg, &w).unwrap();
    assert_eq!(w.matrices[0].to_string(), "[[1, 0], [0, 4]]");

    let a = e.atlas().clone();
    let zero = HiggsSheaf::new(a.clone(), 2, vec![single(&a, &["0"; 4])], vec![]).unwrap();
    assert!(matches!(tf::gauge_compare(&e, &zero, None), Err(Error::GaugeNotFound(_))));
}

#[test]
fn roundtrips() {
    for p in [3, 5] {
        for name in ["g1_trivial", "g2_a1_rank2", "g6_a2_rank3"] {
            let scene = gallery(name, p).unwrap();
            let rt = tf::roundtrip(scene.higgs().unwrap(), &scene.atlas, None).unwrap();
            assert!(rt.exact, "{name} p={p}");
            assert!(rt.report.is_pass(), "{}", rt.report.render_text());
        }
        let scene = gallery("g5_p1_uniformizing", p).unwrap();
        let report = tf::roundtrip_check(scene.higgs().unwrap(), &scene.atlas);
        assert!(report.is_pass(), "{}", report.render_text());
    }
}

#[test]
fn lift_independence_g2() {
    let scene = gallery("g2_a1_rank2", 3).unwrap();
    let e = scene.higgs().unwrap();
    let report = tf::lift_independence(e, &scene.atlas, &LiftChoice(vec![0]), &LiftChoice(vec![1]), None);
    assert!(report.is_pass(), "{}", report.render_text());
    assert!(report.entries[0].witness.as_ref().unwrap().contains("[[1, 2*t], [0, 1]]"));
}

#[test]
fn lift_cocycles() {
    for name in ["g2_a1_rank2", "g3_a1_three_lifts", "g5_p1_uniformizing", "g6_a2_rank3"] {
        let scene = gallery(name, 5).unwrap();
        let report = tf::lift_cocycle_report(scene.higgs().unwrap(), &scene.atlas);
        assert!(report.is_pass(), "{}", report.render_text());
    }
}
