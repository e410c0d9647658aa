use std::sync::Arc;

use cartier_core::atlas::{standard, Atlas};
use cartier_core::sheaves::{self, FlatSheaf, HiggsSheaf, PCurvature};
use cartier_core::ring::{Matrix, MatrixForm, PrimeContext};

fn affine(p: u64, names: &[&str]) -> Arc<Atlas> {
    Arc::new(standard::affine(&PrimeContext::new(p).unwrap(), names, &[]).unwrap())
}

fn form(atlas: &Atlas, comps: &[&[&str]]) -> MatrixForm {
    let vars = &atlas.chart(0).vars;
    MatrixForm::new(
        comps
            .iter()
            .map(|c| Matrix::parse_square(atlas.p(), vars, c).unwrap())
            .collect(),
    )
}

fn higgs(atlas: &Arc<Atlas>, comps: &[&[&str]]) -> HiggsSheaf {
    let f = form(atlas, comps);
    HiggsSheaf::new(atlas.clone(), f.rank(), vec![f], vec![]).unwrap()
}

fn flat(atlas: &Arc<Atlas>, comps: &[&[&str]]) -> FlatSheaf {
    let f = form(atlas, comps);
    FlatSheaf::new(atlas.clone(), f.rank(), vec![f], vec![]).unwrap()
}

#[test]
fn zero_higgs_field_has_exponent_one() {
    let a = affine(3, &["t"]);
    for r in 1..=3 {
        let zeros = vec!["0"; r * r];
        let e = higgs(&a, &[&zeros]);
        let report = sheaves::check_higgs(&e);
        assert!(report.is_pass(), "{}", report.render_text());
        assert_eq!(e.exponent(), Some(1));
    }
}

#[test]
fn rank_two_nilpotent_field() {
    for p in [3, 5, 7] {
        let a = affine(p, &["t"]);
        let e = higgs(&a, &[&["0", "1", "0", "0"]]);
        assert!(sheaves::check_higgs(&e).is_pass());
        assert_eq!(e.exponent(), Some(2));
    }
}

#[test]
fn non_commuting_field_is_rejected() {
    let a = affine(5, &["t1", "t2"]);
    let e12 = ["0", "1", "0", "0", "0", "0", "0", "0", "0"];
    let e23 = ["0", "0", "0", "0", "0", "1", "0", "0", "0"];
    let e = higgs(&a, &[&e12, &e23]);
    let report = sheaves::check_higgs(&e);
    assert!(!report.is_pass());
    let failure = report.failures().next().unwrap();
    assert!(failure.check.contains("integrability"));
    assert!(failure.witness.as_ref().unwrap().contains("[0,1]"));
    assert!(e.validate().is_err());
}

#[test]
fn exponent_above_bound_fails() {
    let a = affine(3, &["t"]);
    let jordan = ["0", "1", "0", "0", "0", "1", "0", "0", "0"];
    let e = higgs(&a, &[&jordan]);
    assert_eq!(e.exponent(), Some(3));
    assert!(!sheaves::check_higgs(&e).is_pass());
    let unipotent = higgs(&a, &[&["1", "1", "0", "1"]]);
    assert_eq!(unipotent.exponent(), None);
}

#[test]
fn flat_checks() {
    let a = affine(3, &["t"]);
    assert!(sheaves::check_flat(&FlatSheaf::trivial(a.clone(), 2).unwrap()).is_pass());
    assert!(sheaves::check_flat(&flat(&a, &[&["0", "t^2", "0", "0"]])).is_pass());

    let a2 = affine(3, &["t1", "t2"]);
    let h = flat(&a2, &[&["t2", "0", "0", "t2"], &["0", "0", "0", "0"]]);
    let report = sheaves::check_flat(&h);
    assert!(!report.is_pass());
    assert!(report.failures().next().unwrap().witness.as_ref().unwrap().contains("2"));
    let c = sheaves::curvature(h.connection(0), 0, 1);
    assert!(c.is_identity() || (-&c).is_identity());
}

#[test]
fn p_curvature_examples() {
    let a = affine(3, &["t"]);
    let psi = sheaves::p_curvature(&FlatSheaf::trivial(a.clone(), 2).unwrap()).unwrap();
    assert!(psi.is_zero());

    let h = flat(&a, &[&["0", "t^2", "0", "0"]]);
    let psi = sheaves::p_curvature(&h).unwrap();
    let vars = &a.chart(0).vars;
    assert_eq!(psi.fields[0].component(0), &Matrix::parse_square(3, vars, &["0", "-1", "0", "0"]).unwrap());
    assert!(!sheaves::check_nilpotent_psi(&psi, 1));
    assert!(sheaves::check_nilpotent_psi(&psi, 2));

    for p in [3, 5, 7] {
        let g = Arc::new(standard::torus(&PrimeContext::new(p).unwrap(), &[]).unwrap());
        for c in 0..p {
            let h = flat(&g, &[&[format!("{c}*t^-1").as_str()]]);
            assert!(sheaves::p_curvature(&h).unwrap().is_zero(), "p={p} c={c}");
        }
    }
}

#[test]
fn rank_one_jacobson_formula() {
    // For rank one, psi = a^p + d^(p-1) a.
    let p = 5;
    let a = affine(p, &["t"]);
    for text in ["t", "t^2 + 3", "2*t^3 + t"] {
        let h = flat(&a, &[&[text]]);
        let psi = sheaves::p_curvature(&h).unwrap();
        let vars = &a.chart(0).vars;
        let f = cartier_core::ring::LaurentPoly::parse(text, p, vars).unwrap();
        let mut d = f.clone();
        for _ in 0..p - 1 {
            d = d.derivative(0);
        }
        let expected = &f.pow(p as u32) + &d;
        assert_eq!(psi.fields[0].component(0).get(0, 0), &expected, "{text}");
    }
}

#[test]
fn nilpotent_psi_pairs() {
    let a = affine(5, &["t1", "t2"]);
    let e12 = ["0", "1", "0", "0", "0", "0", "0", "0", "0"];
    let e13 = ["0", "0", "1", "0", "0", "0", "0", "0", "0"];
    let psi = PCurvature {
        fields: vec![form(&a, &[&e12, &e13])],
    };
    assert!(!sheaves::check_nilpotent_psi(&psi, 1));
    assert!(sheaves::check_nilpotent_psi(&psi, 2));
    let zero = PCurvature {
        fields: vec![MatrixForm::zero(5, &a.chart(0).vars, 3)],
    };
    assert!(sheaves::check_nilpotent_psi(&zero, 1));
}

#[test]
fn projective_line_transitions() {
    let ctx = PrimeContext::new(3).unwrap();
    let atlas = Arc::new(standard::projective_line(&ctx, "s^p", "w^p").unwrap());
    let s = atlas.chart(0).vars.clone();
    let w = atlas.chart(1).vars.clone();
    let u = atlas.overlaps()[0].vars.clone();
    let theta0 = MatrixForm::new(vec![Matrix::parse_square(3, &s, &["0", "0", "1", "0"]).unwrap()]);
    let theta1 = MatrixForm::new(vec![Matrix::parse_square(3, &w, &["0", "0", "-1", "0"]).unwrap()]);
    let t = Matrix::parse_square(3, &u, &["s", "0", "0", "s^-1"]).unwrap();
    let e = HiggsSheaf::new(atlas.clone(), 2, vec![theta0.clone(), theta1], vec![t.clone()]).unwrap();
    let report = sheaves::check_higgs(&e);
    assert!(report.is_pass(), "{}", report.render_text());

    let same_sign = MatrixForm::new(vec![Matrix::parse_square(3, &w, &["0", "0", "1", "0"]).unwrap()]);
    let wrong = HiggsSheaf::new(atlas.clone(), 2, vec![theta0.clone(), same_sign.clone()], vec![t]).unwrap();
    assert!(!sheaves::check_higgs(&wrong).is_pass());

    let bad_t = Matrix::parse_square(3, &u, &["s + 1", "0", "0", "1"]).unwrap();
    let err = HiggsSheaf::new(atlas, 2, vec![theta0, same_sign], vec![bad_t]).unwrap_err();
    assert!(err.to_string().contains("non-unit"), "{err}");
}
