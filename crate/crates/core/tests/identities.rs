use cartier_core::identities::{self, sym_vars};
use cartier_core::ring::{LaurentPoly, Matrix, PrimeContext, VarSpec};
use cartier_core::{Error, Status};

#[test]
fn small_f_k_values() {
    let v = sym_vars(2);
    assert_eq!(identities::f_k(3, 2).unwrap(), LaurentPoly::parse("T1 + 2*T2", 3, &v).unwrap());
    let v1 = sym_vars(1);
    assert_eq!(identities::f_k(3, 1).unwrap(), LaurentPoly::parse("T1^2", 3, &v1).unwrap());
    assert!(identities::symmetrized_f_k(3, 2).unwrap().is_zero());
    assert_eq!(identities::symmetrized_f_k(3, 1).unwrap().to_string(), "T1^2");
    assert!(identities::symmetrized_f_k(5, 3).unwrap().is_zero());
    assert!(identities::symmetrized_f_k(7, 6).unwrap().is_zero());
}

#[test]
fn f_k_matches_naive_expansion() {
    // Independent oracle: expand over integers, reduce at the end.
    fn naive(p: u64, k: usize) -> LaurentPoly {
        let vars = sym_vars(k);
        let mut total = LaurentPoly::zero(p, &vars);
        let budget = p as usize - k;
        let mut a = vec![0usize; k];
        loop {
            if a.iter().sum::<usize>() <= budget {
                let mut prod = LaurentPoly::one(p, &vars);
                for (j, &e) in a.iter().enumerate() {
                    let mut s = LaurentPoly::one(p, &vars);
                    for i in j..k {
                        s = &s + &LaurentPoly::var(p, &vars, i);
                    }
                    prod = &prod * &s.pow(e as u32);
                }
                total = &total + &prod;
            }
            let mut i = 0;
            while i < k {
                a[i] += 1;
                if a[i] <= budget {
                    break;
                }
                a[i] = 0;
                i += 1;
            }
            if i == k {
                return total;
            }
        }
    }
    for (p, k) in [(3, 1), (3, 2), (5, 2), (5, 3), (7, 3)] {
        assert_eq!(identities::f_k(p, k).unwrap(), naive(p, k), "p={p} k={k}");
    }
}

#[test]
fn f_k_preconditions() {
    assert!(matches!(identities::f_k(5, 0), Err(Error::Precondition(_))));
    assert!(matches!(identities::f_k(5, 5), Err(Error::Precondition(_))));
    assert!(identities::f_k(4, 2).is_err());
}

#[test]
fn statement_holds_for_small_primes() {
    let report = identities::verify_fk_vanishing(&[3, 5, 7]);
    assert!(report.is_pass(), "{}", report.render_text());
    let passed = report.entries.iter().filter(|e| e.status == Status::Pass).count();
    assert_eq!(passed, 1 + 3 + 5);
    let f1 = report.find("p=3 k=1: F_1 recorded").unwrap();
    assert_eq!(f1.witness.as_deref(), Some("F_1 = T1^2"));
}

#[test]
fn symmetrization_is_symmetric() {
    let f = identities::symmetrized_f_k(7, 3).unwrap();
    let f5 = identities::symmetrized_f_k(5, 2).unwrap();
    for g in [f, f5] {
        let vars = g.vars().clone();
        let n = vars.len();
        let swapped: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(g.p(), &vars, (i + 1) % n)).collect();
        assert_eq!(g.substitute(&swapped, &vars).unwrap(), g);
    }
}

fn unit(p: u64, v: &std::sync::Arc<VarSpec>, i: usize, j: usize) -> Matrix {
    Matrix::unit(p, v, 3, i, j)
}

#[test]
fn taylor_examples() {
    let ctx = PrimeContext::new(5).unwrap();
    let v = VarSpec::polynomial(&["t"]).unwrap();
    let t = LaurentPoly::var(5, &v, 0);
    let t2 = t.pow(2);
    assert!(identities::taylor_cocycle_identity(&ctx, &[unit(5, &v, 0, 1), unit(5, &v, 0, 2)], &[t.clone(), t2.clone()]).unwrap());
    let n = Matrix::unit(5, &v, 2, 0, 1);
    assert!(identities::taylor_cocycle_identity(&ctx, &[n], &[t.clone()]).unwrap());
    let err = identities::taylor_cocycle_identity(&ctx, &[unit(5, &v, 0, 1), unit(5, &v, 1, 2)], &[t, t2]).unwrap_err();
    assert!(err.to_string().contains("do not commute"), "{err}");
}

#[test]
fn taylor_random_families() {
    for p in [3, 5, 7] {
        let report = identities::taylor_trials(p, 25, 11);
        assert!(report.is_pass(), "{}", report.render_text());
    }
}

#[test]
fn wilson_for_small_primes() {
    for p in [3, 5, 7, 11, 13] {
        let report = identities::wilson_psi_check(p);
        assert!(report.is_pass(), "{}", report.render_text());
    }
}
