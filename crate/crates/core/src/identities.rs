//! Brute-force checks of the combinatorial identities behind the
//! construction: the symmetrized sums `F_k`, the multinomial regrouping of
//! truncated exponentials, and the Wilson unit.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atlas::standard;
use crate::error::{Error, Result};
use crate::report::{Report, Status};
use crate::ring::{trunc_exp, LaurentPoly, Matrix, MatrixForm, PrimeContext, VarSpec};
use crate::sheaves::{nonvanishing_product, p_curvature, FlatSheaf};

/// Largest `k` for which the `k!` symmetrization is enumerated.
pub const MAX_K: usize = 8;

/// Polynomial ring on `T1, ..., Tk`.
pub fn sym_vars(k: usize) -> Arc<VarSpec> {
    let names: Vec<String> = (1..=k).map(|i| format!("T{i}")).collect();
    VarSpec::polynomial(&names).expect("distinct names")
}

fn check_k(p: u64, k: usize) -> Result<PrimeContext> {
    let ctx = PrimeContext::new(p)?;
    if k == 0 || k as u64 > p - 1 {
        return Err(Error::Precondition(format!("k = {k} must lie in 1..={}", p - 1)));
    }
    Ok(ctx)
}

/// `f_k = sum over a with |a| <= p - k of prod_j (1 + T_k + ... + T_j)^{a_j}`.
pub fn f_k(p: u64, k: usize) -> Result<LaurentPoly> {
    check_k(p, k)?;
    let vars = sym_vars(k);
    let budget = (p as usize) - k;
    // powers[j][e] = S_j^e with S_j = 1 + T_j + ... + T_k.
    let powers: Vec<Vec<LaurentPoly>> = (0..k)
        .map(|j| {
            let s = (j..k).fold(LaurentPoly::one(p, &vars), |acc, i| &acc + &LaurentPoly::var(p, &vars, i));
            let mut out = vec![LaurentPoly::one(p, &vars)];
            for e in 1..=budget {
                out.push(&out[e - 1] * &s);
            }
            out
        })
        .collect();
    let mut total = LaurentPoly::zero(p, &vars);
    let mut stack = vec![(0usize, budget, LaurentPoly::one(p, &vars))];
    while let Some((j, left, acc)) = stack.pop() {
        if j == k {
            total = &total + &acc;
            continue;
        }
        for e in 0..=left {
            stack.push((j + 1, left - e, &acc * &powers[j][e]));
        }
    }
    Ok(total)
}

/// `F_k = sum over permutations s of f_k(T_s(1), ..., T_s(k))`.
pub fn symmetrized_f_k(p: u64, k: usize) -> Result<LaurentPoly> {
    if k > MAX_K {
        return Err(Error::Precondition(format!("k = {k} exceeds the enumeration cap {MAX_K}")));
    }
    let f = f_k(p, k)?;
    let vars = f.vars().clone();
    let mut total = LaurentPoly::zero(p, &vars);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let images: Vec<LaurentPoly> = perm.iter().map(|&i| LaurentPoly::var(p, &vars, i)).collect();
        total = &total + &f.substitute(&images, &vars)?;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `F_k = 0` for `2 <= k <= p - 1`; `F_1` is recorded without a claim.
pub fn verify_fk_vanishing(primes: &[u64]) -> Report {
    let mut report = Report::new("symmetrized sums F_k vanish mod p");
    for &p in primes {
        if let Err(e) = PrimeContext::new(p) {
            report.fail(format!("p={p}"), e.to_string());
            continue;
        }
        match symmetrized_f_k(p, 1) {
            Ok(f) => report.note(format!("p={p} k=1: F_1 recorded"), Status::Skip, format!("F_1 = {f}")),
            Err(e) => report.fail(format!("p={p} k=1"), e.to_string()),
        }
        for k in 2..p as usize {
            if k > MAX_K {
                report.skip(format!("p={p} k={k}"), format!("k above enumeration cap {MAX_K}"));
                continue;
            }
            report.timed(format!("p={p} k={k}: F_k = 0"), || {
                let f = symmetrized_f_k(p, k)?;
                Ok::<_, Error>((f.is_zero(), Some(format!("F_{k} = {f}"))))
            });
        }
    }
    report
}

/// Multi-indices `j` of length `m` with `lo <= |j| <= hi`.
fn multi_indices(m: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; m];
    fn go(i: usize, left: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            let total: usize = cur.iter().sum();
            if total >= lo && total <= hi {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            go(i + 1, left - e, lo, hi, cur, out);
        }
        cur[i] = 0;
    }
    go(0, hi, lo, hi, &mut cur, &mut out);
    out
}

/// Checks `exp(sum_l z_l N_l) = 1 + sum_{1 <= |j| <= p-2} N^j z^j / j!`
/// for pairwise commuting `N_l` whose products of `p - 1` factors vanish.
pub fn taylor_cocycle_identity(ctx: &PrimeContext, ns: &[Matrix], zs: &[LaurentPoly]) -> Result<bool> {
    if ns.is_empty() || ns.len() != zs.len() {
        return Err(Error::Precondition("need one function per matrix".into()));
    }
    let p = ctx.p();
    for (i, a) in ns.iter().enumerate() {
        for (j, b) in ns.iter().enumerate().skip(i + 1) {
            let c = a.commutator(b);
            if !c.is_zero() {
                return Err(Error::Precondition(format!("N_{} and N_{} do not commute: {c}", i + 1, j + 1)));
            }
        }
    }
    if let Some((idx, m)) = nonvanishing_product(ns, p as usize - 1) {
        let idx: Vec<String> = idx.iter().map(|i| format!("N_{}", i + 1)).collect();
        return Err(Error::Precondition(format!("{} = {m} does not vanish", idx.join(" "))));
    }
    let vars = ns[0].vars().clone();
    let r = ns[0].rows();
    let sum = ns
        .iter()
        .zip(zs)
        .fold(Matrix::zeros(p, &vars, r, r), |acc, (n, z)| &acc + &n.scale_poly(z));
    let lhs = trunc_exp(&sum, ctx)?;
    let mut rhs = Matrix::identity(p, &vars, r);
    for j in multi_indices(ns.len(), 1, p as usize - 2) {
        let mut term = Matrix::identity(p, &vars, r);
        let mut coeff = LaurentPoly::one(p, &vars);
        for (l, &e) in j.iter().enumerate() {
            if e == 0 {
                continue;
            }
            term = &term * &ns[l].pow(e);
            coeff = &coeff * &zs[l].pow(e as u32).scale(ctx.inv_factorial(e));
        }
        rhs = &rhs + &term.scale_poly(&coeff);
    }
    Ok(lhs == rhs)
}

/// A random strictly upper triangular `N` of size at most `p - 1` and
/// polynomials `q_l(N)` without constant term, paired with random
/// functions `z_l` of `t`.
pub fn random_commuting_family(ctx: &PrimeContext, rng: &mut ChaCha8Rng) -> (Vec<Matrix>, Vec<LaurentPoly>) {
    let p = ctx.p();
    let vars = VarSpec::polynomial(&["t"]).expect("one variable");
    let max_rank = (p as usize - 1).min(4);
    let r = rng.gen_range(2..=max_rank);
    let n = Matrix::from_fn(p, &vars, r, r, |i, j| {
        if j > i {
            LaurentPoly::constant(p, &vars, rng.gen_range(0..p) as i64)
        } else {
            LaurentPoly::zero(p, &vars)
        }
    });
    let m = rng.gen_range(1..=3);
    let mut ns = Vec::with_capacity(m);
    let mut zs = Vec::with_capacity(m);
    for _ in 0..m {
        let mut q = Matrix::zeros(p, &vars, r, r);
        let mut power = n.clone();
        for _ in 1..r {
            q = &q + &power.scale(rng.gen_range(0..p));
            power = &power * &n;
        }
        ns.push(q);
        let z = (0..rng.gen_range(1..=3)).fold(LaurentPoly::zero(p, &vars), |acc, _| {
            let e = rng.gen_range(0..=2 * p as i32);
            &acc + &LaurentPoly::monomial(p, &vars, rng.gen_range(1..p) as i64, &[e]).expect("valid exponent")
        });
        zs.push(z);
    }
    (ns, zs)
}

/// Runs the Taylor identity on `trials` seeded random families.
pub fn taylor_trials(p: u64, trials: usize, seed: u64) -> Report {
    let mut report = Report::new(format!("Taylor regrouping of truncated exponentials, p={p}"));
    let ctx = match PrimeContext::new(p) {
        Ok(c) => c,
        Err(e) => {
            report.fail("prime", e.to_string());
            return report;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let (ns, zs) = random_commuting_family(&ctx, &mut rng);
        report.timed(format!("p={p} family {t}: {} matrices of size {}", ns.len(), ns[0].rows()), || {
            let ok = taylor_cocycle_identity(&ctx, &ns, &zs)?;
            Ok::<_, Error>((ok, (!ok).then(|| format!("N = {ns:?}, z = {zs:?}"))))
        });
    }
    report
}

/// `d^(p-1) t^(p-1) = (p-1)! = -1`, and the model connection on
/// `O + F*Omega` over affine `n`-space (`e_0` spanning `O`, `e_i` standing
/// for `F*dt_i`, `nabla e_i = t_i^(p-1) dt_i e_0`) has
/// `psi(d_i) e_j = -delta_ij e_0`.
pub fn wilson_psi_check(p: u64) -> Report {
    let mut report = Report::new(format!("Wilson unit, p={p}"));
    let ctx = match PrimeContext::new(p) {
        Ok(c) => c,
        Err(e) => {
            report.fail("prime", e.to_string());
            return report;
        }
    };
    let vars = VarSpec::polynomial(&["t"]).expect("one variable");
    let mut f = LaurentPoly::monomial(p, &vars, 1, &[p as i32 - 1]).expect("valid exponent");
    for _ in 0..p - 1 {
        f = f.derivative(0);
    }
    let minus_one = LaurentPoly::constant(p, &vars, -1);
    report.check(format!("d^{} t^{} = -1", p - 1, p - 1), f == minus_one, || format!("got {f}"));
    report.check("(p-1)! = -1", ctx.wilson() == p - 1, || format!("got {}", ctx.wilson()));
    for n in [1usize, 2] {
        report.timed(format!("model connection on affine {n}-space: psi(d_i) e_j = -delta_ij e_0"), || {
            let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let atlas = Arc::new(standard::affine(&ctx, &refs, &[])?);
            let v = atlas.chart(0).vars.clone();
            let comps = (0..n)
                .map(|i| {
                    let coeff = LaurentPoly::var(p, &v, i).pow(p as u32 - 1);
                    Matrix::unit(p, &v, n + 1, 0, i + 1).scale_poly(&coeff)
                })
                .collect();
            let h = FlatSheaf::new(atlas, n + 1, vec![MatrixForm::new(comps)], vec![])?;
            let psi = p_curvature(&h)?;
            for i in 0..n {
                let expected = Matrix::unit(p, &v, n + 1, 0, i + 1).scale(p - 1);
                let got = psi.fields[0].component(i);
                if got != &expected {
                    return Ok((false, Some(format!("psi(d_{}) = {got}", i + 1))));
                }
            }
            Ok::<_, Error>((true, None))
        });
    }
    report
}
