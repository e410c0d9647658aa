//! Finite-dimensional coefficient spaces of bounded Laurent polynomials.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ring::{LaurentPoly, Monomial, VarSpec};

/// Monomials with exponents in `[0, bound]`, or `[-bound, bound]` for inverted
/// variables, from highest to lowest in graded-lex order.
pub(crate) fn box_monomials(vars: &VarSpec, bound: u32) -> Vec<Monomial> {
    let b = bound as i32;
    let mut out = vec![Vec::<i32>::new()];
    for i in 0..vars.len() {
        let lo = if vars.is_inverted(i) { -b } else { 0 };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=b).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    let mut monos: Vec<Monomial> = out.iter().map(|e| Monomial::from_exponents(e)).collect();
    monos.sort_unstable_by(|a, b| b.cmp(a));
    monos
}

/// Assembles a polynomial from `(monomial, coefficient)` pairs.
pub(crate) fn poly_from(p: u64, vars: &Arc<VarSpec>, terms: impl IntoIterator<Item = (Monomial, u64)>) -> LaurentPoly {
    let mut map = BTreeMap::new();
    for (m, c) in terms {
        let e = map.entry(m).or_insert(0u64);
        *e = (*e + c) % p;
    }
    map.retain(|_, c| *c != 0);
    LaurentPoly::from_map(p, vars, map)
}

/// Layered degree bounds `0 (optional), 1, p, 2p, ...` ending at `max`.
pub(crate) fn layers(p: u64, max: u32, from_zero: bool) -> Vec<u32> {
    let mut out = Vec::new();
    if from_zero {
        out.push(0);
    }
    let mut b = 1u32;
    while b < max {
        out.push(b);
        b = if b == 1 { p as u32 } else { b + p as u32 };
    }
    out.push(max);
    out.dedup();
    out
}
