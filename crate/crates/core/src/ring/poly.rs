use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::prime::{mod_inv, reduce_signed};
use super::vars::{Monomial, MonomialDisplay, VarSpec};
use crate::error::{Error, Result};

/// Coefficient ring marker: `Z/p` or `Z/p^2`.
pub trait Coefficients:
    'static + Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Hash + Send + Sync
{
    fn modulus(p: u64) -> u64;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModP;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModP2;

impl Coefficients for ModP {
    fn modulus(p: u64) -> u64 {
        p
    }
}

impl Coefficients for ModP2 {
    fn modulus(p: u64) -> u64 {
        p * p
    }
}

/// Sparse Laurent polynomial with residue coefficients; no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<C: Coefficients> {
    p: u64,
    vars: Arc<VarSpec>,
    terms: BTreeMap<Monomial, u64>,
    _coeffs: PhantomData<C>,
}

/// Functions on a chart, coefficients in `F_p`.
pub type LaurentPoly = Laurent<ModP>;
/// Functions on the `W_2` thickening of a chart, coefficients in `Z/p^2`.
pub type LaurentPoly2 = Laurent<ModP2>;

impl<C: Coefficients> Laurent<C> {
    pub fn zero(p: u64, vars: &Arc<VarSpec>) -> Self {
        Self {
            p,
            vars: vars.clone(),
            terms: BTreeMap::new(),
            _coeffs: PhantomData,
        }
    }

    pub fn constant(p: u64, vars: &Arc<VarSpec>, c: i64) -> Self {
        let mut out = Self::zero(p, vars);
        let c = reduce_signed(c as i128, C::modulus(p));
        if c != 0 {
            out.terms.insert(Monomial::one(vars.len()), c);
        }
        out
    }

    pub fn one(p: u64, vars: &Arc<VarSpec>) -> Self {
        Self::constant(p, vars, 1)
    }

    pub fn var(p: u64, vars: &Arc<VarSpec>, i: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Self::monomial(p, vars, 1, &exps).expect("positive exponent")
    }

    pub fn monomial(p: u64, vars: &Arc<VarSpec>, coeff: i64, exps: &[i32]) -> Result<Self> {
        Self::from_terms(p, vars, [(exps.to_vec(), coeff)])
    }

    pub fn from_terms<I>(p: u64, vars: &Arc<VarSpec>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, i64)>,
    {
        let mut out = Self::zero(p, vars);
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(Error::VarMismatch(format!(
                    "exponent vector of length {} for {} variables",
                    exps.len(),
                    vars.len()
                )));
            }
            vars.check_exponents(&exps)?;
            out.add_term(Monomial::from_exponents(&exps), reduce_signed(c as i128, out.modulus()));
        }
        Ok(out)
    }

    pub(crate) fn from_map(p: u64, vars: &Arc<VarSpec>, terms: BTreeMap<Monomial, u64>) -> Self {
        Self {
            p,
            vars: vars.clone(),
            terms,
            _coeffs: PhantomData,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> u64 {
        C::modulus(self.p)
    }

    pub fn vars(&self) -> &Arc<VarSpec> {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, &c)| m.is_one() && c == 1)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, exps: &[i32]) -> u64 {
        self.terms
            .get(&Monomial::from_exponents(exps))
            .copied()
            .unwrap_or(0)
    }

    /// Largest `sum |e_i|` over the terms; 0 for the zero polynomial.
    pub fn max_abs_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::abs_degree).max().unwrap_or(0)
    }

    /// If the polynomial is a constant, its residue.
    pub fn as_constant(&self) -> Option<u64> {
        match self.terms.len() {
            0 => Some(0),
            1 => {
                let (m, &c) = self.terms.iter().next()?;
                m.is_one().then_some(c)
            }
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let m = self.modulus();
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c % m);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = (*o.get() + c) % m;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.p, other.p, "operands over different primes");
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "operands over different variable sets: {:?} vs {:?}",
            self.vars.names(),
            other.vars.names()
        );
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus();
        let c = c % m;
        let mut out = Self::zero(self.p, &self.vars);
        if c == 0 {
            return out;
        }
        for (mono, &v) in &self.terms {
            out.add_term(mono.clone(), v * c % m);
        }
        out
    }

    pub fn scale_signed(&self, c: i64) -> Self {
        self.scale(reduce_signed(c as i128, self.modulus()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.p, &self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `d/dt_i`, valid for negative exponents as well.
    pub fn derivative(&self, i: usize) -> Self {
        let m = self.modulus();
        let mut out = Self::zero(self.p, &self.vars);
        for (mono, &c) in &self.terms {
            let e = mono.0[i];
            if e == 0 {
                continue;
            }
            let factor = reduce_signed(e as i128, m);
            let mut next = mono.clone();
            next.0[i] -= 1;
            out.add_term(next, c * factor % m);
        }
        out
    }

    /// Reinterprets the polynomial over `target`, which must carry the same names.
    pub fn rehome(&self, target: &Arc<VarSpec>) -> Result<Self> {
        if target.names() != self.vars.names() {
            return Err(Error::VarMismatch(format!(
                "cannot move {:?} into {:?}",
                self.vars.names(),
                target.names()
            )));
        }
        for mono in self.terms.keys() {
            target.check_exponents(mono.exponents())?;
        }
        Ok(Self::from_map(self.p, target, self.terms.clone()))
    }

    /// Multiplicative inverse, defined for units `m * (1 + p x)` with `m` a
    /// monomial in inverted variables whose coefficient is a unit.
    pub fn try_inverse(&self) -> Result<Self> {
        let p = self.p;
        let m = self.modulus();
        let mut lead: Option<(&Monomial, u64)> = None;
        for (mono, &c) in &self.terms {
            if c % p != 0 {
                if lead.is_some() {
                    return Err(Error::NotAUnit(self.to_string()));
                }
                lead = Some((mono, c));
            }
        }
        let (mono, c) = lead.ok_or_else(|| Error::NotAUnit(self.to_string()))?;
        let inv_exps: Vec<i32> = mono.0.iter().map(|e| -e).collect();
        if self.vars.check_exponents(&inv_exps).is_err() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let c_inv = mod_inv(c, m).ok_or_else(|| Error::NotAUnit(self.to_string()))?;
        let lead_inv = Self::from_map(
            p,
            &self.vars,
            BTreeMap::from([(Monomial::from_exponents(&inv_exps), c_inv)]),
        );
        // u = lead * (1 + y) with every coefficient of y divisible by p, so y^2 = 0.
        let y = &(&lead_inv * self) - &Self::one(p, &self.vars);
        let inv = &lead_inv * &(&Self::one(p, &self.vars) - &y);
        if !(&inv * self).is_one() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        Ok(inv)
    }

    /// Ring map sending variable `i` to `images[i]`, landing in `target`.
    ///
    /// Negative exponents require the corresponding image to be a unit.
    pub fn substitute(&self, images: &[Self], target: &Arc<VarSpec>) -> Result<Self> {
        if images.len() != self.vars.len() {
            return Err(Error::VarMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.vars.len()
            )));
        }
        for img in images {
            if img.vars.as_ref() != target.as_ref() || img.p != self.p {
                return Err(Error::VarMismatch(
                    "substitution images must live in the target ring".into(),
                ));
            }
        }
        let mut inverses: Vec<Option<Self>> = vec![None; images.len()];
        let mut powers: HashMap<(usize, i32), Self> = HashMap::new();
        let mut out = Self::zero(self.p, target);
        for (mono, &c) in &self.terms {
            let mut term = Self::constant(self.p, target, c as i64);
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !powers.contains_key(&(i, e)) {
                    let base = if e > 0 {
                        images[i].clone()
                    } else {
                        if inverses[i].is_none() {
                            inverses[i] = Some(images[i].try_inverse()?);
                        }
                        inverses[i].clone().unwrap()
                    };
                    powers.insert((i, e), base.pow(e.unsigned_abs()));
                }
                term = &term * &powers[&(i, e)];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (mono, &c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if mono.is_one() {
                write!(f, "{c}")?;
            } else {
                if c != 1 {
                    write!(f, "{c}*")?;
                }
                write!(
                    f,
                    "{}",
                    MonomialDisplay {
                        vars: &self.vars,
                        mono
                    }
                )?;
            }
        }
        Ok(())
    }
}

impl Laurent<ModP> {
    /// `g -> g^p`: exponents scale by `p`, coefficients are fixed.
    pub fn frobenius(&self) -> Self {
        let p = self.p as i32;
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (Monomial(m.0.iter().map(|e| e * p).collect()), c))
            .collect();
        Self::from_map(self.p, &self.vars, terms)
    }

    /// Inverse of [`frobenius`](Self::frobenius): every exponent must be divisible by `p`.
    pub fn frobenius_root(&self) -> Result<Self> {
        let p = self.p as i32;
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            if let Some(i) = m.0.iter().position(|e| e % p != 0) {
                return Err(Error::ExponentNotDivisible {
                    term: MonomialDisplay {
                        vars: &self.vars,
                        mono: m,
                    }
                    .to_string(),
                    var: self.vars.name(i).to_string(),
                    exponent: m.0[i],
                });
            }
            terms.insert(Monomial(m.0.iter().map(|e| e / p).collect()), c);
        }
        Ok(Self::from_map(self.p, &self.vars, terms))
    }

    /// Canonical lift with residues in `0..p`.
    pub fn lift(&self) -> LaurentPoly2 {
        Laurent::from_map(self.p, &self.vars, self.terms.clone())
    }

    /// True when the polynomial is invertible in its ring: a single monomial
    /// involving inverted variables only.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
            && self.terms.keys().next().is_some_and(|m| {
                m.0.iter()
                    .enumerate()
                    .all(|(i, &e)| e == 0 || self.vars.is_inverted(i))
            })
    }
}

impl Laurent<ModP2> {
    pub fn reduce(&self) -> LaurentPoly {
        let p = self.p;
        let terms = self
            .terms
            .iter()
            .filter(|(_, &c)| c % p != 0)
            .map(|(m, &c)| (m.clone(), c % p))
            .collect();
        Laurent::from_map(p, &self.vars, terms)
    }

    /// `q / p`, for `q` with every coefficient divisible by `p`.
    pub fn divide_by_p(&self) -> Result<LaurentPoly> {
        let p = self.p;
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            if c % p != 0 {
                let mono = MonomialDisplay {
                    vars: &self.vars,
                    mono: m,
                };
                let term = if m.is_one() {
                    c.to_string()
                } else {
                    format!("{c}*{mono}")
                };
                return Err(Error::NotDivisibleByP { term });
            }
            terms.insert(m.clone(), c / p);
        }
        Ok(Laurent::from_map(p, &self.vars, terms))
    }

    /// Inverse of a unit of shape `m * (1 + p x)`.
    pub fn invert_unit(&self) -> Result<Self> {
        self.try_inverse()
    }
}

impl<C: Coefficients> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl<C: Coefficients> fmt::Debug for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

impl<C: Coefficients> Add for &Laurent<C> {
    type Output = Laurent<C>;

    fn add(self, rhs: Self) -> Laurent<C> {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<C: Coefficients> Sub for &Laurent<C> {
    type Output = Laurent<C>;

    fn sub(self, rhs: Self) -> Laurent<C> {
        self + &(-rhs)
    }
}

impl<C: Coefficients> Neg for &Laurent<C> {
    type Output = Laurent<C>;

    fn neg(self) -> Laurent<C> {
        let m = self.modulus();
        let terms = self.terms.iter().map(|(k, &c)| (k.clone(), m - c)).collect();
        Laurent::from_map(self.p, &self.vars, terms)
    }
}

impl<C: Coefficients> Mul for &Laurent<C> {
    type Output = Laurent<C>;

    fn mul(self, rhs: Self) -> Laurent<C> {
        self.assert_compatible(rhs);
        let m = self.modulus();
        let mut out = Laurent::zero(self.p, &self.vars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb % m);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident::$f:ident),*) => {$(
        impl<C: Coefficients> $tr for Laurent<C> {
            type Output = Laurent<C>;
            fn $f(self, rhs: Self) -> Laurent<C> {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl<C: Coefficients> Neg for Laurent<C> {
    type Output = Laurent<C>;

    fn neg(self) -> Laurent<C> {
        -&self
    }
}
