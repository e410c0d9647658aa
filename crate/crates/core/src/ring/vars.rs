use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Ordered coordinate names plus the subset on which negative exponents are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSpec {
    names: Vec<String>,
    inverted: Vec<bool>,
}

impl VarSpec {
    pub fn new<S: AsRef<str>>(names: &[S], inverted: &[S]) -> Result<Arc<Self>> {
        let names: Vec<String> = names.iter().map(|n| n.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !is_identifier(n) {
                return Err(Error::VarMismatch(format!("invalid variable name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::VarMismatch(format!("duplicate variable `{n}`")));
            }
        }
        let mut flags = vec![false; names.len()];
        for inv in inverted {
            let inv = inv.as_ref();
            let idx = names
                .iter()
                .position(|n| n == inv)
                .ok_or_else(|| Error::VarMismatch(format!("inverted variable `{inv}` is not declared")))?;
            flags[idx] = true;
        }
        Ok(Arc::new(Self {
            names,
            inverted: flags,
        }))
    }

    /// Polynomial ring: nothing inverted.
    pub fn polynomial<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        Self::new::<S>(names, &[])
    }

    /// Laurent ring: every variable inverted.
    pub fn laurent<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        Self::new(names, names)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_inverted(&self, i: usize) -> bool {
        self.inverted[i]
    }

    pub fn inverted_names(&self) -> Vec<String> {
        self.names
            .iter()
            .zip(&self.inverted)
            .filter(|(_, &inv)| inv)
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Same names, with `extra` additionally inverted.
    pub fn localized<S: AsRef<str>>(&self, extra: &[S]) -> Result<Arc<Self>> {
        let mut inv = self.inverted_names();
        inv.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Self::new(&self.names, &inv)
    }

    pub(crate) fn check_exponents(&self, exps: &[i32]) -> Result<()> {
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !self.inverted[i] {
                return Err(Error::NegativeExponent {
                    var: self.names[i].clone(),
                });
            }
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub(crate) SmallVec<[i32; 4]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    /// Sum of absolute exponents; the size measure used for degree boxes.
    pub fn abs_degree(&self) -> u64 {
        self.0.iter().map(|&e| e.unsigned_abs() as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct MonomialDisplay<'a> {
    pub vars: &'a VarSpec,
    pub mono: &'a Monomial,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(self.vars.name(i))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}
