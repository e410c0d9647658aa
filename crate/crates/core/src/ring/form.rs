use std::fmt;
use std::sync::Arc;

use super::matrix::Matrix;
use super::poly::LaurentPoly;
use super::vars::VarSpec;

/// A 1-form `sum_i a_i dt_i` on a chart.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OneForm {
    vars: Arc<VarSpec>,
    coeffs: Vec<LaurentPoly>,
}

/// A section `sum_i a_i F*dt_i` of the Frobenius pullback of the cotangent sheaf.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FOneForm {
    vars: Arc<VarSpec>,
    coeffs: Vec<LaurentPoly>,
}

macro_rules! form_common {
    ($ty:ident, $basis:literal) => {
        impl $ty {
            pub fn new(vars: &Arc<VarSpec>, coeffs: Vec<LaurentPoly>) -> Self {
                assert_eq!(coeffs.len(), vars.len(), "one coefficient per coordinate");
                Self {
                    vars: vars.clone(),
                    coeffs,
                }
            }

            pub fn zero(p: u64, vars: &Arc<VarSpec>) -> Self {
                Self::new(vars, vec![LaurentPoly::zero(p, vars); vars.len()])
            }

            pub fn vars(&self) -> &Arc<VarSpec> {
                &self.vars
            }

            pub fn coeff(&self, i: usize) -> &LaurentPoly {
                &self.coeffs[i]
            }

            pub fn coeffs(&self) -> &[LaurentPoly] {
                &self.coeffs
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.iter().all(LaurentPoly::is_zero)
            }

            pub fn add(&self, other: &Self) -> Self {
                Self::new(
                    &self.vars,
                    self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
                )
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self::new(
                    &self.vars,
                    self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
                )
            }

            pub fn scale(&self, g: &LaurentPoly) -> Self {
                Self::new(&self.vars, self.coeffs.iter().map(|a| a * g).collect())
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut first = true;
                for (i, c) in self.coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        f.write_str(" + ")?;
                    }
                    first = false;
                    if c.num_terms() > 1 {
                        write!(f, "({c}) ")?;
                    } else {
                        write!(f, "{c} ")?;
                    }
                    write!(f, concat!($basis, "{}"), self.vars.name(i))?;
                }
                if first {
                    f.write_str("0")?;
                }
                Ok(())
            }
        }
    };
}

form_common!(OneForm, "d");
form_common!(FOneForm, "F*d");

impl OneForm {
    /// Exterior derivative of a function.
    pub fn exact(f: &LaurentPoly) -> Self {
        let n = f.vars().len();
        Self::new(f.vars(), (0..n).map(|i| f.derivative(i)).collect())
    }
}

/// Matrix-valued 1-form `sum_i M_i dt_i`; the local shape of Higgs fields,
/// connection matrices and p-curvatures.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MatrixForm {
    components: Vec<Matrix>,
}

impl MatrixForm {
    pub fn new(components: Vec<Matrix>) -> Self {
        assert!(!components.is_empty(), "a chart has at least one coordinate");
        let n = components[0].rows();
        assert!(
            components.iter().all(|m| m.rows() == n && m.cols() == n),
            "components must be square of equal size"
        );
        Self { components }
    }

    pub fn zero(p: u64, vars: &Arc<VarSpec>, rank: usize) -> Self {
        Self::new(vec![Matrix::zeros(p, vars, rank, rank); vars.len()])
    }

    pub fn rank(&self) -> usize {
        self.components[0].rows()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn p(&self) -> u64 {
        self.components[0].p()
    }

    pub fn vars(&self) -> &Arc<VarSpec> {
        self.components[0].vars()
    }

    pub fn component(&self, i: usize) -> &Matrix {
        &self.components[i]
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Matrix::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix) -> Self {
        Self::new(self.components.iter().map(f).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        self.map(|m| -m)
    }

    pub fn frobenius(&self) -> Self {
        self.map(Matrix::frobenius)
    }

    pub fn conjugate(&self, t: &Matrix, t_inv: &Matrix) -> Self {
        self.map(|m| m.conjugate(t, t_inv))
    }

    pub fn max_abs_degree(&self) -> u64 {
        self.components
            .iter()
            .map(Matrix::max_abs_degree)
            .max()
            .unwrap_or(0)
    }

    /// Contract `sum_j M_j (x) w_j` against scalar weights: `sum_j w_j M_j`.
    pub fn contract(&self, weights: &[LaurentPoly]) -> Matrix {
        assert_eq!(weights.len(), self.components.len());
        let mut acc = Matrix::zeros(self.p(), self.vars(), self.rank(), self.rank());
        for (m, w) in self.components.iter().zip(weights) {
            if !w.is_zero() {
                acc = &acc + &m.scale_poly(w);
            }
        }
        acc
    }
}

impl fmt::Display for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m} d{}", m.vars().name(i))?;
        }
        Ok(())
    }
}
