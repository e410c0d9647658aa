//! Exact arithmetic: Laurent polynomials over `Z/p` and `Z/p^2`, matrices
//! over them, and the truncated exponential.

mod exp;
mod form;
pub mod linalg;
mod matrix;
mod parse;
mod poly;
mod prime;
mod vars;

pub use exp::{check_nilpotent, trunc_exp};
pub use form::{FOneForm, MatrixForm, OneForm};
pub use matrix::Matrix;
pub use poly::{Coefficients, Laurent, LaurentPoly, LaurentPoly2, ModP, ModP2};
pub use prime::{is_prime, PrimeContext};
pub(crate) use prime::mod_inv;
pub use vars::{Monomial, VarSpec};
