use super::matrix::Matrix;
use super::prime::PrimeContext;
use crate::error::{Error, Result};

/// Checks `m^n = 0`, returning the first nonzero entry of `m^n` otherwise.
pub fn check_nilpotent(m: &Matrix, n: usize) -> Result<()> {
    let power = m.pow(n);
    match power.first_nonzero() {
        None => Ok(()),
        Some((row, col, entry)) => Err(Error::NilpotencyViolation {
            power: n,
            row,
            col,
            entry: entry.to_string(),
        }),
    }
}

/// Truncated exponential `sum_{i=0}^{p-2} M^i / i!` for `M^{p-1} = 0`.
///
/// The `i = p - 1` term of the full sum vanishes under the precondition, so
/// the `(p-1)!` denominator never appears.
pub fn trunc_exp(m: &Matrix, ctx: &PrimeContext) -> Result<Matrix> {
    assert!(m.is_square(), "exponential of a non-square matrix");
    let p = ctx.p() as usize;
    check_nilpotent(m, p - 1)?;
    let mut acc = Matrix::identity(m.p(), m.vars(), m.rows());
    let mut power = acc.clone();
    for i in 1..=p - 2 {
        power = &power * m;
        if power.is_zero() {
            break;
        }
        acc = &acc + &power.scale(ctx.inv_factorial(i));
    }
    Ok(acc)
}
