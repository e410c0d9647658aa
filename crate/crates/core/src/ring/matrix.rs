use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::poly::LaurentPoly;
use super::vars::VarSpec;
use crate::error::{Error, Result};

/// Dense matrix of chart functions over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u64,
    vars: Arc<VarSpec>,
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl Matrix {
    pub fn zeros(p: u64, vars: &Arc<VarSpec>, rows: usize, cols: usize) -> Self {
        Self {
            p,
            vars: vars.clone(),
            rows,
            cols,
            entries: vec![LaurentPoly::zero(p, vars); rows * cols],
        }
    }

    pub fn identity(p: u64, vars: &Arc<VarSpec>, n: usize) -> Self {
        let mut m = Self::zeros(p, vars, n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one(p, vars));
        }
        m
    }

    /// Elementary matrix `E_{ij}` (zero-based).
    pub fn unit(p: u64, vars: &Arc<VarSpec>, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(p, vars, n, n);
        m.set(i, j, LaurentPoly::one(p, vars));
        m
    }

    pub fn from_rows(p: u64, vars: &Arc<VarSpec>, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::Dimension("matrices must be non-empty".into()));
        }
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            for e in row {
                if e.p() != p || e.vars().as_ref() != vars.as_ref() {
                    return Err(Error::VarMismatch(
                        "matrix entries over different rings".into(),
                    ));
                }
                entries.push(e);
            }
        }
        Ok(Self {
            p,
            vars: vars.clone(),
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    /// Parses a row-major list of `rows * cols` polynomial strings.
    pub fn parse<S: AsRef<str>>(p: u64, vars: &Arc<VarSpec>, rows: usize, cols: usize, entries: &[S]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let entries = entries
            .iter()
            .map(|e| LaurentPoly::parse(e.as_ref(), p, vars))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            vars: vars.clone(),
            rows,
            cols,
            entries,
        })
    }

    /// Parses a square matrix from a row-major list.
    pub fn parse_square<S: AsRef<str>>(p: u64, vars: &Arc<VarSpec>, entries: &[S]) -> Result<Self> {
        let n = (entries.len() as f64).sqrt() as usize;
        if n * n != entries.len() {
            return Err(Error::Dimension(format!("{} entries do not form a square matrix", entries.len())));
        }
        Self::parse(p, vars, n, n, entries)
    }

    pub fn from_fn(
        p: u64,
        vars: &Arc<VarSpec>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> LaurentPoly,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            p,
            vars: vars.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn vars(&self) -> &Arc<VarSpec> {
        &self.vars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<LaurentPoly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// First nonzero entry, for witnesses.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &LaurentPoly)> {
        self.entries
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_zero())
            .map(|(k, e)| (k / self.cols, k % self.cols, e))
    }

    pub fn max_abs_degree(&self) -> u64 {
        self.entries
            .iter()
            .map(LaurentPoly::max_abs_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Self {
        Self {
            p: self.p,
            vars: self.vars.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Entry-wise fallible map; the results must share `target`.
    pub fn try_map(
        &self,
        target: &Arc<VarSpec>,
        f: impl Fn(&LaurentPoly) -> Result<LaurentPoly>,
    ) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p: self.p,
            vars: target.clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: u64) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn scale_poly(&self, f: &LaurentPoly) -> Self {
        self.map(|e| e * f)
    }

    pub fn derivative(&self, i: usize) -> Self {
        self.map(|e| e.derivative(i))
    }

    pub fn frobenius(&self) -> Self {
        self.map(LaurentPoly::frobenius)
    }

    pub fn frobenius_root(&self) -> Result<Self> {
        self.try_map(&self.vars.clone(), LaurentPoly::frobenius_root)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, &self.vars, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, n: usize) -> Matrix {
        let mut acc = Matrix::identity(self.p, &self.vars, self.rows);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> LaurentPoly {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.minor_det(0, &idx)
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> LaurentPoly {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = LaurentPoly::zero(self.p, &self.vars);
        for (k, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = e * &self.minor_det(row + 1, &rest);
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }

    /// Inverse of a matrix whose determinant is a unit of the chart ring.
    pub fn inverse(&self) -> Result<Matrix> {
        let det = self.det();
        if !det.is_unit() {
            return Err(Error::NotAUnit(format!("determinant {det}")));
        }
        let det_inv = det.try_inverse()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Matrix::from_fn(self.p, &self.vars, 1, 1, |_, _| det_inv.clone()));
        }
        let out = Matrix::from_fn(self.p, &self.vars, n, n, |i, j| {
            // adj(M)_{ij} = (-1)^{i+j} det(M without row j, column i)
            let sub = Matrix::from_fn(self.p, &self.vars, n - 1, n - 1, |a, b| {
                let r = if a < j { a } else { a + 1 };
                let c = if b < i { b } else { b + 1 };
                self.get(r, c).clone()
            });
            let cof = sub.det();
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            &cof * &det_inv
        });
        Ok(out)
    }

    /// Conjugation `T M T^{-1}`.
    pub fn conjugate(&self, t: &Matrix, t_inv: &Matrix) -> Matrix {
        &(t * self) * t_inv
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            entries,
            ..self.clone_shape()
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            entries,
            ..self.clone_shape()
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.map(|e| -e)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        Matrix::from_fn(self.p, &self.vars, self.rows, rhs.cols, |i, j| {
            let mut acc = LaurentPoly::zero(self.p, &self.vars);
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = &acc + &(a * b);
                }
            }
            acc
        })
    }
}

impl Matrix {
    fn clone_shape(&self) -> Matrix {
        Matrix {
            p: self.p,
            vars: self.vars.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> Arc<VarSpec> {
        VarSpec::new(&["t"], &[]).unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let v = v();
        let t = LaurentPoly::var(5, &v, 0);
        let one = LaurentPoly::one(5, &v);
        let zero = LaurentPoly::zero(5, &v);
        let m = Matrix::from_rows(5, &v, vec![vec![one.clone(), t.clone()], vec![zero, one]]).unwrap();
        assert!(m.det().is_one());
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(inv.get(0, 1), &-&t);

        let singular = Matrix::from_rows(5, &v, vec![vec![t.clone()]]).unwrap();
        assert!(singular.inverse().is_err());
    }

    #[test]
    fn three_by_three_inverse() {
        let v = v();
        let p = 7;
        let t = LaurentPoly::var(p, &v, 0);
        let mut m = Matrix::identity(p, &v, 3);
        m.set(0, 1, t.clone());
        m.set(1, 2, t.pow(2));
        m.set(0, 2, LaurentPoly::constant(p, &v, 3));
        m.set(2, 2, LaurentPoly::constant(p, &v, 2));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert!((&inv * &m).is_identity());
    }
}
