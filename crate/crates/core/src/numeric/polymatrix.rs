use std::collections::HashMap;

use super::matrix::{Matrix, MAX_DIM};
use super::poly::Polynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Square matrix with polynomial entries.
#[derive(Clone, PartialEq)]
pub struct PolyMatrix<T> {
    dim: usize,
    entries: Vec<Polynomial<T>>,
}

impl<T: Scalar> std::fmt::Debug for PolyMatrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.dim)).finish()
    }
}

impl<T: Scalar> PolyMatrix<T> {
    pub fn from_vec(dim: usize, entries: Vec<Polynomial<T>>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("matrix dim {dim} not in 1..={MAX_DIM}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(PolyMatrix { dim, entries })
    }

    /// Σ_k t^k · coeffs[k], all matrices of one dimension.
    pub fn from_matrix_coeffs(coeffs: &[Matrix<T>]) -> Result<Self> {
        let dim = coeffs.first().ok_or_else(|| Error::InvalidInput("no coefficients".into()))?.dim();
        if coeffs.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch("coefficient matrices differ in size".into()));
        }
        let entries = (0..dim * dim)
            .map(|idx| {
                Polynomial::new(coeffs.iter().map(|m| m.get(idx / dim, idx % dim).clone()).collect())
            })
            .collect();
        Self::from_vec(dim, entries)
    }

    /// W − tI − t²C, the matrix whose determinant governs the worst-case sets.
    pub fn w_pencil(w: &Matrix<T>, c: &Matrix<T>) -> Result<Self> {
        let dim = w.dim();
        Self::from_matrix_coeffs(&[w.clone(), -&Matrix::identity(dim), -c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial<T> {
        &self.entries[i * self.dim + j]
    }

    pub fn eval(&self, t: &T) -> Matrix<T> {
        Matrix::from_vec(self.dim, self.entries.iter().map(|p| p.eval(t)).collect())
            .expect("valid dim")
    }

    /// Fraction-free determinant: expansion along rows with memoisation on the
    /// set of used columns. Only ring operations are performed.
    pub fn det(&self) -> Polynomial<T> {
        let mut memo: HashMap<u32, Polynomial<T>> = HashMap::new();
        self.minor(0, 0, &mut memo)
    }

    fn minor(&self, row: usize, used: u32, memo: &mut HashMap<u32, Polynomial<T>>) -> Polynomial<T> {
        if row == self.dim {
            return Polynomial::constant(T::one());
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = Polynomial::zero();
        let mut free_before = 0usize;
        for col in 0..self.dim {
            if used & (1 << col) != 0 {
                continue;
            }
            let a = self.get(row, col);
            if !a.is_zero() {
                let sub = self.minor(row + 1, used | (1 << col), memo);
                let term = a * &sub;
                acc = if free_before.is_multiple_of(2) { &acc + &term } else { &acc - &term };
            }
            free_before += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
}
