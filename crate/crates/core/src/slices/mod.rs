//! Slice matrices X(λ), T, M, height solvers and exponent calculators.

mod exponents;
mod kakeya;
mod nikodym;

pub use exponents::{
    companion_blocks, dimension_lower_bound, epsilon_fixed_point, find_companion_permutation,
    genfail_exponents, iterate_epsilon, permute_matrix, w_matrix, CompanionBlock,
    GenfailExponents,
};
pub use kakeya::{kak4_sum, quartic_q, quartic_q_complex, quartic_q_sp, solve_kakeya_four_slice};
pub use nikodym::{nikodym_residual, solve_nikodym_three_slice};

use nalgebra::Complex;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{Matrix, PolyMatrix, Scalar};

/// The matrices relating two height slices t₀, t₁ and the intermediate
/// slice at (1−λ)t₀ + λt₁.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMatrices<T: Scalar> {
    pub x: Matrix<T>,
    /// Undefined when t₀ or t₁ is zero.
    pub t: Option<Matrix<T>>,
    pub m: Matrix<T>,
    pub t0: T,
    pub t1: T,
    pub lambda: T,
}

/// M = (t₁−t₀)C(I+(t₀+t₁)C)⁻¹.
pub fn m_matrix<T: Scalar>(c: &Matrix<T>, t0: &T, t1: &T) -> Result<Matrix<T>> {
    let id = Matrix::identity(c.dim());
    let inner = (&id + &c.scale(&(t0.clone() + t1.clone())))
        .inverse()
        .map_err(|_| Error::SingularConfiguration("I + (t0+t1)C is singular".into()))?;
    Ok((c * &inner).scale(&(t1.clone() - t0.clone())))
}

/// X(λ) = λ/(1−λ) · (I+λM)⁻¹(I−(1−λ)M).
pub fn x_matrix<T: Scalar>(m: &Matrix<T>, lambda: &T) -> Result<Matrix<T>> {
    let one = T::one();
    if *lambda == one || lambda.is_zero() {
        return Err(Error::SingularConfiguration("lambda must differ from 0 and 1".into()));
    }
    let id = Matrix::identity(m.dim());
    let left = (&id + &m.scale(lambda))
        .inverse()
        .map_err(|_| Error::SingularConfiguration("I + lambda M is singular".into()))?;
    let right = &id - &m.scale(&(one.clone() - lambda.clone()));
    Ok((&left * &right).scale(&(lambda.clone() / (one - lambda.clone()))))
}

/// T = (t₀/t₁)(I+t₀C)(I+t₁C)⁻¹.
pub fn t_matrix<T: Scalar>(c: &Matrix<T>, t0: &T, t1: &T) -> Result<Matrix<T>> {
    if t0.is_zero() || t1.is_zero() {
        return Err(Error::SingularConfiguration("T needs nonzero heights".into()));
    }
    let id = Matrix::identity(c.dim());
    let a = &id + &c.scale(t0);
    let b = (&id + &c.scale(t1))
        .inverse()
        .map_err(|_| Error::SingularConfiguration("I + t1 C is singular".into()))?;
    Ok((&a * &b).scale(&(t0.clone() / t1.clone())))
}

pub fn slice_matrices<T: Scalar>(c: &Matrix<T>, t0: &T, t1: &T, lambda: &T) -> Result<SliceMatrices<T>> {
    if t0 == t1 {
        return Err(Error::SingularConfiguration("t0 = t1".into()));
    }
    let m = m_matrix(c, t0, t1)?;
    let x = x_matrix(&m, lambda)?;
    let t = if t0.is_zero() || t1.is_zero() { None } else { Some(t_matrix(c, t0, t1)?) };
    Ok(SliceMatrices { x, t, m, t0: t0.clone(), t1: t1.clone(), lambda: lambda.clone() })
}

/// True iff det(I + 2tC) has no zero for t ∈ [−1, 1]. Exact types use a
/// Sturm count; floats bracket the roots numerically.
pub fn check_nondegenerate<T: Scalar>(c: &Matrix<T>) -> bool {
    let id = Matrix::identity(c.dim());
    let p = PolyMatrix::from_matrix_coeffs(&[id, c.scale(&T::from_i64(2))])
        .expect("valid dim")
        .det();
    if T::EXACT {
        p.count_roots_closed(&T::from_i64(-1), &T::one()) == 0
    } else {
        p.to_f64().real_roots_in(-1.0, 1.0).is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Nikodym3,
    Kakeya4,
}

/// Slice heights satisfying an algebraic condition, with residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightsSolution {
    pub kind: SolutionKind,
    /// (t₀, t₁, t₂) for nikodym3, (t₀, t₁) for kakeya4.
    pub heights: Vec<f64>,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub residual: f64,
    /// Interval of t₀ over which solutions persist.
    pub range: Option<(f64, f64)>,
    /// Which construction produced the solution.
    pub branch: String,
    /// For kakeya4: the ε-interval on which the height inequality holds.
    pub eps_interval: Option<(f64, f64)>,
    /// Eigenvalues used by the solver (C for nikodym3, M for kakeya4).
    pub eigenvalues: Vec<Complex<f64>>,
}

impl HeightsSolution {
    pub fn lambda_in_unit_interval(&self) -> bool {
        self.lambda > 0.0 && self.lambda < 1.0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "heights": self.heights,
            "lambda": self.lambda,
            "mu": self.mu,
            "residual": self.residual,
            "range": self.range.map(|(a, b)| vec![a, b]),
            "reason": Value::Null,
            "branch": self.branch,
            "lambda_in_unit_interval": self.lambda_in_unit_interval(),
            "eps_interval": self.eps_interval.map(|(a, b)| vec![a, b]),
        })
    }
}

/// JSON for a failed solve: every field null except the reason code.
pub fn no_solution_json(kind: SolutionKind, reason: &str) -> Value {
    json!({
        "kind": kind,
        "heights": Value::Null,
        "lambda": Value::Null,
        "mu": Value::Null,
        "residual": Value::Null,
        "range": Value::Null,
        "reason": reason,
    })
}

/// Distinct eigenvalues after merging those within `tol`, with multiplicities.
pub(crate) fn cluster_eigenvalues(ev: &[Complex<f64>], tol: f64) -> Vec<(Complex<f64>, usize)> {
    let mut out: Vec<(Complex<f64>, usize)> = Vec::new();
    for z in ev {
        match out.iter_mut().find(|(w, _)| (w - z).norm() <= tol * (1.0 + w.norm())) {
            Some((w, k)) => {
                *w = (*w * (*k as f64) + z) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => out.push((*z, 1)),
        }
    }
    out
}
