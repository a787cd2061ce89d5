//! Exact scalars, small dense matrices, polynomials and polynomial matrices.

mod json;
mod matrix;
mod poly;
mod polymatrix;
mod scalar;

use nalgebra::{Complex, DMatrix};

pub use json::{matrix_from_json, matrix_to_json, rational_from_json, vector_from_json, vector_to_json};
pub use matrix::{Matrix, MAX_DIM};
pub use poly::{bisect, Polynomial};
pub use polymatrix::PolyMatrix;
pub use scalar::{format_rational, lcm_denominators, parse_rational, rat, Rational, Scalar};

use crate::error::{Error, Result};

/// The l×l companion matrix with `coeffs` (c₁..c_l) down the first column and
/// ones on the superdiagonal.
pub fn companion<T: Scalar>(coeffs: &[T], l: usize) -> Result<Matrix<T>> {
    if l == 0 || coeffs.len() != l {
        return Err(Error::InvalidInput(format!(
            "companion of size {l} needs {l} coefficients, got {}",
            coeffs.len()
        )));
    }
    let mut m = Matrix::zeros(l);
    for (i, c) in coeffs.iter().enumerate() {
        m.set(i, 0, c.clone());
        if i + 1 < l {
            m.set(i, i + 1, T::one());
        }
    }
    Ok(m)
}

/// `(true, Some(k))` when k is the least power with C^k = 0.
pub fn nilpotency<T: Scalar>(c: &Matrix<T>) -> (bool, Option<usize>) {
    let mut p = c.clone();
    for k in 1..=c.dim() {
        if p.is_zero() {
            return (true, Some(k));
        }
        p = &p * c;
    }
    (false, None)
}

/// Eigenvalues in double precision, sorted by real then imaginary part.
/// Only for screening; exact identities never depend on them.
pub fn eigenvalues_float<T: Scalar>(c: &Matrix<T>) -> Vec<Complex<f64>> {
    let n = c.dim();
    let m = DMatrix::from_fn(n, n, |i, j| c.get(i, j).as_f64());
    let mut ev: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    ev
}

/// Characteristic polynomial det(tI − C), via the polynomial determinant.
pub fn char_poly<T: Scalar>(c: &Matrix<T>) -> Polynomial<T> {
    PolyMatrix::from_matrix_coeffs(&[-c, Matrix::identity(c.dim())])
        .expect("valid dim")
        .det()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn companion_layouts() {
        assert_eq!(companion(&[rat(7, 1)], 1).unwrap(), rm(&[&[7]]));
        assert_eq!(companion(&[rat(3, 1), rat(5, 1)], 2).unwrap(), rm(&[&[3, 1], &[5, 0]]));
        assert_eq!(
            companion(&[rat(1, 1), rat(2, 1), rat(3, 1)], 3).unwrap(),
            rm(&[&[1, 1, 0], &[2, 0, 1], &[3, 0, 0]])
        );
        assert!(companion(&[rat(1, 1)], 2).is_err());
    }

    #[test]
    fn nilpotency_examples() {
        assert_eq!(nilpotency(&rm(&[&[0, 1], &[0, 0]])), (true, Some(2)));
        assert_eq!(nilpotency(&rm(&[&[0, 0], &[1, 0]])), (true, Some(2)));
        assert_eq!(nilpotency(&Matrix::<Rational>::identity(2)), (false, None));
        assert_eq!(nilpotency(&Matrix::<Rational>::zeros(3)), (true, Some(1)));
    }

    #[test]
    fn eigen_examples() {
        let d = Matrix::diagonal(vec![rat(1, 4), rat(-1, 4)]).unwrap();
        let ev = eigenvalues_float(&d);
        assert!((ev[0].re + 0.25).abs() < 1e-12 && (ev[1].re - 0.25).abs() < 1e-12);
        let rot: Matrix<f64> = Matrix::from_rows(vec![vec![2.5, -1.0], vec![1.0, 2.5]]).unwrap();
        let ev = eigenvalues_float(&rot);
        assert!((ev[0].re - 2.5).abs() < 1e-10 && (ev[0].im + 1.0).abs() < 1e-10);
        assert!((ev[1].re - 2.5).abs() < 1e-10 && (ev[1].im - 1.0).abs() < 1e-10);
        let ev = eigenvalues_float(&rm(&[&[0, 1], &[0, 0]]));
        assert!(ev.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn companion_char_poly() {
        // det(tI - C) = t^l - c1 t^{l-1} - ... - c_l
        let c = [rat(2, 1), rat(-1, 3), rat(5, 7)];
        let cp = char_poly(&companion(&c, 3).unwrap());
        assert_eq!(cp, Polynomial::new(vec![rat(-5, 7), rat(1, 3), rat(-2, 1), rat(1, 1)]));
    }
}
