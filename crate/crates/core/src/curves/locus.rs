//! The surface swept by curves meeting the axis Γ₀(0) and a second curve
//! Γ_{y₀}(t₀(I+t₀C)y₀), which crosses the axis at height t₀.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CurveFamily, CurveParams};
use crate::error::{Error, Result};
use crate::numeric::{Matrix, Scalar};

/// Curve meeting the axis at height s and the second curve at height u:
/// y = (t₀−u)/(s−u) (I+(s+u)C)⁻¹(I+(t₀+u)C) y₀ and ω = s(I+sC) y.
pub fn locus_generating_curve<T: Scalar>(
    f: &CurveFamily<T>,
    y0: &[T],
    t0: &T,
    u: &T,
    s: &T,
) -> Result<CurveParams<T>> {
    if s == u {
        return Err(Error::SingularConfiguration("s = u".into()));
    }
    let d = f.c.dim();
    if y0.len() != d {
        return Err(Error::DimensionMismatch(format!("y0 has length {} for C of dim {d}", y0.len())));
    }
    let id = Matrix::<T>::identity(d);
    let shifted = |h: T| id.try_add(&f.c.scale(&h)).expect("same dim");
    let inv = shifted(s.clone() + u.clone())
        .inverse()
        .map_err(|_| Error::SingularConfiguration("I + (s+u)C is singular".into()))?;
    let factor = (t0.clone() - u.clone()) / (s.clone() - u.clone());
    let y = inv
        .try_mul(&shifted(t0.clone() + u.clone()))?
        .mul_vec(y0)?
        .into_iter()
        .map(|x| x * factor.clone())
        .collect::<Vec<_>>();
    let omega = shifted(s.clone())
        .mul_vec(&y)?
        .into_iter()
        .map(|x| x * s.clone())
        .collect();
    Ok(CurveParams { y, omega })
}

/// Point at height t on the generating curve with parameters (u, s).
pub fn locus_point<T: Scalar>(
    f: &CurveFamily<T>,
    y0: &[T],
    t0: &T,
    u: &T,
    s: &T,
    t: &T,
) -> Result<Vec<T>> {
    let p = locus_generating_curve(f, y0, t0, u, s)?;
    let mut x = f.slice_point(&p, t);
    x.push(t.clone());
    Ok(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyReport {
    pub omega_one_param: bool,
    pub y_one_param: bool,
    /// Largest relative distance of a sampled centre ω from span{(I+t₀C)y₀}.
    pub max_line_residual: f64,
    pub max_y_residual: f64,
    /// Two sampled centres (indices) and the smallest relative distance any
    /// line through the origin can achieve on both of them.
    pub witness: Option<(usize, usize, f64)>,
    pub samples: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative distance of v from span{dir}.
fn line_residual(v: &[f64], dir: &[f64]) -> f64 {
    let nv = norm(v);
    let nd = norm(dir);
    if nv == 0.0 || nd == 0.0 {
        return 0.0;
    }
    let c: f64 = v.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / (nd * nd);
    let r: Vec<f64> = v.iter().zip(dir).map(|(a, b)| a - c * b).collect();
    norm(&r) / nv
}

/// Best pair against the first nonzero point: returns (i, j, sin(θ/2)) where
/// θ is the angle between the lines through the two points, if the value
/// reaches `threshold`.
pub fn collinearity_witness(points: &[Vec<f64>], threshold: f64) -> Option<(usize, usize, f64)> {
    let a = points.iter().position(|p| norm(p) > 0.0)?;
    let pa = &points[a];
    let mut best: Option<(usize, usize, f64)> = None;
    for (j, p) in points.iter().enumerate() {
        if j == a || norm(p) == 0.0 {
            continue;
        }
        let sin = line_residual(p, pa).min(1.0);
        let theta = sin.asin();
        let v = (theta / 2.0).sin();
        if best.is_none_or(|b| v > b.2) {
            best = Some((a, j, v));
        }
    }
    best.filter(|b| b.2 >= threshold)
}

/// Samples `trials` parameter pairs (u, s) with |s − u| ≥ 1/20 and tests
/// whether the centres ω stay on the line ω = r(I+t₀C)y₀ and whether the
/// directions y stay on a single line through the origin.
pub fn locus_dichotomy_test(
    f: &CurveFamily<f64>,
    y0: &[f64],
    t0: f64,
    trials: usize,
    seed: u64,
) -> Result<DichotomyReport> {
    const TOL: f64 = 1e-9;
    let d = f.c.dim();
    let line: Vec<f64> = Matrix::identity(d).try_add(&f.c.scale(&t0))?.mul_vec(y0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omegas = Vec::with_capacity(trials);
    let mut ys = Vec::with_capacity(trials);
    while omegas.len() < trials {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let s: f64 = rng.gen_range(-1.0..=1.0);
        if (s - u).abs() < 0.05 {
            continue;
        }
        let p = locus_generating_curve(f, y0, &t0, &u, &s)?;
        omegas.push(p.omega);
        ys.push(p.y);
    }
    let max_line_residual = omegas.iter().map(|w| line_residual(w, &line)).fold(0.0, f64::max);

    // best-fit line for the normalised directions
    let mut moment = DMatrix::<f64>::zeros(d, d);
    for y in &ys {
        let ny = norm(y);
        if ny == 0.0 {
            continue;
        }
        let v = DMatrix::from_column_slice(d, 1, &y.iter().map(|x| x / ny).collect::<Vec<_>>());
        moment += &v * v.transpose();
    }
    let eig = SymmetricEigen::new(moment);
    let top = eig.eigenvalues.iamax();
    let dir: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
    let max_y_residual = ys.iter().map(|y| line_residual(y, &dir)).fold(0.0, f64::max);

    Ok(DichotomyReport {
        omega_one_param: max_line_residual <= TOL,
        y_one_param: max_y_residual <= TOL,
        max_line_residual,
        max_y_residual,
        witness: collinearity_witness(&omegas, 0.01),
        samples: trials,
    })
}
