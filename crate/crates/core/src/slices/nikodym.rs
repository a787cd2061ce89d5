use nalgebra::Complex;
use num_traits::Zero;

use super::{cluster_eigenvalues, slice_matrices, HeightsSolution, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{eigenvalues_float, nilpotency, rat, Matrix, Polynomial, Rational, Scalar};

const RANGE_STEP: f64 = 1e-3;
const RESIDUAL_TOL: f64 = 1e-9;

/// ‖X(λ) − T‖∞ for heights (t₀, t₁, t₂), with λ = (t₀−t₂)/(t₀−t₁),
/// evaluated exactly on the rational values of the given floats.
pub fn nikodym_residual(c: &Matrix<Rational>, heights: [f64; 3]) -> Result<f64> {
    let [t0, t1, t2] = heights.map(Rational::of_f64);
    let lambda = (t0.clone() - t2) / (t0.clone() - t1.clone());
    let s = slice_matrices(c, &t0, &t1, &lambda)?;
    let t = s.t.ok_or_else(|| Error::SingularConfiguration("zero height".into()))?;
    Ok((&s.x - &t).norm_inf())
}

fn heights_valid(h: &[f64]) -> bool {
    h.iter().all(|t| t.abs() < 1.0 && *t != 0.0 && t.is_finite())
        && (0..h.len()).all(|i| (i + 1..h.len()).all(|j| (h[i] - h[j]).abs() > 1e-9))
}

/// Newton on (t₁, t₂) at fixed t₀ for −(t₀+t₁+t₂) = σ and c = π·a.
fn continue_heights(t0: f64, mut t1: f64, mut t2: f64, sigma: f64, pi: f64) -> Option<(f64, f64)> {
    for _ in 0..100 {
        let a = t0 * t0 * t2 * t2 + t1 * t1 * t2 * t2 - 2.0 * t0 * t0 * t1 * t1;
        let c = t0 * t2 + t1 * t2 - 2.0 * t0 * t1;
        let f1 = -(t0 + t1 + t2) - sigma;
        let f2 = c - pi * a;
        if f1.abs() < 1e-15 && f2.abs() < 1e-15 {
            return Some((t1, t2));
        }
        let da1 = 2.0 * t1 * t2 * t2 - 4.0 * t0 * t0 * t1;
        let da2 = 2.0 * t0 * t0 * t2 + 2.0 * t1 * t1 * t2;
        let (j11, j12) = (-1.0, -1.0);
        let j21 = (t2 - 2.0 * t0) - pi * da1;
        let j22 = (t0 + t1) - pi * da2;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 {
            return None;
        }
        let d1 = (f1 * j22 - j12 * f2) / det;
        let d2 = (j11 * f2 - j21 * f1) / det;
        t1 -= d1;
        t2 -= d2;
        if !t1.is_finite() || !t2.is_finite() {
            return None;
        }
        if d1.abs() < 1e-16 && d2.abs() < 1e-16 {
            break;
        }
    }
    let a = t0 * t0 * t2 * t2 + t1 * t1 * t2 * t2 - 2.0 * t0 * t0 * t1 * t1;
    let c = t0 * t2 + t1 * t2 - 2.0 * t0 * t1;
    ((t0 + t1 + t2 + sigma).abs() < 1e-12 && (c - pi * a).abs() < 1e-12).then_some((t1, t2))
}

/// A range of t₀ exists when continuation succeeds on both sides.
fn detect_range(c: &Matrix<Rational>, h: [f64; 3], sigma: f64, pi: f64) -> Option<(f64, f64)> {
    let ok = |t0: f64| {
        continue_heights(t0, h[1], h[2], sigma, pi).is_some_and(|(t1, t2)| {
            heights_valid(&[t0, t1, t2])
                && nikodym_residual(c, [t0, t1, t2]).is_ok_and(|r| r <= RESIDUAL_TOL)
        })
    };
    let (lo, hi) = (h[0] - RANGE_STEP, h[0] + RANGE_STEP);
    (ok(lo) && ok(hi)).then_some((lo, hi))
}

fn finish(
    c: &Matrix<Rational>,
    h: [f64; 3],
    branch: &str,
    sigma_pi: Option<(f64, f64)>,
    eigenvalues: Vec<Complex<f64>>,
) -> Result<HeightsSolution> {
    if !heights_valid(&h) {
        return Err(Error::NoSolution("region_violated".into()));
    }
    let residual = nikodym_residual(c, h)?;
    if residual > RESIDUAL_TOL {
        return Err(Error::NoSolution("residual_too_large".into()));
    }
    let range = match sigma_pi {
        Some((s, p)) => detect_range(c, h, s, p),
        None => None,
    };
    Ok(HeightsSolution {
        kind: SolutionKind::Nikodym3,
        heights: h.to_vec(),
        lambda: (h[0] - h[2]) / (h[0] - h[1]),
        mu: None,
        residual,
        range,
        branch: branch.into(),
        eps_interval: None,
        eigenvalues,
    })
}

/// Heights t₀, t₁, t₂ with X(λ) = T for λ = (t₀−t₂)/(t₀−t₁).
///
/// Reason codes on failure: `degenerate`, `unsupported`, `singular`,
/// `too_many_eigenvalues`, `reciprocal_sum_out_of_range`, `region_violated`.
pub fn solve_nikodym_three_slice(c: &Matrix<Rational>) -> Result<HeightsSolution> {
    if !super::check_nondegenerate(c) {
        return Err(Error::NoSolution("degenerate".into()));
    }
    let ev = eigenvalues_float(c);
    let (nil, index) = nilpotency(c);
    if nil && index.is_some_and(|k| k <= 2) {
        return solve_square_zero(c, ev);
    }
    let invertible = !c.det().is_zero();
    let diagonal = (0..c.dim()).all(|i| (0..c.dim()).all(|j| i == j || c.get(i, j).is_zero()));
    if !invertible && !diagonal {
        return Err(Error::NoSolution("unsupported".into()));
    }
    let clusters = cluster_eigenvalues(&ev, 1e-8);
    let (h, k) = match clusters.as_slice() {
        [(h, _)] => (*h, *h),
        [(h, _), (k, _)] => (*h, *k),
        _ => return Err(Error::NoSolution("too_many_eigenvalues".into())),
    };
    if h.norm() < 1e-12 || k.norm() < 1e-12 {
        return Err(Error::NoSolution("singular".into()));
    }
    let sigma = (h.inv() + k.inv()).re;
    let pi = (h * k).re;
    if sigma.abs() >= 3.0 {
        return Err(Error::NoSolution("reciprocal_sum_out_of_range".into()));
    }
    if h.im.abs() > 1e-9 {
        solve_complex(c, h.re, h.im.abs(), sigma, pi, ev)
    } else {
        solve_real(c, h.re, k.re, sigma, pi, ev)
    }
}

/// C² = 0: X(λ) and T are parallel, equal when λ/(1−λ) = t₀/t₁.
fn solve_square_zero(c: &Matrix<Rational>, ev: Vec<Complex<f64>>) -> Result<HeightsSolution> {
    let (t0, t1, lambda) = (rat(1, 3), rat(2, 3), rat(1, 3));
    let s = slice_matrices(c, &t0, &t1, &lambda)?;
    let t = s.t.expect("nonzero heights");
    let residual = (&s.x - &t).norm_inf();
    let t2 = (rat(1, 1) - lambda.clone()) * t0.clone() + lambda.clone() * t1.clone();
    let h = [t0.as_f64(), t1.as_f64(), t2.as_f64()];
    // the same ratio t₁ = 2t₀, λ = 1/3 works for every t₀ ∈ (0, 1/2)
    let range = Some((h[0] - RANGE_STEP, h[0] + RANGE_STEP));
    Ok(HeightsSolution {
        kind: SolutionKind::Nikodym3,
        heights: h.to_vec(),
        lambda: lambda.as_f64(),
        mu: None,
        residual,
        range,
        branch: "square_zero".into(),
        eps_interval: None,
        eigenvalues: ev,
    })
}

fn solve_complex(
    c: &Matrix<Rational>,
    alpha: f64,
    beta: f64,
    sigma: f64,
    pi: f64,
    ev: Vec<Complex<f64>>,
) -> Result<HeightsSolution> {
    let r = alpha * alpha + beta * beta;
    let disc = 3.0 * alpha * alpha - beta * beta;
    if disc > 0.0 {
        let t0 = disc.sqrt() / r;
        let h = [t0, -t0, -2.0 * alpha / r];
        if let Ok(sol) = finish(c, h, "complex_a", Some((sigma, pi)), ev.clone()) {
            return Ok(sol);
        }
    }
    // t₂ = −t₀, t₁ = −2α/r and r²t₀³ + (β² − 3α²)t₀ − 6α = 0
    let t1 = -2.0 * alpha / r;
    let cubic = Polynomial::new(vec![-6.0 * alpha, beta * beta - 3.0 * alpha * alpha, 0.0, r * r]);
    for t0 in cubic.real_roots_in(-1.0, 1.0) {
        let h = [t0, t1, -t0];
        if let Ok(sol) = finish(c, h, "complex_b", Some((sigma, pi)), ev.clone()) {
            return Ok(sol);
        }
    }
    Err(Error::NoSolution("region_violated".into()))
}

/// Lower boundary of the (b, c) region.
fn c_lower(b: f64) -> f64 {
    let root = (7.0 * b.powi(4) + 28.0 * b.powi(3) + 52.0 * b * b + 48.0 * b + 9.0).sqrt();
    (-6.0 - 4.0 * b - 2.0 * b * b + 2.0 * root) / (2.0 * (b * b + 2.0 * b + 3.0))
}

fn c_upper(b: f64) -> f64 {
    2.0 * b / (1.0 + b)
}

/// Q(X) = (2b²−b²c²−c²)X² + (b+c+1)(2b−bc−c)X + (2b−bc−c); returns X⁺.
fn x_plus(b: f64, c: f64) -> Option<f64> {
    let qa = 2.0 * b * b - b * b * c * c - c * c;
    let qd = 2.0 * b - b * c - c;
    let qb = (b + c + 1.0) * qd;
    let disc = qb * qb - 4.0 * qa * qd;
    if disc < 0.0 || qa == 0.0 {
        return None;
    }
    Some((-qb + disc.sqrt()) / (2.0 * qa))
}

fn f_region(b: f64, c: f64) -> Option<f64> {
    x_plus(b, c).map(|x| -(b + c + 1.0) * x)
}

/// Real eigenvalues h, k of opposite sign: walk b over a grid and bisect
/// f(b, ·) = 1 + h/k in c between the region's boundary curves.
fn solve_real(
    c: &Matrix<Rational>,
    h: f64,
    k: f64,
    sigma: f64,
    pi: f64,
    ev: Vec<Complex<f64>>,
) -> Result<HeightsSolution> {
    if h * k >= 0.0 {
        return Err(Error::NoSolution("region_violated".into()));
    }
    let (h, k) = if h.abs() <= k.abs() { (h, k) } else { (k, h) };
    let target = 1.0 + h / k;
    let bs = (1..100).rev().map(|i| i as f64 / 100.0);
    for b in bs {
        let (lo, hi) = (c_lower(b), c_upper(b));
        if lo >= hi {
            continue;
        }
        let pad = 1e-12 * (hi - lo);
        let (clo, chi) = (lo + pad, hi - pad);
        let g = |cc: f64| f_region(b, cc).map(|f| f - target);
        let (Some(glo), Some(ghi)) = (g(clo), g(chi)) else { continue };
        if glo <= 0.0 || ghi >= 0.0 {
            continue;
        }
        let cc = crate::numeric::bisect(|x| g(x).unwrap_or(f64::NAN), clo, chi, glo);
        let Some(xp) = x_plus(b, cc) else { continue };
        let t = xp / h;
        let heights = [t, b * t, cc * t];
        if let Ok(sol) = finish(c, heights, "real", Some((sigma, pi)), ev.clone()) {
            return Ok(sol);
        }
    }
    Err(Error::NoSolution("region_violated".into()))
}
