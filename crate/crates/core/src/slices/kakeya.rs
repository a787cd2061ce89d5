use nalgebra::Complex;

use super::{cluster_eigenvalues, m_matrix, x_matrix, HeightsSolution, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{bisect, eigenvalues_float, nilpotency, Matrix, Rational, Scalar};

const GRID: usize = 64;
const RESIDUAL_TOL: f64 = 1e-9;

/// q(μ, l, m) in the form quadratic in l.
pub fn quartic_q<T: Scalar>(mu: &T, l: &T, m: &T) -> T {
    let one = T::one();
    let two = T::from_i64(2);
    let mu2 = mu.clone() * mu.clone();
    let f1 = mu2.clone() * m.clone() - mu.clone() * m.clone() + mu.clone() - two.clone();
    let f2 = mu.clone() * m.clone() - mu.clone() + two;
    let lead = mu2 * (one - mu.clone()) * (mu.clone() * m.clone() + T::one());
    -(lead * l.clone() * l.clone()) + mu.clone() * f1.clone() * f2.clone() * l.clone() + f1 * f2
}

/// The same quartic expanded in s = l + m and p = lm.
pub fn quartic_q_sp<T: Scalar>(mu: &T, s: &T, p: &T) -> T {
    let i = |v: i64| T::from_i64(v);
    let c4 = p.clone() * (s.clone() - i(1));
    let c3 = i(2) * p.clone() + s.clone() * (s.clone() - p.clone() - i(1));
    let c2 = s.clone() * (i(4) - s.clone()) - i(1) - i(2) * p.clone();
    let c1 = i(4) * (i(1) - s.clone());
    let c0 = i(-4);
    (((c4 * mu.clone() + c3) * mu.clone() + c2) * mu.clone() + c1) * mu.clone() + c0
}

/// q for a conjugate (or real) pair; the imaginary part cancels.
pub fn quartic_q_complex(mu: f64, l: Complex<f64>, m: Complex<f64>) -> f64 {
    let mu_c = Complex::new(mu, 0.0);
    let one = Complex::new(1.0, 0.0);
    let two = Complex::new(2.0, 0.0);
    let f1 = mu_c * mu_c * m - mu_c * m + mu_c - two;
    let f2 = mu_c * m - mu_c + two;
    let lead = mu_c * mu_c * (one - mu_c) * (mu_c * m + one);
    (-(lead * l * l) + mu_c * f1 * f2 * l + f1 * f2).re
}

/// l + m = 2·Re[(t₁−t₀)z / (1 + (t₀+t₁)z)] for C-eigenvalue z = α + iβ.
pub fn kak4_sum(alpha: f64, beta: f64, t0: f64, t1: f64) -> f64 {
    let z = Complex::new(alpha, beta);
    let l = (t1 - t0) * z / (1.0 + (t0 + t1) * z);
    2.0 * l.re
}

fn lambda_of_mu(mu: f64, s: f64) -> f64 {
    1.0 - mu * (1.0 - mu) / (2.0 - mu + mu * (1.0 - mu) * s)
}

fn threshold() -> f64 {
    -2.0 * (1.0 + std::f64::consts::SQRT_2)
}

/// Four-slice heights with X(λ) − X(μ) = I, for C with eigenvalues α ± iβ.
///
/// Reason codes on failure: `nilpotent_M`, `real_spectrum_blocked`,
/// `too_many_eigenvalues`, `region_violated`, `residual_too_large`.
pub fn solve_kakeya_four_slice(c: &Matrix<Rational>) -> Result<HeightsSolution> {
    if nilpotency(c).0 {
        return Err(Error::NoSolution("nilpotent_M".into()));
    }
    let ev = eigenvalues_float(c);
    let clusters = cluster_eigenvalues(&ev, 1e-8);
    if clusters.iter().all(|(z, _)| z.im.abs() <= 1e-9) {
        return Err(Error::NoSolution("real_spectrum_blocked".into()));
    }
    if clusters.len() != 2 {
        return Err(Error::NoSolution("too_many_eigenvalues".into()));
    }
    let (alpha, beta) = (clusters[0].0.re, clusters[0].0.im.abs());

    // ε-grid in (0, 2/3), both orientations; smallest l+m wins, ties to smaller ε
    let eps_at = |i: usize| Rational::from_ratio(2 * (i as i64 + 1), 3 * (GRID as i64 + 1));
    let heights = |eps: &Rational, swapped: bool| {
        let one = Rational::from_i64(1);
        let low = eps.clone() - one.clone();
        let high = one - Rational::from_i64(2) * eps.clone();
        if swapped {
            (high, low)
        } else {
            (low, high)
        }
    };
    let mut best: Option<(f64, usize, bool)> = None;
    for i in 0..GRID {
        for swapped in [false, true] {
            let (t0, t1) = heights(&eps_at(i), swapped);
            let s = kak4_sum(alpha, beta, t0.as_f64(), t1.as_f64());
            if best.is_none_or(|(bs, _, _)| s < bs) {
                best = Some((s, i, swapped));
            }
        }
    }
    let (s_best, idx, swapped) = best.expect("nonempty grid");
    if s_best >= threshold() {
        return Err(Error::NoSolution("region_violated".into()));
    }
    let eps = eps_at(idx);
    let (t0, t1) = heights(&eps, swapped);
    let m = m_matrix(c, &t0, &t1)?;
    let m_ev = eigenvalues_float(&m);
    let s = m_ev.iter().map(|z| z.re).sum::<f64>() * 2.0 / m_ev.len() as f64;
    let p = {
        let mc = cluster_eigenvalues(&m_ev, 1e-8);
        (mc[0].0 * mc[mc.len() - 1].0).re
    };

    let disc = ((s + 2.0) * (s + 2.0) - 8.0).sqrt();
    let mu_minus = (2.0 - s - disc) / (2.0 * (1.0 - s));
    let mu_plus = (2.0 - s + disc) / (2.0 * (1.0 - s));
    let q = |mu: f64| quartic_q_sp(&mu, &s, &p);
    let mu = if q(mu_minus) > 0.0 {
        bisect(q, 0.0, mu_minus, q(0.0))
    } else if q(mu_plus) > 0.0 {
        bisect(q, mu_plus, 1.0, q(mu_plus))
    } else {
        return Err(Error::NoSolution("region_violated".into()));
    };
    let lambda = lambda_of_mu(mu, s);
    if !(lambda > 0.0 && lambda < 1.0 && mu > 0.0 && mu < 1.0) {
        return Err(Error::NoSolution("region_violated".into()));
    }
    let residual = four_slice_residual(&m, lambda, mu)?;
    if residual > RESIDUAL_TOL {
        return Err(Error::NoSolution("residual_too_large".into()));
    }

    // contiguous grid run around the chosen ε where the inequality holds
    let holds = |i: usize| {
        let (a, b) = heights(&eps_at(i), swapped);
        kak4_sum(alpha, beta, a.as_f64(), b.as_f64()) < threshold()
    };
    let mut lo = idx;
    while lo > 0 && holds(lo - 1) {
        lo -= 1;
    }
    let mut hi = idx;
    while hi + 1 < GRID && holds(hi + 1) {
        hi += 1;
    }
    let (e_lo, e_hi) = (eps_at(lo).as_f64(), eps_at(hi).as_f64());
    let range = (hi > lo).then_some({
        if swapped {
            (1.0 - 2.0 * e_hi, 1.0 - 2.0 * e_lo)
        } else {
            (e_lo - 1.0, e_hi - 1.0)
        }
    });
    Ok(HeightsSolution {
        kind: SolutionKind::Kakeya4,
        heights: vec![t0.as_f64(), t1.as_f64()],
        lambda,
        mu: Some(mu),
        residual,
        range,
        branch: if swapped { "swapped".into() } else { "standard".into() },
        eps_interval: Some((e_lo, e_hi)),
        eigenvalues: m_ev,
    })
}

/// ‖X(λ) − X(μ) − I‖∞, exact on the rational values of λ and μ.
fn four_slice_residual(m: &Matrix<Rational>, lambda: f64, mu: f64) -> Result<f64> {
    let xl = x_matrix(m, &Rational::of_f64(lambda))?;
    let xm = x_matrix(m, &Rational::of_f64(mu))?;
    Ok((&(&xl - &xm) - &Matrix::identity(m.dim())).norm_inf())
}
