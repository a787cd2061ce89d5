use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rat, Matrix, Rational, Scalar};

/// One companion block: rows/cols `start..start+coeffs.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionBlock {
    pub start: usize,
    /// c₁..c_l, read down the block's first column.
    pub coeffs: Vec<Rational>,
}

/// Splits C into companion blocks. Block boundaries are the zeros of the
/// superdiagonal; every entry outside the first block column and the
/// superdiagonal must vanish.
pub fn companion_blocks(c: &Matrix<Rational>) -> Result<Vec<CompanionBlock>> {
    let n = c.dim();
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && !c.get(end - 1, end).is_zero() {
            if !c.get(end - 1, end).is_one() {
                return Err(Error::NotCompanionForm(format!(
                    "superdiagonal entry ({}, {}) is {}",
                    end - 1,
                    end,
                    c.get(end - 1, end)
                )));
            }
            end += 1;
        }
        blocks.push(CompanionBlock {
            start,
            coeffs: (start..end).map(|i| c.get(i, start).clone()).collect(),
        });
        start = end;
    }
    for i in 0..n {
        for j in 0..n {
            let block = blocks
                .iter()
                .find(|b| (b.start..b.start + b.coeffs.len()).contains(&i))
                .expect("rows are covered");
            let in_first_col = j == block.start;
            let on_super = j == i + 1 && j < block.start + block.coeffs.len();
            if !in_first_col && !on_super && !c.get(i, j).is_zero() {
                return Err(Error::NotCompanionForm(format!(
                    "entry ({i}, {j}) = {} lies outside the block pattern",
                    c.get(i, j)
                )));
            }
        }
    }
    Ok(blocks)
}

/// W with, per l×l block, first column (0, −1, c₁, …, c_{l−2}) and zeros
/// elsewhere, so that det(W − tI − t²C) vanishes to order 2l−1 per block.
pub fn w_matrix(c: &Matrix<Rational>) -> Result<Matrix<Rational>> {
    let blocks = companion_blocks(c)?;
    let mut w = Matrix::zeros(c.dim());
    for b in &blocks {
        let l = b.coeffs.len();
        if l >= 2 {
            w.set(b.start + 1, b.start, rat(-1, 1));
        }
        for i in 2..l {
            w.set(b.start + i, b.start, b.coeffs[i - 2].clone());
        }
    }
    Ok(w)
}

/// P·C·Pᵀ where (Px)_i = x_{perm[i]}.
pub fn permute_matrix<T: Scalar>(c: &Matrix<T>, perm: &[usize]) -> Matrix<T> {
    let n = c.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, c.get(perm[i], perm[j]).clone());
        }
    }
    out
}

/// The first coordinate permutation (lexicographic, identity first) that
/// puts C into companion-block form.
pub fn find_companion_permutation(c: &Matrix<Rational>) -> Option<Vec<usize>> {
    let n = c.dim();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if companion_blocks(&permute_matrix(c, &perm)).is_ok() {
            return Some(perm);
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// One step of ε ↦ (2 − ε²)/(8 − 7ε + ε²).
pub fn iterate_epsilon<T: Scalar>(eps: &T) -> T {
    let e2 = eps.clone() * eps.clone();
    (T::from_i64(2) - e2.clone()) / (T::from_i64(8) - T::from_i64(7) * eps.clone() + e2)
}

/// Smallest root of ε³ − 6ε² + 8ε − 2, the fixed point of [`iterate_epsilon`].
pub fn epsilon_fixed_point() -> f64 {
    let f = |e: f64| e * e * e - 6.0 * e * e + 8.0 * e - 2.0;
    crate::numeric::bisect(f, 0.0, 0.5, f(0.0))
}

/// (n−1)/(2−ε), plus one when the heights come in a range.
pub fn dimension_lower_bound<T: Scalar>(n: usize, eps: &T, has_range: bool) -> T {
    let base = T::from_i64(n as i64 - 1) / (T::from_i64(2) - eps.clone());
    if has_range {
        base + T::one()
    } else {
        base
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenfailExponents {
    pub p_max: Rational,
    pub s_max: Rational,
    /// Vanishing order of det(W − tI − t²C); `None` means infinite.
    pub m: Option<u64>,
}

/// Thresholds beyond which the maximal and oscillatory estimates fail for
/// a C whose characteristic polynomial has k+1 invariant-factor blocks.
pub fn genfail_exponents(n: usize, k: usize, tr_adj_zero: bool, det_zero: bool) -> Result<GenfailExponents> {
    if n < 3 || k > n - 2 {
        return Err(Error::InvalidInput(format!("need n >= 3 and 0 <= k <= n-2, got n={n}, k={k}")));
    }
    let (ni, ki) = (n as i64, k as i64);
    let r = |p: i64, q: i64| rat(p, q);
    let two_n_over = r(2 * ni, ni - 1);
    if k == 0 && tr_adj_zero && det_zero {
        return Ok(GenfailExponents {
            p_max: r(ni - 1, 1),
            s_max: two_n_over + r(2, (ni - 1) * (2 * ni - 3)),
            m: None,
        });
    }
    if k == 0 && tr_adj_zero {
        return Ok(GenfailExponents {
            p_max: r(ni, 1) - r(ni - 1, 2 * ni - 3),
            s_max: two_n_over + r(2 * ni - 2, 2 * (ni - 1) * (ni - 1) * (2 * ni - 3)),
            m: Some(2 * (n as u64 - 1)),
        });
    }
    let p_max = r(ni, 1) - r(ni - ki - 2, 2 * ni - ki - 4);
    let s_max = two_n_over + r(2 * ni - 2 * ki - 2, (2 * ni - ki - 3) * (ni - 1) * (2 * ni - 3));
    Ok(GenfailExponents { p_max, s_max, m: Some((2 * (ni - 1) - ki - 1) as u64) })
}

impl GenfailExponents {
    pub fn p_is_n(&self, n: usize) -> bool {
        self.p_max == rat(n as i64, 1)
    }

    pub fn unbounded_m(&self) -> bool {
        self.m.is_none()
    }

    pub fn p_max_f64(&self) -> f64 {
        self.p_max.as_f64()
    }
}
