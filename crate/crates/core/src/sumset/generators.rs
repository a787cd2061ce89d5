//! Instances with large difference sets, and slice sets built from an
//! explicit curve family.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{integer_scaling, Incidence, Instance, LatticeSet, Point};
use crate::curves::{CurveFamily, CurveParams};
use crate::error::{Error, Result};
use crate::numeric::{rat, Matrix, Rational};

fn independent(u: &[i64], v: &[i64]) -> bool {
    (0..u.len()).any(|i| (i + 1..u.len()).any(|j| u[i] as i128 * v[j] as i128 != u[j] as i128 * v[i] as i128))
}

fn scaled(n: i64, v: &[i64]) -> Point {
    v.iter().map(|x| n.checked_mul(*x).expect("lattice coordinate overflow")).collect()
}

/// B = {nLv : n = 1..M} along a non-eigenvector v, A = XB, G = A×B, where
/// L clears X's denominators. Then #(A+XB) = 2M−1 and #(A−B) = M².
pub fn gen_line_counterexample(x: &Matrix<Rational>, m: usize) -> Result<Instance> {
    let d = x.dim();
    let (l, lx) = integer_scaling(x)?;
    let mul = |v: &[i64]| -> Point {
        lx.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    };
    let unit = |i: usize| -> Point { (0..d).map(|k| i64::from(k == i)).collect() };
    let mut candidates: Vec<Point> = (0..d).map(unit).collect();
    for i in 0..d {
        for j in i + 1..d {
            candidates.push(unit(i).iter().zip(unit(j)).map(|(a, b)| a + b).collect());
        }
    }
    let v = candidates
        .into_iter()
        .find(|v| independent(&scaled(l, v), &mul(v)))
        .ok_or_else(|| Error::NoSuchVector("X is a multiple of the identity".into()))?;
    let lv = scaled(l, &v);
    let xv = mul(&v);
    let b = LatticeSet::new(d, (1..=m as i64).map(|n| scaled(n, &lv)).collect())?;
    let a = LatticeSet::new(d, (1..=m as i64).map(|n| scaled(n, &xv)).collect())?;
    let g = Incidence::full(&a, &b);
    Instance::new(a, b, g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecularInstance {
    pub instance: Instance,
    /// X_j = (p_j/q_j) w vᵀ/(vᵀv), so X_j v = (p_j/q_j) w.
    pub xs: Vec<Matrix<Rational>>,
    /// |Q_j|(M−1) + M with Q_j = q_j ∏_{i≠j} p_i.
    pub predicted: Vec<u64>,
}

/// A = {n(∏p_iq_i)w}, B = {n(∏q_i)v}, n = 1..M, G = A×B.
pub fn gen_secular_counterexample(v: &[i64], w: &[i64], fracs: &[(i64, i64)], m: usize) -> Result<SecularInstance> {
    let pre = |s: String| Error::PreconditionViolation(s);
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch(format!("v has length {}, w has length {}", v.len(), w.len())));
    }
    if !independent(v, w) {
        return Err(pre("v and w are linearly dependent".into()));
    }
    if fracs.is_empty() {
        return Err(pre("no fractions given".into()));
    }
    let mut norm = Vec::with_capacity(fracs.len());
    for &(p, q) in fracs {
        if p == 0 || q == 0 || p.gcd(&q) != 1 {
            return Err(pre(format!("{p}/{q} is not a nonzero reduced fraction")));
        }
        norm.push(if q < 0 { (-p, -q) } else { (p, q) });
    }
    let prod_p: i64 = norm.iter().map(|f| f.0).product();
    let prod_q: i64 = norm.iter().map(|f| f.1).product();
    let prod = prod_p * prod_q;
    if (m as i64) <= prod.abs() {
        return Err(pre(format!("M = {m} must exceed ∏|p_i q_i| = {}", prod.abs())));
    }
    let d = v.len();
    let a = LatticeSet::new(d, (1..=m as i64).map(|n| scaled(n * prod, w)).collect())?;
    let b = LatticeSet::new(d, (1..=m as i64).map(|n| scaled(n * prod_q, v)).collect())?;
    let g = Incidence::full(&a, &b);
    let vv: i64 = v.iter().map(|x| x * x).sum();
    let xs = norm
        .iter()
        .map(|&(p, q)| {
            let rows = (0..d)
                .map(|i| (0..d).map(|j| rat(p * w[i] * v[j], q * vv)).collect())
                .collect();
            Matrix::from_rows(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let predicted = (0..norm.len())
        .map(|j| {
            let qj = norm[j].1 * norm.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, f)| f.0).product::<i64>();
            qj.unsigned_abs() * (m as u64 - 1) + m as u64
        })
        .collect();
    Ok(SecularInstance { instance: Instance::new(a, b, g)?, xs, predicted })
}

/// ω = linear·y + offset.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: Matrix<Rational>,
    pub offset: Vec<Rational>,
}

impl AffineMap {
    pub fn linear(m: Matrix<Rational>) -> Self {
        let d = m.dim();
        AffineMap { linear: m, offset: vec![Rational::zero(); d] }
    }

    pub fn apply(&self, y: &[Rational]) -> Result<Vec<Rational>> {
        Ok(self.linear.mul_vec(y)?.into_iter().zip(&self.offset).map(|(a, b)| a + b).collect())
    }
}

/// Slice points at height t, one per direction, snapped to the δ-lattice
/// (nearest point, halves rounded up); the flag says whether every point
/// was already on the lattice.
pub fn slice_set(
    f: &CurveFamily<Rational>,
    directions: &[Vec<Rational>],
    omega: &AffineMap,
    t: &Rational,
    delta: &Rational,
) -> Result<(Vec<Point>, bool)> {
    if !delta.is_positive() {
        return Err(Error::InvalidInput("δ must be positive".into()));
    }
    let half = rat(1, 2);
    let mut exact = true;
    let mut out = Vec::with_capacity(directions.len());
    for y in directions {
        let p = f.slice_point(&CurveParams::new(y.clone(), omega.apply(y)?), t);
        let mut q = Vec::with_capacity(p.len());
        for x in p {
            let r = x / delta;
            exact &= r.is_integer();
            let k = (r + half.clone()).floor().to_integer();
            q.push(num_traits::ToPrimitive::to_i64(&k).ok_or_else(|| Error::InvalidInput("lattice coordinate overflow".into()))?);
        }
        out.push(q);
    }
    Ok((out, exact))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionSlices {
    pub instance: Instance,
    pub exact: bool,
}

/// A, B = δ-lattice images of the slices at t0 and t1; G pairs the two
/// points of each curve.
pub fn slices_from_construction(
    f: &CurveFamily<Rational>,
    directions: &[Vec<Rational>],
    omega: &AffineMap,
    t0: &Rational,
    t1: &Rational,
    delta: &Rational,
) -> Result<ConstructionSlices> {
    if t0 == t1 {
        return Err(Error::InvalidInput("t0 = t1".into()));
    }
    let (a, ea) = slice_set(f, directions, omega, t0, delta)?;
    let (b, eb) = slice_set(f, directions, omega, t1, delta)?;
    let pairs: Vec<(Point, Point)> = a.into_iter().zip(b).collect();
    Ok(ConstructionSlices { instance: Instance::from_point_pairs(f.c.dim(), &pairs)?, exact: ea && eb })
}
