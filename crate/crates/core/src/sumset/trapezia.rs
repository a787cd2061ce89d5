//! Trapezium counting for the four-slice inequality with Y − X = I.

use std::collections::HashMap;

use super::{affine, difference_set, integer_scaling, x_sumset, Incidence, Instance, LatticeSet};
use crate::error::{Error, Result};
use crate::numeric::{lcm_denominators, Matrix, Rational};
use num_traits::ToPrimitive;

#[derive(Clone, Debug, PartialEq)]
pub struct TrapeziumReport {
    pub count: u64,
    /// #G⁴/M⁴ for the reduced G.
    pub lower_bound: f64,
    /// M³.
    pub upper_bound: f64,
    pub identity_verified: bool,
    pub reduced_size: usize,
    pub m: usize,
}

/// Drops pairs of G until a − b is injective on G, keeping for each
/// difference the lexicographically least pair (a, b).
pub fn reduce_to_distinct_differences(inst: &Instance) -> Instance {
    let mut pairs: Vec<(usize, usize)> = inst.g.pairs().to_vec();
    // indices follow the sorted point order, so index order is lexicographic
    pairs.sort_unstable();
    let mut seen = std::collections::HashSet::new();
    let kept: Vec<(usize, usize)> = pairs
        .into_iter()
        .filter(|&(i, j)| {
            let d: Vec<i64> = inst.a.points()[i].iter().zip(&inst.b.points()[j]).map(|(x, y)| x - y).collect();
            seen.insert(d)
        })
        .collect();
    Instance { a: inst.a.clone(), b: inst.b.clone(), g: Incidence::new(kept, &inst.a, &inst.b).expect("subset") }
}

fn scale_matrix(m: &Matrix<Rational>, d: &Rational) -> Vec<Vec<i128>> {
    m.rows()
        .into_iter()
        .map(|row| row.iter().map(|e| (e * d).to_integer().to_i128().expect("fits")).collect())
        .collect()
}

fn apply(m: &[Vec<i128>], v: &[i64]) -> Vec<i128> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * *b as i128).sum()).collect()
}

/// Ordered trapezia ((a₀,b₀),(a₀,b₀'),(a₁,b₁),(a₁,b₁')) ∈ G⁴ with
/// a₀+Yb₀ = a₁+Yb₁ and b₀' = b₁', counted after reducing G so that
/// #(A−B) = #G.
pub fn count_trapezia(inst: &Instance, x: &Matrix<Rational>, y: &Matrix<Rational>) -> Result<TrapeziumReport> {
    let d = inst.dim();
    if x.dim() != d || y.dim() != d {
        return Err(Error::DimensionMismatch("X, Y and the points must share a dimension".into()));
    }
    if y.try_sub(x)? != Matrix::identity(d) {
        return Err(Error::PreconditionViolation("Y − X ≠ I".into()));
    }
    let xinv = x.inverse().map_err(|_| Error::PreconditionViolation("X is singular".into()))?;
    let red = reduce_to_distinct_differences(inst);
    debug_assert_eq!(difference_set(&red)?.len(), red.g.len());

    let pts_a = LatticeSet::new(d, red.pair_points().map(|p| p.0.clone()).collect())?;
    let pts_b = LatticeSet::new(d, red.pair_points().map(|p| p.1.clone()).collect())?;
    let m = [pts_a.len(), pts_b.len(), x_sumset(&red, x)?.set.len(), x_sumset(&red, y)?.set.len()]
        .into_iter()
        .max()
        .unwrap_or(0);

    // a ↦ list of b with (a, b) ∈ G
    let mut by_a: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(i, j) in red.g.pairs() {
        by_a.entry(i).or_default().push(j);
    }
    let (ly, y_int) = integer_scaling(y)?;
    // key (a + Yb, b') → triples (a, b, b')
    let mut groups: HashMap<(Vec<i64>, usize), Vec<(usize, usize, usize)>> = HashMap::new();
    let mut a_keys: Vec<_> = by_a.keys().copied().collect();
    a_keys.sort_unstable();
    for i in a_keys {
        let bs = &by_a[&i];
        for &j in bs {
            let s = affine(ly, &red.a.points()[i], &y_int, &red.b.points()[j])?;
            for &j2 in bs {
                groups.entry((s.clone(), j2)).or_default().push((i, j, j2));
            }
        }
    }
    let count: u64 = groups.values().map(|v| (v.len() as u64) * (v.len() as u64)).sum();

    // a₁ − b₁' = (I+X⁻¹)(a₀+Xb₀) − X⁻¹(a₀+Xb₀') − Yb₁, checked in integers
    // after scaling by the lcm of all denominators
    let den = Rational::from(lcm_denominators(xinv.entries().iter().chain(x.entries()).chain(y.entries())));
    let id = Matrix::<Rational>::identity(d);
    let p_a = scale_matrix(&id.try_add(&xinv)?, &den); // (I+X⁻¹) on a
    let p_b = scale_matrix(&x.try_add(&id)?, &den); // (I+X⁻¹)X = X + I on b
    let q_a = scale_matrix(&xinv, &den);
    let q_b = scale_matrix(&id, &den);
    let y_s = scale_matrix(y, &den);
    let dv = den.to_integer().to_i128().expect("fits");
    let pa = |i: usize| red.a.points()[i].as_slice();
    let pb = |j: usize| red.b.points()[j].as_slice();
    let mut identity_verified = true;
    'outer: for v in groups.values() {
        for &(a0, b0, b0p) in v {
            let p: Vec<i128> = apply(&p_a, pa(a0)).iter().zip(apply(&p_b, pb(b0))).map(|(s, t)| s + t).collect();
            let q: Vec<i128> = apply(&q_a, pa(a0)).iter().zip(apply(&q_b, pb(b0p))).map(|(s, t)| s + t).collect();
            for &(a1, b1, b1p) in v {
                let yb = apply(&y_s, pb(b1));
                let ok = (0..d).all(|k| {
                    let lhs = dv * (pa(a1)[k] - pb(b1p)[k]) as i128;
                    lhs == p[k] - q[k] - yb[k]
                });
                if !ok {
                    identity_verified = false;
                    break 'outer;
                }
            }
        }
    }
    let g = red.g.len() as f64;
    let mf = m as f64;
    Ok(TrapeziumReport {
        count,
        lower_bound: if m == 0 { 0.0 } else { g.powi(4) / mf.powi(4) },
        upper_bound: mf.powi(3),
        identity_verified,
        reduced_size: red.g.len(),
        m,
    })
}
