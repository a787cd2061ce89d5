//! Parabolic curves Γ_y(ω) = (ω − ty − t²Cy, t), their tubes, intersections,
//! the two-curve locus and the hairbrush claim checker.

mod claim;
mod locus;

pub use claim::{admissible_triple, hairbrush_claim_check, sample_claim_reports, ClaimReport, TripleConfig};
pub use locus::{collinearity_witness, locus_dichotomy_test, locus_generating_curve, locus_point, DichotomyReport};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numeric::{
    format_rational, matrix_from_json, matrix_to_json, rational_from_json, vector_from_json, Matrix,
    Polynomial, Rational, Scalar,
};
use crate::slices::check_nondegenerate;

/// The family x' = ω − ty − t²Cy over heights t ∈ [−1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily<T: Scalar> {
    pub n: usize,
    pub c: Matrix<T>,
    pub nondegenerate: bool,
}

impl<T: Scalar> CurveFamily<T> {
    pub fn new(c: Matrix<T>) -> Self {
        let nondegenerate = check_nondegenerate(&c);
        CurveFamily { n: c.dim() + 1, c, nondegenerate }
    }

    pub fn to_f64(&self) -> CurveFamily<f64> {
        CurveFamily { n: self.n, c: self.c.to_f64(), nondegenerate: self.nondegenerate }
    }

    /// Slice point ω − ty − t²Cy, without the height coordinate.
    pub fn slice_point(&self, p: &CurveParams<T>, t: &T) -> Vec<T> {
        let cy = self.c.mul_vec(&p.y).expect("dims checked");
        let t2 = t.clone() * t.clone();
        p.omega
            .iter()
            .zip(&p.y)
            .zip(&cy)
            .map(|((w, y), c)| w.clone() - t.clone() * y.clone() - t2.clone() * c.clone())
            .collect()
    }

    fn check_params(&self, p: &CurveParams<T>) -> Result<()> {
        let d = self.c.dim();
        if p.y.len() != d || p.omega.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "curve parameters of length ({}, {}) for a family of dimension {}",
                p.y.len(),
                p.omega.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Direction y and centre ω.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveParams<T> {
    pub y: Vec<T>,
    pub omega: Vec<T>,
}

impl<T: Scalar> CurveParams<T> {
    pub fn new(y: Vec<T>, omega: Vec<T>) -> Self {
        CurveParams { y, omega }
    }

    /// |y| ≤ 1 and |ω| ≤ 1.
    pub fn is_in_unit_ball(&self) -> bool {
        let sq = |v: &[T]| v.iter().fold(T::zero(), |a, x| a + x.clone() * x.clone());
        sq(&self.y) <= T::one() && sq(&self.omega) <= T::one()
    }

    pub fn to_f64(&self) -> CurveParams<f64> {
        CurveParams {
            y: self.y.iter().map(Scalar::as_f64).collect(),
            omega: self.omega.iter().map(Scalar::as_f64).collect(),
        }
    }
}

/// A δ-tube around a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeSpec {
    pub params: CurveParams<f64>,
    pub delta: f64,
}

impl TubeSpec {
    pub fn new(params: CurveParams<f64>, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("tube thickness {delta} not in (0, 1)")));
        }
        Ok(TubeSpec { params, delta })
    }
}

fn check_height<T: Scalar>(t: &T) -> Result<()> {
    let one = T::one();
    if *t > one || *t < -one {
        return Err(Error::HeightOutOfSupport(t.as_f64()));
    }
    Ok(())
}

/// (ω − ty − t²Cy, t).
pub fn curve_point<T: Scalar>(f: &CurveFamily<T>, p: &CurveParams<T>, t: &T) -> Result<Vec<T>> {
    check_height(t)?;
    f.check_params(p)?;
    let mut x = f.slice_point(p, t);
    x.push(t.clone());
    Ok(x)
}

/// (−y − 2tCy, 1).
pub fn curve_tangent<T: Scalar>(f: &CurveFamily<T>, p: &CurveParams<T>, t: &T) -> Vec<T> {
    let cy = f.c.mul_vec(&p.y).expect("dims checked");
    let two_t = T::from_i64(2) * t.clone();
    let mut v: Vec<T> = p.y.iter().zip(&cy).map(|(y, c)| -y.clone() - two_t.clone() * c.clone()).collect();
    v.push(T::one());
    v
}

/// An intersection height: exact when it lies in the scalar type, otherwise
/// a double-precision value of an irrational root (verified exactly).
#[derive(Clone, Debug, PartialEq)]
pub enum Height<T> {
    Exact(T),
    Irrational(f64),
}

impl<T: Scalar> Height<T> {
    pub fn to_f64(&self) -> f64 {
        match self {
            Height::Exact(t) => t.as_f64(),
            Height::Irrational(t) => *t,
        }
    }
}

/// Heights in [−1, 1] where the two curves meet: roots of
/// (ω₁−ω₂) − t(y₁−y₂) − t²C(y₁−y₂) = 0 in every component.
pub fn intersect_curves<T: Scalar>(
    f: &CurveFamily<T>,
    p1: &CurveParams<T>,
    p2: &CurveParams<T>,
) -> Result<Vec<Height<T>>> {
    f.check_params(p1)?;
    f.check_params(p2)?;
    let dy: Vec<T> = p1.y.iter().zip(&p2.y).map(|(a, b)| a.clone() - b.clone()).collect();
    let dw: Vec<T> = p1.omega.iter().zip(&p2.omega).map(|(a, b)| a.clone() - b.clone()).collect();
    let v = f.c.mul_vec(&dy)?;
    let comps: Vec<Polynomial<T>> = (0..dy.len())
        .map(|i| Polynomial::new(vec![dw[i].clone(), -dy[i].clone(), -v[i].clone()]))
        .collect();
    let Some(first) = comps.iter().find(|p| !p.is_zero()) else {
        return Err(Error::IdenticalCurves);
    };
    let scale = dy.iter().chain(&dw).chain(&v).map(|x| x.as_f64().abs()).fold(0.0, f64::max);
    let vanishes = |t: &T| {
        comps.iter().all(|p| {
            let r = p.eval(t);
            if T::EXACT {
                r.is_zero()
            } else {
                r.as_f64().abs() <= 1e-10 * scale.max(1.0)
            }
        })
    };
    let one = T::one();
    let in_support = |t: &T| *t <= one && *t >= -one.clone();
    let mut out: Vec<Height<T>> = Vec::new();
    match first.degree() {
        Some(0) => {}
        Some(1) => {
            let t = -first.coeff(0) / first.coeff(1);
            if in_support(&t) && vanishes(&t) {
                out.push(Height::Exact(t));
            }
        }
        _ => {
            let (a, b, c) = (first.coeff(2), first.coeff(1), first.coeff(0));
            let disc = b.clone() * b.clone() - T::from_i64(4) * a.clone() * c.clone();
            if disc < T::zero() {
                return Ok(out);
            }
            match disc.sqrt_exact() {
                Some(r) => {
                    let two_a = T::from_i64(2) * a.clone();
                    for t in [(-b.clone() - r.clone()) / two_a.clone(), (-b.clone() + r) / two_a] {
                        if in_support(&t) && vanishes(&t) {
                            out.push(Height::Exact(t));
                        }
                    }
                }
                None => {
                    // irrational conjugate pair: both are common roots iff
                    // the first component divides every other one
                    if comps.iter().all(|p| p.div_rem(first).1.is_zero()) {
                        let fa = a.as_f64();
                        let fb = b.as_f64();
                        let sd = disc.as_f64().sqrt();
                        for t in [(-fb - sd) / (2.0 * fa), (-fb + sd) / (2.0 * fa)] {
                            if (-1.0..=1.0).contains(&t) {
                                out.push(Height::Irrational(t));
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| x.to_f64().partial_cmp(&y.to_f64()).unwrap_or(std::cmp::Ordering::Equal));
    out.dedup_by(|x, y| x.to_f64() == y.to_f64());
    Ok(out)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Height in [lo, hi] minimising the distance between the two curves'
/// slice points, and that distance.
pub fn min_separation(
    f: &CurveFamily<f64>,
    p1: &CurveParams<f64>,
    p2: &CurveParams<f64>,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let dy: Vec<f64> = p1.y.iter().zip(&p2.y).map(|(a, b)| a - b).collect();
    let dw: Vec<f64> = p1.omega.iter().zip(&p2.omega).map(|(a, b)| a - b).collect();
    let v = f.c.mul_vec(&dy).expect("dims");
    // D(t) = a0 + a1 t + a2 t², |D|² is a quartic
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let a1: Vec<f64> = dy.iter().map(|x| -x).collect();
    let a2: Vec<f64> = v.iter().map(|x| -x).collect();
    let quartic = Polynomial::new(vec![
        dot(&dw, &dw),
        2.0 * dot(&dw, &a1),
        dot(&a1, &a1) + 2.0 * dot(&dw, &a2),
        2.0 * dot(&a1, &a2),
        dot(&a2, &a2),
    ]);
    let mut cands = vec![lo, hi];
    cands.extend(quartic.derivative().real_roots_in(lo, hi));
    let dist = |t: f64| {
        let d: Vec<f64> = (0..dw.len()).map(|i| dw[i] + a1[i] * t + a2[i] * t * t).collect();
        norm(&d)
    };
    cands
        .into_iter()
        .map(|t| (t, dist(t)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty")
}

/// Diameter of the intersection of two δ-tubes, measured by sampling
/// heights at step δ/4, together with the separation d = |y₁ − y₂|.
pub fn intersection_diameter(
    f: &CurveFamily<f64>,
    t1: &TubeSpec,
    t2: &TubeSpec,
    samples: Option<usize>,
) -> (f64, f64) {
    let delta = t1.delta;
    let sep = norm(&t1.params.y.iter().zip(&t2.params.y).map(|(a, b)| a - b).collect::<Vec<_>>());
    let count = samples.unwrap_or_else(|| (8.0 / delta).ceil() as usize + 1).max(2);
    let mut best = 0.0f64;
    let mut run_start: Option<Vec<f64>> = None;
    let mut last_mid: Vec<f64> = Vec::new();
    for i in 0..count {
        let t = -1.0 + 2.0 * i as f64 / (count - 1) as f64;
        let a = f.slice_point(&t1.params, &t);
        let b = f.slice_point(&t2.params, &t);
        let e = norm(&a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>());
        if e < 2.0 * delta {
            let chord = 2.0 * (delta * delta - e * e / 4.0).max(0.0).sqrt();
            best = best.max(chord);
            let mut mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            mid.push(t);
            if run_start.is_none() {
                run_start = Some(mid.clone());
            }
            last_mid = mid;
        } else if let Some(start) = run_start.take() {
            best = best.max(norm(&start.iter().zip(&last_mid).map(|(x, y)| x - y).collect::<Vec<_>>()));
        }
    }
    if let Some(start) = run_start {
        best = best.max(norm(&start.iter().zip(&last_mid).map(|(x, y)| x - y).collect::<Vec<_>>()));
    }
    (best, sep)
}

/// `{"n": n, "C": <matrix JSON>}`
pub fn family_to_json(f: &CurveFamily<Rational>) -> Value {
    json!({ "n": f.n, "C": matrix_to_json(&f.c) })
}

pub fn family_from_json(v: &Value) -> Result<CurveFamily<Rational>> {
    let c = matrix_from_json(v.get("C").ok_or_else(|| Error::Parse("family JSON needs \"C\"".into()))?)?;
    if let Some(n) = v.get("n") {
        let n = n.as_u64().ok_or_else(|| Error::Parse("\"n\" must be an integer".into()))? as usize;
        if n != c.dim() + 1 {
            return Err(Error::DimensionMismatch(format!("n = {n} but C has dim {}", c.dim())));
        }
    }
    Ok(CurveFamily::new(c))
}

/// `[{"y": [...], "omega": [...], "delta": d}, ...]`
pub fn tubes_from_json(v: &Value) -> Result<Vec<TubeSpec>> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("tube list must be an array".into()))?;
    arr.iter()
        .map(|t| {
            let field = |k: &str| t.get(k).ok_or_else(|| Error::Parse(format!("tube missing \"{k}\"")));
            let y = vector_from_json(field("y")?)?;
            let omega = vector_from_json(field("omega")?)?;
            let delta = rational_from_json(field("delta")?)?.as_f64();
            TubeSpec::new(CurveParams::new(y, omega).to_f64(), delta)
        })
        .collect()
}

pub fn tubes_to_json(tubes: &[TubeSpec]) -> Value {
    let exact = |v: &[f64]| -> Vec<String> { v.iter().map(|x| format_rational(&Rational::of_f64(*x))).collect() };
    Value::Array(
        tubes
            .iter()
            .map(|t| json!({"y": exact(&t.params.y), "omega": exact(&t.params.omega), "delta": t.delta}))
            .collect(),
    )
}
