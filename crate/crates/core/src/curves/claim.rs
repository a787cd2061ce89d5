//! Quantitative check of the hairbrush distance claim for C² = 0.

use rand::{Rng, SeedableRng};

use super::{locus_generating_curve, min_separation, CurveFamily, CurveParams, TubeSpec};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    pub dist_centres: f64,
    pub dist_to_line: f64,
    /// Smallest K with |ω_j − ω_i| ≤ K·2^{−l} and dist ≤ K·2^{−(l+m)}.
    pub fitted_k: f64,
    pub pass: bool,
    pub t_j: f64,
    pub t_i: f64,
    pub s: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn violation(msg: String) -> Error {
    Error::ConfigurationViolation(msg)
}

fn in_dyadic_shell(x: f64, e: i32) -> bool {
    x > 2f64.powi(-e - 1) && x < 2f64.powi(-e)
}

/// Checks the dyadic preconditions, locates the meeting heights and
/// measures |ω_j − ω_i| and the distance from ω_i to span{(I + t_jC)y_j}.
#[allow(clippy::too_many_arguments)]
pub fn hairbrush_claim_check(
    f: &CurveFamily<f64>,
    central: &TubeSpec,
    tj: &TubeSpec,
    ti: &TubeSpec,
    k: i32,
    l: i32,
    m: i32,
    k_const: f64,
) -> Result<ClaimReport> {
    let c2 = f.c.try_mul(&f.c)?;
    if c2.norm_inf() > 1e-12 {
        return Err(violation("C² ≠ 0".into()));
    }
    if norm(&central.params.y) > 1e-12 || norm(&central.params.omega) > 1e-12 {
        return Err(violation("central tube is not T_0(0)".into()));
    }
    let delta = central.delta.max(tj.delta).max(ti.delta);
    if m < 0 || l + 2 < k {
        return Err(violation(format!("need m ≥ 0 and l ≥ k − 2, got k={k}, l={l}, m={m}")));
    }
    for e in [k, l, l + m] {
        if 2f64.powi(-e) <= delta {
            return Err(violation(format!("2^-{e} is not greater than δ = {delta}")));
        }
    }
    let (yj, yi) = (&tj.params.y, &ti.params.y);
    if !in_dyadic_shell(norm(yj), k) || !in_dyadic_shell(norm(yi), k) {
        return Err(violation(format!("|y_j|, |y_i| = {}, {} not in the k = {k} shell", norm(yj), norm(yi))));
    }
    let dy = norm(&sub(yj, yi));
    if !in_dyadic_shell(dy, l) {
        return Err(violation(format!("|y_j − y_i| = {dy} not in the l = {l} shell")));
    }
    let (t_j, dj) = min_separation(f, &tj.params, &central.params, -1.0, 1.0);
    let (t_i, di) = min_separation(f, &ti.params, &central.params, -1.0, 1.0);
    let (s, dij) = min_separation(f, &tj.params, &ti.params, -1.0, 1.0);
    if dj > 2.0 * delta || di > 2.0 * delta || dij > 2.0 * delta {
        return Err(violation("tubes do not pairwise meet".into()));
    }
    let gap = (s - t_j).abs();
    let lo = delta * 2f64.powi(l + m);
    if gap < lo || gap > 2.0 * lo {
        return Err(violation(format!("|s − t_j| = {gap} outside [{lo}, {}]", 2.0 * lo)));
    }

    let dist_centres = norm(&sub(&tj.params.omega, &ti.params.omega));
    let dir = Matrix::identity(f.c.dim()).try_add(&f.c.scale(&t_j))?.mul_vec(yj)?;
    let w = &ti.params.omega;
    let proj = w.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>() / dir.iter().map(|x| x * x).sum::<f64>();
    let dist_to_line = norm(&w.iter().zip(&dir).map(|(a, b)| a - proj * b).collect::<Vec<_>>());
    let fitted_k = (dist_centres * 2f64.powi(l)).max(dist_to_line * 2f64.powi(l + m));
    Ok(ClaimReport { dist_centres, dist_to_line, fitted_k, pass: fitted_k <= k_const, t_j, t_i, s })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleConfig {
    pub delta: f64,
    pub k: i32,
    pub l: i32,
    pub m: i32,
}

fn random_direction<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random (central, T_j, T_i) satisfying the claim's preconditions. T_i is
/// either a generating curve of the locus through the axis and T_j, or a
/// free direction forced through T_j at height s; its centre is then moved
/// by at most δ/4.
pub fn admissible_triple<R: Rng>(
    f: &CurveFamily<f64>,
    cfg: TripleConfig,
    rng: &mut R,
) -> Result<(TubeSpec, TubeSpec, TubeSpec)> {
    let d = f.c.dim();
    let TripleConfig { delta, k, l, m } = cfg;
    let central = TubeSpec::new(CurveParams::new(vec![0.0; d], vec![0.0; d]), delta)?;
    let sep = delta * 2f64.powi(l + m);
    let spread = 2f64.powi(k - l + 1);
    let id = Matrix::<f64>::identity(d);
    for attempt in 0..20_000 {
        let r = 2f64.powi(-k) * rng.gen_range(0.55..0.95);
        let yj: Vec<f64> = random_direction(d, rng).into_iter().map(|x| x * r).collect();
        let t_j: f64 = rng.gen_range(-0.5..0.5);
        let s = t_j + if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * sep * rng.gen_range(1.2..1.8);
        if s.abs() > 1.0 {
            continue;
        }
        let wj: Vec<f64> = id.try_add(&f.c.scale(&t_j))?.mul_vec(&yj)?.into_iter().map(|x| x * t_j).collect();
        let (yi, wi) = if attempt % 2 == 0 {
            // T_i on the locus through the axis and T_j
            let rho: f64 = rng.gen_range(1.0 - spread..1.0 + spread);
            if rho.abs() < 0.05 {
                continue;
            }
            let t_i = s + (t_j - s) / rho;
            if t_i.abs() > 1.0 {
                continue;
            }
            let Ok(gen) = locus_generating_curve(f, &yj, &t_j, &s, &t_i) else { continue };
            (gen.y, gen.omega)
        } else {
            // free direction, centre chosen so that T_i meets T_j at s
            let step = 2f64.powi(-l) * rng.gen_range(0.55..0.95);
            let yi: Vec<f64> = yj.iter().zip(random_direction(d, rng)).map(|(a, b)| a + step * b).collect();
            let pj = f.slice_point(&CurveParams::new(yj.clone(), wj.clone()), &s);
            let lift = id.try_add(&f.c.scale(&s))?.mul_vec(&yi)?;
            let wi = pj.iter().zip(&lift).map(|(p, q)| p + s * q).collect();
            (yi, wi)
        };
        let eps = random_direction(d, rng);
        let shift = rng.gen_range(0.0..delta / 4.0);
        let wi = wi.iter().zip(&eps).map(|(a, b)| a + shift * b).collect();
        let tube_j = TubeSpec::new(CurveParams::new(yj, wj), delta)?;
        let tube_i = TubeSpec::new(CurveParams::new(yi, wi), delta)?;
        if hairbrush_claim_check(f, &central, &tube_j, &tube_i, k, l, m, f64::INFINITY).is_ok() {
            return Ok((central, tube_j, tube_i));
        }
    }
    Err(Error::NoSolution(format!("no admissible triple found for {cfg:?}")))
}

/// Checks `count` admissible triples drawn from a seeded generator.
pub fn sample_claim_reports(
    f: &CurveFamily<f64>,
    cfg: TripleConfig,
    k_const: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<ClaimReport>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (c, j, i) = admissible_triple(f, cfg, &mut rng)?;
            hairbrush_claim_check(f, &c, &j, &i, cfg.k, cfg.l, cfg.m, k_const)
        })
        .collect()
}
