//! Small-volume Kakeya families ω = Wy for companion-block C.

use super::TubeFamilySpec;
use crate::curves::CurveFamily;
use crate::error::{Error, Result};
use crate::numeric::{rat, Matrix, PolyMatrix, Rational};
use crate::slices::{companion_blocks, find_companion_permutation, permute_matrix, w_matrix};

/// δℤ^d ∩ B^d for δ = 2^−k, in lexicographic order.
pub fn direction_net(d: usize, k: u32) -> Vec<Vec<f64>> {
    let r = 1i64 << k;
    let delta = 2f64.powi(-(k as i32));
    let mut out = Vec::new();
    let mut cur = vec![0i64; d];
    fn rec(i: usize, budget: i64, r: i64, delta: f64, cur: &mut Vec<i64>, out: &mut Vec<Vec<f64>>) {
        if i == cur.len() {
            out.push(cur.iter().map(|&c| c as f64 * delta).collect());
            return;
        }
        for c in -r..=r {
            if c * c <= budget {
                cur[i] = c;
                rec(i + 1, budget - c * c, r, delta, cur, out);
            }
        }
    }
    rec(0, r * r, r, delta, &mut cur, &mut out);
    out
}

/// r blocks [[0,1],[0,0]] followed by zeros, as a d×d companion-block matrix.
pub fn nilpotent_blocks_matrix(d: usize, r: usize) -> Result<Matrix<Rational>> {
    if 2 * r > d {
        return Err(Error::InvalidInput(format!("{r} blocks of size 2 do not fit in dimension {d}")));
    }
    let mut c = Matrix::zeros(d);
    for b in 0..r {
        c.set(2 * b, 2 * b + 1, rat(1, 1));
    }
    Ok(c)
}

/// One tube per direction of the δ-net with ω = Wy, heights restricted to
/// [−δ^{1/m}, δ^{1/m}] where m is the vanishing order of det(W − tI − t²C)
/// at 0 (all of [−1, 1] when the determinant is identically zero). A C not
/// in companion-block form is first conjugated by the first coordinate
/// permutation that makes it so; the permutation is recorded.
pub fn build_worstcase_kakeya(c: &Matrix<Rational>, k: u32) -> Result<TubeFamilySpec> {
    let (cc, permutation) = match companion_blocks(c) {
        Ok(_) => (c.clone(), None),
        Err(e) => match find_companion_permutation(c) {
            Some(p) => (permute_matrix(c, &p), Some(p)),
            None => return Err(e),
        },
    };
    let w = w_matrix(&cc)?;
    let det = PolyMatrix::w_pencil(&w, &cc)?.det();
    let delta = 2f64.powi(-(k as i32));
    let t_range = match det.vanishing_order() {
        None => (-1.0, 1.0),
        Some(m) => {
            let h = delta.powf(1.0 / m.max(1) as f64);
            (-h, h)
        }
    };
    let wf = w.to_f64();
    let mut spec = TubeFamilySpec::new(CurveFamily::new(cc.to_f64()), delta, t_range)?;
    for y in direction_net(cc.dim(), k) {
        let omega = wf.mul_vec(&y)?;
        spec.push(&y, &omega)?;
    }
    spec.permutation = permutation;
    Ok(spec)
}
