//! Greedy extraction of large hairbrushes.

use rayon::prelude::*;

use super::TubeFamilySpec;
use crate::curves::{min_separation, CurveFamily, TubeSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HairbrushDecomposition {
    /// Tube indices of each brush, in extraction order.
    pub brushes: Vec<Vec<usize>>,
    /// Candidate index of each brush's central tube.
    pub centrals: Vec<usize>,
    pub bad: Vec<usize>,
}

/// Two tubes meet when their curves come within 2δ at a common height of
/// the range.
pub fn tubes_meet(f: &CurveFamily<f64>, a: &TubeSpec, b: &TubeSpec, t_range: (f64, f64)) -> bool {
    let delta = a.delta.max(b.delta);
    min_separation(f, &a.params, &b.params, t_range.0, t_range.1).1 <= 2.0 * delta
}

/// Repeatedly takes the candidate central tube meeting the most remaining
/// tubes (lowest index on ties) while that number is at least `threshold`,
/// and removes those tubes as one brush. Candidates default to the family's
/// own tubes.
pub fn hairbrush_decompose(
    spec: &TubeFamilySpec,
    threshold: usize,
    candidates: Option<&[TubeSpec]>,
) -> HairbrushDecomposition {
    let tubes: Vec<TubeSpec> = (0..spec.len()).map(|i| spec.tube(i)).collect();
    let cands: Vec<TubeSpec> = candidates.map_or_else(|| tubes.clone(), <[TubeSpec]>::to_vec);
    let meets: Vec<Vec<bool>> = cands
        .par_iter()
        .map(|c| tubes.iter().map(|t| tubes_meet(&spec.family, c, t, spec.t_range)).collect())
        .collect();
    let mut remaining = vec![true; tubes.len()];
    let mut out = HairbrushDecomposition { brushes: Vec::new(), centrals: Vec::new(), bad: Vec::new() };
    loop {
        let best = meets
            .iter()
            .enumerate()
            .map(|(c, row)| (c, row.iter().zip(&remaining).filter(|(m, r)| **m && **r).count()))
            .fold(None::<(usize, usize)>, |acc, x| match acc {
                Some(a) if a.1 >= x.1 => Some(a),
                _ => Some(x),
            });
        match best {
            Some((c, count)) if count >= threshold.max(1) => {
                let brush: Vec<usize> = (0..tubes.len()).filter(|&i| remaining[i] && meets[c][i]).collect();
                brush.iter().for_each(|&i| remaining[i] = false);
                out.brushes.push(brush);
                out.centrals.push(c);
            }
            _ => break,
        }
    }
    out.bad = (0..tubes.len()).filter(|&i| remaining[i]).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Matrix;

    fn spec_with(tubes: &[(Vec<f64>, Vec<f64>)], delta: f64) -> TubeFamilySpec {
        let mut s = TubeFamilySpec::new(CurveFamily::new(Matrix::zeros(2)), delta, (-1.0, 1.0)).unwrap();
        for (y, w) in tubes {
            s.push(y, w).unwrap();
        }
        s
    }

    fn bush(count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        (0..count)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / count as f64;
                (vec![0.25 * a.cos(), 0.25 * a.sin()], vec![0.0, 0.0])
            })
            .collect()
    }

    #[test]
    fn single_bush() {
        let s = spec_with(&bush(10), 1.0 / 64.0);
        let d = hairbrush_decompose(&s, 5, None);
        assert_eq!(d.brushes, vec![(0..10).collect::<Vec<_>>()]);
        assert!(d.bad.is_empty());
    }

    #[test]
    fn disjoint_tubes_are_bad() {
        let tubes: Vec<_> = (0..6).map(|i| (vec![0.0, 0.0], vec![-0.5 + 0.2 * i as f64, 0.0])).collect();
        let d = hairbrush_decompose(&spec_with(&tubes, 1.0 / 64.0), 2, None);
        assert!(d.brushes.is_empty());
        assert_eq!(d.bad, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn bush_plus_far_tubes() {
        let mut tubes = bush(32);
        tubes.extend((0..32).map(|i| (vec![0.0, 0.0], vec![0.5 + 0.1 * (i % 8) as f64, 0.5 + 0.1 * (i / 8) as f64])));
        let d = hairbrush_decompose(&spec_with(&tubes, 1.0 / 64.0), 8, None);
        assert_eq!(d.brushes.len(), 1);
        assert!(d.brushes[0].len() >= 32);
        assert_eq!(d.bad, (32..64).collect::<Vec<_>>());
    }
}
