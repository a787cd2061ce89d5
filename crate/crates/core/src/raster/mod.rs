//! δ-voxel rasterization of tube families, box-counting dimension,
//! covering norms, the small-volume constructions and hairbrushes.

mod hairbrush;
mod worstcase;

pub use hairbrush::{hairbrush_decompose, tubes_meet, HairbrushDecomposition};
pub use worstcase::{build_worstcase_kakeya, direction_net, nilpotent_blocks_matrix};

use std::collections::HashSet;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::curves::{CurveFamily, CurveParams, TubeSpec};
use crate::error::{Error, Result};

/// Largest number of occupied cells a CellSet may hold.
pub const CELL_BUDGET: usize = 1 << 30;
const SLICE_BITSET_LIMIT: u64 = 1 << 28;

/// Occupied cells of the grid with centres iδ, δ = 2^−k, stored as sorted
/// keys; coordinate i is offset by 2^k + 1 and packed in base 2^{k+1} + 3
/// with the height coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    n: usize,
    k: u32,
    keys: Vec<u64>,
}

fn side(k: u32) -> u64 {
    (1u64 << (k + 1)) + 3
}

fn offset(k: u32) -> i64 {
    (1i64 << k) + 1
}

fn check_grid(n: usize, k: u32) -> Result<()> {
    if k > 30 || (side(k) as f64).powi(n as i32) >= 2f64.powi(63) {
        return Err(Error::ResolutionTooFine(format!("grid 2^-{k} in dimension {n} does not fit 64-bit keys")));
    }
    Ok(())
}

impl CellSet {
    pub fn empty(n: usize, k: u32) -> Self {
        CellSet { n, k, keys: Vec::new() }
    }

    /// Builds from integer cell coordinates, dropping cells outside the box.
    pub fn from_cells(n: usize, k: u32, cells: impl IntoIterator<Item = Vec<i64>>) -> Result<Self> {
        check_grid(n, k)?;
        let mut keys: Vec<u64> = cells.into_iter().filter_map(|c| Self::encode(n, k, &c)).collect();
        keys.sort_unstable();
        keys.dedup();
        Ok(CellSet { n, k, keys })
    }

    fn encode(n: usize, k: u32, c: &[i64]) -> Option<u64> {
        let (s, off) = (side(k), offset(k));
        let mut key = 0u64;
        for i in (0..n).rev() {
            let v = c[i] + off;
            if v < 0 || v as u64 >= s {
                return None;
            }
            key = key * s + v as u64;
        }
        Some(key)
    }

    pub fn decode(&self, key: u64) -> Vec<i64> {
        let (s, off) = (side(self.k), offset(self.k));
        let mut rest = key;
        (0..self.n)
            .map(|_| {
                let v = (rest % s) as i64 - off;
                rest /= s;
                v
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        2f64.powi(-(self.k as i32))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.delta().powi(self.n as i32) * self.len() as f64
    }

    pub fn contains(&self, c: &[i64]) -> bool {
        Self::encode(self.n, self.k, c).is_some_and(|key| self.keys.binary_search(&key).is_ok())
    }

    pub fn cells(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.keys.iter().map(|&key| self.decode(key))
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::DimensionMismatch("cell sets on different grids".into()));
        }
        let mut keys = self.keys.clone();
        keys.extend_from_slice(&other.keys);
        keys.sort_unstable();
        keys.dedup();
        Ok(CellSet { n: self.n, k: self.k, keys })
    }

    /// `{"n", "k", "cells": [[...], ...]}`
    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "k": self.k, "cells": self.cells().collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value) -> Result<CellSet> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("cell set needs \"n\""))? as usize;
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("cell set needs \"k\""))? as u32;
        let cells = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("cell set needs \"cells\""))?
            .iter()
            .map(|c| {
                let c: Vec<i64> = c.as_array().ok_or_else(|| bad("cell must be an array"))?.iter().filter_map(Value::as_i64).collect();
                if c.len() == n { Ok(c) } else { Err(bad("cell of wrong length")) }
            })
            .collect::<Result<Vec<_>>>()?;
        CellSet::from_cells(n, k, cells)
    }

    /// Run-length encoded keys: magic, n, k, run count, then (start, length)
    /// pairs, little endian.
    pub fn write_rle<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut runs: Vec<(u64, u32)> = Vec::new();
        for &key in &self.keys {
            match runs.last_mut() {
                Some((start, len)) if *start + *len as u64 == key && *len < u32::MAX => *len += 1,
                _ => runs.push((key, 1)),
            }
        }
        w.write_all(b"CELLRLE1")?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.k.to_le_bytes())?;
        w.write_all(&(runs.len() as u64).to_le_bytes())?;
        for (start, len) in runs {
            w.write_all(&start.to_le_bytes())?;
            w.write_all(&len.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_rle<R: Read>(mut r: R) -> Result<CellSet> {
        let io = |e: std::io::Error| Error::Parse(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != b"CELLRLE1" {
            return Err(Error::Parse("not a run-length cell file".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io)?;
        let n = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b4).map_err(io)?;
        let k = u32::from_le_bytes(b4);
        check_grid(n, k)?;
        r.read_exact(&mut b8).map_err(io)?;
        let runs = u64::from_le_bytes(b8);
        let mut keys = Vec::new();
        for _ in 0..runs {
            r.read_exact(&mut b8).map_err(io)?;
            r.read_exact(&mut b4).map_err(io)?;
            let start = u64::from_le_bytes(b8);
            keys.extend((0..u32::from_le_bytes(b4) as u64).map(|i| start + i));
            if keys.len() > CELL_BUDGET {
                return Err(Error::ResolutionTooFine("cell file exceeds the cell budget".into()));
            }
        }
        Ok(CellSet { n, k, keys })
    }
}

/// A family of tubes of common thickness over a height range; directions
/// and centres are stored flat, d = n − 1 numbers per tube.
#[derive(Clone, Debug, PartialEq)]
pub struct TubeFamilySpec {
    pub family: CurveFamily<f64>,
    ys: Vec<f64>,
    omegas: Vec<f64>,
    pub delta: f64,
    pub t_range: (f64, f64),
    /// Coordinate permutation applied to the input matrix, if any.
    pub permutation: Option<Vec<usize>>,
}

impl TubeFamilySpec {
    pub fn new(family: CurveFamily<f64>, delta: f64, t_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = t_range;
        if !(-1.0..=1.0).contains(&lo) || !(-1.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidInput(format!("height range [{lo}, {hi}] not inside [−1, 1]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("tube thickness {delta} not in (0, 1)")));
        }
        Ok(TubeFamilySpec { family, ys: Vec::new(), omegas: Vec::new(), delta, t_range, permutation: None })
    }

    pub fn from_tubes(family: CurveFamily<f64>, tubes: &[TubeSpec], t_range: (f64, f64)) -> Result<Self> {
        let delta = tubes.first().map_or(0.5, |t| t.delta);
        let mut spec = TubeFamilySpec::new(family, delta, t_range)?;
        for t in tubes {
            spec.push(&t.params.y, &t.params.omega)?;
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.family.c.dim()
    }

    pub fn push(&mut self, y: &[f64], omega: &[f64]) -> Result<()> {
        let d = self.dim();
        if y.len() != d || omega.len() != d {
            return Err(Error::DimensionMismatch(format!("tube of length ({}, {}) in dimension {d}", y.len(), omega.len())));
        }
        self.ys.extend_from_slice(y);
        self.omegas.extend_from_slice(omega);
        Ok(())
    }

    pub fn len(&self) -> usize {
        if self.dim() == 0 { 0 } else { self.ys.len() / self.dim() }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn y(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.ys[i * d..(i + 1) * d]
    }

    pub fn omega(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.omegas[i * d..(i + 1) * d]
    }

    pub fn tube(&self, i: usize) -> TubeSpec {
        TubeSpec { params: CurveParams::new(self.y(i).to_vec(), self.omega(i).to_vec()), delta: self.delta }
    }

    /// Same tubes, thickness set to δ.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut s = self.clone();
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidInput(format!("tube thickness {delta} not in (0, 1)")));
        }
        s.delta = delta;
        Ok(s)
    }

    /// Points (ω − ty − t²Cy, t) of every tube at `per_tube` evenly spaced
    /// heights of the range.
    pub fn sample_points(&self, per_tube: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.t_range;
        let mut out = Vec::with_capacity(self.len() * per_tube);
        for i in 0..self.len() {
            let p = CurveParams::new(self.y(i).to_vec(), self.omega(i).to_vec());
            for s in 0..per_tube {
                let t = if per_tube == 1 { lo } else { lo + (hi - lo) * s as f64 / (per_tube - 1) as f64 };
                let mut x = self.family.slice_point(&p, &t);
                x.push(t);
                out.push(x);
            }
        }
        out
    }
}

/// Calls `visit(tube, slice_index)` for every slice cell within δ of a tube's
/// point at height jδ. Slice indices are base-S numbers of the shifted
/// coordinates, first coordinate least significant; cells outside the box
/// are skipped.
fn stamp_height(spec: &TubeFamilySpec, cy: &[f64], k: u32, j: i64, mut visit: impl FnMut(usize, u64)) {
    let d = spec.dim();
    let delta = 2f64.powi(-(k as i32));
    let (s, off) = (side(k) as i64, offset(k));
    let t = j as f64 * delta;
    let t2 = t * t;
    let strides: Vec<u64> = (0..d).map(|a| (s as u64).pow(a as u32)).collect();
    // per axis: up to three (squared distance, index contribution) choices
    let mut axes = vec![[(0.0f64, 0u64); 3]; d];
    let mut counts = vec![0usize; d];
    for i in 0..spec.len() {
        let (y, w, c) = (spec.y(i), spec.omega(i), &cy[i * d..(i + 1) * d]);
        for a in 0..d {
            let q = (w[a] - t * y[a] - t2 * c[a]) / delta;
            let base = q.round() as i64;
            counts[a] = 0;
            for cell in base - 1..=base + 1 {
                let diff = cell as f64 - q;
                let v = cell + off;
                if diff * diff <= 1.0 && v >= 0 && v < s {
                    axes[a][counts[a]] = (diff * diff, v as u64 * strides[a]);
                    counts[a] += 1;
                }
            }
        }
        visit_axes(&axes, &counts, 0, 0.0, 0, &mut |idx| visit(i, idx));
    }
}

fn visit_axes(axes: &[[(f64, u64); 3]], counts: &[usize], a: usize, dist: f64, idx: u64, visit: &mut impl FnMut(u64)) {
    if a == axes.len() {
        visit(idx);
        return;
    }
    for &(dd, contrib) in &axes[a][..counts[a]] {
        if dist + dd <= 1.0 {
            visit_axes(axes, counts, a + 1, dist + dd, idx + contrib, visit);
        }
    }
}

fn height_indices(spec: &TubeFamilySpec, k: u32) -> std::ops::RangeInclusive<i64> {
    let scale = 2f64.powi(k as i32);
    let lo = (spec.t_range.0 * scale).ceil() as i64;
    let hi = (spec.t_range.1 * scale).floor() as i64;
    lo..=hi
}

fn images_of_c(spec: &TubeFamilySpec) -> Vec<f64> {
    (0..spec.len()).flat_map(|i| spec.family.c.mul_vec(spec.y(i)).expect("dims")).collect()
}

/// Cells of the δ-neighbourhood at δ = 2^−k: at each height jδ in the
/// range, every cell whose centre is within δ of some tube's slice point.
pub fn rasterize(spec: &TubeFamilySpec, k: u32) -> Result<CellSet> {
    let n = spec.dim() + 1;
    check_grid(n, k)?;
    let d = spec.dim();
    let cy = images_of_c(spec);
    let s = side(k);
    let slice_cells = s.pow(d as u32);
    let heights: Vec<i64> = height_indices(spec, k).collect();
    let layers: Vec<Vec<u64>> = heights
        .par_iter()
        .map(|&j| {
            let mut idx: Vec<u64> = if slice_cells <= SLICE_BITSET_LIMIT {
                let mut bits = vec![0u64; slice_cells.div_ceil(64) as usize];
                stamp_height(spec, &cy, k, j, |_, c| bits[(c / 64) as usize] |= 1 << (c % 64));
                let mut out = Vec::new();
                for (w, &word) in bits.iter().enumerate() {
                    let mut rest = word;
                    while rest != 0 {
                        out.push(w as u64 * 64 + rest.trailing_zeros() as u64);
                        rest &= rest - 1;
                    }
                }
                out
            } else {
                let mut set = HashSet::new();
                stamp_height(spec, &cy, k, j, |_, c| {
                    set.insert(c);
                });
                let mut v: Vec<u64> = set.into_iter().collect();
                v.sort_unstable();
                v
            };
            let layer = (j + offset(k)) as u64 * slice_cells;
            idx.iter_mut().for_each(|c| *c += layer);
            idx
        })
        .collect();
    let total: usize = layers.iter().map(Vec::len).sum();
    if total > CELL_BUDGET {
        return Err(Error::ResolutionTooFine(format!("{total} occupied cells exceed the budget")));
    }
    Ok(CellSet { n, k, keys: layers.concat() })
}

/// (δⁿ Σ_cells (number of tubes covering the cell)^{p'})^{1/p'}.
pub fn covering_norm(spec: &TubeFamilySpec, p_prime: f64, k: u32) -> Result<f64> {
    if !(p_prime >= 1.0) {
        return Err(Error::InvalidInput(format!("p' = {p_prime} < 1")));
    }
    let n = spec.dim() + 1;
    check_grid(n, k)?;
    let cy = images_of_c(spec);
    let slice_cells = side(k).pow(spec.dim() as u32);
    let heights: Vec<i64> = height_indices(spec, k).collect();
    let sum: f64 = heights
        .par_iter()
        .map(|&j| {
            let vals: Vec<u64> = if slice_cells <= SLICE_BITSET_LIMIT / 16 {
                let mut counts = vec![0u32; slice_cells as usize];
                stamp_height(spec, &cy, k, j, |_, c| counts[c as usize] += 1);
                counts.into_iter().filter(|&c| c > 0).map(u64::from).collect()
            } else {
                let mut counts: std::collections::HashMap<u64, u64> = std::collections::HashMap::new();
                stamp_height(spec, &cy, k, j, |_, c| *counts.entry(c).or_default() += 1);
                let mut v: Vec<u64> = counts.into_values().collect();
                v.sort_unstable();
                v
            };
            vals.iter().map(|&c| (c as f64).powf(p_prime)).sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let cell = 2f64.powi(-(k as i32 * n as i32));
    Ok((cell * sum).powf(1.0 / p_prime))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionFit {
    pub slope: f64,
    /// Root mean square residual of the fit.
    pub fit_residual: f64,
    /// (k, occupied cells, volume) per resolution.
    pub rows: Vec<(u32, usize, f64)>,
}

/// Least-squares slope of log #cells against log(1/δ).
pub fn fit_dimension(rows: Vec<(u32, usize, f64)>) -> Result<DimensionFit> {
    if rows.len() < 2 {
        return Err(Error::InvalidInput("need at least two resolutions".into()));
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|&(k, c, _)| (k as f64 * std::f64::consts::LN_2, (c.max(1) as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("resolutions must differ".into()));
    }
    let slope = sxy / sxx;
    let fit_residual = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / m).sqrt();
    Ok(DimensionFit { slope, fit_residual, rows })
}

/// Builds the set at each resolution and fits the box-counting slope.
pub fn box_dimension(builder: impl Fn(u32) -> Result<CellSet>, ks: &[u32]) -> Result<DimensionFit> {
    if ks.len() < 3 || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("need at least three increasing resolutions".into()));
    }
    let rows = ks
        .iter()
        .map(|&k| builder(k).map(|c| (k, c.len(), c.volume())))
        .collect::<Result<Vec<_>>>()?;
    fit_dimension(rows)
}

/// max |x₁ − x₂x₃| over points of ℝ³.
pub fn surface_residual(points: &[Vec<f64>]) -> Result<f64> {
    points.iter().try_fold(0.0f64, |acc, p| {
        if p.len() != 3 {
            return Err(Error::DimensionMismatch(format!("point of length {} is not in ℝ³", p.len())));
        }
        Ok(acc.max((p[0] - p[1] * p[2]).abs()))
    })
}
