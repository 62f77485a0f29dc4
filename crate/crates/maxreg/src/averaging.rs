//! Ball and sphere stencils, discrete averages, radial profiles and the
//! fixed-fraction average operator.
//!
//! All admissible radii are integer multiples of the grid spacing. The ball
//! at radius `k h` consists of the integer offsets with `|o| <= k`; it is
//! partitioned into rings `(j-1)h < |o| h <= j h`, and every ball sum is
//! defined as the ordered fold of ring subtotals (ring-major, row-major
//! within a ring). Both maximal engines and every average in this module
//! evaluate that same fold, which is what makes their outputs bitwise
//! comparable.
//!
//! The sphere stencil at radius `k h` is the half-open annulus
//! `(k - 1/2) h < |o| h <= (k + 1/2) h`. Near the top of the radius ladder
//! the half-width slop can poke past the domain even though `k h < delta`;
//! those nodes are skipped and the count adjusted.

use std::sync::Arc;

use crate::lattice::{Lattice, Mask, ScalarField, MAX_DIM};
use crate::maxops::MultiField;
use crate::{Error, Result};

/// Volume of the unit ball in `n` dimensions, `n <= 3`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => unreachable!("dimension {n} unsupported"),
    }
}

/// Surface measure of the sphere of radius `r` in `n` dimensions.
pub fn sphere_measure(n: usize, r: f64) -> f64 {
    n as f64 * unit_ball_volume(n) * r.powi(n as i32 - 1)
}

#[derive(Debug, Clone)]
struct OffsetSet {
    /// Coordinate offsets, row-major order.
    coords: Vec<[i32; MAX_DIM]>,
    /// Flattened index deltas for the owning grid.
    flat: Vec<isize>,
}

impl OffsetSet {
    fn len(&self) -> usize {
        self.coords.len()
    }
}

/// Per-grid cache of ring and shell stencils, shared across all points.
#[derive(Debug)]
pub struct StencilTable {
    mask: Arc<Mask>,
    /// `rings[k]`: offsets with `(k-1)h < |o|h <= kh`; `rings[0]` is the
    /// center alone. Union of rings `0..=k` is the ball `|o|h <= kh`.
    rings: Vec<OffsetSet>,
    /// `shells[k]`: offsets with `(k-1/2)h < |o|h <= (k+1/2)h`.
    shells: Vec<OffsetSet>,
    /// Cumulative ball node counts: `ball_counts[k] = |{o : |o| <= k}|`.
    ball_counts: Vec<usize>,
    max_index: usize,
}

impl StencilTable {
    /// Builds rings and shells up to radius index `k_max`.
    pub fn build(mask: Arc<Mask>, k_max: usize) -> StencilTable {
        let n = mask.grid.dim();
        let st = mask.grid.strides();
        let k = k_max as i64;
        let mut rings: Vec<(Vec<[i32; MAX_DIM]>, Vec<isize>)> =
            vec![(Vec::new(), Vec::new()); k_max + 1];
        let mut shells: Vec<(Vec<[i32; MAX_DIM]>, Vec<isize>)> =
            vec![(Vec::new(), Vec::new()); k_max + 1];
        let bound = |i: usize| if i < n { k } else { 0 };
        // Row-major sweep so each ring/shell inherits a fixed order.
        for a in -bound(0)..=bound(0) {
            for b in -bound(1)..=bound(1) {
                for c in -bound(2)..=bound(2) {
                    let q2 = (a * a + b * b + c * c) as f64;
                    let norm = q2.sqrt();
                    let mut coord = [0i32; MAX_DIM];
                    coord[0] = a as i32;
                    coord[1] = b as i32;
                    coord[2] = c as i32;
                    let mut flat = 0isize;
                    for i in 0..n {
                        flat += coord[i] as isize * st[i];
                    }
                    // Ring index: smallest j with |o| <= j.
                    let j = norm.ceil() as usize;
                    if j <= k_max && (j == 0 || norm > (j - 1) as f64) {
                        rings[j].0.push(coord);
                        rings[j].1.push(flat);
                    }
                    // Shell index: |o| in (s - 1/2, s + 1/2].
                    let s = (norm - 0.5).ceil() as usize;
                    if s <= k_max && norm > s as f64 - 0.5 && norm <= s as f64 + 0.5 {
                        shells[s].0.push(coord);
                        shells[s].1.push(flat);
                    }
                }
            }
        }
        let rings: Vec<OffsetSet> = rings
            .into_iter()
            .map(|(coords, flat)| OffsetSet { coords, flat })
            .collect();
        let shells: Vec<OffsetSet> = shells
            .into_iter()
            .map(|(coords, flat)| OffsetSet { coords, flat })
            .collect();
        let mut ball_counts = Vec::with_capacity(k_max + 1);
        let mut acc = 0usize;
        for r in &rings {
            acc += r.len();
            ball_counts.push(acc);
        }
        StencilTable {
            mask,
            rings,
            shells,
            ball_counts,
            max_index: k_max,
        }
    }

    /// Builds a table large enough for every admissible radius on `lat`.
    pub fn for_lattice(lat: &Lattice) -> StencilTable {
        let k_max = max_ladder_index(lat.max_delta(), lat.h());
        StencilTable::build(lat.mask.clone(), k_max)
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn mask(&self) -> &Arc<Mask> {
        &self.mask
    }

    /// Number of nodes in the ball of radius index `k`.
    pub fn ball_count(&self, k: usize) -> usize {
        self.ball_counts[k]
    }

    /// Number of offsets in the full (unclipped) shell at radius index `k`.
    pub fn shell_count(&self, k: usize) -> usize {
        self.shells[k].len()
    }

    /// Coordinate offsets of the ring `(k-1)h < |o|h <= kh`.
    pub fn ring_offsets(&self, k: usize) -> &[[i32; MAX_DIM]] {
        &self.rings[k].coords
    }

    /// Number of offsets in the ring at radius index `k`.
    pub fn ring_len(&self, k: usize) -> usize {
        self.rings[k].len()
    }

    /// Sum over the ring `(k-1)h < |o|h <= kh`, in the canonical order.
    /// Caller guarantees the whole ball at `k` stays inside the domain.
    #[inline]
    pub fn ring_sum(&self, values: &[f64], center_flat: usize, k: usize) -> f64 {
        let ring = &self.rings[k];
        let mut s = 0.0;
        let base = center_flat as isize;
        for &d in &ring.flat {
            debug_assert!(self.mask.inside[(base + d) as usize]);
            s += values[(base + d) as usize];
        }
        s
    }

    /// Canonical from-scratch ball sum: ordered fold of ring subtotals.
    pub fn ball_sum_fresh(&self, values: &[f64], center_flat: usize, k: usize) -> f64 {
        let mut total = 0.0;
        for j in 0..=k {
            total += self.ring_sum(values, center_flat, j);
        }
        total
    }

    /// Shell sum with boundary clipping; returns `(sum, used_count)`.
    pub fn shell_sum_clipped(&self, values: &[f64], center_flat: usize, k: usize) -> (f64, usize) {
        let shell = &self.shells[k];
        let grid = &self.mask.grid;
        let n = grid.dim();
        let c = grid.coords(center_flat);
        let mut s = 0.0;
        let mut used = 0usize;
        'offsets: for (coord, &d) in shell.coords.iter().zip(&shell.flat) {
            for i in 0..n {
                let ci = c[i] as isize + coord[i] as isize;
                if ci < 0 || ci >= grid.shape[i] as isize {
                    continue 'offsets;
                }
            }
            let idx = (center_flat as isize + d) as usize;
            if self.mask.inside[idx] {
                s += values[idx];
                used += 1;
            }
        }
        (s, used)
    }
}

/// Largest `k >= 0` with `k * h < delta` (0 means the ladder is empty).
pub fn max_ladder_index(delta: f64, h: f64) -> usize {
    debug_assert!(h > 0.0);
    if !(delta > h) {
        // Even k = 1 needs h < delta.
        return if h < delta { 1 } else { 0 };
    }
    let mut k = ((delta / h).ceil() as i64 - 1).max(0) as usize;
    while k > 0 && !((k as f64) * h < delta) {
        k -= 1;
    }
    while ((k + 1) as f64) * h < delta {
        k += 1;
    }
    k
}

/// Admissible radii `{k h : k >= 1, k h < delta}`, in increasing order.
pub fn radius_ladder(delta: f64, h: f64) -> Vec<f64> {
    if !(delta > 0.0) || !(h > 0.0) {
        return Vec::new();
    }
    let k_max = max_ladder_index(delta, h);
    (1..=k_max).map(|k| k as f64 * h).collect()
}

/// Discrete ball average `(1/count) * sum over |o|h <= r of f(x + o h)`.
///
/// `r` must be (within rounding) an integer multiple of the spacing below
/// `delta(x)`; all touched nodes are then inside the domain.
pub fn ball_average(
    f: &ScalarField,
    table: &StencilTable,
    lat: &Lattice,
    center_flat: usize,
    r: f64,
) -> Result<f64> {
    let h = lat.h();
    let delta = lat.delta.get(center_flat)?;
    if !(r < delta) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} >= delta {delta}"
        )));
    }
    let k = (r / h).round() as usize;
    if k < 1 {
        return Err(Error::EmptyStencil(format!("radius {r} below spacing {h}")));
    }
    let sum = table.ball_sum_fresh(f.raw(), center_flat, k);
    Ok(sum / table.ball_count(k) as f64)
}

/// Discrete sphere average over the half-open shell at radius `r = k h`.
///
/// Requires `r >= 2h` (thinner shells are unreliable) and `r < delta(x)`.
pub fn sphere_average(
    f: &ScalarField,
    table: &StencilTable,
    lat: &Lattice,
    center_flat: usize,
    r: f64,
) -> Result<f64> {
    let h = lat.h();
    let delta = lat.delta.get(center_flat)?;
    if !(r < delta) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} >= delta {delta}"
        )));
    }
    let k = (r / h).round() as usize;
    if k < 2 {
        return Err(Error::EmptyStencil(format!(
            "shell radius {r} below 2h = {}",
            2.0 * h
        )));
    }
    let (sum, used) = table.shell_sum_clipped(f.raw(), center_flat, k);
    if used == 0 {
        return Err(Error::EmptyStencil(format!("shell at radius {r} is empty")));
    }
    Ok(sum / used as f64)
}

/// The sampled map `r -> u(r) = r^alpha * prod_i avg_{B(x,r)}(f_i)` over the
/// admissible ladder at one point, plus its `r = 0` value.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    /// Flat node index of the center.
    pub center_flat: usize,
    /// Strictly increasing ladder radii, all below `delta(x)`.
    pub radii: Vec<f64>,
    /// `u(r)` per ladder entry.
    pub values: Vec<f64>,
    /// `prod |f_i(x)|` when `alpha = 0`, else `0`.
    pub value_at_zero: f64,
}

impl RadialProfile {
    /// Maximum of the profile including the `r = 0` entry.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(self.value_at_zero, f64::max)
    }
}

/// Precomputed `(k h)^alpha` for `k = 0..=k_max`, shared by every evaluation
/// path so that identical radii always produce identical powers.
pub fn radius_powers(h: f64, alpha: f64, k_max: usize) -> Vec<f64> {
    (0..=k_max)
        .map(|k| {
            if alpha == 0.0 {
                1.0
            } else {
                (k as f64 * h).powf(alpha)
            }
        })
        .collect()
}

/// One profile entry from per-slot ball sums. Fixed operation order: powers
/// first, then slot averages left to right.
#[inline]
pub fn profile_value(rpow: f64, slot_sums: &[f64], count: f64) -> f64 {
    let mut v = rpow;
    for &s in slot_sums {
        v *= s / count;
    }
    v
}

/// `u(0)`: the product of point values when `alpha = 0`, zero otherwise.
#[inline]
pub fn profile_value_at_zero(fields: &MultiField, center_flat: usize, alpha: f64) -> f64 {
    if alpha > 0.0 {
        return 0.0;
    }
    let mut v = 1.0;
    for slot in fields.slots() {
        v *= slot.raw()[center_flat];
    }
    v
}

/// Evaluates the radial profile of `fields` at one point by the incremental
/// ring recurrence (each ring visited once).
pub fn radial_profile(
    fields: &MultiField,
    table: &StencilTable,
    lat: &Lattice,
    center_flat: usize,
    alpha: f64,
) -> Result<RadialProfile> {
    let h = lat.h();
    let delta = lat.delta.get(center_flat)?;
    let k_max = max_ladder_index(delta, h);
    let rpow = radius_powers(h, alpha, k_max);
    let m = fields.m();
    let mut sums = vec![0.0f64; m];
    for (i, slot) in fields.slots().iter().enumerate() {
        sums[i] = table.ring_sum(slot.raw(), center_flat, 0);
    }
    let mut radii = Vec::with_capacity(k_max);
    let mut values = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        for (i, slot) in fields.slots().iter().enumerate() {
            sums[i] += table.ring_sum(slot.raw(), center_flat, k);
        }
        radii.push(k as f64 * h);
        values.push(profile_value(rpow[k], &sums, table.ball_count(k) as f64));
    }
    Ok(RadialProfile {
        center_flat,
        radii,
        values,
        value_at_zero: profile_value_at_zero(fields, center_flat, alpha),
    })
}

/// Fixed-fraction average field: at each inside point, the profile value at
/// `t * delta(x)` snapped down to the nearest ladder radius; points whose
/// ladder is empty (or where the snap lands below the first rung) take the
/// `r = 0` profile value.
pub fn fractional_average_field(
    fields: &MultiField,
    table: &StencilTable,
    lat: &Lattice,
    t: f64,
    alpha: f64,
) -> Result<ScalarField> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("t={t} outside (0,1)")));
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParameter(format!("alpha={alpha} negative")));
    }
    let h = lat.h();
    let k_table = table.max_index();
    let rpow = radius_powers(h, alpha, k_table);
    let m = fields.m();
    let mut out = ScalarField::zeros(lat.mask.clone());
    let mask = lat.mask.clone();
    for &flat in &mask.inside_nodes {
        let delta = lat.delta.raw()[flat];
        let target = t * delta;
        // Snap down, then clamp to the admissible ladder.
        let mut k = (target / h).floor() as usize;
        let k_max = max_ladder_index(delta, h);
        k = k.min(k_max);
        let v = if k == 0 {
            profile_value_at_zero(fields, flat, alpha)
        } else {
            let mut sums = vec![0.0f64; m];
            for (i, slot) in fields.slots().iter().enumerate() {
                sums[i] = table.ball_sum_fresh(slot.raw(), flat, k);
            }
            profile_value(rpow[k], &sums, table.ball_count(k) as f64)
        };
        out.raw_mut()[flat] = v;
    }
    Ok(out)
}
