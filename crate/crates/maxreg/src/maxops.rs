//! Local maximal operators over the radius ladder, their argmax radius
//! sets, and the Hausdorff distance used to compare those sets.
//!
//! Two engines compute the same supremum. The oracle recomputes every ball
//! sum from scratch at every ladder radius; the fast engine sweeps each ring
//! once and carries running sums. Both fold ring subtotals in the same
//! order and push them through the same product expression, so their
//! outputs agree bit for bit — the oracle checks the bookkeeping of the
//! fast path, not a different rounding of it.

use rayon::prelude::*;

use crate::averaging::{
    max_ladder_index, profile_value, profile_value_at_zero, radius_powers, RadialProfile,
    StencilTable,
};
use crate::lattice::{Lattice, ScalarField};
use crate::{Error, Result};

/// An ordered tuple of nonnegative fields on one shared grid and mask.
/// Ingestion takes absolute values: the operators only ever see `|f_j|`.
#[derive(Debug, Clone)]
pub struct MultiField {
    slots: Vec<ScalarField>,
}

impl MultiField {
    pub fn new(slots: Vec<ScalarField>) -> Result<MultiField> {
        if slots.is_empty() {
            return Err(Error::InvalidParameter("need at least one slot".into()));
        }
        let mask = slots[0].mask.clone();
        for s in &slots[1..] {
            if !std::sync::Arc::ptr_eq(&s.mask, &mask) {
                return Err(Error::InvalidParameter(
                    "all slots must share one mask".into(),
                ));
            }
        }
        let slots = slots
            .into_iter()
            .map(|s| s.map(f64::abs))
            .collect::<Vec<_>>();
        Ok(MultiField { slots })
    }

    pub fn m(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[ScalarField] {
        &self.slots
    }

    pub fn slot(&self, i: usize) -> &ScalarField {
        &self.slots[i]
    }

    /// Copy with slot `i` replaced (the replacement is also rectified).
    pub fn with_slot(&self, i: usize, field: ScalarField) -> Result<MultiField> {
        let mut slots = self.slots.clone();
        slots[i] = field;
        MultiField::new(slots)
    }
}

/// Which evaluation path computes the maximal field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// Recomputes every ball sum from scratch per radius; O(ladder x ball).
    Oracle,
    /// Incremental ring sweep; O(largest ball) per point.
    Fast,
}

/// Maximal field plus, per inside point, the set of (near-)maximizing
/// radii within a relative tolerance band.
#[derive(Debug)]
pub struct MaxResult {
    pub value: ScalarField,
    /// Per inside point (in `inside_nodes` order): radii `r` with
    /// `u(r) >= (1 - rel_tol) * max u`, always including exact ties.
    pub argmax_radii: Vec<Vec<f64>>,
    pub rel_tol: f64,
}

fn validate_alpha(alpha: f64, limit: f64, what: &str) -> Result<()> {
    if !(alpha >= 0.0 && alpha < limit) {
        return Err(Error::InvalidParameter(format!(
            "alpha={alpha} outside [0, {limit}) for {what}"
        )));
    }
    Ok(())
}

/// Evaluates the multilinear maximal operator over the radius ladder.
///
/// `rel_tol` widens the reported argmax sets: every radius whose profile
/// value is within `rel_tol` (relatively) of the maximum is included.
pub fn local_maximal_field(
    fields: &MultiField,
    table: &StencilTable,
    lat: &Lattice,
    alpha: f64,
    engine: EngineKind,
    rel_tol: f64,
) -> Result<MaxResult> {
    let m = fields.m();
    let n = lat.dim();
    validate_alpha(alpha, (m * n) as f64, "the multilinear operator")?;
    if !(0.0..=0.1).contains(&rel_tol) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol={rel_tol} outside [0, 0.1]"
        )));
    }
    let h = lat.h();
    let rpow = radius_powers(h, alpha, table.max_index());
    let nodes = &lat.mask.inside_nodes;
    let per_point: Vec<(f64, Vec<f64>)> = nodes
        .par_iter()
        .map(|&flat| {
            let delta = lat.delta.raw()[flat];
            let k_max = max_ladder_index(delta, h);
            let mut u = Vec::with_capacity(k_max + 1);
            u.push(profile_value_at_zero(fields, flat, alpha));
            match engine {
                EngineKind::Fast => {
                    let mut sums = vec![0.0f64; m];
                    for (i, slot) in fields.slots().iter().enumerate() {
                        sums[i] = table.ring_sum(slot.raw(), flat, 0);
                    }
                    for k in 1..=k_max {
                        for (i, slot) in fields.slots().iter().enumerate() {
                            sums[i] += table.ring_sum(slot.raw(), flat, k);
                        }
                        u.push(profile_value(rpow[k], &sums, table.ball_count(k) as f64));
                    }
                }
                EngineKind::Oracle => {
                    let mut sums = vec![0.0f64; m];
                    for k in 1..=k_max {
                        for (i, slot) in fields.slots().iter().enumerate() {
                            sums[i] = table.ball_sum_fresh(slot.raw(), flat, k);
                        }
                        u.push(profile_value(rpow[k], &sums, table.ball_count(k) as f64));
                    }
                }
            }
            let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cut = (1.0 - rel_tol) * max;
            let radii: Vec<f64> = u
                .iter()
                .enumerate()
                .filter(|(_, &v)| v >= cut)
                .map(|(k, _)| k as f64 * h)
                .collect();
            (max, radii)
        })
        .collect();
    let values: Vec<f64> = per_point.iter().map(|(v, _)| *v).collect();
    let argmax_radii: Vec<Vec<f64>> = per_point.into_iter().map(|(_, r)| r).collect();
    let value = ScalarField::from_inside_values(lat.mask.clone(), &values)?;
    Ok(MaxResult {
        value,
        argmax_radii,
        rel_tol,
    })
}

/// The spherical maximal operator: per point, the supremum of
/// `r^alpha * sphere_average(|f|, x, r)` over ladder radii `r >= 2h`.
/// Points with no admissible shell get zero.
pub fn spherical_maximal_field(
    f: &ScalarField,
    table: &StencilTable,
    lat: &Lattice,
    alpha: f64,
) -> Result<ScalarField> {
    validate_alpha(alpha, lat.dim() as f64, "the spherical operator")?;
    let h = lat.h();
    let rpow = radius_powers(h, alpha, table.max_index());
    let absf = f.map(f64::abs);
    let nodes = &lat.mask.inside_nodes;
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&flat| {
            let delta = lat.delta.raw()[flat];
            let k_max = max_ladder_index(delta, h);
            let mut best = 0.0f64;
            for k in 2..=k_max {
                let (sum, used) = table.shell_sum_clipped(absf.raw(), flat, k);
                if used == 0 {
                    continue;
                }
                let v = rpow[k] * (sum / used as f64);
                best = best.max(v);
            }
            best
        })
        .collect();
    ScalarField::from_inside_values(lat.mask.clone(), &values)
}

/// Radii (including 0) whose profile value is within `rel_tol` of the max.
pub fn argmax_radii(profile: &RadialProfile, rel_tol: f64) -> Vec<f64> {
    let max = profile.max_value();
    let cut = (1.0 - rel_tol) * max;
    let mut out = Vec::new();
    if profile.value_at_zero >= cut {
        out.push(0.0);
    }
    for (&r, &v) in profile.radii.iter().zip(&profile.values) {
        if v >= cut {
            out.push(r);
        }
    }
    out
}

/// Symmetric Hausdorff distance between two nonempty finite sets of reals.
pub fn hausdorff_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet(
            "hausdorff distance needs nonempty sets".into(),
        ));
    }
    let directed = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter()
                    .map(|&y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}
