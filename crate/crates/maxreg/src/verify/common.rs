use crate::lattice::ScalarField;
use crate::maxops::{hausdorff_distance, MaxResult};
use crate::verify::Realized;
use crate::Result;

/// Tolerance band used when argmax sets feed an exclusion or stability
/// decision (exact float ties are measure-zero events).
pub const STABILITY_REL_TOL: f64 = 1e-3;

/// Suite constant in the additive tolerance `eps(h) = 10 h scale`.
pub const EPS_FACTOR: f64 = 10.0;

/// Partition of the inside points for a gradient-based check.
pub struct CheckedSet {
    /// Inside-point positions that participate.
    pub checked: Vec<usize>,
    pub excluded_collar: usize,
    pub excluded_jump: usize,
}

impl CheckedSet {
    pub fn excluded(&self) -> usize {
        self.excluded_collar + self.excluded_jump
    }
}

/// Applies the two standing exclusions: the boundary collar
/// `delta <= 4h`, and points whose argmax set jumps by more than `4h`
/// (Hausdorff) against some axis neighbor.
pub fn checked_points(realized: &Realized, base: &MaxResult) -> Result<CheckedSet> {
    let lat = &realized.lattice;
    let mask = &lat.mask;
    let grid = &mask.grid;
    let h = lat.h();
    let n = grid.dim();
    let st = grid.strides();
    let jump_tol = 4.0 * h;
    let mut checked = Vec::new();
    let mut excluded_collar = 0usize;
    let mut excluded_jump = 0usize;
    'points: for (pos, &flat) in mask.inside_nodes.iter().enumerate() {
        if lat.delta.raw()[flat] <= 4.0 * h {
            excluded_collar += 1;
            continue;
        }
        let c = grid.coords(flat);
        for axis in 0..n {
            for dir in [-1isize, 1isize] {
                let ci = c[axis] as isize + dir;
                if ci < 0 || ci >= grid.shape[axis] as isize {
                    continue;
                }
                let nb = (flat as isize + dir * st[axis]) as usize;
                if !mask.inside[nb] {
                    continue;
                }
                let nb_pos = mask.inside_index[nb] as usize;
                let d = hausdorff_distance(&base.argmax_radii[pos], &base.argmax_radii[nb_pos])?;
                if d > jump_tol {
                    excluded_jump += 1;
                    continue 'points;
                }
            }
        }
        checked.push(pos);
    }
    Ok(CheckedSet {
        checked,
        excluded_collar,
        excluded_jump,
    })
}

/// Magnitude scale of the two-term gradient bound, built from slot sup
/// norms: `sum_l G_l prod_{j!=l} S_j + alpha * D^(alpha-1) * prod_j S_j`.
pub fn bound_scale(realized: &Realized, alpha: f64) -> Result<f64> {
    let scales = realized.slot_scales()?;
    let prod_all: f64 = scales.iter().map(|(s, _)| s.max(0.0)).product();
    let mut scale = 0.0;
    for l in 0..scales.len() {
        let mut term = scales[l].1;
        for (j, (s, _)) in scales.iter().enumerate() {
            if j != l {
                term *= s;
            }
        }
        scale += term;
    }
    if alpha > 0.0 {
        let d_max = realized.lattice.max_delta();
        scale += alpha * d_max.powf(alpha - 1.0) * prod_all;
    }
    Ok(scale)
}

/// `|W^{1,q}|` norm of a field: `L^q` plus `L^q` of the finite-difference
/// gradient magnitude.
pub fn w1q_norm(f: &ScalarField, q: f64) -> Result<f64> {
    let grad = crate::sobolev::gradient_field(f);
    Ok(crate::sobolev::lp_norm(f, q)? + crate::sobolev::lp_norm(&grad.magnitude(), q)?)
}
