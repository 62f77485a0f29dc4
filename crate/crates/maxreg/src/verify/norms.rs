//! Sobolev norm-ratio reporting and the zero-boundary-value checks.

use crate::averaging::fractional_average_field;
use crate::maxops::{local_maximal_field, EngineKind, MultiField};
use crate::sobolev::{delta_weighted_norm, lp_norm, sobolev_norm};
use crate::verify::common::w1q_norm;
use crate::verify::report::VerificationReport;
use crate::verify::scene::{Realized, Scenario};
use crate::{Error, Result};

fn finite_q(realized: &Realized) -> Result<f64> {
    realized
        .exponents
        .q
        .ok_or_else(|| Error::HypothesesUnmet("norm checks need a finite q in (1, inf)".into()))
}

fn norm_ratio_once(realized: &Realized) -> Result<(f64, Option<f64>, String)> {
    let q = finite_q(realized)?;
    let alpha = realized.scenario.alpha;
    let res = local_maximal_field(
        &realized.fields,
        &realized.table,
        &realized.lattice,
        alpha,
        EngineKind::Fast,
        0.0,
    )?;
    let num = w1q_norm(&res.value, q)?;
    let mut den = 1.0;
    for (j, slot) in realized.fields.slots().iter().enumerate() {
        den *= sobolev_norm(slot, realized.scenario.p[j])?;
    }
    let ratio = num / den;
    // Lebesgue-data variant of the denominator, reported when the
    // spherical-branch window holds.
    let lp_ratio = if realized.exponents.flags.tb_ii {
        let mut d = 1.0;
        for (j, slot) in realized.fields.slots().iter().enumerate() {
            d *= lp_norm(slot, realized.scenario.p[j])?;
        }
        Some(num / d)
    } else {
        None
    };
    let note = format!(
        "h={:.6}: |M|_W1q={num:.6}, product of slot norms={den:.6}, ratio={ratio:.6}",
        realized.h()
    );
    Ok((ratio, lp_ratio, note))
}

/// Norm-ratio check: `|M_a(f)|_W1q / prod_j |f_j|_W1pj` must be stable
/// (within 2x) under grid refinement. For `alpha = 0` the stated constant
/// `2m` is compared advisorily: exceeding it warns, it does not fail.
pub fn check_norm_bounds(scenario: &Scenario) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    let applicable = if scenario.alpha == 0.0 {
        exps.flags.bd1
    } else {
        exps.flags.tb_i || exps.flags.tb_ii
    };
    if !applicable {
        return Err(Error::HypothesesUnmet(
            "norm-bound check needs the boundedness exponent window".into(),
        ));
    }
    let coarse = norm_ratio_once(&scenario.realize()?)?;
    let fine_real = scenario.realize_at(scenario.h / 2.0)?;
    let fine = norm_ratio_once(&fine_real)?;
    let ratio_drift = if coarse.0 > 0.0 && fine.0 > 0.0 {
        (fine.0 / coarse.0).max(coarse.0 / fine.0)
    } else {
        1.0
    };
    let pass = fine.0.is_finite() && coarse.0.is_finite() && ratio_drift <= 2.0;
    let mut notes = vec![coarse.2, fine.2];
    notes.push(format!("refinement drift of the ratio: {ratio_drift:.4}"));
    if scenario.alpha == 0.0 {
        let bound = 2.0 * scenario.m() as f64;
        if fine.0 > bound {
            notes.push(format!(
                "warning: ratio {:.4} exceeds the stated constant 2m = {bound} (advisory)",
                fine.0
            ));
        } else {
            notes.push(format!("ratio within the stated constant 2m = {bound}"));
        }
    }
    if let Some(lp) = fine.1 {
        notes.push(format!("Lebesgue-data ratio at fine grid: {lp:.6}"));
    }
    Ok(VerificationReport {
        check_id: "norm_bounds".to_string(),
        exponents: exps,
        grid_h: scenario.h / 2.0,
        points_total: fine_real.lattice.mask.inside_count(),
        points_checked: fine_real.lattice.mask.inside_count(),
        points_excluded: 0,
        pass_fraction: if pass { 1.0 } else { 0.0 },
        empirical_constant: fine.0,
        tolerance_model: "ratio stability within 2x across h -> h/2".into(),
        pass,
        advisory: false,
        notes,
    })
}

struct ZeroBoundaryStats {
    collar_violations: usize,
    ladder_violations: Option<usize>,
    weighted_gap_norm: Option<f64>,
    flatness_c: Option<f64>,
    note: String,
}

fn zero_boundary_once(realized: &Realized) -> Result<ZeroBoundaryStats> {
    let lat = &realized.lattice;
    let table = &realized.table;
    let fields = &realized.fields;
    let alpha = realized.scenario.alpha;
    let q = finite_q(realized)?;
    let res = local_maximal_field(fields, table, lat, alpha, EngineKind::Fast, 0.0)?;

    // (a) Exact vanishing on the collar delta < d0/2 when every slot has
    // compact support at distance d0 from the complement.
    let mut d0: Option<f64> = Some(f64::INFINITY);
    for g in &realized.scenario.generators {
        match g.compact_support() {
            Some((c, rho)) => {
                let reach = realized.lattice.domain.distance_to_complement(&c) - rho;
                d0 = d0.map(|d| d.min(reach));
            }
            None => {
                d0 = None;
                break;
            }
        }
    }
    let (mut collar_points, mut collar_violations) = (0usize, 0usize);
    if let Some(d0) = d0.filter(|d| *d > 0.0) {
        for (flat, v) in res.value.iter_inside() {
            if lat.delta.raw()[flat] < d0 / 2.0 {
                collar_points += 1;
                if v != 0.0 {
                    collar_violations += 1;
                }
            }
        }
    }

    // (b) For alpha >= 1: M_a / delta <= M_(a-1) pointwise, hence in norm.
    let ladder_violations = if alpha >= 1.0 {
        let lower =
            local_maximal_field(fields, table, lat, alpha - 1.0, EngineKind::Fast, 0.0)?.value;
        let mut bad = 0usize;
        for &flat in &lat.mask.inside_nodes {
            let lhs = res.value.raw()[flat] / lat.delta.raw()[flat];
            if lhs > lower.raw()[flat] {
                bad += 1;
            }
        }
        let wn = delta_weighted_norm(&res.value, &lat.delta, q)?;
        let ln = lp_norm(&lower, q)?;
        if wn > ln {
            bad += 1;
        }
        Some(bad)
    } else {
        None
    };

    // (c) For alpha = 0: the distance-weighted norm of M(f) - |prod f_j|
    // and the flatness bound | |f| - avg | <= C t delta M|grad f|.
    let (weighted_gap_norm, flatness_c) = if alpha == 0.0 {
        let mut prod = fields.slot(0).clone();
        for s in &fields.slots()[1..] {
            prod = prod.zip(s, |a, b| a * b);
        }
        let gap = res.value.zip(&prod, |m, p| m - p);
        for (_, v) in gap.iter_inside() {
            debug_assert!(v >= 0.0);
        }
        let wnorm = delta_weighted_norm(&gap, &lat.delta, q)?;

        let t = 0.5;
        let mut c_emp = 0.0f64;
        for (l, slot) in fields.slots().iter().enumerate() {
            if !realized.scenario.generators[l].is_smooth() {
                continue;
            }
            let single = MultiField::new(vec![slot.clone()])?;
            let avg = fractional_average_field(&single, table, lat, t, 0.0)?;
            let grad_mag = realized.gradient_magnitude(l)?;
            let grad_fields = MultiField::new(vec![grad_mag])?;
            let mgrad =
                local_maximal_field(&grad_fields, table, lat, 0.0, EngineKind::Fast, 0.0)?.value;
            for &flat in &lat.mask.inside_nodes {
                let lhs = (slot.raw()[flat] - avg.raw()[flat]).abs();
                let rhs = t * lat.delta.raw()[flat] * mgrad.raw()[flat];
                if rhs > 1e-300 {
                    c_emp = c_emp.max(lhs / rhs);
                }
            }
        }
        (Some(wnorm), Some(c_emp))
    } else {
        (None, None)
    };

    Ok(ZeroBoundaryStats {
        collar_violations,
        ladder_violations,
        weighted_gap_norm,
        flatness_c,
        note: format!(
            "h={:.6}: collar {}/{} exact, ladder violations {:?}, weighted gap {:?}, flatness C {:?}",
            lat.h(),
            collar_points - collar_violations,
            collar_points,
            ladder_violations,
            weighted_gap_norm,
            flatness_c
        ),
    })
}

/// Zero-boundary-value checks: exact vanishing on the support collar,
/// the exact distance-weighted ladder comparison for `alpha >= 1`, and the
/// weighted-gap/flatness quantities for `alpha = 0` (stable under
/// refinement).
pub fn check_zero_boundary(scenario: &Scenario) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    if !exps.flags.sobolev0 {
        return Err(Error::HypothesesUnmet(
            "zero-boundary checks need the boundedness exponent window".into(),
        ));
    }
    let coarse = zero_boundary_once(&scenario.realize()?)?;
    let fine_real = scenario.realize_at(scenario.h / 2.0)?;
    let fine = zero_boundary_once(&fine_real)?;

    let mut pass = fine.collar_violations == 0 && coarse.collar_violations == 0;
    if let (Some(a), Some(b)) = (coarse.ladder_violations, fine.ladder_violations) {
        pass &= a == 0 && b == 0;
    }
    let mut notes = vec![coarse.note.clone(), fine.note.clone()];
    let mut c_emp = f64::NAN;
    if let (Some(a), Some(b)) = (coarse.flatness_c, fine.flatness_c) {
        c_emp = b;
        let drift = if a > 0.0 && b > 0.0 {
            (a / b).max(b / a)
        } else {
            1.0
        };
        notes.push(format!(
            "flatness constant drift under refinement: {drift:.4}"
        ));
        pass &= drift <= 2.0;
    }
    if let (Some(a), Some(b)) = (coarse.weighted_gap_norm, fine.weighted_gap_norm) {
        let drift = if a > 0.0 && b > 0.0 {
            (a / b).max(b / a)
        } else {
            1.0
        };
        notes.push(format!(
            "weighted-gap norm drift under refinement: {drift:.4}"
        ));
        pass &= a.is_finite() && b.is_finite() && drift <= 2.0;
    }
    let checked = fine_real.lattice.mask.inside_count();
    Ok(VerificationReport {
        check_id: "zero_boundary".to_string(),
        exponents: exps,
        grid_h: scenario.h / 2.0,
        points_total: checked,
        points_checked: checked,
        points_excluded: 0,
        pass_fraction: if pass { 1.0 } else { 0.0 },
        empirical_constant: c_emp,
        tolerance_model: "sub-checks (a)/(b) exact; (c) stable within 2x under refinement".into(),
        pass,
        advisory: false,
        notes,
    })
}
