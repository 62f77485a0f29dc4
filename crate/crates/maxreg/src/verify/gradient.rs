//! Pointwise gradient-bound checks: the two-term bound for the critical
//! operator, its fractional extension, and the spherical-term bound.

use crate::maxops::{local_maximal_field, spherical_maximal_field, EngineKind, MultiField};
use crate::sobolev::gradient_field;
use crate::verify::common::{bound_scale, checked_points, EPS_FACTOR, STABILITY_REL_TOL};
use crate::verify::report::VerificationReport;
use crate::verify::scene::{Realized, Scenario};
use crate::{Error, Result};

struct GradientStats {
    total: usize,
    checked: usize,
    pass_fraction: f64,
    /// Constant replacing the slot-sum factor (alpha = 0) or scaling the
    /// whole bound (alpha >= 1).
    c_emp: f64,
    eps: f64,
    /// Least-squares fit of `lhs ~ c1 T1 + c2 T2` when two terms exist.
    fit: Option<(f64, f64)>,
    note: String,
}

/// One-grid evaluation of `|grad M_alpha| <= alpha M_(alpha-1) + 2 sum_l
/// M_alpha(f^l) + eps`; `alpha = 0` drops the first term.
fn gradient_bound_once(realized: &Realized, alpha: f64) -> Result<GradientStats> {
    let lat = &realized.lattice;
    let table = &realized.table;
    let fields = &realized.fields;
    let m = fields.m();
    let h = lat.h();

    let base = local_maximal_field(
        fields,
        table,
        lat,
        alpha,
        EngineKind::Fast,
        STABILITY_REL_TOL,
    )?;
    let grad_mag = gradient_field(&base.value).magnitude();

    let mut slot_terms = Vec::with_capacity(m);
    for l in 0..m {
        let fl = realized.fields_with_gradient_slot(l)?;
        let r = local_maximal_field(&fl, table, lat, alpha, EngineKind::Fast, 0.0)?;
        slot_terms.push(r.value);
    }
    let lower = if alpha >= 1.0 {
        Some(local_maximal_field(fields, table, lat, alpha - 1.0, EngineKind::Fast, 0.0)?.value)
    } else {
        None
    };

    let set = checked_points(realized, &base)?;
    let scale = bound_scale(realized, alpha)?;
    let eps = EPS_FACTOR * h * scale;

    let mut pass_count = 0usize;
    let mut c_emp = 0.0f64;
    // Normal equations for lhs ~ c1*T1 + c2*T2.
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &pos in &set.checked {
        let flat = lat.mask.inside_nodes[pos];
        let lhs = grad_mag.raw()[flat];
        let t2: f64 = slot_terms.iter().map(|f| f.raw()[flat]).sum();
        let t1 = lower.as_ref().map_or(0.0, |f| f.raw()[flat]);
        let rhs = alpha * t1 + 2.0 * t2;
        if lhs <= rhs + eps {
            pass_count += 1;
        }
        let denom = if alpha >= 1.0 { rhs } else { t2 };
        if denom > 1e-300 {
            c_emp = c_emp.max((lhs - eps).max(0.0) / denom);
        }
        s11 += t1 * t1;
        s12 += t1 * t2;
        s22 += t2 * t2;
        b1 += t1 * lhs;
        b2 += t2 * lhs;
    }
    let fit = if alpha >= 1.0 {
        // Nonnegative least squares on two variables: try the interior
        // solution, else the better of the two axis solutions.
        let det = s11 * s22 - s12 * s12;
        let interior = if det.abs() > 1e-12 * (s11 * s22).max(1e-300) {
            let c1 = (b1 * s22 - b2 * s12) / det;
            let c2 = (s11 * b2 - s12 * b1) / det;
            (c1 >= 0.0 && c2 >= 0.0).then_some((c1, c2))
        } else {
            None
        };
        interior.or_else(|| {
            let axis1 = (s11 > 0.0).then(|| ((b1 / s11).max(0.0), 0.0));
            let axis2 = (s22 > 0.0).then(|| (0.0, (b2 / s22).max(0.0)));
            let residual = |c: (f64, f64)| {
                c.0 * c.0 * s11 + c.1 * c.1 * s22 + 2.0 * c.0 * c.1 * s12
                    - 2.0 * (c.0 * b1 + c.1 * b2)
            };
            match (axis1, axis2) {
                (Some(a), Some(b)) => Some(if residual(a) <= residual(b) { a } else { b }),
                (a, b) => a.or(b),
            }
        })
    } else {
        None
    };
    let checked = set.checked.len();
    let pass_fraction = if checked == 0 {
        1.0
    } else {
        pass_count as f64 / checked as f64
    };
    let _ = set.excluded();
    Ok(GradientStats {
        total: lat.mask.inside_count(),
        checked,
        pass_fraction,
        c_emp,
        eps,
        fit,
        note: format!(
            "h={h:.6}: pass_fraction={pass_fraction:.4}, collar_excluded={}, jump_excluded={}",
            set.excluded_collar, set.excluded_jump
        ),
    })
}

fn gradient_report(scenario: &Scenario, check_id: &str, alpha: f64) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    let coarse = gradient_bound_once(&scenario.realize()?, alpha)?;
    let fine = gradient_bound_once(&scenario.realize_at(scenario.h / 2.0)?, alpha)?;
    let pass = fine.pass_fraction >= 0.99 && fine.pass_fraction >= coarse.pass_fraction - 0.02;
    let mut notes = vec![coarse.note.clone(), fine.note.clone()];
    notes.push(format!(
        "empirical constants: coarse {:.4}, fine {:.4}",
        coarse.c_emp, fine.c_emp
    ));
    if let Some((c1, c2)) = fine.fit {
        notes.push(format!("least-squares fit: c1={c1:.4} c2={c2:.4}"));
    }
    Ok(VerificationReport {
        check_id: check_id.to_string(),
        exponents: exps,
        grid_h: scenario.h / 2.0,
        points_total: fine.total,
        points_checked: fine.checked,
        points_excluded: fine.total - fine.checked,
        pass_fraction: fine.pass_fraction,
        empirical_constant: fine.c_emp,
        tolerance_model: format!(
            "additive eps(h) = {EPS_FACTOR} * h * scale; fine eps = {:.3e}",
            fine.eps
        ),
        pass,
        advisory: false,
        notes,
    })
}

/// Gradient bound for the critical operator: `|grad M(f)| <= 2 sum_l
/// M(f^l)` where slot `l` holds `|grad f_l|`.
pub fn check_gradient_bound_alpha0(scenario: &Scenario) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    if !exps.flags.thm21 {
        return Err(Error::HypothesesUnmet(
            "critical-operator gradient bound needs alpha = 0 and sum 1/p_j in (0,1)".into(),
        ));
    }
    if scenario.generators.iter().any(|g| !g.is_smooth()) {
        return Err(Error::HypothesesUnmet(
            "gradient bounds need smooth slot generators".into(),
        ));
    }
    gradient_report(scenario, "gradient_bound_critical", 0.0)
}

/// Fractional gradient bound `|grad M_a(f)| <= a M_(a-1)(f) + 2 sum_l
/// M_a(f^l)` on finite-measure domains.
pub fn check_gradient_bound_fractional(scenario: &Scenario) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    if !exps.flags.thm22i {
        return Err(Error::HypothesesUnmet(
            "fractional gradient bound needs alpha >= 1 and 1 < q < inf".into(),
        ));
    }
    if scenario.generators.iter().any(|g| !g.is_smooth()) {
        return Err(Error::HypothesesUnmet(
            "gradient bounds need smooth slot generators".into(),
        ));
    }
    gradient_report(scenario, "gradient_bound_fractional", scenario.alpha)
}

struct SphericalStats {
    total: usize,
    checked: usize,
    c_emp: f64,
    meaningful_fraction: f64,
    note: String,
}

fn spherical_bound_once(realized: &Realized) -> Result<SphericalStats> {
    let lat = &realized.lattice;
    let table = &realized.table;
    let fields = &realized.fields;
    let alpha = realized.scenario.alpha;
    let m = fields.m();
    let alpha_bar = realized.exponents.alpha_bar;

    let base = local_maximal_field(
        fields,
        table,
        lat,
        alpha,
        EngineKind::Fast,
        STABILITY_REL_TOL,
    )?;
    let grad_mag = gradient_field(&base.value).magnitude();
    let lower = local_maximal_field(fields, table, lat, alpha - 1.0, EngineKind::Fast, 0.0)?.value;

    // Per slot: spherical maximal of the slot, and the linear fractional
    // maximal of every other slot.
    let mut spherical = Vec::with_capacity(m);
    let mut linear = Vec::with_capacity(m);
    for l in 0..m {
        spherical.push(spherical_maximal_field(
            fields.slot(l),
            table,
            lat,
            alpha_bar,
        )?);
        let single = MultiField::new(vec![fields.slot(l).clone()])?;
        linear.push(
            local_maximal_field(&single, table, lat, alpha_bar, EngineKind::Fast, 0.0)?.value,
        );
    }

    let set = checked_points(realized, &base)?;
    let mut c_emp = 0.0f64;
    let mut meaningful = 0usize;
    for &pos in &set.checked {
        let flat = lat.mask.inside_nodes[pos];
        let lhs = grad_mag.raw()[flat];
        let mut rhs = lower.raw()[flat];
        for l in 0..m {
            let mut term = spherical[l].raw()[flat];
            for (j, lin) in linear.iter().enumerate() {
                if j != l {
                    term *= lin.raw()[flat];
                }
            }
            rhs += term;
        }
        if rhs > 1e-300 {
            meaningful += 1;
            c_emp = c_emp.max(lhs / rhs);
        } else if lhs <= 1e-300 {
            meaningful += 1;
        }
    }
    let checked = set.checked.len();
    Ok(SphericalStats {
        total: lat.mask.inside_count(),
        checked,
        c_emp,
        meaningful_fraction: if checked == 0 {
            1.0
        } else {
            meaningful as f64 / checked as f64
        },
        note: format!(
            "h={:.6}: C={:.4} over {} checked points",
            lat.h(),
            c_emp,
            checked
        ),
    })
}

/// Spherical-term bound: reports the smallest `C` with `|grad M_a(f)| <=
/// C (M_(a-1)(f) + sum_l S_ab(f_l) prod_(j != l) M_ab(f_j))` and passes
/// when `C` is finite and stable under halving the spacing.
pub fn check_gradient_bound_spherical(scenario: &Scenario) -> Result<VerificationReport> {
    let exps = scenario.exponents()?;
    if !exps.flags.thm23 {
        return Err(Error::HypothesesUnmet(format!(
            "spherical bound needs p_j > n/(n-1), 1 <= alpha < m*beta+1 (beta={:.4}), 1 < q < inf",
            exps.beta
        )));
    }
    let coarse = spherical_bound_once(&scenario.realize()?)?;
    let fine = spherical_bound_once(&scenario.realize_at(scenario.h / 2.0)?)?;
    let ratio = if coarse.c_emp > 0.0 && fine.c_emp > 0.0 {
        (fine.c_emp / coarse.c_emp).max(coarse.c_emp / fine.c_emp)
    } else {
        1.0
    };
    let pass = fine.c_emp.is_finite() && coarse.c_emp.is_finite() && ratio <= 2.0;
    Ok(VerificationReport {
        check_id: "gradient_bound_spherical".to_string(),
        exponents: exps,
        grid_h: scenario.h / 2.0,
        points_total: fine.total,
        points_checked: fine.checked,
        points_excluded: fine.total - fine.checked,
        pass_fraction: fine.meaningful_fraction,
        empirical_constant: fine.c_emp,
        tolerance_model: "no additive tolerance; stability-under-refinement criterion".into(),
        pass,
        advisory: false,
        notes: vec![
            coarse.note,
            fine.note,
            format!("refinement ratio of empirical constants: {ratio:.4}"),
        ],
    })
}
