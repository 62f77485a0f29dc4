//! Discrete gradients, `L^p` and `W^{1,p}` norms, the distance-weighted
//! boundary norm, and exponent bookkeeping for the theorem hypotheses.
//!
//! Norms use the counting measure scaled by `h^n` over inside points, with
//! no volume correction at boundary cells; reductions are sequential over
//! the fixed inside-node order so results do not depend on thread count.

use serde::Serialize;

use crate::lattice::{ScalarField, VectorField};
use crate::{Error, Result};

/// Finite-difference gradient: centered where both axis neighbors are
/// inside, one-sided where only one is, zero (and flagged) where neither.
pub fn gradient_field(f: &ScalarField) -> VectorField {
    let mask = f.mask.clone();
    let grid = &mask.grid;
    let n = grid.dim();
    let h = grid.h;
    let st = grid.strides();
    let vals = f.raw();
    let mut components = vec![ScalarField::zeros(mask.clone()); n];
    let mut degenerate = vec![false; mask.inside_count()];
    for (pos, &flat) in mask.inside_nodes.iter().enumerate() {
        let c = grid.coords(flat);
        for axis in 0..n {
            let up_ok =
                c[axis] + 1 < grid.shape[axis] && mask.inside[(flat as isize + st[axis]) as usize];
            let dn_ok = c[axis] >= 1 && mask.inside[(flat as isize - st[axis]) as usize];
            let d = match (dn_ok, up_ok) {
                (true, true) => {
                    let up = vals[(flat as isize + st[axis]) as usize];
                    let dn = vals[(flat as isize - st[axis]) as usize];
                    (up - dn) / (2.0 * h)
                }
                (false, true) => {
                    let up = vals[(flat as isize + st[axis]) as usize];
                    (up - vals[flat]) / h
                }
                (true, false) => {
                    let dn = vals[(flat as isize - st[axis]) as usize];
                    (vals[flat] - dn) / h
                }
                (false, false) => {
                    degenerate[pos] = true;
                    0.0
                }
            };
            components[axis].raw_mut()[flat] = d;
        }
    }
    VectorField {
        components,
        degenerate,
    }
}

/// `(sum |f|^p h^n)^(1/p)`; `p = inf` gives the max over inside points.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p={p} must be >= 1")));
    }
    let n = f.mask.grid.dim() as i32;
    let hn = f.mask.grid.h.powi(n);
    let mut acc = 0.0f64;
    for (_, v) in f.iter_inside() {
        acc += v.abs().powf(p) * hn;
    }
    Ok(acc.powf(1.0 / p))
}

/// `||f||_p + || |grad f| ||_p` with the finite-difference gradient.
pub fn sobolev_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if !(p > 1.0) || p.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "p={p} must lie in (1, inf)"
        )));
    }
    let grad = gradient_field(f);
    Ok(lp_norm(f, p)? + lp_norm(&grad.magnitude(), p)?)
}

/// `L^p` norm of `x -> f(x) / delta(x)`, the zero-boundary-value criterion.
pub fn delta_weighted_norm(f: &ScalarField, delta: &ScalarField, p: f64) -> Result<f64> {
    let ratio = f.zip(delta, |v, d| v / d);
    lp_norm(&ratio, p)
}

/// Exponents derived from `(m, n, p_1..p_m, alpha)` plus the hypothesis
/// windows of each implemented theorem.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentSet {
    pub m: usize,
    pub n: usize,
    pub p: Vec<f64>,
    pub alpha: f64,
    /// `1/q`; the defining relation is `sum 1/p_j` when `alpha = 0` and
    /// `sum 1/p_j - (alpha - 1)/n` when `alpha > 0`.
    pub inv_q: f64,
    /// Finite `q`, or `None` when `1/q <= 0` (infinite or unsatisfiable).
    pub q: Option<f64>,
    pub q_kind: QKind,
    /// `1/q* = sum 1/p_j - alpha/n`.
    pub inv_q_star: f64,
    pub q_star: Option<f64>,
    /// `(alpha - 1)/m`.
    pub alpha_bar: f64,
    /// `min_j min{ (n-1)/p_j, n - 2n/((n-1) p_j) }`.
    pub beta: f64,
    /// Per-slot embedding exponent `1/pt = 1/p_j - 1/n` where `p_j < n`.
    pub p_tilde: Vec<Option<f64>>,
    pub flags: TheoremFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QKind {
    Finite,
    Infinite,
    Unsatisfiable,
}

/// Hypothesis windows, one boolean per implemented theorem branch, plus an
/// informational window for the Sobolev-embedding branch that the numerics
/// do not exercise.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoremFlags {
    pub thm21: bool,
    pub thm22i: bool,
    pub thm23: bool,
    pub bd1: bool,
    pub tb_i: bool,
    pub tb_ii: bool,
    pub sobolev0: bool,
    pub continuity: bool,
    /// Exponent window of the embedding-based branch (infinite-measure
    /// domains); reported only, never checked numerically.
    pub embedding_branch: bool,
}

fn q_of(inv_q: f64) -> (Option<f64>, QKind) {
    if inv_q > 0.0 {
        (Some(1.0 / inv_q), QKind::Finite)
    } else if inv_q == 0.0 {
        (None, QKind::Infinite)
    } else {
        (None, QKind::Unsatisfiable)
    }
}

/// Derives every exponent and hypothesis flag from the raw inputs.
pub fn exponent_table(m: usize, n: usize, p: &[f64], alpha: f64) -> Result<ExponentSet> {
    if m < 1 || p.len() != m {
        return Err(Error::InvalidParameter(format!(
            "need m >= 1 slots and {m} exponents, got {}",
            p.len()
        )));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("n={n} outside 1..=3")));
    }
    for (j, &pj) in p.iter().enumerate() {
        if !(pj > 1.0) || !pj.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p[{j}]={pj} must lie in (1, inf)"
            )));
        }
    }
    if !(0.0 <= alpha && alpha < (m * n) as f64) {
        return Err(Error::InvalidParameter(format!(
            "alpha={alpha} outside [0, m*n)"
        )));
    }
    let nf = n as f64;
    let sum_inv_p: f64 = p.iter().map(|&pj| 1.0 / pj).sum();
    let inv_q = if alpha == 0.0 {
        sum_inv_p
    } else {
        sum_inv_p - (alpha - 1.0) / nf
    };
    let (q, q_kind) = q_of(inv_q);
    let inv_q_star = sum_inv_p - alpha / nf;
    let (q_star, _) = q_of(inv_q_star);
    let alpha_bar = (alpha - 1.0) / m as f64;
    let beta = if n == 1 {
        f64::NEG_INFINITY
    } else {
        p.iter()
            .map(|&pj| {
                let a = (nf - 1.0) / pj;
                let b = nf - 2.0 * nf / ((nf - 1.0) * pj);
                a.min(b)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let p_tilde = p
        .iter()
        .map(|&pj| {
            if pj < nf {
                Some(1.0 / (1.0 / pj - 1.0 / nf))
            } else {
                None
            }
        })
        .collect();

    let q_in_window = matches!(q_kind, QKind::Finite) && q.is_some_and(|qv| qv > 1.0);
    // alpha = 0 branch: 1/q = sum 1/p_j in (0, 1).
    let zero_branch = alpha == 0.0 && sum_inv_p < 1.0;
    // alpha >= 1 branch: 1/q = sum 1/p_j - (alpha-1)/n in (0, 1).
    let frac_branch = alpha >= 1.0 && q_in_window;
    let all_p_above = |bound: f64| p.iter().all(|&pj| pj > bound);
    let spherical_branch = n >= 2
        && all_p_above(nf / (nf - 1.0))
        && alpha >= 1.0
        && alpha < m as f64 * beta + 1.0
        && q_in_window;
    // Embedding branch: 1 <= alpha < mn, all p_j < n, and
    // 1/q = sum 1/p_j - (alpha + m - 1)/n with 1/m < q < inf.
    let inv_q_embed = sum_inv_p - (alpha + m as f64 - 1.0) / nf;
    let embedding_branch = alpha >= 1.0
        && p.iter().all(|&pj| pj < nf)
        && inv_q_embed > 0.0
        && 1.0 / inv_q_embed > 1.0 / m as f64;

    let flags = TheoremFlags {
        thm21: zero_branch,
        thm22i: frac_branch,
        thm23: spherical_branch,
        bd1: zero_branch,
        tb_i: frac_branch,
        tb_ii: spherical_branch,
        sobolev0: zero_branch || frac_branch,
        continuity: zero_branch || frac_branch,
        embedding_branch,
    };
    Ok(ExponentSet {
        m,
        n,
        p: p.to_vec(),
        alpha,
        inv_q,
        q,
        q_kind,
        inv_q_star,
        q_star,
        alpha_bar,
        beta,
        p_tilde,
        flags,
    })
}

impl ExponentSet {
    /// Recovers `sum 1/p_j` from `(q, alpha, n)`; the involution check.
    pub fn sum_inv_p_from_q(&self) -> Option<f64> {
        self.q.map(|q| {
            if self.alpha == 0.0 {
                1.0 / q
            } else {
                1.0 / q + (self.alpha - 1.0) / self.n as f64
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Domain, Lattice};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(h: f64) -> Lattice {
        Lattice::new(
            Domain::Rectangle {
                lo: vec![0.0, 0.0],
                hi: vec![1.0, 1.0],
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn gradient_exact_for_linear_and_constant() {
        let lat = square(0.25);
        let f = ScalarField::from_fn(lat.mask.clone(), |p| p[0]).unwrap();
        let g = gradient_field(&f);
        for (pos, &flat) in lat.mask.inside_nodes.iter().enumerate() {
            assert!(!g.degenerate[pos]);
            assert!((g.components[0].get(flat).unwrap() - 1.0).abs() < 1e-14);
            assert!(g.components[1].get(flat).unwrap().abs() < 1e-14);
        }
        let c = ScalarField::from_fn(lat.mask.clone(), |_| 2.5).unwrap();
        let gc = gradient_field(&c);
        for &flat in &lat.mask.inside_nodes {
            assert_eq!(gc.components[0].get(flat).unwrap(), 0.0);
            assert_eq!(gc.components[1].get(flat).unwrap(), 0.0);
        }
    }

    #[test]
    fn gradient_error_bound_for_sine_product() {
        let h = 1.0 / 128.0;
        let lat = square(h);
        let pi = std::f64::consts::PI;
        let f = ScalarField::from_fn(lat.mask.clone(), |p| (pi * p[0]).sin() * (pi * p[1]).sin())
            .unwrap();
        let g = gradient_field(&f);
        let bound = pi.powi(3) / 6.0 * h * h + 1e-9;
        let st = lat.mask.grid.strides();
        for &flat in &lat.mask.inside_nodes {
            // Centered-stencil points only.
            let both = (0..2).all(|ax| {
                let up = (flat as isize + st[ax]) as usize;
                let dn = (flat as isize - st[ax]) as usize;
                lat.mask.inside[up] && lat.mask.inside[dn]
            });
            if !both {
                continue;
            }
            let p = lat.mask.grid.point_flat(flat);
            let dx = pi * (pi * p[0]).cos() * (pi * p[1]).sin();
            let dy = pi * (pi * p[0]).sin() * (pi * p[1]).cos();
            let ex = (g.components[0].get(flat).unwrap() - dx).abs();
            let ey = (g.components[1].get(flat).unwrap() - dy).abs();
            assert!(ex <= bound && ey <= bound, "errors ({ex}, {ey}) vs {bound}");
        }
    }

    #[test]
    fn lp_norm_examples() {
        let lat = square(1.0 / 64.0);
        let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let v = lp_norm(&one, p).unwrap();
            assert!((v - 1.0).abs() <= 2.0 * lat.h(), "p={p}: {v}");
        }
        let zero = ScalarField::zeros(lat.mask.clone());
        assert_eq!(lp_norm(&zero, 2.0).unwrap(), 0.0);
        assert!(lp_norm(&one, 0.5).is_err());
        assert_eq!(lp_norm(&one, f64::INFINITY).unwrap(), 1.0);

        // 1-d: integral of y^2 over (0,1) is 1/3.
        let line = Lattice::new(Domain::Interval { a: 0.0, b: 1.0 }, 1e-3).unwrap();
        let f = ScalarField::from_fn(line.mask.clone(), |p| p[0]).unwrap();
        let v = lp_norm(&f, 2.0).unwrap();
        assert!((v - 1.0 / 3f64.sqrt()).abs() <= 1e-3, "{v}");
    }

    #[test]
    fn sobolev_norm_examples_and_triangle() {
        let lat = square(1.0 / 64.0);
        let c = ScalarField::from_fn(lat.mask.clone(), |_| 2.0).unwrap();
        let v = sobolev_norm(&c, 2.0).unwrap();
        assert!((v - 2.0).abs() <= 4.0 * lat.h(), "{v}");
        let linear = ScalarField::from_fn(lat.mask.clone(), |p| p[0]).unwrap();
        let vl = sobolev_norm(&linear, 3.0).unwrap();
        // The gradient is exactly one everywhere (one-sided stencils are
        // also exact on a linear field), so the gradient term is the norm
        // of the constant one.
        let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
        let expect = lp_norm(&linear, 3.0).unwrap() + lp_norm(&one, 3.0).unwrap();
        assert!((vl - expect).abs() <= 1e-12, "{vl} vs {expect}");

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (a, b, c1, c2) = (
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..1.0),
            );
            let f = ScalarField::from_fn(lat.mask.clone(), |p| {
                (a * (p[0] - c1)).sin() + 0.3 * (b * (p[1] - c2)).cos()
            })
            .unwrap();
            let g = ScalarField::from_fn(lat.mask.clone(), |p| {
                (b * (p[1] - c1)).cos() * (a * p[0]).sin()
            })
            .unwrap();
            let fg = f.zip(&g, |x, y| x + y);
            let lhs = sobolev_norm(&fg, 2.0).unwrap();
            let rhs = sobolev_norm(&f, 2.0).unwrap() + sobolev_norm(&g, 2.0).unwrap();
            assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn delta_weighted_norm_examples() {
        let lat = square(1.0 / 64.0);
        let v = delta_weighted_norm(&lat.delta, &lat.delta, 2.0).unwrap();
        let vol = lat.volume().sqrt();
        assert!((v - vol).abs() <= 1e-12, "{v} vs {vol}");
        let zero = ScalarField::zeros(lat.mask.clone());
        assert_eq!(delta_weighted_norm(&zero, &lat.delta, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn delta_weighted_norm_of_one_grows_under_refinement() {
        // In 2-d the integral of 1/delta^2 diverges logarithmically, so the
        // discrete value must grow as h shrinks.
        let mut prev = 0.0;
        for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0] {
            let lat = square(h);
            let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
            let v = delta_weighted_norm(&one, &lat.delta, 2.0).unwrap();
            assert!(v.is_finite());
            assert!(v > prev, "h={h}: {v} vs {prev}");
            prev = v;
        }
    }

    #[test]
    fn leibniz_defect_is_first_order() {
        let h = 1.0 / 128.0;
        let lat = square(h);
        let f = ScalarField::from_fn(lat.mask.clone(), |p| (2.0 * p[0]).sin() + 1.5).unwrap();
        let g = ScalarField::from_fn(lat.mask.clone(), |p| (3.0 * p[1]).cos() + 2.0).unwrap();
        let fg = f.zip(&g, |a, b| a * b);
        let gfg = gradient_field(&fg);
        let gf = gradient_field(&f);
        let gg = gradient_field(&g);
        let mut worst = 0.0f64;
        for &flat in &lat.mask.inside_nodes {
            for ax in 0..2 {
                let defect = gfg.components[ax].get(flat).unwrap()
                    - f.get(flat).unwrap() * gg.components[ax].get(flat).unwrap()
                    - g.get(flat).unwrap() * gf.components[ax].get(flat).unwrap();
                worst = worst.max(defect.abs());
            }
        }
        assert!(worst <= 60.0 * h, "defect {worst}");
    }

    #[test]
    fn holder_inequality_on_random_fields() {
        let lat = square(1.0 / 32.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let f = ScalarField::from_inside_values(
                lat.mask.clone(),
                &(0..lat.mask.inside_count())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let g = ScalarField::from_inside_values(
                lat.mask.clone(),
                &(0..lat.mask.inside_count())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let (p1, p2) = (3.0, 6.0);
            let q = 1.0 / (1.0 / p1 + 1.0 / p2);
            let fg = f.zip(&g, |a, b| a * b);
            let lhs = lp_norm(&fg, q).unwrap();
            let rhs = lp_norm(&f, p1).unwrap() * lp_norm(&g, p2).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
        }
    }

    #[test]
    fn exponent_table_paper_case() {
        let e = exponent_table(2, 2, &[4.0, 4.0], 1.0).unwrap();
        assert!((e.inv_q - 0.5).abs() < 1e-15);
        assert!((e.q.unwrap() - 2.0).abs() < 1e-15);
        assert!((e.beta - 0.25).abs() < 1e-15);
        // Window 1 <= alpha < m*beta + 1 = 1.5 holds at alpha = 1.
        assert!(e.flags.thm23);
        assert!(e.flags.thm22i && e.flags.tb_i && e.flags.tb_ii);
        assert!(!e.flags.thm21);
    }

    #[test]
    fn exponent_table_alpha_zero_branch() {
        let e = exponent_table(1, 2, &[2.0], 0.0).unwrap();
        assert!((e.q.unwrap() - 2.0).abs() < 1e-15);
        assert!(e.flags.thm21 && e.flags.bd1 && e.flags.continuity);
        assert!(!e.flags.thm22i);
    }

    #[test]
    fn exponent_table_q_at_boundary() {
        let e = exponent_table(2, 2, &[2.0, 2.0], 1.0).unwrap();
        assert!((e.q.unwrap() - 1.0).abs() < 1e-15);
        assert!(!e.flags.thm22i, "q = 1 fails the 1 < q < inf window");
    }

    #[test]
    fn exponent_table_unsatisfiable_is_flagged_not_fatal() {
        let e = exponent_table(2, 2, &[1.5, 1.5], 3.8).unwrap();
        // 1/q = 4/3 - 1.4 < 0.
        assert_eq!(e.q_kind, QKind::Unsatisfiable);
        assert!(e.q.is_none());
        assert!(!e.flags.thm22i);
    }

    #[test]
    fn exponent_involution() {
        for (m, n, p, alpha) in [
            (1usize, 2usize, vec![2.0], 0.0),
            (2, 2, vec![4.0, 4.0], 1.0),
            (2, 2, vec![4.0, 4.0], 1.5),
            (1, 3, vec![2.5], 1.25),
        ] {
            let e = exponent_table(m, n, &p, alpha).unwrap();
            if let Some(back) = e.sum_inv_p_from_q() {
                let direct: f64 = p.iter().map(|&x| 1.0 / x).sum();
                assert!((back - direct).abs() < 1e-12);
            }
            if let Some(q) = e.q {
                assert!((1.0 / q - e.inv_q).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exponent_table_infinite_q_and_embedding_exponents() {
        // 1/q = 1/2 - 1/2 = 0: q is infinite, representable as a kind.
        let e = exponent_table(1, 2, &[2.0], 2.0 - 1e-12).unwrap();
        assert!(e.q.is_some());
        let e = exponent_table(1, 2, &[2.0], 1.0).unwrap();
        assert_eq!(e.q_kind, QKind::Finite);
        let e = exponent_table(2, 2, &[2.0, 2.0], 3.0).unwrap();
        // 1/q = 1 - 1 = 0.
        assert_eq!(e.q_kind, QKind::Infinite);
        assert!(e.q.is_none());
        let json = serde_json::to_value(&e).unwrap();
        assert!(json["q"].is_null());
        assert_eq!(json["q_kind"], "infinite");

        // Embedding exponent 1/pt = 1/p - 1/n below dimension only.
        let e = exponent_table(2, 2, &[1.5, 3.0], 1.0).unwrap();
        assert!((e.p_tilde[0].unwrap() - 6.0).abs() < 1e-12);
        assert!(e.p_tilde[1].is_none());
    }

    #[test]
    fn gradient_flags_points_without_axis_neighbors() {
        // An L-shape with a one-cell-wide horizontal arm: arm points have
        // no inside neighbor in the vertical direction.
        let dom = Domain::RectUnion {
            rects: vec![
                crate::lattice::Rect2 {
                    lo: [0.0, 0.0],
                    hi: [1.0, 0.15],
                },
                crate::lattice::Rect2 {
                    lo: [0.0, 0.0],
                    hi: [0.15, 1.0],
                },
            ],
        };
        let lat = Lattice::new(dom, 0.1).unwrap();
        let f = ScalarField::from_fn(lat.mask.clone(), |p| p[0] + p[1]).unwrap();
        let g = gradient_field(&f);
        let mut flagged = 0usize;
        for (pos, &flat) in lat.mask.inside_nodes.iter().enumerate() {
            let p = lat.mask.grid.point_flat(flat);
            if g.degenerate[pos] {
                flagged += 1;
                // Flagged points sit deep in a one-cell arm.
                assert!(p[0] > 0.15 || p[1] > 0.15, "{p:?}");
                // The missing axis contributes zero.
                let dx = g.components[0].get(flat).unwrap();
                let dy = g.components[1].get(flat).unwrap();
                assert!(dx == 0.0 || dy == 0.0);
            }
        }
        assert!(flagged > 3, "expected degenerate arm points, got {flagged}");
    }

    #[test]
    fn exponent_table_rejects_bad_inputs() {
        assert!(exponent_table(1, 2, &[1.0], 0.0).is_err());
        assert!(exponent_table(1, 2, &[2.0], 4.0).is_err());
        assert!(exponent_table(0, 2, &[], 0.0).is_err());
    }
}
