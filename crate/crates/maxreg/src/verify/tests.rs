use super::*;
use crate::generate::Generator;
use crate::lattice::Domain;
use crate::Error;

fn square() -> Domain {
    Domain::Rectangle {
        lo: vec![0.0, 0.0],
        hi: vec![1.0, 1.0],
    }
}

fn ones(m: usize) -> Vec<Generator> {
    vec![Generator::Constant { value: 1.0 }; m]
}

fn gauss() -> Generator {
    Generator::Gaussian {
        center: vec![0.45, 0.55],
        width: 0.15,
        amplitude: 1.0,
    }
}

const H: f64 = 1.0 / 32.0;

#[test]
fn alpha0_gradient_constants_pass_with_zero_margin() {
    let sc = Scenario::new(square(), H, ones(2), 0.0, vec![4.0, 4.0]).unwrap();
    let r = check_gradient_bound_alpha0(&sc).unwrap();
    assert!(r.pass);
    assert_eq!(r.pass_fraction, 1.0);
    assert!(r.exclusion_consistent());
    // Constants have zero scale, so the tolerance is exactly zero.
    assert!(r.tolerance_model.contains("eps = 0"));
}

#[test]
fn alpha0_gradient_rejects_wrong_window() {
    // alpha != 0 fails the critical-operator gate.
    let sc = Scenario::new(square(), H, ones(1), 1.0, vec![2.0]).unwrap();
    assert!(matches!(
        check_gradient_bound_alpha0(&sc),
        Err(Error::HypothesesUnmet(_))
    ));
    // sum 1/p_j = 1 leaves q = 1, outside (1, inf).
    let sc = Scenario::new(square(), H, ones(2), 0.0, vec![2.0, 2.0]).unwrap();
    assert!(matches!(
        check_gradient_bound_alpha0(&sc),
        Err(Error::HypothesesUnmet(_))
    ));
}

#[test]
fn fractional_gradient_constants_alpha_one() {
    let sc = Scenario::new(square(), H, ones(1), 1.0, vec![4.0]).unwrap();
    let r = check_gradient_bound_fractional(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
}

#[test]
fn spherical_gate_rejects_small_p() {
    // p = 1.2 < n/(n-1) = 2 empties the window.
    let sc = Scenario::new(square(), H, vec![gauss()], 1.0, vec![1.2]).unwrap();
    match check_gradient_bound_spherical(&sc) {
        Err(Error::HypothesesUnmet(msg)) => assert!(msg.contains("beta"), "{msg}"),
        other => panic!("expected gate error, got {:?}", other.map(|r| r.pass)),
    }
}

#[test]
fn norm_bounds_constants_within_2m() {
    let sc = Scenario::new(square(), H, ones(2), 0.0, vec![4.0, 4.0]).unwrap();
    let r = check_norm_bounds(&sc).unwrap();
    assert!(r.pass);
    assert!(r.empirical_constant <= 2.0 * 2.0);
    assert!(r.notes.iter().any(|n| n.contains("2m")));
}

#[test]
fn zero_boundary_collar_and_ladder_are_exact() {
    let bump = Generator::Bump {
        center: vec![0.5, 0.5],
        radius: 0.2,
        amplitude: 1.0,
    };
    let sc = Scenario::new(square(), H, vec![bump.clone()], 0.0, vec![2.0]).unwrap();
    let r = check_zero_boundary(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
    let sc = Scenario::new(square(), H, vec![bump], 1.0, vec![4.0]).unwrap();
    let r = check_zero_boundary(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
}

#[test]
fn continuity_zero_perturbation_gives_zero_distances() {
    let zero = vec![Generator::Constant { value: 0.0 }];
    let sc = Scenario::new(square(), H, vec![gauss()], 0.0, vec![2.0]).unwrap();
    let r = continuity_experiment(&sc, &zero, 4).unwrap();
    assert!(r.pass);
    assert_eq!(r.empirical_constant, 0.0);
    assert!(r.notes[0].contains("[0.0, 0.0, 0.0, 0.0]"), "{:?}", r.notes);
}

#[test]
fn continuity_needs_enough_levels_and_matching_slots() {
    let sc = Scenario::new(square(), H, vec![gauss()], 0.0, vec![2.0]).unwrap();
    assert!(continuity_experiment(&sc, &ones(1), 3).is_err());
    assert!(continuity_experiment(&sc, &ones(2), 6).is_err());
}

#[test]
fn argmax_stability_zero_perturbation_and_lambda_gate() {
    let zero = vec![Generator::Constant { value: 0.0 }];
    let sc = Scenario::new(square(), H, vec![gauss()], 0.0, vec![2.0]).unwrap();
    let r = argmax_stability_experiment(&sc, &zero, 4.0 * H, 5).unwrap();
    assert!(r.pass);
    assert_eq!(r.empirical_constant, 0.0);
    assert!(matches!(
        argmax_stability_experiment(&sc, &zero, H, 5),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn argmax_stability_monotone_profile_is_immune() {
    // Constant slot, alpha = 1: the profile is strictly increasing, so the
    // argmax stays at the top rung under small perturbations.
    let pert = vec![Generator::Scaled {
        factor: 0.01,
        part: Box::new(gauss()),
    }];
    let sc = Scenario::new(square(), H, ones(1), 1.0, vec![4.0]).unwrap();
    let r = argmax_stability_experiment(&sc, &pert, 4.0 * H, 5).unwrap();
    assert!(r.pass);
    assert_eq!(r.empirical_constant, 0.0, "{:?}", r.notes);
}

#[test]
fn derivative_formula_total_tie_reports_exclusions() {
    let sc = Scenario::new(square(), H, ones(2), 0.0, vec![4.0, 4.0]).unwrap();
    let r = derivative_formula_check(&sc).unwrap();
    // Flat profiles tie everywhere; the uniqueness filter excludes all.
    assert_eq!(r.points_checked, 0);
    assert_eq!(r.points_excluded, r.points_total);
    assert!(!r.pass);
    assert!(r.notes[0].contains("no eligible"));
}

#[test]
fn derivative_formula_pointwise_product_rule_branch() {
    // A radially decreasing bump has argmax {0} near its center, where the
    // gradient of the maximal field equals the gradient of the field.
    let sc = Scenario::new(
        square(),
        1.0 / 64.0,
        vec![Generator::Gaussian {
            center: vec![0.5, 0.5],
            width: 0.12,
            amplitude: 1.0,
        }],
        0.0,
        vec![2.0],
    )
    .unwrap();
    let r = derivative_formula_check(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
    assert!(r.points_checked > 50);
}

#[test]
fn calculus_identities_constant_field() {
    let sc = Scenario::new(square(), 1.0 / 64.0, ones(1), 0.0, vec![2.0]).unwrap();
    let r = calculus_identity_checks(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
    assert_eq!(r.pass_fraction, 1.0);
    assert_eq!(r.empirical_constant, 0.0);
}

#[test]
fn calculus_identities_reject_indicator() {
    let sc = Scenario::new(
        square(),
        H,
        vec![Generator::Indicator {
            region: crate::generate::Region::Disk {
                center: vec![0.5, 0.5],
                radius: 0.2,
            },
        }],
        0.0,
        vec![2.0],
    )
    .unwrap();
    assert!(matches!(
        calculus_identity_checks(&sc),
        Err(Error::HypothesesUnmet(_))
    ));
}

#[test]
fn reports_serialize_with_stable_key_order() {
    let sc = Scenario::new(square(), H, ones(1), 0.0, vec![2.0]).unwrap();
    let r = check_norm_bounds(&sc).unwrap();
    let a = serde_json::to_string(&r).unwrap();
    let b = serde_json::to_string(&r).unwrap();
    assert_eq!(a, b);
    assert!(a.find("\"check_id\"").unwrap() < a.find("\"pass\"").unwrap());
}
