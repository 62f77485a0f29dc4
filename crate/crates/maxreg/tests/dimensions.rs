//! Cross-dimension coverage: the stencil machinery and the operators on
//! 1-d intervals, 3-d boxes, and the remaining 2-d catalog members.

use std::sync::Arc;

use maxreg::averaging::{ball_average, sphere_average, unit_ball_volume, StencilTable};
use maxreg::lattice::{Domain, Lattice, Rect2, ScalarField};
use maxreg::maxops::{local_maximal_field, spherical_maximal_field, EngineKind, MultiField};

fn nearest(lat: &Lattice, p: &[f64]) -> usize {
    let grid = &lat.mask.grid;
    lat.mask
        .inside_nodes
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let d = |f: usize| -> f64 {
                grid.point_flat(f)
                    .iter()
                    .zip(p)
                    .map(|(u, v)| (u - v) * (u - v))
                    .sum()
            };
            d(a).partial_cmp(&d(b)).unwrap()
        })
        .unwrap()
}

#[test]
fn one_dimensional_interval_operators() {
    let lat = Arc::new(Lattice::new(Domain::Interval { a: 0.0, b: 1.0 }, 1.0 / 64.0).unwrap());
    let table = StencilTable::for_lattice(&lat);
    let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
    let fields = MultiField::new(vec![one.clone()]).unwrap();
    let r0 = local_maximal_field(&fields, &table, &lat, 0.0, EngineKind::Fast, 0.0).unwrap();
    for (_, v) in r0.value.iter_inside() {
        assert_eq!(v, 1.0);
    }
    let r1 = local_maximal_field(&fields, &table, &lat, 0.5, EngineKind::Fast, 0.0).unwrap();
    for (flat, v) in r1.value.iter_inside() {
        let delta = lat.delta.get(flat).unwrap();
        assert!(v <= delta.powf(0.5) + 1e-12);
    }
    // 1-d spheres are the two endpoints of the interval of radius r.
    let lin = ScalarField::from_fn(lat.mask.clone(), |p| p[0]).unwrap();
    let x = nearest(&lat, &[0.5]);
    let s = sphere_average(&lin, &table, &lat, x, 4.0 * lat.h()).unwrap();
    let x1 = lat.mask.grid.point_flat(x)[0];
    assert!((s - x1).abs() < 1e-12);
    let sph = spherical_maximal_field(&one, &table, &lat, 0.0).unwrap();
    for (flat, v) in sph.iter_inside() {
        if lat.delta.get(flat).unwrap() > 2.0 * lat.h() {
            assert_eq!(v, 1.0);
        }
    }
}

#[test]
fn three_dimensional_box_operators() {
    let domain = Domain::Rectangle {
        lo: vec![0.0, 0.0, 0.0],
        hi: vec![1.0, 1.0, 1.0],
    };
    let h = 1.0 / 16.0;
    let lat = Arc::new(Lattice::new(domain, h).unwrap());
    assert_eq!(lat.dim(), 3);
    let table = StencilTable::for_lattice(&lat);

    // Ball-measure consistency in 3-d.
    for k in [4usize, 6] {
        if k > table.max_index() {
            continue;
        }
        let r = k as f64 * h;
        let discrete = table.ball_count(k) as f64 * h.powi(3);
        let continuum = unit_ball_volume(3) * r.powi(3);
        assert!(
            (discrete / continuum - 1.0).abs() <= 0.20,
            "k={k}: ratio {}",
            discrete / continuum
        );
    }

    let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
    let fields = MultiField::new(vec![one.clone()]).unwrap();
    let r0 = local_maximal_field(&fields, &table, &lat, 0.0, EngineKind::Fast, 0.0).unwrap();
    for (_, v) in r0.value.iter_inside() {
        assert_eq!(v, 1.0);
    }
    let r1 = local_maximal_field(&fields, &table, &lat, 1.0, EngineKind::Fast, 0.0).unwrap();
    for (flat, v) in r1.value.iter_inside() {
        let delta = lat.delta.get(flat).unwrap();
        assert!((v - delta).abs() <= h + 1e-15);
    }

    // Oracle agreement holds in 3-d too.
    let wavy = ScalarField::from_fn(lat.mask.clone(), |p| {
        1.0 + (3.0 * p[0]).sin().abs() * (2.0 * p[1] + p[2]).cos().abs()
    })
    .unwrap();
    let mf = MultiField::new(vec![wavy]).unwrap();
    let fast = local_maximal_field(&mf, &table, &lat, 1.0, EngineKind::Fast, 0.0).unwrap();
    let oracle = local_maximal_field(&mf, &table, &lat, 1.0, EngineKind::Oracle, 0.0).unwrap();
    for &flat in &lat.mask.inside_nodes {
        assert_eq!(
            fast.value.get(flat).unwrap().to_bits(),
            oracle.value.get(flat).unwrap().to_bits()
        );
    }

    // Linear fields average to their center value by symmetry.
    let lin = ScalarField::from_fn(lat.mask.clone(), |p| p[2]).unwrap();
    let x = nearest(&lat, &[0.5, 0.5, 0.5]);
    let b = ball_average(&lin, &table, &lat, x, 4.0 * h).unwrap();
    assert!((b - 0.5).abs() < 1e-12, "{b}");
}

#[test]
fn annulus_operators_and_distance() {
    let domain = Domain::Annulus {
        center: [0.0, 0.0],
        r_in: 0.3,
        r_out: 1.0,
    };
    let lat = Arc::new(Lattice::new(domain, 1.0 / 32.0).unwrap());
    for (flat, d) in lat.delta.iter_inside() {
        let p = lat.mask.grid.point_flat(flat);
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let expect = (rho - 0.3).min(1.0 - rho);
        assert!((d - expect).abs() < 1e-14);
    }
    let table = StencilTable::for_lattice(&lat);
    let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
    let fields = MultiField::new(vec![one]).unwrap();
    let r = local_maximal_field(&fields, &table, &lat, 1.0, EngineKind::Fast, 0.0).unwrap();
    for (flat, v) in r.value.iter_inside() {
        let delta = lat.delta.get(flat).unwrap();
        assert!((v - delta).abs() <= lat.h() + 1e-15);
    }
}

#[test]
fn rect_union_operators() {
    let domain = Domain::RectUnion {
        rects: vec![
            Rect2 {
                lo: [0.0, 0.0],
                hi: [2.0, 1.0],
            },
            Rect2 {
                lo: [0.0, 0.0],
                hi: [1.0, 2.0],
            },
        ],
    };
    let lat = Arc::new(Lattice::new(domain, 1.0 / 16.0).unwrap());
    let table = StencilTable::for_lattice(&lat);
    let one = ScalarField::from_fn(lat.mask.clone(), |_| 1.0).unwrap();
    let fields = MultiField::new(vec![one]).unwrap();
    let r = local_maximal_field(&fields, &table, &lat, 1.0, EngineKind::Fast, 0.0).unwrap();
    for (flat, v) in r.value.iter_inside() {
        let delta = lat.delta.get(flat).unwrap();
        assert!(
            (v - delta).abs() <= lat.h() + 1e-15,
            "L-shape delta tracking"
        );
    }
}

#[test]
fn spherical_bound_on_constants_reports_modest_constant() {
    use maxreg::generate::Generator;
    use maxreg::verify::{check_gradient_bound_spherical, Scenario};
    let sc = Scenario::new(
        Domain::Rectangle {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        },
        1.0 / 32.0,
        vec![Generator::Constant { value: 1.0 }],
        1.0,
        vec![3.0],
    )
    .unwrap();
    let r = check_gradient_bound_spherical(&sc).unwrap();
    assert!(r.pass, "{:?}", r.notes);
    assert!(
        r.empirical_constant.is_finite() && r.empirical_constant <= 1.5,
        "C = {}",
        r.empirical_constant
    );
}
