use num_rational::BigRational;
use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::pde::{solve_heat, ExactSolution, GridSolution, SolverConfig};

fn times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| t0 + (t1 - t0) * k as f64 / n as f64)
        .collect()
}

fn field(f: impl Fn(&[f64], f64) -> f64) -> GridSolution {
    GridSolution::from_fn(1, 3.0, 0.01, &times(1.0, 3.0, 400), f).unwrap()
}

fn heat_grid(dx: f64) -> GridSolution {
    let mut cfg = SolverConfig::heat_kernel(1, dx, 2.0);
    cfg.save_every = 2;
    solve_heat(&cfg).unwrap()
}

// Geometry

#[test]
fn cylinder_extents() {
    let c = ParabolicCylinder::full(vec![1.0, -1.0], 5.0, 2.0).unwrap();
    assert_eq!(c.spatial_radius(), 4.0);
    assert_eq!(c.time_interval(), [1.0, 9.0]);
    let plus = c.with_kind(CylinderKind::Plus);
    assert_eq!(plus.spatial_radius(), 1.0);
    assert_eq!(plus.time_interval(), [8.0, 9.0]);
    let minus = c.with_kind(CylinderKind::Minus);
    assert_eq!(minus.time_interval(), [2.0, 4.0]);
    assert!(c.contains(&[1.0, 3.0], 1.0));
    assert!(!c.contains(&[1.0, 3.01], 1.0));
    assert!(!plus.contains(&[1.0, -1.0], 7.9));
    assert!(!c.contains(&[1.0], 5.0));
    assert!(ParabolicCylinder::full(vec![0.0], 1.0, 0.0).is_err());
    assert!(ParabolicCylinder::full(vec![], 1.0, 1.0).is_err());
}

#[test]
fn parabolic_distance_of_boxes() {
    let outer = AxisBox::new(vec![0.0], vec![4.0], [1.0, 4.0]).unwrap();
    let inner = AxisBox::new(vec![1.0], vec![3.0], [2.0, 3.0]).unwrap();
    let boxes = SpaceTimeBox::new(outer.clone(), inner).unwrap();
    assert_eq!(parabolic_distance(&boxes), 1.0);
    // time gaps of 1/4 give sqrt(1/4)
    let late = AxisBox::new(vec![1.0], vec![3.0], [1.25, 3.75]).unwrap();
    assert_eq!(
        SpaceTimeBox::new(outer.clone(), late)
            .unwrap()
            .parabolic_distance(),
        0.5
    );
    let touching = AxisBox::new(vec![0.0], vec![3.0], [2.0, 3.0]).unwrap();
    assert_eq!(
        SpaceTimeBox::new(outer.clone(), touching)
            .unwrap()
            .parabolic_distance(),
        0.0
    );
    // the smallest gap over all axes counts
    let o2 = AxisBox::new(vec![0.0, 0.0], vec![4.0, 4.0], [1.0, 9.0]).unwrap();
    let i2 = AxisBox::new(vec![1.0, 2.0], vec![3.0, 3.5], [4.0, 6.0]).unwrap();
    assert_eq!(SpaceTimeBox::new(o2, i2).unwrap().parabolic_distance(), 0.5);
}

#[test]
fn space_time_boxes_are_validated() {
    let outer = AxisBox::new(vec![0.0], vec![4.0], [1.0, 4.0]).unwrap();
    let wide = AxisBox::new(vec![-1.0], vec![3.0], [2.0, 3.0]).unwrap();
    assert!(SpaceTimeBox::new(outer.clone(), wide).is_err());
    let same_start = AxisBox::new(vec![1.0], vec![3.0], [1.0, 3.0]).unwrap();
    assert!(SpaceTimeBox::new(outer.clone(), same_start).is_err());
    let flat = AxisBox::new(vec![1.0, 1.0], vec![3.0, 3.0], [2.0, 3.0]).unwrap();
    assert!(matches!(
        SpaceTimeBox::new(outer, flat),
        Err(Error::Shape(_))
    ));
    assert!(AxisBox::new(vec![1.0], vec![1.0], [0.0, 1.0]).is_err());
    assert!(AxisBox::new(vec![0.0], vec![1.0], [1.0, 1.0]).is_err());
    let early = AxisBox::new(vec![0.0], vec![4.0], [0.0, 4.0]).unwrap();
    let inner = AxisBox::new(vec![1.0], vec![3.0], [2.0, 3.0]).unwrap();
    assert!(SpaceTimeBox::new(early, inner).is_err());
}

#[test]
fn nested_cylinders_for_delta_one_and_three_levels() {
    let n = nested_cylinders(&[0.5], 10.0, 1.0, 3).unwrap();
    assert_eq!(n.radii, vec![1.0 / 16.0, 0.25, 1.0]);
    let tau1 = 10.0 - 14.0 / 256.0;
    assert_eq!(n.times, vec![10.0, tau1, tau1 - 14.0 / 16.0]);
    assert_eq!(n.certificates.len(), 2);
    assert!(n.certificates.iter().all(|c| c.holds()));
    // the proof's displayed identities, checked independently in floats (exact here)
    for j in 0..2 {
        let (r, rn, t, tn) = (n.radii[j], n.radii[j + 1], n.times[j], n.times[j + 1]);
        assert_eq!(tn + 0.75 * rn * rn, t - 2.0 * r * r);
        assert_eq!(tn + rn * rn, t + 2.0 * r * r);
    }
}

#[test]
fn single_cylinder_has_no_containments() {
    let n = nested_cylinders(&[0.0, 0.0], 1.0, 0.3, 1).unwrap();
    assert_eq!(n.len(), 1);
    assert_eq!(n.radii, vec![0.3]);
    assert!(n.certificates.is_empty());
    assert!(nested_cylinders(&[0.0], 1.0, 0.3, 0).is_err());
    assert!(nested_cylinders(&[0.0], 1.0, 0.0, 2).is_err());
    assert!(nested_cylinders(&[0.0], f64::NAN, 1.0, 2).is_err());
}

// Hölder parameters

#[test]
fn hoelder_parameters_at_known_constants() {
    let floor = HoelderParams::new(MIN_HARNACK_CONSTANT).unwrap();
    assert!((floor.zeta() - 0.25).abs() < 1e-15);
    assert!((floor.nu() - 1.0).abs() < 1e-15);
    let two = HoelderParams::new(2.0).unwrap();
    assert!((two.zeta() - 0.5).abs() < 1e-15);
    assert!((two.nu() - 0.5).abs() < 1e-15);
    for c in [1.0, 0.5, 0.0, -2.0, f64::INFINITY, f64::NAN] {
        assert!(matches!(
            HoelderParams::new(c),
            Err(Error::InvalidParameter { .. })
        ));
    }
}

#[test]
fn zeta_is_four_to_the_minus_nu_in_exact_arithmetic() {
    // C = 4/3: zeta = 1/4 and nu = 1 in rationals
    let c = BigRational::new(4.into(), 3.into());
    let zeta = (&c - BigRational::from_integer(1.into())) / &c;
    assert_eq!(zeta, BigRational::new(1.into(), 4.into()));
}

#[test]
fn holder_bound_examples() {
    assert_eq!(holder_bound(2.0, 0.5, 0.0).unwrap(), 0.0);
    let b = holder_bound(MIN_HARNACK_CONSTANT, 2.0, 3.0).unwrap();
    assert!((b - 2.0 * 128.0 * 3.0).abs() < 1e-9);
    let b = holder_bound(2.0, 1.0, 1.0).unwrap();
    assert!((b - 32.0).abs() < 1e-12);
    assert_eq!(iteration_delta(6.4), 0.1);
    assert!(holder_bound(1.0, 1.0, 1.0).is_err());
    assert!(holder_bound(2.0, 0.0, 1.0).is_err());
    assert!(holder_bound(2.0, 1.0, -1.0).is_err());
}

// Grid reductions

#[test]
fn oscillation_of_simple_fields() {
    let constant = field(|_, _| 2.0);
    let cyl = ParabolicCylinder::full(vec![0.0], 2.0, 0.5).unwrap();
    assert_eq!(oscillation(&constant, &cyl).unwrap(), 0.0);
    let linear = field(|x, _| x[0]);
    for r in [0.1, 0.3, 0.7] {
        let cyl = ParabolicCylinder::full(vec![0.2], 2.0, r).unwrap();
        let osc = oscillation(&linear, &cyl).unwrap();
        assert!((osc - 4.0 * r).abs() <= 0.01 + 1e-12, "R = {r}: {osc}");
        let minus = oscillation(&linear, &cyl.with_kind(CylinderKind::Minus)).unwrap();
        assert!(minus <= osc);
    }
    let outside = ParabolicCylinder::full(vec![10.0], 2.0, 0.5).unwrap();
    assert!(matches!(
        oscillation(&linear, &outside),
        Err(Error::EmptyRegion(_))
    ));
    let wrong_dim = ParabolicCylinder::full(vec![0.0, 0.0], 2.0, 0.5).unwrap();
    assert!(matches!(
        oscillation(&linear, &wrong_dim),
        Err(Error::Shape(_))
    ));
}

#[test]
fn harnack_constant_estimates() {
    let constant = field(|_, _| 0.7);
    assert_eq!(
        estimate_harnack_constant(&constant, &[0.0], 2.0, 0.5).unwrap(),
        1.0
    );
    let g = field(|x, t| (1.0 + x[0] * x[0]) * t);
    let scaled = field(|x, t| 3.5 * (1.0 + x[0] * x[0]) * t);
    let a = estimate_harnack_constant(&g, &[0.4], 2.0, 0.5).unwrap();
    let b = estimate_harnack_constant(&scaled, &[0.4], 2.0, 0.5).unwrap();
    assert!((a - b).abs() <= 1e-14 * a);
    // u = t^{-1/2} exp(-x^2/4t) near its peak: at least 1 and finite
    let kernel = ExactSolution::heat_kernel(1);
    let sampled = field(|x, t| kernel.value(x, t).unwrap());
    let c = estimate_harnack_constant(&sampled, &[0.0], 2.0, 0.2).unwrap();
    assert!(c >= 1.0 && c.is_finite(), "{c}");
    // a field vanishing on the later cylinder gives an infinite estimate
    let dying = field(|_, t| (2.1 - t).max(0.0));
    assert_eq!(
        estimate_harnack_constant(&dying, &[0.0], 2.0, 0.5).unwrap(),
        f64::INFINITY
    );
    let negative = field(|x, _| x[0]);
    assert!(matches!(
        estimate_harnack_constant(&negative, &[0.0], 2.0, 0.5),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        estimate_harnack_constant(&constant, &[2.5], 2.0, 0.5),
        Err(Error::EmptyRegion(_))
    ));
}

#[test]
fn oscillation_check_on_constants_and_linear_fields() {
    let constant = field(|_, _| 1.0);
    let o = oscillation_inequality_check(&constant, &[0.0], 2.0, 0.5, 2.0).unwrap();
    assert_eq!((o.omega, o.omega_plus), (0.0, 0.0));
    assert!(o.holds);
    // omega+ / omega = 1/4 for u = x, the equality case of zeta(4/3)
    let linear = field(|x, _| 5.0 + x[0]);
    let o = oscillation_inequality_check(&linear, &[0.0], 2.0, 0.5, MIN_HARNACK_CONSTANT).unwrap();
    assert!((o.omega_plus / o.omega - 0.25).abs() < 1e-12);
    assert!(o.holds);
    let o = oscillation_inequality_check(&linear, &[0.0], 2.0, 0.5, 1.1).unwrap();
    assert!(!o.holds);
    assert!(oscillation_inequality_check(&linear, &[0.0], 2.0, 0.5, 1.0).is_err());
}

#[test]
fn heat_grid_satisfies_the_oscillation_inequality() {
    let g = heat_grid(0.05);
    let centers: Vec<(f64, f64, f64)> = (0..40)
        .map(|i| {
            let s = i as f64 / 39.0;
            (
                -3.5 + 7.0 * s,
                1.2 + 0.6 * ((7.0 * s).sin() * 0.5 + 0.5),
                0.1 + 0.2 * s,
            )
        })
        .collect();
    let c = centers
        .iter()
        .map(|&(x, t, r)| estimate_harnack_constant(&g, &[x], t, r).unwrap())
        .fold(MIN_HARNACK_CONSTANT, f64::max);
    for &(x, t, r) in &centers {
        let o = oscillation_inequality_check(&g, &[x], t, r, c).unwrap();
        assert!(o.holds, "({x}, {t}, {r}): {o:?}");
    }
}

#[test]
fn nested_oscillations_grow_along_the_chain() {
    let kernel = ExactSolution::heat_kernel(1);
    let g = field(|x, t| kernel.value(x, t).unwrap());
    let n = nested_cylinders(&[0.3], 2.9, 0.36, 3).unwrap();
    let chain = chain_oscillations(&g, &n).unwrap();
    assert_eq!(chain.len(), 2);
    assert!(chain.iter().all(|(a, b)| a <= b));
}

#[test]
fn holder_quotients() {
    let qp = AxisBox::new(vec![-1.0], vec![1.0], [1.5, 2.5]).unwrap();
    let constant = field(|_, _| 4.0);
    assert_eq!(
        empirical_holder_quotient(&constant, &qp, 0.5, 1000, 1).unwrap(),
        0.0
    );
    let linear = field(|x, _| x[0]);
    let q = empirical_holder_quotient(&linear, &qp, 1.0, 1000, 1).unwrap();
    assert!((q - 1.0).abs() < 1e-9, "{q}");
    let a = empirical_holder_quotient(&linear, &qp, 0.7, 500, 9).unwrap();
    assert_eq!(
        a,
        empirical_holder_quotient(&linear, &qp, 0.7, 500, 9).unwrap()
    );
    assert!(empirical_holder_quotient(&linear, &qp, 0.0, 10, 1).is_err());
    let tiny = AxisBox::new(vec![0.001], vec![0.002], [1.5, 1.501]).unwrap();
    assert!(matches!(
        empirical_holder_quotient(&linear, &tiny, 1.0, 10, 1),
        Err(Error::EmptyRegion(_))
    ));
    let outside = AxisBox::new(vec![-1.0], vec![5.0], [1.5, 2.5]).unwrap();
    assert!(matches!(
        empirical_holder_quotient(&linear, &outside, 1.0, 10, 1),
        Err(Error::EmptyRegion(_))
    ));
}

#[test]
fn heat_grid_respects_the_holder_bound() {
    let g = heat_grid(0.05);
    let q = AxisBox::new(vec![-4.0], vec![4.0], [1.1, 1.9]).unwrap();
    let qp = AxisBox::new(vec![-2.0], vec![2.0], [1.3, 1.7]).unwrap();
    let boxes = SpaceTimeBox::new(q.clone(), qp.clone()).unwrap();
    let c = MIN_HARNACK_CONSTANT;
    let bound = holder_bound(c, boxes.parabolic_distance(), sup_norm(&g, &q).unwrap()).unwrap();
    let nu = HoelderParams::new(c).unwrap().nu();
    let quotient = empirical_holder_quotient(&g, &qp, nu, 5000, 4).unwrap();
    assert!(quotient > 0.0 && quotient <= bound, "{quotient} vs {bound}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn plus_and_minus_lie_in_full(
        x0 in -5.0f64..5.0,
        t0 in 0.5f64..10.0,
        r in 0.01f64..3.0,
        dx in -1.0f64..1.0,
        dt in -1.0f64..1.0,
    ) {
        let full = ParabolicCylinder::full(vec![x0, -x0], t0, r).unwrap();
        let plus = full.with_kind(CylinderKind::Plus);
        let minus = full.with_kind(CylinderKind::Minus);
        let x = [x0 + dx * r, -x0 + 0.3 * dx * r];
        let t = t0 + dt * r * r;
        if plus.contains(&x, t) || minus.contains(&x, t) {
            prop_assert!(full.contains(&x, t));
        }
        prop_assert!(!(plus.contains(&x, t) && minus.contains(&x, t)));
        prop_assert!(minus.time_interval()[1] < plus.time_interval()[0]);
    }

    #[test]
    fn nested_certificates_always_hold(
        delta in 1e-3f64..100.0,
        k in 1usize..=12,
        tau in -50.0f64..50.0,
        z in -10.0f64..10.0,
    ) {
        let n = nested_cylinders(&[z], tau, delta, k).unwrap();
        prop_assert_eq!(n.len(), k);
        prop_assert_eq!(n.certificates.len(), k - 1);
        prop_assert!(n.certificates.iter().all(|c| c.holds()));
        prop_assert!((n.radii[k - 1] - delta).abs() <= 1e-12 * delta);
    }

    #[test]
    fn zeta_matches_four_to_the_minus_nu(c in 1.0f64..1e6) {
        prop_assume!(c > 1.0);
        let p = HoelderParams::new(c).unwrap();
        prop_assert!(p.zeta() > 0.0 && p.zeta() < 1.0 && p.nu() > 0.0);
        prop_assert!((p.zeta() - 4f64.powf(-p.nu())).abs() <= 1e-15);
        prop_assert!((p.zeta() - (c - 1.0) / c).abs() <= 1e-15);
    }

    #[test]
    fn shrinking_the_inner_box_increases_the_distance(
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
        s in 0.0f64..0.5,
        u in 0.0f64..0.5,
    ) {
        let outer = AxisBox::new(vec![0.0], vec![10.0], [1.0, 5.0]).unwrap();
        let big = AxisBox::new(vec![1.0 + a], vec![9.0 - b], [2.0 + s, 4.0 - u]).unwrap();
        let small = AxisBox::new(vec![1.5 + a], vec![8.5 - b], [2.2 + s, 3.8 - u]).unwrap();
        let d_big = SpaceTimeBox::new(outer.clone(), big).unwrap().parabolic_distance();
        let d_small = SpaceTimeBox::new(outer, small).unwrap().parabolic_distance();
        prop_assert!(d_small >= d_big);
    }

    #[test]
    fn holder_bound_decreases_in_distance_and_constant(
        c in 1.01f64..100.0,
        dc in 0.0f64..10.0,
        d in 0.01f64..10.0,
        dd in 0.0f64..10.0,
    ) {
        let base = holder_bound(c, d, 1.0).unwrap();
        prop_assert!(holder_bound(c, d + dd, 1.0).unwrap() <= base);
        prop_assert!(holder_bound(c + dc, d, 1.0).unwrap() <= base * (1.0 + 1e-12));
    }

    #[test]
    fn chain_oscillations_are_monotone_on_any_field(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        w in 0.5f64..6.0,
        z in -0.5f64..0.5,
        k in 2usize..=3,
    ) {
        let g = field(|x, t| a * (w * x[0]).sin() + b * t * t + x[0] * t);
        let n = nested_cylinders(&[z], 2.95, 0.3, k).unwrap();
        for (inner, outer) in chain_oscillations(&g, &n).unwrap() {
            prop_assert!(inner <= outer);
        }
    }

    #[test]
    fn harnack_estimate_is_scale_invariant(lambda in 1e-3f64..1e3, x0 in -1.0f64..1.0) {
        let g = GridSolution::from_fn(1, 2.0, 0.05, &times(1.0, 2.0, 50), |x, t| 1.0 + x[0] * x[0] + t).unwrap();
        let s = GridSolution::from_fn(1, 2.0, 0.05, &times(1.0, 2.0, 50), |x, t| lambda * (1.0 + x[0] * x[0] + t)).unwrap();
        let a = estimate_harnack_constant(&g, &[x0], 1.5, 0.3).unwrap();
        let b = estimate_harnack_constant(&s, &[x0], 1.5, 0.3).unwrap();
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
    }
}
