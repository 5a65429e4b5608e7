use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

// Independent test-side formulas.

fn gaussian(d: usize, shift: &[f64], x: &[f64], t: f64) -> f64 {
    let r2: f64 = x.iter().zip(shift).map(|(a, b)| (a + b) * (a + b)).sum();
    (4.0 * PI * t).powf(-(d as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
}

fn barenblatt(d: usize, m: f64, c0: f64, x: &[f64], t: f64) -> f64 {
    let df = d as f64;
    let alpha = df / (df * (m - 1.0) + 2.0);
    let kappa = alpha * (m - 1.0) / (2.0 * df * m);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let inner = c0 - kappa * r2 * t.powf(-2.0 * alpha / df);
    t.powf(-alpha) * inner.max(0.0).powf(1.0 / (m - 1.0))
}

/// Central differences of order 4 in every direction.
fn fd_derivatives<F: Fn(&[f64], f64) -> f64>(
    f: F,
    x: &[f64],
    t: f64,
    h: f64,
) -> (Vec<f64>, f64, f64) {
    let d4 = |g: &dyn Fn(f64) -> f64| {
        (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
    };
    let dd4 = |g: &dyn Fn(f64) -> f64| {
        (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) - g(-2.0 * h)) / (12.0 * h * h)
    };
    let mut grad = vec![];
    let mut lap = 0.0;
    for a in 0..x.len() {
        let shifted = |s: f64| {
            let mut y = x.to_vec();
            y[a] += s;
            f(&y, t)
        };
        grad.push(d4(&shifted));
        lap += dd4(&shifted);
    }
    let ut = d4(&|s: f64| f(x, t + s));
    (grad, ut, lap)
}

#[test]
fn heat_kernel_peak() {
    for d in 1..=3 {
        let shift = vec![0.3; d];
        let x = vec![-0.3; d];
        let v = heat_kernel_eval(d, &shift, &x, 2.0).unwrap();
        assert!((v.u - (8.0 * PI).powf(-(d as f64) / 2.0)).abs() < 1e-15);
        assert!(v.grad.iter().all(|g| *g == 0.0));
    }
}

#[test]
fn heat_kernel_matches_finite_differences_and_li_yau_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let shift: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = rng.gen_range(0.5..3.0);
        let v = heat_kernel_eval(d, &shift, &x, t).unwrap();
        assert!((v.u - gaussian(d, &shift, &x, t)).abs() < 1e-14);
        let (grad, ut, lap) = fd_derivatives(|y, s| gaussian(d, &shift, y, s), &x, t, 1e-3);
        for (a, b) in v.grad.iter().zip(&grad) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!((v.ut - ut).abs() < 1e-8 && (v.lap - lap).abs() < 1e-8);
        let g2: f64 = v.grad.iter().map(|g| g * g).sum();
        let combo = g2 / (v.u * v.u) - v.ut / v.u;
        assert!((combo - d as f64 / (2.0 * t)).abs() < 1e-10);
        let e = ExactSolution::HeatKernel {
            d,
            shift,
            mass: 1.0,
        };
        assert!(e.pde_residual(&x, t).unwrap().abs() < 1e-10);
    }
}

#[test]
fn moser_family_is_a_scaled_heat_kernel() {
    let xi = -1.7;
    let e = ExactSolution::MoserFamily { xi };
    for &(x, t) in &[(0.0f64, 1.0f64), (1.3, 0.4), (-2.0, 5.0)] {
        let direct = t.powf(-0.5) * (-(x + xi) * (x + xi) / (4.0 * t)).exp();
        let u = e.value(&[x], t).unwrap();
        assert!((u - direct).abs() < 1e-14 * direct.max(1.0));
        let k = heat_kernel_eval(1, &[xi], &[x], t).unwrap().u;
        assert!((u - (4.0 * PI).sqrt() * k).abs() < 1e-14);
    }
}

#[test]
fn moser_ratio_examples() {
    assert!((moser_ratio(0.0, 1.0) - 0.25f64.exp()).abs() < 1e-15);
    let x0 = 1.4;
    // 0 and x0 are mirror images about the peak -xi
    assert!((moser_ratio(-x0 / 2.0, x0) - 1.0).abs() < 1e-15);
    let reciprocal = (-moser_log_ratio(-60.0, 1.0)).exp();
    assert!((reciprocal - (-0.25f64).exp() * 30f64.exp()).abs() < 1e-6 * reciprocal);
    assert!(reciprocal > 1e6);
    // the ratio equals u(0,1)/u(x0,1) of the family itself
    let e = ExactSolution::MoserFamily { xi: -3.0 };
    let direct = e.value(&[0.0], 1.0).unwrap() / e.value(&[2.0], 1.0).unwrap();
    assert!((moser_ratio(-3.0, 2.0) - direct).abs() < 1e-13 * direct);
}

#[test]
fn barenblatt_pressure_equality_and_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(d, m) in &[(1usize, 2.0), (2, 3.0), (3, 1.5)] {
        let c0 = 1.3;
        let k = 1.0 / (m - 1.0 + 2.0 / d as f64);
        for _ in 0..100 {
            let t = rng.gen_range(0.5..4.0);
            let radius = barenblatt_support_radius(d, m, c0, t);
            let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let r = rng.gen_range(0.0..0.95) * radius;
            let x: Vec<f64> = dir.iter().map(|v| v / norm * r).collect();
            let b = barenblatt_eval(d, m, c0, &x, t).unwrap();
            assert!(b.inside);
            assert!((b.u - barenblatt(d, m, c0, &x, t)).abs() < 1e-13);
            assert!((b.lap_f + k / t).abs() < 1e-12);
            let f = m / (m - 1.0) * b.u.powf(m - 1.0);
            assert!((b.pressure_f - f).abs() < 1e-12);
            let res = ExactSolution::Barenblatt { d, m, c0 }
                .pde_residual(&x, t)
                .unwrap();
            assert!(res.abs() < 1e-8, "residual {res}");
            if r < 0.8 * radius {
                let (grad, ut, _) = fd_derivatives(|y, s| barenblatt(d, m, c0, y, s), &x, t, 1e-4);
                let lap_um =
                    fd_derivatives(|y, s| barenblatt(d, m, c0, y, s).powf(m), &x, t, 1e-4).2;
                for (a, g) in b.grad.iter().zip(&grad) {
                    assert!((a - g).abs() < 1e-6);
                }
                assert!((b.ut - ut).abs() < 1e-6 && (b.lap_um - lap_um).abs() < 1e-5);
            }
            let outside: Vec<f64> = dir.iter().map(|v| v / norm * radius * 1.01).collect();
            assert_eq!(barenblatt_eval(d, m, c0, &outside, t).unwrap().u, 0.0);
        }
    }
}

#[test]
fn barenblatt_rejects_fast_diffusion() {
    assert!(matches!(
        barenblatt_eval(1, 0.5, 1.0, &[0.0], 1.0),
        Err(crate::Error::Unsupported(_))
    ));
    assert!(barenblatt_eval(1, 2.0, 1.0, &[0.0], 0.0).is_err());
    assert!(heat_kernel_eval(1, &[0.0], &[0.0], -1.0).is_err());
}

#[test]
fn neumann_keeps_constants() {
    let mut cfg = SolverConfig::new(2, InitialData::Constant { value: 0.7 }, 0.25, 1.5);
    cfg.half_width = Some(2.0);
    cfg.boundary = BoundaryCondition::Neumann;
    for sol in [
        solve_heat(&cfg).unwrap(),
        solve_pme(2.0, &cfg).unwrap(),
        solve_pdiff(3.0, &cfg).unwrap(),
    ] {
        assert!(sol.final_field().iter().all(|&v| v == 0.7));
    }
}

fn heat_error(dx: f64) -> f64 {
    let mut cfg = SolverConfig::heat_kernel(1, dx, 2.0);
    cfg.half_width = Some(6.0);
    cfg.save_every = usize::MAX;
    solve_heat(&cfg).unwrap().final_l1_error().unwrap()
}

#[test]
fn heat_refinement_is_second_order() {
    let (e1, e2) = (heat_error(0.2), heat_error(0.1));
    assert!(e1 / e2 >= 3.5, "{e1} -> {e2}");
}

#[test]
fn homogeneous_dirichlet_mass_never_grows() {
    let mut cfg = SolverConfig::heat_kernel(2, 0.2, 3.0);
    cfg.half_width = Some(2.0);
    cfg.boundary = BoundaryCondition::Homogeneous;
    for sol in [
        solve_heat(&cfg).unwrap(),
        solve_pme(2.0, &cfg).unwrap(),
        solve_pdiff(3.0, &cfg).unwrap(),
    ] {
        let mut prev = sol.initial_mass();
        for s in sol.steps() {
            assert!(s.mass <= prev * (1.0 + 1e-14), "{} > {prev}", s.mass);
            prev = s.mass;
        }
        assert!(prev < sol.initial_mass());
    }
}

fn pme_config(dx: f64) -> SolverConfig {
    let mut cfg = SolverConfig::new(
        1,
        InitialData::Exact {
            solution: ExactSolution::Barenblatt {
                d: 1,
                m: 2.0,
                c0: 1.0,
            },
        },
        dx,
        2.0,
    );
    cfg.half_width = Some(8.0);
    cfg.boundary = BoundaryCondition::Exact;
    cfg.save_every = usize::MAX;
    cfg
}

#[test]
fn pme_converges_to_barenblatt() {
    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dx| {
            solve_pme(2.0, &pme_config(dx))
                .unwrap()
                .final_l1_error()
                .unwrap()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.8, "errors {errors:?}");
    }
}

#[test]
fn pme_support_grows_like_barenblatt() {
    let sol = solve_pme(2.0, &pme_config(0.025)).unwrap();
    let field = sol.final_field();
    let peak = field.iter().cloned().fold(0.0, f64::max);
    let numeric = (0..field.len())
        .filter(|&i| field[i] > 1e-6 * peak)
        .map(|i| sol.coordinate(i).abs())
        .fold(0.0, f64::max);
    let exact = barenblatt_support_radius(1, 2.0, 1.0, 2.0);
    assert!(
        (numeric - exact).abs() <= 0.1 * exact,
        "{numeric} vs {exact}"
    );
    assert!(sol.max_relative_clamp() <= 1e-10);
}

#[test]
fn zero_data_stays_zero() {
    let mut cfg = SolverConfig::new(1, InitialData::Constant { value: 0.0 }, 0.1, 2.0);
    cfg.half_width = Some(1.0);
    let sol = solve_pme(3.0, &cfg).unwrap();
    assert!(sol.final_field().iter().all(|&v| v == 0.0));
}

#[test]
fn reductions_step_bitwise() {
    for d in [1, 2] {
        let mut cfg = SolverConfig::heat_kernel(d, 0.25, 1.5);
        cfg.half_width = Some(3.0);
        cfg.epsilon = 0.0;
        let heat = solve_heat(&cfg).unwrap();
        let pme = solve_pme(1.0, &cfg).unwrap();
        let pdiff = solve_pdiff(2.0, &cfg).unwrap();
        assert_eq!(heat.times(), pme.times());
        assert_eq!(heat.times(), pdiff.times());
        for k in 0..heat.snapshot_count() {
            assert_eq!(heat.snapshot(k), pme.snapshot(k));
            assert_eq!(heat.snapshot(k), pdiff.snapshot(k));
        }
    }
}

#[test]
fn pdiff_conserves_mass_away_from_the_boundary() {
    let mut cfg = SolverConfig::heat_kernel(1, 0.05, 2.0);
    cfg.half_width = Some(10.0);
    let sol = solve_pdiff(3.0, &cfg).unwrap();
    let m0 = sol.initial_mass();
    for s in sol.steps() {
        assert!((s.mass - m0).abs() <= 1e-6 * m0);
    }
    assert!(sol.max_relative_clamp() <= 1e-10);
}

#[test]
fn linear_data_is_stationary() {
    let mut cfg = SolverConfig::new(
        1,
        InitialData::Linear {
            slope: vec![0.5],
            offset: 2.0,
        },
        0.1,
        1.2,
    );
    cfg.half_width = Some(2.0);
    cfg.boundary = BoundaryCondition::Frozen;
    let sol = solve_pdiff(3.0, &cfg).unwrap();
    for w in (0..sol.snapshot_count()).collect::<Vec<_>>().windows(2) {
        let drift = sol
            .snapshot(w[0])
            .iter()
            .zip(sol.snapshot(w[1]))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(drift <= 1e-12);
    }
}

#[test]
fn config_guards() {
    let mut cfg = SolverConfig::heat_kernel(1, 0.1, 2.0);
    cfg.cfl = 1.0;
    assert!(matches!(
        solve_heat(&cfg),
        Err(crate::Error::Configuration(_))
    ));
    cfg.cfl = 0.5;
    cfg.t_start = 0.0;
    assert!(matches!(
        solve_heat(&cfg),
        Err(crate::Error::Configuration(_))
    ));
    let mut cfg = SolverConfig::new(1, InitialData::Constant { value: 1.0 }, 0.1, 2.0);
    cfg.boundary = BoundaryCondition::Exact;
    assert!(solve_heat(&cfg).is_err());
    assert!(matches!(
        solve_pme(0.1, &SolverConfig::heat_kernel(3, 0.5, 2.0)),
        Err(crate::Error::BelowCriticalExponent { .. })
    ));
    let mut cfg = SolverConfig::heat_kernel(1, 0.1, 2.0);
    cfg.fixed_dt = Some(0.1);
    assert!(matches!(
        solve_heat(&cfg),
        Err(crate::Error::Configuration(_))
    ));
}

#[test]
fn export_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SolverConfig::heat_kernel(2, 0.5, 1.1);
    cfg.half_width = Some(1.0);
    let sol = solve_heat(&cfg).unwrap();
    let (csv_path, json_path) = sol.export(dir.path(), "heat").unwrap();
    let text = std::fs::read_to_string(csv_path).unwrap();
    assert!(text.starts_with("x1,x2,t,u\n"));
    assert_eq!(
        text.lines().count(),
        1 + sol.snapshot_count() * sol.node_count()
    );
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(meta["equation"]["kind"], "heat");
    assert_eq!(meta["config"]["dx"], 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn comparison_principle(a in 0.1f64..1.0, gap in 0.0f64..0.5, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cfg = SolverConfig::new(1, InitialData::Constant { value: 0.0 }, 0.1, 1.2);
        cfg.half_width = Some(2.0);
        cfg.fixed_dt = Some(2e-5);
        let n = 41;
        let low: Vec<f64> = (0..n).map(|_| a * rng.gen::<f64>()).collect();
        let high: Vec<f64> = low.iter().map(|v| v + gap * rng.gen::<f64>()).collect();
        for eq in 0..3 {
            let run = |values: &Vec<f64>| {
                let mut c = cfg.clone();
                c.initial = InitialData::Field { values: values.clone() };
                match eq {
                    0 => solve_heat(&c),
                    1 => solve_pme(2.0, &c),
                    _ => solve_pdiff(3.0, &c),
                }
                .unwrap()
            };
            let (u, v) = (run(&low), run(&high));
            prop_assert_eq!(u.times(), v.times());
            for k in 0..u.snapshot_count() {
                for (x, y) in u.snapshot(k).iter().zip(v.snapshot(k)) {
                    prop_assert!(*x <= y + 1e-12);
                }
            }
        }
    }

    #[test]
    fn solvers_keep_values_nonnegative(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..41).map(|_| if rng.gen::<bool>() { rng.gen::<f64>() } else { 0.0 }).collect();
        let mut cfg = SolverConfig::new(1, InitialData::Field { values }, 0.1, 1.3);
        cfg.half_width = Some(2.0);
        cfg.epsilon = 1e-2;
        for sol in [solve_heat(&cfg).unwrap(), solve_pme(2.5, &cfg).unwrap(), solve_pdiff(1.6, &cfg).unwrap()] {
            for k in 0..sol.snapshot_count() {
                prop_assert!(sol.snapshot(k).iter().all(|&v| v >= 0.0));
            }
        }
    }
}
