use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bounds::TimeCoefficient;
use crate::quadrature::integrate;

fn line(t1: f64, t2: f64, x1: &[f64], x2: &[f64], n: usize) -> DiscretePath {
    DiscretePath::straight_line(t1, t2, x1, x2, n).unwrap()
}

fn random_path(
    rng: &mut ChaCha8Rng,
    knots: &[f64],
    x1: &[f64],
    x2: &[f64],
    amp: f64,
) -> DiscretePath {
    let n = knots.len();
    let values = (0..n)
        .map(|i| {
            if i == 0 {
                x1.to_vec()
            } else if i == n - 1 {
                x2.to_vec()
            } else {
                let s = i as f64 / (n - 1) as f64;
                x1.iter()
                    .zip(x2)
                    .map(|(a, b)| a + s * (b - a) + amp * rng.gen_range(-1.0..1.0))
                    .collect()
            }
        })
        .collect();
    DiscretePath::new(knots.to_vec(), values).unwrap()
}

fn hat(knots: &[f64], j: usize, d: usize, k: usize) -> DiscretePath {
    let values = (0..knots.len())
        .map(|i| {
            let mut v = vec![0.0; d];
            if i == j {
                v[k] = 1.0;
            }
            v
        })
        .collect();
    DiscretePath::new(knots.to_vec(), values).unwrap()
}

#[test]
fn energy_examples() {
    let unit = WeightFunction::unit();
    let e = functional_e(&line(1.0, 2.0, &[0.0], &[1.0], 17), &unit, 2.0).unwrap();
    assert!((e - 0.5).abs() < 1e-15);
    let e = functional_e(&line(1.0, 2.0, &[3.0, 4.0], &[3.0, 4.0], 5), &unit, 3.0).unwrap();
    assert_eq!(e, 0.0);
    let linear = WeightFunction::PowerTime { sigma: 1.0 };
    let e = functional_e(&line(1.0, 2.0, &[0.0], &[1.0], 33), &linear, 2.0).unwrap();
    assert!((e - 0.75).abs() < 1e-14);
}

#[test]
fn closed_form_unweighted() {
    let unit = WeightFunction::unit();
    for &q in &[1.3, 2.0, 4.5] {
        let v = closed_form_min(q, &unit, 0.5, 2.0, &[0.0, 0.0], &[3.0, 4.0]).unwrap();
        let expected = 5f64.powf(q) / (q * 1.5f64.powf(q - 1.0));
        assert!((v - expected).abs() < 1e-13 * expected);
    }
    assert_eq!(
        closed_form_min(2.0, &unit, 1.0, 2.0, &[1.0], &[1.0]).unwrap(),
        0.0
    );
}

#[test]
fn closed_form_matches_discrete_minimizer() {
    let unit = WeightFunction::unit();
    let exact = closed_form_min(2.0, &unit, 1.0, 2.0, &[0.0], &[1.0]).unwrap();
    assert_eq!(exact, 0.5);
    let opts = MinimizeOptions {
        knots: 2000,
        ..Default::default()
    };
    let res = numeric_minimize(2.0, &unit, 1.0, 2.0, &[0.0], &[1.0], &opts).unwrap();
    assert!(res.converged);
    assert!((res.value - exact).abs() < 1e-6);
}

#[test]
fn unweighted_optimal_path_is_straight() {
    let v = optimal_path(
        2.7,
        &WeightFunction::unit(),
        1.0,
        3.0,
        &[0.0, 1.0],
        &[2.0, -1.0],
    )
    .unwrap();
    for &t in &[1.0, 1.5, 2.2, 3.0] {
        let s = (t - 1.0) / 2.0;
        let p = v.eval(t).unwrap();
        assert!((p[0] - 2.0 * s).abs() < 1e-14 && (p[1] - (1.0 - 2.0 * s)).abs() < 1e-14);
    }
    assert_eq!(v.eval(3.0).unwrap(), vec![2.0, -1.0]);
}

#[test]
fn exp_weight_optimal_path_is_affine_in_a_power_of_t() {
    // w = e^{-mA}, A = mu ln t  =>  W' = t^{m mu/(q-1)}
    for &(m, mu, q) in &[
        (-1.0, 0.5, 2.0),
        (1.0, 1.5, 3.0),
        (-1.0, 1.0, 2.0),
        (0.5, -0.8, 1.5),
    ] {
        let a = TimeCoefficient::power_law(mu).unwrap();
        let w = WeightFunction::ExpOfA { m, a };
        let (t1, t2, x1, x2) = (0.5, 2.0, [0.3], [1.7]);
        let v = optimal_path(q, &w, t1, t2, &x1, &x2).unwrap();
        let e = 1.0 + m * mu / (q - 1.0);
        let phi = |t: f64| if e == 0.0 { t.ln() } else { t.powf(e) };
        for &t in &[0.7, 1.0, 1.9] {
            let s = (phi(t) - phi(t1)) / (phi(t2) - phi(t1));
            let expected = x1[0] + s * (x2[0] - x1[0]);
            assert!(
                (v.eval(t).unwrap()[0] - expected).abs() < 1e-12,
                "m={m} mu={mu} q={q}"
            );
        }
        // E(v) by quadrature of (1/q) |v'|^q w.
        let b = (x2[0] - x1[0]) / integrate(|t| t.powf(e - 1.0), t1, t2, 1e-14, 0.0).unwrap();
        let energy = integrate(
            |t: f64| (b * t.powf(e - 1.0)).abs().powf(q) * t.powf(-m * mu) / q,
            t1,
            t2,
            1e-14,
            0.0,
        )
        .unwrap();
        let closed = closed_form_min(q, &w, t1, t2, &x1, &x2).unwrap();
        assert!((energy - closed).abs() < 1e-10 * closed);
    }
}

#[test]
fn sampled_optimal_path_energy_is_consistent() {
    let w = WeightFunction::PowerTime { sigma: 1.0 };
    for &q in &[1.5, 2.0, 3.0] {
        let (t1, t2, x1, x2) = (1.0, 2.0, [0.0, 0.0], [1.0, -2.0]);
        let knots = w_uniform_knots(q, &w, t1, t2, 4000).unwrap();
        let path = optimal_path(q, &w, t1, t2, &x1, &x2)
            .unwrap()
            .sample(knots)
            .unwrap();
        let e = functional_e(&path, &w, q).unwrap();
        let closed = closed_form_min(q, &w, t1, t2, &x1, &x2).unwrap();
        assert!(e >= closed);
        assert!(
            (e - closed) / closed <= 1e-8,
            "q = {q}: {}",
            (e - closed) / closed
        );
    }
}

#[test]
fn optimal_path_annihilates_hat_directions() {
    let w = WeightFunction::PowerTime { sigma: -0.5 };
    let q = 2.5;
    let (t1, t2, x1, x2) = (1.0, 3.0, [0.0, 1.0], [2.0, 0.5]);
    let knots = w_uniform_knots(q, &w, t1, t2, 400).unwrap();
    let v = optimal_path(q, &w, t1, t2, &x1, &x2)
        .unwrap()
        .sample(knots.clone())
        .unwrap();
    let mut worst = 0.0f64;
    for j in 1..knots.len() - 1 {
        for k in 0..2 {
            worst = worst.max(gateaux(&v, &hat(&knots, j, 2, k), &w, q).unwrap().abs());
        }
    }
    assert!(worst <= 1e-8, "max residual {worst}");
    let zero = v.scaled(0.0);
    assert_eq!(gateaux(&v, &zero, &w, q).unwrap(), 0.0);
}

#[test]
fn gateaux_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = WeightFunction::PowerTime { sigma: 0.7 };
    for &q in &[1.5, 2.0, 3.5] {
        let knots = DiscretePath::uniform_knots(0.5, 2.0, 25);
        let v = random_path(&mut rng, &knots, &[0.0, 0.0], &[1.0, 1.0], 0.5);
        let h = random_path(&mut rng, &knots, &[0.0, 0.0], &[0.0, 0.0], 1.0);
        let g = gateaux(&v, &h, &w, q).unwrap();
        // Richardson extrapolation of central differences.
        let e = |s: f64| functional_e(&v.combine(1.0, &h, s).unwrap(), &w, q).unwrap();
        let central = |s: f64| (e(s) - e(-s)) / (2.0 * s);
        let s = 1e-3;
        let fd = (4.0 * central(s / 2.0) - central(s)) / 3.0;
        assert!((fd - g).abs() <= 1e-5 * g.abs(), "q = {q}: {fd} vs {g}");
    }
}

#[test]
fn gateaux_rejects_mismatched_knots_and_nonzero_ends() {
    let w = WeightFunction::unit();
    let v = line(1.0, 2.0, &[0.0], &[1.0], 5);
    let h = line(1.0, 2.0, &[0.0], &[0.0], 6);
    assert!(matches!(
        gateaux(&v, &h, &w, 2.0),
        Err(crate::Error::Shape(_))
    ));
    let h = line(1.0, 2.0, &[0.0], &[1.0], 5);
    assert!(gateaux(&v, &h, &w, 2.0).is_err());
}

#[test]
fn quadratic_energy_converges_in_one_step() {
    let w = WeightFunction::PowerTime { sigma: 2.0 };
    let opts = MinimizeOptions {
        knots: 300,
        ..Default::default()
    };
    let res = numeric_minimize(2.0, &w, 1.0, 2.0, &[0.0, 0.0], &[1.0, 3.0], &opts).unwrap();
    assert!(res.converged);
    assert_eq!(res.iterations, 1);
}

#[test]
fn cubic_energy_unweighted_minimum() {
    let opts = MinimizeOptions {
        knots: 200,
        ..Default::default()
    };
    let res = numeric_minimize(
        3.0,
        &WeightFunction::unit(),
        1.0,
        2.0,
        &[0.0, 0.0],
        &[0.6, 0.8],
        &opts,
    )
    .unwrap();
    assert!(res.converged);
    assert!((res.value - 1.0 / 3.0).abs() < 1e-4);
}

#[test]
fn weighted_minimization_reaches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let w = WeightFunction::PowerTime { sigma: 1.0 };
    let x1: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let x2: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let opts = MinimizeOptions {
        knots: 2000,
        ..Default::default()
    };
    let res = numeric_minimize(1.5, &w, 1.0, 3.0, &x1, &x2, &opts).unwrap();
    let gap = res.gap_to_closed_form.unwrap();
    assert!(gap >= -1e-12);
    assert!(gap <= 1e-4, "gap {gap}");
}

#[test]
fn minimizer_is_unique() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let w = WeightFunction::PowerTime { sigma: 0.5 };
    let (t1, t2, x1, x2) = (1.0, 2.0, [0.0, 0.0], [1.0, -1.0]);
    let knots = DiscretePath::uniform_knots(t1, t2, 60);
    let runs: Vec<DiscretePath> = (0..2)
        .map(|_| {
            let init = random_path(&mut rng, &knots, &x1, &x2, 1.0);
            let opts = MinimizeOptions {
                initial: Some(init),
                ..Default::default()
            };
            let res = numeric_minimize(3.0, &w, t1, t2, &x1, &x2, &opts).unwrap();
            assert!(res.converged);
            res.path
        })
        .collect();
    let dist = runs[0]
        .combine(1.0, &runs[1], -1.0)
        .unwrap()
        .flat()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(dist <= 1e-4, "{dist}");
}

#[test]
fn minimizer_never_reports_exceptions_on_budget_exhaustion() {
    let opts = MinimizeOptions {
        knots: 50,
        max_iters: 1,
        tol: 0.0,
        ..Default::default()
    };
    let res = numeric_minimize(
        3.0,
        &WeightFunction::unit(),
        1.0,
        2.0,
        &[0.0],
        &[1.0],
        &opts,
    )
    .unwrap();
    assert!(!res.converged);
    assert!(numeric_minimize(
        3.0,
        &WeightFunction::unit(),
        1.0,
        2.0,
        &[0.0],
        &[1.0],
        &MinimizeOptions {
            knots: 4,
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn poincare_zero_and_tent() {
    let unit = WeightFunction::unit();
    let zero = line(1.0, 2.0, &[0.0], &[0.0], 4);
    let r = poincare_check(&zero, 2.0, &unit).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    assert!(r.holds);
    // 0 -> 1 -> 0 on [1, 3]: ||x||_2 = sqrt(2/3), ||x'||_2 = sqrt(2), C = sqrt(2)
    let tent =
        DiscretePath::new(vec![1.0, 2.0, 3.0], vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
    let r = poincare_check(&tent, 2.0, &unit).unwrap();
    assert!((r.lhs - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert!((r.constant - 2f64.sqrt()).abs() < 1e-15);
    assert!((r.rhs - 2.0).abs() < 1e-14);
    assert!(r.holds);
}

#[test]
fn poincare_holds_on_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let unit = WeightFunction::unit();
    for _ in 0..10_000 {
        let n = rng.gen_range(3..12);
        let knots = DiscretePath::uniform_knots(1.0, 1.0 + rng.gen_range(0.1..3.0), n);
        let amp = rng.gen_range(0.01..10.0);
        let x = random_path(&mut rng, &knots, &[0.0], &[0.0], amp);
        assert!(poincare_check(&x, 2.0, &unit).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn discrete_energy_bounds_the_closed_form(
        seed in any::<u64>(),
        q in 1.2..4.0f64,
        sigma in -2.0..2.0f64,
        n in 3usize..40,
        amp in 0.0..2.0f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightFunction::PowerTime { sigma };
        let x1 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let x2 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let knots = DiscretePath::uniform_knots(0.5, 2.5, n);
        let x = random_path(&mut rng, &knots, &x1, &x2, amp);
        let e = functional_e(&x, &w, q).unwrap();
        let min = closed_form_min(q, &w, 0.5, 2.5, &x1, &x2).unwrap();
        prop_assert!(e >= min - 1e-12);
    }

    #[test]
    fn energy_scales_homogeneously(seed in any::<u64>(), q in 1.2..4.0f64, lambda in -3.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightFunction::PowerTime { sigma: 0.5 };
        let knots = DiscretePath::uniform_knots(1.0, 2.0, 12);
        let x = random_path(&mut rng, &knots, &[0.0, 1.0], &[1.0, 0.0], 1.0);
        let e = functional_e(&x, &w, q).unwrap();
        let scaled = functional_e(&x.scaled(lambda), &w, q).unwrap();
        prop_assert!((scaled - lambda.abs().powf(q) * e).abs() <= 1e-12 * scaled.abs().max(1e-300));
    }

    #[test]
    fn energy_is_convex(seed in any::<u64>(), q in 1.2..4.0f64, lambda in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightFunction::PowerTime { sigma: -1.0 };
        let knots = DiscretePath::uniform_knots(1.0, 2.0, 15);
        let u = random_path(&mut rng, &knots, &[0.0], &[1.0], 2.0);
        let v = random_path(&mut rng, &knots, &[0.0], &[1.0], 2.0);
        let mix = u.combine(lambda, &v, 1.0 - lambda).unwrap();
        let lhs = functional_e(&mix, &w, q).unwrap();
        let rhs = lambda * functional_e(&u, &w, q).unwrap()
            + (1.0 - lambda) * functional_e(&v, &w, q).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
    }
}
