use proptest::prelude::*;
use telegraph::law::{velocity_char_function, velocity_covariance, velocity_transition, LawDecomposition};
use telegraph::process::simulate_trajectory;
use telegraph::quadrature::integrate;
use telegraph::stream::stream;
use telegraph::ModelParams;

fn law(theta: f64, c: f64, t: f64) -> LawDecomposition {
    LawDecomposition::new(ModelParams::new(theta, c).unwrap(), t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_vanishes_outside_the_cone(theta in 0.0..5.0f64, c in 0.1..4.0f64, t in 0.01..4.0f64, k in 1.0001..10.0f64) {
        let l = law(theta, c, t);
        let x = k * c * t;
        prop_assert_eq!(l.density(x), 0.0);
        prop_assert_eq!(l.density(-x), 0.0);
        prop_assert_eq!(l.cdf(-x).unwrap(), 0.0);
        prop_assert_eq!(l.cdf(x).unwrap(), 1.0);
    }

    #[test]
    fn density_is_even_and_positive_inside(theta in 0.01..5.0f64, c in 0.1..4.0f64, t in 0.01..4.0f64, u in 0.0..0.999f64) {
        let l = law(theta, c, t);
        let x = u * c * t;
        prop_assert_eq!(l.density(x), l.density(-x));
        prop_assert!(l.density(x) > 0.0);
    }

    #[test]
    fn mass_balances(theta in 0.0..30.0f64, c in 0.1..4.0f64, t in 0.001..10.0f64) {
        let l = law(theta, c, t);
        let total = 2.0 * l.atom_mass() + l.continuous_mass();
        prop_assert!((total - 1.0).abs() < 1e-15);
        prop_assert!(l.continuous_mass() >= 0.0);
    }

    #[test]
    fn cdf_is_monotone_and_symmetric(theta in 0.0..4.0f64, c in 0.2..3.0f64, t in 0.05..3.0f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let l = law(theta, c, t);
        let ct = c * t;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (xl, xh) = (-ct + 2.0 * ct * lo, -ct + 2.0 * ct * hi);
        prop_assert!(l.cdf(xl).unwrap() <= l.cdf(xh).unwrap() + 1e-14);
        // P(X <= x) + P(X < -x) = 1
        let x = xl;
        let s = l.cdf(x).unwrap() + l.cdf_left(-x).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-9, "{}", s);
    }

    #[test]
    fn trajectories_are_lipschitz_and_inside_the_cone(theta in 0.0..4.0f64, c in 0.1..3.0f64, horizon in 0.1..5.0f64, seed in any::<u64>(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let p = ModelParams::new(theta, c).unwrap();
        let tr = simulate_trajectory(&p, horizon, &mut stream(seed, 0)).unwrap();
        let (s, t) = (a * horizon, b * horizon);
        let (xs, xt) = (tr.position_at(s).unwrap(), tr.position_at(t).unwrap());
        let slack = 1e-12 * c * horizon;
        prop_assert!((xt - xs).abs() <= c * (t - s).abs() + slack);
        prop_assert!(xt.abs() <= c * t + slack);
        prop_assert_eq!(tr.velocity_at(t).unwrap().abs(), c);
        if tr.events().is_empty() {
            prop_assert_eq!(tr.final_position(), tr.sign().value() * c * horizon);
        }
    }

    #[test]
    fn velocity_statistics_are_consistent(theta in 0.0..4.0f64, c in 0.1..3.0f64, s in 0.0..3.0f64, dt in 0.0..3.0f64) {
        let p = ModelParams::new(theta, c).unwrap();
        let t = s + dt;
        let (same, flip) = velocity_transition(&p, t).unwrap();
        prop_assert!((same + flip - 1.0).abs() < 1e-15);
        prop_assert!(same >= 0.5 && flip >= 0.0);
        let cov = velocity_covariance(&p, s, t).unwrap();
        prop_assert!(cov <= c * c * (1.0 + 1e-15) && cov > 0.0);
        prop_assert_eq!(cov, velocity_covariance(&p, t, s).unwrap());
        // alpha = 0 leaves only the marginal of V(t), a fair sign times c
        let phi = velocity_char_function(&p, s, t, 0.0, 0.7).unwrap();
        prop_assert!((phi.re - (0.7 * c).cos()).abs() < 1e-15);
        prop_assert_eq!(phi.im, 0.0);
    }
}

#[test]
fn cdf_matches_direct_integration_of_the_density() {
    // the CDF integrates in the angle; here the density is integrated in x
    for (theta, c, t) in [(1.0, 1.0, 1.0), (2.0, 0.5, 2.0), (0.3, 2.0, 0.7), (6.0, 1.0, 3.0)] {
        let l = law(theta, c, t);
        let ct = c * t;
        for u in [-0.9, -0.5, -0.1, 0.0, 0.3, 0.75, 0.99] {
            let x = u * ct;
            let direct = l.atom_mass() + integrate(|y| l.density(y), -ct, x, 1e-13).unwrap().value;
            let got = l.cdf(x).unwrap();
            assert!((got - direct).abs() < 1e-10, "theta={theta} x={x}: {got} vs {direct}");
        }
    }
}

#[test]
fn char_function_matches_enumeration() {
    // V(s) = c e, V(t) = c e (-1)^{N(t)-N(s)}, e a fair sign
    let p = ModelParams::new(1.0, 1.5).unwrap();
    let (s, t, alpha, beta) = (0.4, 1.3, 0.8, -0.6);
    let gap = p.big_lambda_at(t).unwrap() - p.big_lambda_at(s).unwrap();
    let same = 0.5 * (1.0 + (-2.0 * gap).exp());
    let c = p.c();
    let mut want = 0.0;
    for e in [1.0, -1.0] {
        for (flip, w) in [(1.0, same), (-1.0, 1.0 - same)] {
            want += 0.5 * w * (alpha * c * e + beta * c * e * flip).cos();
        }
    }
    let got = velocity_char_function(&p, s, t, alpha, beta).unwrap();
    assert!((got.re - want).abs() < 1e-15);
    assert!(velocity_char_function(&p, t, s, alpha, beta).is_err());
}

#[test]
fn reference_values() {
    let l = law(1.0, 1.0, 1.0);
    assert!((l.density(0.0) - 0.18312688632119108).abs() < 1e-16);
    assert!((l.density(1.0 - 1e-15) - 0.16201356841597135).abs() < 1e-13);
    assert!((l.atom_mass() - 0.32402713683194270).abs() < 1e-16);
    assert_eq!(l.atom_plus(), l.atom_minus());
    let l = law(0.0, 1.0, 2.0);
    assert_eq!(l.atom_mass(), 0.5);
    assert_eq!(l.continuous_mass(), 0.0);
    assert_eq!(l.cdf(0.0).unwrap(), 0.5);
}
