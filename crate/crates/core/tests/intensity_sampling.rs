use telegraph::intensity::{sample_event_times_inversion, sample_event_times_thinning, InversionEvents};
use telegraph::stream::stream;
use telegraph::validate::{sup_distance_to, two_sample_sup_distance};
use telegraph::ModelParams;

#[test]
fn cumulative_intensity_differentiates_to_intensity() {
    for theta in [0.2, 1.0, 3.5] {
        let p = ModelParams::new(theta, 1.0).unwrap();
        for t in [0.05, 0.5, 1.0, 4.0] {
            let h = 1e-5;
            let d = (p.big_lambda_at(t + h).unwrap() - p.big_lambda_at(t - h).unwrap()) / (2.0 * h);
            let lam = p.lambda_at(t).unwrap();
            assert!((d - lam).abs() < 1e-8, "theta={theta} t={t}");
        }
    }
}

#[test]
fn intensity_solves_the_riccati_equation() {
    // lambda' = theta^2 - lambda^2 with lambda(0) = 0
    let theta = 1.7;
    let p = ModelParams::new(theta, 1.0).unwrap();
    assert_eq!(p.lambda_at(0.0).unwrap(), 0.0);
    for t in [0.1, 0.6, 1.3, 2.5] {
        let h = 1e-5;
        let d = (p.lambda_at(t + h).unwrap() - p.lambda_at(t - h).unwrap()) / (2.0 * h);
        let lam = p.lambda_at(t).unwrap();
        assert!((d - (theta * theta - lam * lam)).abs() < 1e-8);
    }
}

#[test]
fn inverse_cumulative_intensity_round_trips() {
    let p = ModelParams::new(2.0, 1.0).unwrap();
    for t in [1e-6, 0.01, 0.3, 1.0, 10.0, 200.0] {
        let back = p.big_lambda_inv(p.big_lambda_at(t).unwrap()).unwrap();
        assert!(((back - t) / t).abs() < 1e-12, "{t} -> {back}");
    }
}

#[test]
fn samplers_agree_in_law() {
    let p = ModelParams::new(1.3, 1.0).unwrap();
    let horizon = 1.5;
    let n = 20_000;
    let mut inv_first = Vec::with_capacity(n);
    let mut thin_first = Vec::with_capacity(n);
    let (mut inv_total, mut thin_total) = (0usize, 0usize);
    for i in 0..n {
        let a = sample_event_times_inversion(&p, horizon, &mut stream(1, i as u64)).unwrap();
        let b = sample_event_times_thinning(&p, horizon, &mut stream(2, i as u64)).unwrap();
        inv_first.push(a.times().first().copied().unwrap_or(f64::INFINITY));
        thin_first.push(b.times().first().copied().unwrap_or(f64::INFINITY));
        inv_total += a.len();
        thin_total += b.len();
    }
    let expected = p.big_lambda_at(horizon).unwrap();
    let se = (expected / n as f64).sqrt();
    for total in [inv_total, thin_total] {
        let mean = total as f64 / n as f64;
        assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
    }
    // first event: P(T1 <= t) = 1 - 1/cosh(theta t)
    let cdf = |t: f64| 1.0 - 1.0 / (1.3 * t).cosh();
    // 1.63 / sqrt(n) is the 1% critical value of the one-sample KS statistic
    let crit = 1.63 / (n as f64).sqrt();
    assert!(sup_distance_to(&inv_first, cdf, horizon) < crit);
    assert!(sup_distance_to(&thin_first, cdf, horizon) < crit);
    assert!(two_sample_sup_distance(&inv_first, &thin_first) < crit * 2f64.sqrt());
}

#[test]
fn event_times_are_strictly_increasing_and_bounded() {
    let p = ModelParams::new(5.0, 1.0).unwrap();
    let mut rng = stream(3, 0);
    let times: Vec<f64> = InversionEvents::new(p, 4.0, &mut rng).unwrap().collect();
    assert!(times.len() > 5);
    assert!(times.windows(2).all(|w| w[0] < w[1]));
    assert!(times.iter().all(|&t| t > 0.0 && t <= 4.0));
}
