//! The ten acceptance criteria, each at its stated size. Every criterion
//! prints one PASS/FAIL line; the test fails if any of them does.

mod common;

use std::time::Instant;

use common::bessel_reference;
use telegraph::estimate::asymptotic_variance;
use telegraph::law::{velocity_covariance, velocity_transition};
use telegraph::specfun::{bessel_i0, bessel_i1};
use telegraph::validate::{
    check_bessel_identities, check_normalization, ks_distance, pde_residual, richardson,
    run_estimator_experiments, simulate_path_batch, thinning_batch, two_sample_sup_distance, PathBatch,
    PdeGrid, PrefactorMatch, Z_975,
};
use telegraph::ModelParams;

const SEED: u64 = 42;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn params(theta: f64, c: f64) -> ModelParams {
    ModelParams::new(theta, c).unwrap()
}

fn mean(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var)
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn count_moments(batch: &PathBatch, elapsed: f64) -> Outcome {
    let n = batch.counts.len() as f64;
    let (m, var) = mean(batch.counts.iter().map(|&k| k as f64));
    let target = 2f64.cosh().ln();
    let band = 3.0 * (target / n).sqrt();
    let ratio = var / m;
    Outcome {
        id: 1,
        title: "switch-count moments",
        passed: (m - target).abs() <= band && (0.98..=1.02).contains(&ratio) && elapsed < 30.0,
        detail: format!("mean {m:.6} vs {target:.7} +/- {band:.4}, var/mean {ratio:.4}, {elapsed:.2} s"),
    }
}

fn atoms(batch: &PathBatch) -> Outcome {
    let n = batch.counts.len() as f64;
    let zero: Vec<bool> =
        batch.counts.iter().zip(&batch.positions).filter(|(&k, _)| k == 0).map(|(_, &x)| x > 0.0).collect();
    let p0 = 1.0 / 2f64.cosh();
    let frac = zero.len() as f64 / n;
    let band0 = 3.0 * (p0 * (1.0 - p0) / n).sqrt();
    let plus = zero.iter().filter(|&&b| b).count() as f64 / zero.len() as f64;
    let band_plus = 3.0 * (0.25 / zero.len() as f64).sqrt();
    Outcome {
        id: 2,
        title: "zero-switch fraction and atom split",
        passed: (frac - p0).abs() <= band0 && (plus - 0.5).abs() <= band_plus,
        detail: format!("P(N=0) {frac:.6} vs {p0:.6} +/- {band0:.4}, at +cT {plus:.4} +/- {band_plus:.4}"),
    }
}

fn distributional_fit(batch: &PathBatch) -> Outcome {
    let ks = ks_distance(&batch.positions, &params(1.0, 1.0), 1.0).unwrap();
    let control = ks_distance(&batch.positions, &params(2.0, 1.0), 1.0).unwrap();
    Outcome {
        id: 3,
        title: "KS fit of X(1)",
        passed: ks <= 0.01 && control > 0.02,
        detail: format!("ks {ks:.5} (<= 0.01), theta=2 control {control:.4} (> 0.02)"),
    }
}

fn normalization() -> Outcome {
    let values = [0.5, 1.0, 2.0];
    let mut worst = 0.0f64;
    let mut all = true;
    for &theta in &values {
        for &t in &values {
            for &c in &values {
                let r = check_normalization(&params(theta, c), t, 1e-8).unwrap();
                worst = worst.max(r.error);
                all &= r.passed;
            }
        }
    }
    Outcome {
        id: 4,
        title: "density normalization on 27 points",
        passed: all,
        detail: format!("worst |integral - (1 - sech)| {worst:.2e} (<= 1e-8)"),
    }
}

fn pde() -> Outcome {
    let p = params(1.0, 1.0);
    let grid = PdeGrid::default();
    let res = pde_residual(&p, &grid, 1e-4).unwrap();
    let rich = richardson(&p, &grid, 0.02).unwrap();
    Outcome {
        id: 5,
        title: "telegraph equation residual",
        passed: res.max_relative <= 1e-4 && (2.5..=6.0).contains(&rich.ratio),
        detail: format!(
            "max relative residual {:.2e} at h=1e-4, Richardson ratio {:.3} for h=0.02 -> 0.01",
            res.max_relative, rich.ratio
        ),
    }
}

fn bessel_identity() -> Outcome {
    let r = check_bessel_identities(&params(2.0, 1.0), 1.0, 1e-8).unwrap();
    let unique = matches!(r.prefactor, PrefactorMatch::COverTheta | PrefactorMatch::ThetaOverC);
    Outcome {
        id: 6,
        title: "Bessel identity prefactor",
        passed: unique && r.dt_passed,
        detail: format!(
            "integral {:.16}, c/theta candidate {:.16}, theta/c candidate {:.16}: {:?}",
            r.i0_integral, r.candidate_c_over_theta, r.candidate_theta_over_c, r.prefactor
        ),
    }
}

fn estimator() -> Outcome {
    let start = Instant::now();
    let (s, _) =
        single_threaded(|| run_estimator_experiments(&params(1.0, 1.0), 1.0, 1000, 1000, SEED, 0.95))
            .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let v = asymptotic_variance(1.0, 1.0).unwrap();
    let passed = s.bias.abs() <= 0.01
        && s.variance_rel_error <= 0.05
        && (s.standardized_q025 + Z_975).abs() <= 0.15
        && (s.standardized_q975 - Z_975).abs() <= 0.15
        && elapsed < 120.0;
    Outcome {
        id: 7,
        title: "estimator consistency and normality",
        passed,
        detail: format!(
            "bias {:.5}, n var {:.4} vs {v:.4} ({:.1}%), quantiles {:.3} / {:.3}, {elapsed:.2} s",
            s.bias,
            s.scaled_variance,
            100.0 * s.variance_rel_error,
            s.standardized_q025,
            s.standardized_q975
        ),
    }
}

fn coverage() -> Outcome {
    let (s, _) = run_estimator_experiments(&params(1.0, 1.0), 1.0, 1000, 2000, SEED, 0.95).unwrap();
    Outcome {
        id: 8,
        title: "confidence interval coverage",
        passed: (0.935..=0.965).contains(&s.coverage),
        detail: format!("coverage {:.4} over 2000 experiments", s.coverage),
    }
}

fn samplers(batch: &PathBatch) -> Outcome {
    let (thin_first, _) = thinning_batch(&params(1.0, 1.0), 1.0, 100_000, SEED).unwrap();
    let d = two_sample_sup_distance(&batch.first_events, &thin_first);
    Outcome {
        id: 9,
        title: "inversion vs thinning",
        passed: d <= 0.01,
        detail: format!("first-event sup distance {d:.5} (<= 0.01)"),
    }
}

fn velocity_and_specfun(batch: &PathBatch) -> Outcome {
    let p = params(1.0, 1.0);
    let n = batch.same_direction.len() as f64;
    let (p_same, _) = velocity_transition(&p, 1.0).unwrap();
    let same = batch.same_direction.iter().filter(|&&b| b).count() as f64 / n;
    let band_same = 3.0 * (p_same * (1.0 - p_same) / n).sqrt();
    let cov = velocity_covariance(&p, 0.5, 1.0).unwrap();
    let (prod, _) = mean(batch.velocity_products.iter().copied());
    let band_cov = 3.0 * ((1.0 - cov * cov) / n).sqrt();

    let mut worst = 0.0f64;
    for i in 0..=3000 {
        let z = 30.0 * i as f64 / 3000.0;
        let (i0, i1, _) = bessel_reference(z);
        worst = worst.max(((bessel_i0(z).unwrap() - i0) / i0).abs());
        if z > 0.0 {
            worst = worst.max(((bessel_i1(z).unwrap() - i1) / i1).abs());
        }
    }
    Outcome {
        id: 10,
        title: "velocity statistics and special functions",
        passed: (same - p_same).abs() <= band_same && (prod - cov).abs() <= band_cov && worst <= 1e-12,
        detail: format!(
            "P(same) {same:.5} vs {p_same:.5} +/- {band_same:.4}, E[V(.5)V(1)] {prod:.5} vs {cov:.5} +/- {band_cov:.4}, Bessel rel err {worst:.1e}"
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let start = Instant::now();
    let long = single_threaded(|| simulate_path_batch(&params(1.0, 1.0), 2.0, 200_000, SEED)).unwrap();
    let long_elapsed = start.elapsed().as_secs_f64();
    let unit = simulate_path_batch(&params(1.0, 1.0), 1.0, 100_000, SEED).unwrap();

    let outcomes = [
        count_moments(&long, long_elapsed),
        atoms(&long),
        distributional_fit(&unit),
        normalization(),
        pde(),
        bessel_identity(),
        estimator(),
        coverage(),
        samplers(&unit),
        velocity_and_specfun(&unit),
    ];
    for o in &outcomes {
        println!("{} {:>2} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
