//! Monte Carlo checks: path-batch statistics against the closed-form law,
//! sampler cross-validation, and replicated estimator experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{asymptotic_variance, count_score, estimate_replicated_at_level};
use crate::intensity::{sample_count_inversion, sample_event_times_thinning, ModelParams};
use crate::law::LawDecomposition;
use crate::process::{simulate_trajectory, Sign};
use crate::stream::stream;

/// Number of grid points on `[-ct, ct]` used by [`ks_distance`].
pub const KS_GRID_POINTS: usize = 2001;

// stream index = (tag << 40) | replication
const PATH_TAG: u64 = 0;
const THINNING_TAG: u64 = 1;
const ESTIMATOR_TAG: u64 = 2;

fn stream_index(tag: u64, i: usize) -> u64 {
    (tag << 40) | i as u64
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Linear-interpolation quantile of sorted data.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

/// Largest gap between the empirical CDF of `samples` and the law's CDF,
/// over `points` equispaced abscissae on `[-ct, ct]` plus the left limits at
/// both atoms.
pub fn ks_distance_on_grid(samples: &[f64], law: &LawDecomposition, points: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(samples.to_vec());
    let n = xs.len() as f64;
    let ct = law.reach();
    let at_or_below = |x: f64| xs.partition_point(|&s| s <= x) as f64 / n;
    let below = |x: f64| xs.partition_point(|&s| s < x) as f64 / n;
    let points = points.max(2);
    let grid: Vec<f64> = (0..points)
        .map(|i| if i == points - 1 { ct } else { -ct + 2.0 * ct * i as f64 / (points - 1) as f64 })
        .collect();
    let gaps =
        grid.par_iter().map(|&x| Ok((at_or_below(x) - law.cdf(x)?).abs())).collect::<Result<Vec<f64>>>()?;
    let mut d = gaps.into_iter().fold(0.0, f64::max);
    for edge in [-ct, ct] {
        d = d.max((below(edge) - law.cdf_left(edge)?).abs());
    }
    Ok(d)
}

/// [`ks_distance_on_grid`] with [`KS_GRID_POINTS`].
pub fn ks_distance(samples: &[f64], params: &ModelParams, t: f64) -> Result<f64> {
    ks_distance_on_grid(samples, &LawDecomposition::new(*params, t)?, KS_GRID_POINTS)
}

/// Per-path observables from one simulated batch.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    pub horizon: f64,
    pub counts: Vec<u64>,
    /// Switches in `(0, T/2]`.
    pub first_half_counts: Vec<u64>,
    pub positions: Vec<f64>,
    pub initial_signs: Vec<Sign>,
    /// `V(T) / V(0)`, i.e. `+1` when the direction is unchanged.
    pub same_direction: Vec<bool>,
    /// `V(T/2) V(T)`.
    pub velocity_products: Vec<f64>,
    /// First switch time, `+inf` when there is none.
    pub first_events: Vec<f64>,
}

struct PathObs {
    count: u64,
    first_half: u64,
    position: f64,
    sign: Sign,
    same: bool,
    product: f64,
    first_event: f64,
}

/// Simulates `paths` trajectories on `[0, horizon]`, trajectory `i` drawing
/// from its own stream of `seed`.
pub fn simulate_path_batch(params: &ModelParams, horizon: f64, paths: usize, seed: u64) -> Result<PathBatch> {
    let obs = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, stream_index(PATH_TAG, i));
            let tr = simulate_trajectory(params, horizon, &mut rng)?;
            let half = 0.5 * horizon;
            let v_end = tr.velocity_at(horizon)?;
            Ok(PathObs {
                count: tr.events().len() as u64,
                first_half: tr.switch_count(half)? as u64,
                position: tr.final_position(),
                sign: tr.sign(),
                same: v_end * tr.sign().value() > 0.0,
                product: tr.velocity_at(half)? * v_end,
                first_event: tr.events().times().first().copied().unwrap_or(f64::INFINITY),
            })
        })
        .collect::<Result<Vec<PathObs>>>()?;
    Ok(PathBatch {
        horizon,
        counts: obs.iter().map(|o| o.count).collect(),
        first_half_counts: obs.iter().map(|o| o.first_half).collect(),
        positions: obs.iter().map(|o| o.position).collect(),
        initial_signs: obs.iter().map(|o| o.sign).collect(),
        same_direction: obs.iter().map(|o| o.same).collect(),
        velocity_products: obs.iter().map(|o| o.product).collect(),
        first_events: obs.iter().map(|o| o.first_event).collect(),
    })
}

/// First-event times (`+inf` if none) and counts from the thinning sampler.
pub fn thinning_batch(
    params: &ModelParams,
    horizon: f64,
    samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<u64>)> {
    let out = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, stream_index(THINNING_TAG, i));
            let ev = sample_event_times_thinning(params, horizon, &mut rng)?;
            Ok((ev.times().first().copied().unwrap_or(f64::INFINITY), ev.len() as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(out.into_iter().unzip())
}

/// Two-sample sup distance between empirical CDFs (values may be `+inf`).
pub fn two_sample_sup_distance(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a.to_vec());
    let b = sorted(b.to_vec());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0_f64;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// One-sample sup distance against a continuous CDF `f` on `[0, horizon]`;
/// values above the horizon stand for "no event".
pub fn sup_distance_to<F: Fn(f64) -> f64>(samples: &[f64], f: F, horizon: f64) -> f64 {
    let xs = sorted(samples.to_vec());
    let n = xs.len() as f64;
    let mut d = 0.0_f64;
    let mut seen = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        if x > horizon {
            break;
        }
        let fx = f(x);
        d = d.max((i + 1) as f64 / n - fx).max(fx - i as f64 / n);
        seen = i + 1;
    }
    d.max((f(horizon) - seen as f64 / n).abs())
}

/// Total-variation distance between two empirical count histograms.
pub fn count_tv_distance(a: &[u64], b: &[u64]) -> f64 {
    let top = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    let mut ha = vec![0.0; top + 1];
    let mut hb = vec![0.0; top + 1];
    for &k in a {
        ha[k as usize] += 1.0 / a.len() as f64;
    }
    for &k in b {
        hb[k as usize] += 1.0 / b.len() as f64;
    }
    0.5 * ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// One row per estimator experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment: usize,
    pub theta_hat: f64,
    pub pi_hat: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub covered: bool,
    pub degenerate: bool,
    /// Score of the count likelihood is positive just below `theta_hat` and
    /// negative just above it.
    pub score_brackets_estimate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub experiments: usize,
    pub n: usize,
    pub mean_theta_hat: f64,
    pub bias: f64,
    /// `n * var(theta_hat)` across experiments.
    pub scaled_variance: f64,
    pub asymptotic_variance: f64,
    pub variance_rel_error: f64,
    /// Empirical 2.5% and 97.5% quantiles of `sqrt(n)(theta_hat - theta)/sqrt(V)`.
    pub standardized_q025: f64,
    pub standardized_q975: f64,
    pub coverage: f64,
    pub level: f64,
    pub degenerate_experiments: usize,
    pub score_bracket_fraction: f64,
}

/// Runs `experiments` independent replicated-scheme estimations, each from
/// `n` simulated switch counts on `[0, horizon]`.
pub fn run_estimator_experiments(
    params: &ModelParams,
    horizon: f64,
    n: usize,
    experiments: usize,
    seed: u64,
    level: f64,
) -> Result<(EstimatorSummary, Vec<ExperimentRow>)> {
    if n == 0 || experiments == 0 {
        return Err(Error::EmptySample);
    }
    let theta = params.theta();
    let v = asymptotic_variance(theta, horizon)?;
    let rows = (0..experiments)
        .into_par_iter()
        .map(|e| {
            let mut rng = stream(seed, stream_index(ESTIMATOR_TAG, e));
            let counts = (0..n)
                .map(|_| sample_count_inversion(params, horizon, &mut rng))
                .collect::<Result<Vec<u64>>>()?;
            let r = estimate_replicated_at_level(&counts, horizon, level)?;
            let (lo, hi) = (r.ci_low.unwrap_or(0.0), r.ci_high.unwrap_or(0.0));
            let score_brackets_estimate = if r.degenerate {
                // boundary maximum: the likelihood only decreases away from 0
                true
            } else {
                let step = 1e-6 * r.theta_hat;
                count_score(r.theta_hat - step, r.pi_hat, n, horizon) > 0.0
                    && count_score(r.theta_hat + step, r.pi_hat, n, horizon) < 0.0
            };
            Ok(ExperimentRow {
                experiment: e,
                theta_hat: r.theta_hat,
                pi_hat: r.pi_hat,
                std_error: r.std_error.unwrap_or(0.0),
                ci_low: lo,
                ci_high: hi,
                covered: lo <= theta && theta <= hi,
                degenerate: r.degenerate,
                score_brackets_estimate,
            })
        })
        .collect::<Result<Vec<ExperimentRow>>>()?;

    let estimates: Vec<f64> = rows.iter().map(|r| r.theta_hat).collect();
    let mean_theta_hat = mean(&estimates);
    let scaled_variance = n as f64 * variance(&estimates);
    let scale = (n as f64 / v).sqrt();
    let standardized = sorted(estimates.iter().map(|t| scale * (t - theta)).collect());
    let count = |pred: fn(&ExperimentRow) -> bool| rows.iter().filter(|r| pred(r)).count();
    let summary = EstimatorSummary {
        experiments,
        n,
        mean_theta_hat,
        bias: mean_theta_hat - theta,
        scaled_variance,
        asymptotic_variance: v,
        variance_rel_error: (scaled_variance - v).abs() / v,
        standardized_q025: quantile_sorted(&standardized, 0.025),
        standardized_q975: quantile_sorted(&standardized, 0.975),
        coverage: count(|r| r.covered) as f64 / experiments as f64,
        level,
        degenerate_experiments: count(|r| r.degenerate),
        score_bracket_fraction: count(|r| r.score_brackets_estimate) as f64 / experiments as f64,
    };
    Ok((summary, rows))
}
