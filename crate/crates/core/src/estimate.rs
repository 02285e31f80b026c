//! Method-of-moments estimation of `theta` from switch counts.
//!
//! Since `E N(T) = ln cosh(theta T)`, matching the observed mean count `pi`
//! gives `theta(pi) = arccosh(e^pi) / T`. With `n` replications the
//! estimator is asymptotically normal with variance
//! `ln cosh(theta T) coth^2(theta T) / T^2` (delta method; this is also the
//! inverse Fisher information of the Poisson count model).

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{check_positive, Error, Result};
use crate::specfun::{acosh_exp_unchecked, log_cosh};

pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// One trajectory observed up to `T`; point estimate only.
    Single,
    /// `n` independent trajectories on `[0, T]`.
    Replicated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    pub pi_hat: f64,
    pub std_error: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub level: Option<f64>,
    pub n: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub scheme: Scheme,
    /// All counts were zero; `theta_hat = 0` is the boundary estimate.
    pub degenerate: bool,
}

impl EstimateResult {
    /// Recompute the interval at another confidence level.
    pub fn with_level(mut self, level: f64) -> Result<Self> {
        if let Some(se) = self.std_error {
            let (lo, hi) = confidence_interval(self.theta_hat, se, level)?;
            self.ci_low = Some(lo);
            self.ci_high = Some(hi);
            self.level = Some(level);
        }
        Ok(self)
    }
}

/// `theta(pi) = arccosh(e^pi) / T` for a real mean count `pi >= 0`.
pub fn theta_from_mean_count(pi: f64, horizon: f64) -> Result<f64> {
    check_positive("theta_from_mean_count", "T", horizon)?;
    if !(pi >= 0.0 && pi.is_finite()) {
        return Err(Error::Domain { op: "theta_from_mean_count", name: "pi", value: pi });
    }
    Ok(acosh_exp_unchecked(pi) / horizon)
}

/// Single-trajectory estimate from the number of switches seen up to `T`.
pub fn estimate_single(switches: u64, horizon: f64) -> Result<f64> {
    theta_from_mean_count(switches as f64, horizon)
}

/// [`estimate_single`] wrapped as an [`EstimateResult`] (no standard error).
pub fn estimate_single_result(switches: u64, horizon: f64) -> Result<EstimateResult> {
    let theta_hat = estimate_single(switches, horizon)?;
    Ok(EstimateResult {
        theta_hat,
        pi_hat: switches as f64,
        std_error: None,
        ci_low: None,
        ci_high: None,
        level: None,
        n: 1,
        horizon,
        scheme: Scheme::Single,
        degenerate: switches == 0,
    })
}

/// Delta-method standard error of `theta(pi_hat)` from `n` replications:
/// `sqrt(pi_hat / (T^2 (1 - e^{-2 pi_hat}) n))`.
pub fn delta_std_error(pi_hat: f64, horizon: f64, n: usize) -> f64 {
    if pi_hat == 0.0 {
        return 0.0;
    }
    let slope_sq = 1.0 / (horizon * horizon * -(-2.0 * pi_hat).exp_m1());
    (pi_hat * slope_sq / n as f64).sqrt()
}

/// Replicated-scheme estimate with a [`DEFAULT_LEVEL`] interval.
pub fn estimate_replicated(counts: &[u64], horizon: f64) -> Result<EstimateResult> {
    estimate_replicated_at_level(counts, horizon, DEFAULT_LEVEL)
}

pub fn estimate_replicated_at_level(counts: &[u64], horizon: f64, level: f64) -> Result<EstimateResult> {
    check_positive("estimate_replicated", "T", horizon)?;
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = counts.len();
    let total: u64 = counts.iter().sum();
    let pi_hat = total as f64 / n as f64;
    let theta_hat = theta_from_mean_count(pi_hat, horizon)?;
    let std_error = delta_std_error(pi_hat, horizon, n);
    let (lo, hi) = confidence_interval(theta_hat, std_error, level)?;
    Ok(EstimateResult {
        theta_hat,
        pi_hat,
        std_error: Some(std_error),
        ci_low: Some(lo),
        ci_high: Some(hi),
        level: Some(level),
        n,
        horizon,
        scheme: Scheme::Replicated,
        degenerate: total == 0,
    })
}

/// Asymptotic variance of `sqrt(n) (theta_hat - theta)`:
/// `ln cosh(theta T) coth^2(theta T) / T^2`.
pub fn asymptotic_variance(theta: f64, horizon: f64) -> Result<f64> {
    check_positive("asymptotic_variance", "T", horizon)?;
    if theta == 0.0 {
        return Err(Error::DegenerateInformation);
    }
    check_positive("asymptotic_variance", "theta", theta)?;
    let x = theta * horizon;
    let coth = 1.0 / x.tanh();
    Ok(log_cosh(x) * coth * coth / (horizon * horizon))
}

/// Gaussian interval `theta_hat +/- z std_error`, clamped at zero.
pub fn confidence_interval(theta_hat: f64, std_error: f64, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain { op: "confidence_interval", name: "level", value: level });
    }
    let z = Normal::standard().inverse_cdf(0.5 * (1.0 + level));
    let half = z * std_error;
    Ok(((theta_hat - half).max(0.0), theta_hat + half))
}

/// Poisson log-likelihood of `n` counts with mean `pi_hat`, up to a
/// constant: `n (pi_hat ln Lambda(T) - Lambda(T))`.
pub fn count_log_likelihood(theta: f64, pi_hat: f64, n: usize, horizon: f64) -> f64 {
    let cumulative = log_cosh(theta * horizon);
    n as f64 * (pi_hat * cumulative.ln() - cumulative)
}

/// Derivative of [`count_log_likelihood`] in `theta`.
pub fn count_score(theta: f64, pi_hat: f64, n: usize, horizon: f64) -> f64 {
    let cumulative = log_cosh(theta * horizon);
    n as f64 * (pi_hat / cumulative - 1.0) * horizon * (theta * horizon).tanh()
}
