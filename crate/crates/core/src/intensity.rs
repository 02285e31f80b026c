//! The switching intensity `lambda(t) = theta * tanh(theta * t)`, its
//! cumulative `Lambda(t) = ln cosh(theta * t)`, and two exact samplers for
//! the driving inhomogeneous Poisson process.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::specfun::{acosh_exp_unchecked, log_cosh};

/// Switching parameter `theta` (1/time) and speed `c` (length/time).
///
/// The law only depends on `|theta|`, so the sign is dropped on
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    theta: f64,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    theta: f64,
    c: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.theta, raw.c)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams { theta: p.theta, c: p.c }
    }
}

impl ModelParams {
    pub fn new(theta: f64, c: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParams(format!("theta must be finite, got {theta}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("c must be positive and finite, got {c}")));
        }
        Ok(Self { theta: theta.abs(), c })
    }

    /// `|theta|`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `lambda(t) = |theta| tanh(|theta| t)`.
    pub fn lambda_at(&self, t: f64) -> Result<f64> {
        check_nonnegative("lambda_at", "t", t)?;
        Ok(self.lambda_unchecked(t))
    }

    pub(crate) fn lambda_unchecked(&self, t: f64) -> f64 {
        self.theta * (self.theta * t).tanh()
    }

    /// `Lambda(t) = ln cosh(theta t)`.
    pub fn big_lambda_at(&self, t: f64) -> Result<f64> {
        check_nonnegative("big_lambda_at", "t", t)?;
        Ok(self.big_lambda_unchecked(t))
    }

    pub(crate) fn big_lambda_unchecked(&self, t: f64) -> f64 {
        log_cosh(self.theta * t)
    }

    /// `Lambda^{-1}(u) = arccosh(e^u) / theta`.
    pub fn big_lambda_inv(&self, u: f64) -> Result<f64> {
        check_nonnegative("big_lambda_inv", "u", u)?;
        if self.theta == 0.0 {
            return Err(Error::DegenerateIntensity("big_lambda_inv"));
        }
        Ok(acosh_exp_unchecked(u) / self.theta)
    }
}

/// Ordered event times of one realisation on `(0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTimes {
    times: Vec<f64>,
    horizon: f64,
}

impl EventTimes {
    /// Validates strict monotonicity and `0 < t_i <= horizon`.
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidEvents(format!("horizon must be positive, got {horizon}")));
        }
        if let Some(&first) = times.first() {
            if !(first > 0.0) {
                return Err(Error::InvalidEvents(format!("first event {first} is not positive")));
            }
        }
        if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidEvents(format!(
                "event times not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = times.last() {
            if last > horizon {
                return Err(Error::InvalidEvents(format!("event {last} lies beyond the horizon {horizon}")));
            }
        }
        Ok(Self { times, horizon })
    }

    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of events in `(0, t]`.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t)
    }
}

/// Event times by time change: the `k`-th event sits at
/// `Lambda^{-1}(E_1 + ... + E_k)` with `E_i` standard exponential.
pub struct InversionEvents<'a, R: Rng + ?Sized> {
    params: ModelParams,
    horizon: f64,
    cumulative: f64,
    last: f64,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> InversionEvents<'a, R> {
    pub fn new(params: ModelParams, horizon: f64, rng: &'a mut R) -> Result<Self> {
        check_positive("sample_event_times_inversion", "T", horizon)?;
        Ok(Self { params, horizon, cumulative: 0.0, last: 0.0, rng })
    }
}

impl<R: Rng + ?Sized> Iterator for InversionEvents<'_, R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.params.theta == 0.0 || self.last >= self.horizon {
            return None;
        }
        let e: f64 = self.rng.sample(Exp1);
        self.cumulative += e;
        let mut t = acosh_exp_unchecked(self.cumulative) / self.params.theta;
        if t > self.horizon {
            self.last = f64::INFINITY;
            return None;
        }
        if t <= self.last {
            // a vanishing exponential gap can round onto the previous event
            t = self.last.next_up();
        }
        self.last = t;
        Some(t)
    }
}

/// Event times by thinning a homogeneous process of rate `|theta|`: a
/// candidate at time `t` is kept with probability `tanh(|theta| t)`.
pub struct ThinnedEvents<'a, R: Rng + ?Sized> {
    params: ModelParams,
    horizon: f64,
    clock: f64,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> ThinnedEvents<'a, R> {
    pub fn new(params: ModelParams, horizon: f64, rng: &'a mut R) -> Result<Self> {
        check_positive("sample_event_times_thinning", "T", horizon)?;
        Ok(Self { params, horizon, clock: 0.0, rng })
    }
}

impl<R: Rng + ?Sized> Iterator for ThinnedEvents<'_, R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let theta = self.params.theta;
        if theta == 0.0 {
            return None;
        }
        loop {
            let e: f64 = self.rng.sample(Exp1);
            self.clock += e / theta;
            if self.clock > self.horizon {
                self.clock = f64::INFINITY;
                return None;
            }
            let accept: f64 = self.rng.random();
            if accept < (theta * self.clock).tanh() {
                return Some(self.clock);
            }
        }
    }
}

/// Exact sample of the event times on `(0, horizon]` by inversion.
pub fn sample_event_times_inversion<R: Rng + ?Sized>(
    params: &ModelParams,
    horizon: f64,
    rng: &mut R,
) -> Result<EventTimes> {
    let times = InversionEvents::new(*params, horizon, rng)?.collect();
    Ok(EventTimes { times, horizon })
}

/// Same law as [`sample_event_times_inversion`]; kept as an independent
/// check on it.
pub fn sample_event_times_thinning<R: Rng + ?Sized>(
    params: &ModelParams,
    horizon: f64,
    rng: &mut R,
) -> Result<EventTimes> {
    let times = ThinnedEvents::new(*params, horizon, rng)?.collect();
    Ok(EventTimes { times, horizon })
}

/// Number of events on `(0, horizon]`, consuming the stream exactly as
/// [`sample_event_times_inversion`] does.
pub fn sample_count_inversion<R: Rng + ?Sized>(
    params: &ModelParams,
    horizon: f64,
    rng: &mut R,
) -> Result<u64> {
    Ok(InversionEvents::new(*params, horizon, rng)?.count() as u64)
}
