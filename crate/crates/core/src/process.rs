//! Event-driven simulation of the particle.
//!
//! A trajectory is stored as its initial direction and switch times; the
//! velocity `V(t) = V(0) (-1)^{N(t)}` and the position `X(t) = int_0^t V(s) ds`
//! are evaluated on demand by binary search over the switch times.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::{sample_event_times_inversion, EventTimes, ModelParams};
use crate::stream::stream;

/// Direction of the initial velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn flipped_if(self, odd: bool) -> Sign {
        match (self, odd) {
            (s, false) => s,
            (Sign::Plus, true) => Sign::Minus,
            (Sign::Minus, true) => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// One realised path: initial direction, switch times and model.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchTrajectory {
    sign: Sign,
    events: EventTimes,
    params: ModelParams,
    // position at each switch time
    knots: Vec<f64>,
}

impl SwitchTrajectory {
    pub fn new(sign: Sign, events: EventTimes, params: ModelParams) -> Self {
        let c = params.c();
        let mut knots = Vec::with_capacity(events.len());
        let mut position = 0.0;
        let mut prev = 0.0;
        for (k, &s) in events.times().iter().enumerate() {
            position += sign.flipped_if(k % 2 == 1).value() * c * (s - prev);
            knots.push(position);
            prev = s;
        }
        Self { sign, events, params, knots }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn events(&self) -> &EventTimes {
        &self.events
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn horizon(&self) -> f64 {
        self.events.horizon()
    }

    fn check_time(&self, op: &'static str, t: f64) -> Result<()> {
        if (0.0..=self.horizon()).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain { op, name: "t", value: t })
        }
    }

    /// Switches in `(0, t]`.
    pub fn switch_count(&self, t: f64) -> Result<usize> {
        self.check_time("switch_count", t)?;
        Ok(self.events.count_up_to(t))
    }

    /// Right-continuous velocity `V(t)`.
    pub fn velocity_at(&self, t: f64) -> Result<f64> {
        self.check_time("velocity_at", t)?;
        let k = self.events.count_up_to(t);
        Ok(self.sign.flipped_if(k % 2 == 1).value() * self.params.c())
    }

    /// Position `X(t)`, piecewise linear in `t`.
    pub fn position_at(&self, t: f64) -> Result<f64> {
        self.check_time("position_at", t)?;
        let k = self.events.count_up_to(t);
        let c = self.params.c();
        let v = self.sign.flipped_if(k % 2 == 1).value() * c;
        Ok(match k {
            0 => v * t,
            _ => self.knots[k - 1] + v * (t - self.events.times()[k - 1]),
        })
    }

    /// Position at the horizon.
    pub fn final_position(&self) -> f64 {
        self.position_at(self.horizon()).expect("horizon is in range")
    }

    pub fn to_record(&self, seed: u64, index: u64) -> TrajectoryRecord {
        TrajectoryRecord {
            seed,
            index,
            theta: self.params.theta(),
            c: self.params.c(),
            horizon: self.horizon(),
            sign: self.sign,
            events: self.events.times().to_vec(),
        }
    }
}

/// Serialised trajectory: `{seed, index, theta, c, T, sign, events}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub index: u64,
    pub theta: f64,
    pub c: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub sign: Sign,
    pub events: Vec<f64>,
}

impl TryFrom<TrajectoryRecord> for SwitchTrajectory {
    type Error = Error;
    fn try_from(rec: TrajectoryRecord) -> Result<Self> {
        let params = ModelParams::new(rec.theta, rec.c)?;
        let events = EventTimes::new(rec.events, rec.horizon)?;
        Ok(SwitchTrajectory::new(rec.sign, events, params))
    }
}

/// Draw the initial direction (fair coin), then the switch times by
/// inversion, both from `rng`.
pub fn simulate_trajectory<R: Rng + ?Sized>(
    params: &ModelParams,
    horizon: f64,
    rng: &mut R,
) -> Result<SwitchTrajectory> {
    let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
    let events = sample_event_times_inversion(params, horizon, rng)?;
    Ok(SwitchTrajectory::new(sign, events, *params))
}

/// `n` independent trajectories; trajectory `i` draws from stream `i` of
/// `seed`, so the batch does not depend on how work is scheduled.
pub fn simulate_batch(
    params: &ModelParams,
    horizon: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<SwitchTrajectory>> {
    (0..n)
        .into_par_iter()
        .map(|i| simulate_trajectory(params, horizon, &mut stream(seed, i as u64)))
        .collect()
}
