use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::ModelParams;

/// Named tolerances. Each one is used by at least one report criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute error of the density integral against `1 - 1/cosh(theta t)`.
    pub normalization: f64,
    /// Relative error of the two Bessel integral identities.
    pub bessel_identity: f64,
    /// Maximum relative PDE residual.
    pub pde_residual: f64,
    /// Accepted range of the Richardson ratio when the step is halved.
    pub richardson_min: f64,
    pub richardson_max: f64,
    /// Grid KS distance between simulated positions and the CDF.
    pub ks: f64,
    /// The negative-control KS distance must exceed this.
    pub ks_negative_control: f64,
    /// Width, in Monte Carlo standard errors, of moment checks.
    pub mc_sigma: f64,
    /// Accepted `|variance / mean - 1|` of switch counts.
    pub dispersion: f64,
    /// Sup distance between inversion and thinning first-event laws, and
    /// total-variation distance between their count histograms.
    pub sampler: f64,
    /// `|mean(theta_hat) - theta|`.
    pub estimator_bias: f64,
    /// Relative error of `n var(theta_hat)` against the asymptotic variance.
    pub estimator_variance: f64,
    /// Error of the empirical 2.5% / 97.5% quantiles of standardised errors.
    pub quantile: f64,
    /// Accepted `|coverage - level|`.
    pub coverage: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            normalization: 1e-8,
            bessel_identity: 1e-8,
            pde_residual: 1e-4,
            richardson_min: 2.5,
            richardson_max: 6.0,
            ks: 0.01,
            ks_negative_control: 0.02,
            mc_sigma: 3.0,
            dispersion: 0.02,
            sampler: 0.01,
            estimator_bias: 0.01,
            estimator_variance: 0.05,
            quantile: 0.15,
            coverage: 0.015,
        }
    }
}

impl Tolerances {
    fn named(&self) -> [(&'static str, f64); 14] {
        [
            ("normalization", self.normalization),
            ("bessel_identity", self.bessel_identity),
            ("pde_residual", self.pde_residual),
            ("richardson_min", self.richardson_min),
            ("richardson_max", self.richardson_max),
            ("ks", self.ks),
            ("ks_negative_control", self.ks_negative_control),
            ("mc_sigma", self.mc_sigma),
            ("dispersion", self.dispersion),
            ("sampler", self.sampler),
            ("estimator_bias", self.estimator_bias),
            ("estimator_variance", self.estimator_variance),
            ("quantile", self.quantile),
            ("coverage", self.coverage),
        ]
    }
}

/// Evaluation abscissae for the analytic checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub pde_t_min: f64,
    pub pde_t_max: f64,
    pub pde_nt: usize,
    pub pde_nx: usize,
    /// Interior band `|x| <= x_fraction_max * c t`.
    pub x_fraction_max: f64,
    /// Finite-difference step for the residual bound.
    pub fd_step: f64,
    /// Coarse step of the Richardson pair (`h`, `h/2`).
    pub richardson_step: f64,
    /// Grid points on `[-ct, ct]` for the KS distance.
    pub ks_points: usize,
    /// Parameters at which the Bessel identity prefactor is discriminated.
    pub identity_theta: f64,
    pub identity_c: f64,
    pub identity_t: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            pde_t_min: 0.5,
            pde_t_max: 2.0,
            pde_nt: 16,
            pde_nx: 19,
            x_fraction_max: 0.9,
            fd_step: 1e-4,
            richardson_step: 0.02,
            ks_points: 2001,
            identity_theta: 2.0,
            identity_c: 1.0,
            identity_t: 1.0,
        }
    }
}

/// Full description of a validation run. Parsed from JSON; every field has
/// a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theta: f64,
    pub c: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Replications per estimator experiment.
    pub n: usize,
    /// Number of estimator experiments.
    pub experiments: usize,
    /// Trajectories in the path batch (moments, atoms, velocity, KS).
    pub paths: usize,
    pub seed: u64,
    pub level: f64,
    /// `theta` of the deliberately wrong CDF in the KS negative control.
    pub negative_control_theta: f64,
    pub grid: GridSpec,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            c: 1.0,
            horizon: 1.0,
            n: 1000,
            experiments: 1000,
            paths: 100_000,
            seed: 42,
            level: 0.95,
            negative_control_theta: 2.0,
            grid: GridSpec::default(),
            tolerances: Tolerances::default(),
        }
    }
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(vec![e.to_string()]))?;
        config.validate()?;
        Ok(config)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.theta, self.c)
    }

    /// Collects every schema violation rather than stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !self.theta.is_finite() {
            errs.push(format!("theta must be finite, got {}", self.theta));
        }
        if !positive(self.c) {
            errs.push(format!("c must be positive, got {}", self.c));
        }
        if !positive(self.horizon) {
            errs.push(format!("T must be positive, got {}", self.horizon));
        }
        if self.n < 1 {
            errs.push("n must be at least 1".into());
        }
        if self.experiments < 1 {
            errs.push("experiments must be at least 1".into());
        }
        if self.paths < 1 {
            errs.push("paths must be at least 1".into());
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            errs.push(format!("level must lie in (0, 1), got {}", self.level));
        }
        if !self.negative_control_theta.is_finite() || self.negative_control_theta.abs() == self.theta.abs() {
            errs.push(format!(
                "negative_control_theta must be finite and differ from |theta|, got {}",
                self.negative_control_theta
            ));
        }
        let g = &self.grid;
        if !positive(g.pde_t_min) || !(g.pde_t_max >= g.pde_t_min) || !g.pde_t_max.is_finite() {
            errs.push(format!(
                "grid.pde_t_min/pde_t_max must satisfy 0 < min <= max, got {} / {}",
                g.pde_t_min, g.pde_t_max
            ));
        }
        if g.pde_nt < 1 || g.pde_nx < 1 {
            errs.push("grid.pde_nt and grid.pde_nx must be at least 1".into());
        }
        if !(g.x_fraction_max >= 0.0 && g.x_fraction_max <= 0.9) {
            errs.push(format!("grid.x_fraction_max must lie in [0, 0.9], got {}", g.x_fraction_max));
        }
        if !positive(g.fd_step) {
            errs.push(format!("grid.fd_step must be positive, got {}", g.fd_step));
        }
        if !positive(g.richardson_step) {
            errs.push(format!("grid.richardson_step must be positive, got {}", g.richardson_step));
        }
        if g.ks_points < 2 {
            errs.push("grid.ks_points must be at least 2".into());
        }
        if !g.identity_theta.is_finite() || !positive(g.identity_c) || !positive(g.identity_t) {
            errs.push("grid.identity_theta must be finite, identity_c and identity_t positive".into());
        }
        for (name, v) in self.tolerances.named() {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("tolerances.{name} must be finite and nonnegative, got {v}"));
            }
        }
        if self.tolerances.richardson_min > self.tolerances.richardson_max {
            errs.push("tolerances.richardson_min exceeds tolerances.richardson_max".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }
}
