//! Numerical verification harness.
//!
//! [`run_experiment`] runs every check for one [`ExperimentConfig`] and
//! returns an [`ExperimentReport`] with one pass/fail [`Criterion`] per
//! check. Results are deterministic in the seed regardless of thread count.

mod analytic;
mod config;
mod montecarlo;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::ModelParams;
use crate::law::{velocity_covariance, velocity_transition, LawDecomposition};
use crate::process::Sign;

pub use analytic::{
    check_bessel_identities, check_normalization, pde_residual, pde_residual_of, richardson, richardson_of,
    BesselIdentityCheck, NormalizationCheck, PdeGrid, PdeResidual, PrefactorMatch, RichardsonCheck,
};
pub use config::{ExperimentConfig, GridSpec, Tolerances};
pub use montecarlo::{
    count_tv_distance, ks_distance, ks_distance_on_grid, run_estimator_experiments, simulate_path_batch,
    sup_distance_to, thinning_batch, two_sample_sup_distance, EstimatorSummary, ExperimentRow, PathBatch,
    KS_GRID_POINTS,
};

/// 97.5% standard normal quantile.
pub const Z_975: f64 = 1.959_963_984_540_054;

/// One named check: `observed` must fall in `[lower, upper]` (either bound
/// may be absent; `strict` makes the lower bound exclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub observed: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub strict: bool,
    pub passed: bool,
}

impl Criterion {
    fn new(name: String, observed: f64, lower: Option<f64>, upper: Option<f64>, strict: bool) -> Self {
        let lower_ok = match lower {
            Some(l) if strict => observed > l,
            Some(l) => observed >= l,
            None => true,
        };
        let upper_ok = upper.is_none_or(|u| observed <= u);
        let passed = observed.is_finite() && lower_ok && upper_ok;
        Self { name, observed, lower, upper, strict, passed }
    }

    pub fn within(name: impl Into<String>, observed: f64, target: f64, tol: f64) -> Self {
        Self::new(name.into(), observed, Some(target - tol), Some(target + tol), false)
    }

    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self::new(name.into(), observed, None, Some(limit), false)
    }

    pub fn above(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self::new(name.into(), observed, Some(limit), None, true)
    }

    pub fn in_range(name: impl Into<String>, observed: f64, lower: f64, upper: f64) -> Self {
        Self::new(name.into(), observed, Some(lower), Some(upper), false)
    }

    /// One line: `PASS name observed=... in [lo, hi]`.
    pub fn summary_line(&self) -> String {
        let lo = self.lower.map_or("-inf".to_string(), |v| format!("{v:.6e}"));
        let hi = self.upper.map_or("+inf".to_string(), |v| format!("{v:.6e}"));
        let open = if self.strict { '(' } else { '[' };
        format!(
            "{} {} observed={:.6e} in {open}{lo}, {hi}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountMoments {
    pub paths: usize,
    pub mean: f64,
    pub variance: f64,
    pub expected_mean: f64,
    pub dispersion_ratio: f64,
    /// Correlation of counts on `(0, T/2]` and `(T/2, T]`.
    pub increment_correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSummary {
    pub zero_switch_paths: usize,
    pub zero_switch_fraction: f64,
    pub expected_fraction: f64,
    /// Among zero-switch paths, the fraction ending at `+cT`.
    pub plus_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySummary {
    pub same_direction_fraction: f64,
    pub expected_same_direction: f64,
    pub s: f64,
    pub t: f64,
    pub mean_product: f64,
    pub expected_covariance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsSummary {
    pub statistic: f64,
    pub negative_control_theta: f64,
    pub negative_control_statistic: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSummary {
    pub first_event_two_sample: f64,
    pub first_event_vs_closed_form: f64,
    pub count_tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSummary {
    pub residual: PdeResidual,
    pub richardson: RichardsonCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    Full,
    /// Sample sizes too small for the Monte Carlo tolerances to be meaningful.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub mode: ReportMode,
    pub counts: CountMoments,
    pub atoms: AtomSummary,
    pub velocity: VelocitySummary,
    pub ks: KsSummary,
    pub sampler: SamplerSummary,
    pub normalization: NormalizationCheck,
    pub bessel_identities: BesselIdentityCheck,
    pub bessel_identities_probe: BesselIdentityCheck,
    pub pde: PdeSummary,
    pub estimator: EstimatorSummary,
    pub criteria: Vec<Criterion>,
    pub passed: bool,
    #[serde(skip)]
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    /// Per-experiment rows as CSV.
    pub fn write_rows_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn failed(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| !c.passed)
    }
}

fn context(what: &str, e: Error) -> Error {
    Error::Io(format!("{what}: {e}"))
}

/// Runs every check described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    if config.theta == 0.0 {
        return Err(Error::InvalidConfig(vec![
            "theta must be nonzero for a validation run (the estimator has no information at 0)".into(),
        ]));
    }
    let params = config.params()?;
    let horizon = config.horizon;
    let tol = &config.tolerances;
    let grid = &config.grid;
    let sigma = tol.mc_sigma;
    let mut criteria = Vec::new();

    // path batch
    let batch = simulate_path_batch(&params, horizon, config.paths, config.seed)
        .map_err(|e| context("path batch", e))?;
    let paths = config.paths as f64;
    let counts_f: Vec<f64> = batch.counts.iter().map(|&k| k as f64).collect();
    let expected_mean = params.big_lambda_at(horizon)?;
    let count_mean = montecarlo::mean(&counts_f);
    let count_var = montecarlo::variance(&counts_f);
    let dispersion_ratio = if count_mean > 0.0 { count_var / count_mean } else { 0.0 };
    let first: Vec<f64> = batch.first_half_counts.iter().map(|&k| k as f64).collect();
    let second: Vec<f64> =
        batch.counts.iter().zip(&batch.first_half_counts).map(|(&a, &b)| (a - b) as f64).collect();
    let increment_correlation = correlation(&first, &second);
    criteria.push(Criterion::within(
        "count_mean",
        count_mean,
        expected_mean,
        sigma * (expected_mean / paths).sqrt(),
    ));
    criteria.push(Criterion::within("count_dispersion", dispersion_ratio, 1.0, tol.dispersion));
    criteria.push(Criterion::within(
        "increment_correlation",
        increment_correlation,
        0.0,
        sigma / paths.sqrt(),
    ));

    let law = LawDecomposition::new(params, horizon)?;
    let zero = batch.counts.iter().filter(|&&k| k == 0).count();
    let zero_plus =
        batch.counts.iter().zip(&batch.initial_signs).filter(|(&k, &s)| k == 0 && s == Sign::Plus).count();
    let expected_fraction = 2.0 * law.atom_mass();
    let zero_fraction = zero as f64 / paths;
    let plus_fraction = if zero > 0 { zero_plus as f64 / zero as f64 } else { 0.5 };
    criteria.push(Criterion::within(
        "zero_switch_fraction",
        zero_fraction,
        expected_fraction,
        sigma * (expected_fraction * (1.0 - expected_fraction) / paths).sqrt(),
    ));
    if zero > 0 {
        criteria.push(Criterion::within(
            "atom_plus_share",
            plus_fraction,
            0.5,
            sigma * (0.25 / zero as f64).sqrt(),
        ));
    }

    let (p_same, _) = velocity_transition(&params, horizon)?;
    let same_fraction = batch.same_direction.iter().filter(|&&b| b).count() as f64 / paths;
    criteria.push(Criterion::within(
        "velocity_transition",
        same_fraction,
        p_same,
        sigma * (p_same * (1.0 - p_same) / paths).sqrt(),
    ));
    let s = 0.5 * horizon;
    let cov = velocity_covariance(&params, s, horizon)?;
    let c2 = params.c() * params.c();
    let mean_product = montecarlo::mean(&batch.velocity_products);
    criteria.push(Criterion::within(
        "velocity_covariance",
        mean_product,
        cov,
        sigma * ((c2 * c2 - cov * cov).max(0.0) / paths).sqrt(),
    ));

    let ks =
        ks_distance_on_grid(&batch.positions, &law, grid.ks_points).map_err(|e| context("ks distance", e))?;
    let wrong = LawDecomposition::new(ModelParams::new(config.negative_control_theta, params.c())?, horizon)?;
    let ks_wrong = ks_distance_on_grid(&batch.positions, &wrong, grid.ks_points)
        .map_err(|e| context("ks negative control", e))?;
    criteria.push(Criterion::at_most("ks_distance", ks, tol.ks));
    criteria.push(Criterion::above("ks_negative_control", ks_wrong, tol.ks_negative_control));

    // sampler cross-validation
    let (thin_first, thin_counts) = thinning_batch(&params, horizon, config.paths, config.seed)?;
    let first_event_two_sample = two_sample_sup_distance(&batch.first_events, &thin_first);
    let theta = params.theta();
    let first_event_vs_closed_form =
        sup_distance_to(&batch.first_events, |t| 1.0 - 1.0 / (theta * t).cosh(), horizon);
    let count_tv = count_tv_distance(&batch.counts, &thin_counts);
    criteria.push(Criterion::at_most("sampler_first_event_two_sample", first_event_two_sample, tol.sampler));
    criteria.push(Criterion::at_most(
        "sampler_first_event_closed_form",
        first_event_vs_closed_form,
        tol.sampler,
    ));
    criteria.push(Criterion::at_most("sampler_count_tv", count_tv, tol.sampler));

    // analytic checks
    let normalization =
        check_normalization(&params, horizon, tol.normalization).map_err(|e| context("normalization", e))?;
    criteria.push(analytic::normalization_criterion(&normalization, tol.normalization));

    let bessel = check_bessel_identities(&params, horizon, tol.bessel_identity)
        .map_err(|e| context("bessel identities", e))?;
    let probe_params = ModelParams::new(grid.identity_theta, grid.identity_c)?;
    let probe = check_bessel_identities(&probe_params, grid.identity_t, tol.bessel_identity)
        .map_err(|e| context("bessel identity probe", e))?;
    let single_match = matches!(probe.prefactor, PrefactorMatch::COverTheta | PrefactorMatch::ThetaOverC);
    criteria.push(Criterion::in_range(
        format!("bessel_prefactor_unique({:?})", probe.prefactor),
        if single_match { 1.0 } else { 0.0 },
        1.0,
        1.0,
    ));
    for (label, check) in [("bessel_dt_identity", &bessel), ("bessel_dt_identity_probe", &probe)] {
        criteria.push(Criterion::at_most(
            label,
            rel_error(check.dt_integral, check.dt_target),
            tol.bessel_identity,
        ));
    }
    criteria.push(Criterion::at_most(
        "bessel_i0_identity",
        rel_error(bessel.i0_integral, bessel.candidate_c_over_theta),
        tol.bessel_identity,
    ));

    let pde_grid = PdeGrid {
        t_min: grid.pde_t_min,
        t_max: grid.pde_t_max,
        nt: grid.pde_nt,
        nx: grid.pde_nx,
        x_fraction_max: grid.x_fraction_max,
    };
    let residual = pde_residual(&params, &pde_grid, grid.fd_step).map_err(|e| context("pde residual", e))?;
    let rich =
        richardson(&params, &pde_grid, grid.richardson_step).map_err(|e| context("richardson check", e))?;
    criteria.push(Criterion::at_most("pde_residual", residual.max_relative, tol.pde_residual));
    criteria.push(Criterion::in_range(
        "pde_richardson_ratio",
        rich.ratio,
        tol.richardson_min,
        tol.richardson_max,
    ));

    // estimator experiments
    let (estimator, rows) =
        run_estimator_experiments(&params, horizon, config.n, config.experiments, config.seed, config.level)
            .map_err(|e| context("estimator experiments", e))?;
    criteria.push(Criterion::at_most("estimator_bias", estimator.bias.abs(), tol.estimator_bias));
    criteria.push(Criterion::at_most(
        "estimator_variance",
        estimator.variance_rel_error,
        tol.estimator_variance,
    ));
    criteria.push(Criterion::within("estimator_q025", estimator.standardized_q025, -Z_975, tol.quantile));
    criteria.push(Criterion::within("estimator_q975", estimator.standardized_q975, Z_975, tol.quantile));
    criteria.push(Criterion::within("ci_coverage", estimator.coverage, config.level, tol.coverage));
    criteria.push(Criterion::in_range("mle_score_bracket", estimator.score_bracket_fraction, 1.0, 1.0));

    let mode = if config.experiments < 100 || config.paths < 1000 {
        ReportMode::Informational
    } else {
        ReportMode::Full
    };
    let passed = criteria.iter().all(|c| c.passed);
    Ok(ExperimentReport {
        config: config.clone(),
        mode,
        counts: CountMoments {
            paths: config.paths,
            mean: count_mean,
            variance: count_var,
            expected_mean,
            dispersion_ratio,
            increment_correlation,
        },
        atoms: AtomSummary {
            zero_switch_paths: zero,
            zero_switch_fraction: zero_fraction,
            expected_fraction,
            plus_fraction,
        },
        velocity: VelocitySummary {
            same_direction_fraction: same_fraction,
            expected_same_direction: p_same,
            s,
            t: horizon,
            mean_product,
            expected_covariance: cov,
        },
        ks: KsSummary {
            statistic: ks,
            negative_control_theta: config.negative_control_theta.abs(),
            negative_control_statistic: ks_wrong,
            grid_points: grid.ks_points,
        },
        sampler: SamplerSummary { first_event_two_sample, first_event_vs_closed_form, count_tv },
        normalization,
        bessel_identities: bessel,
        bessel_identities_probe: probe,
        pde: PdeSummary { residual, richardson: rich },
        estimator,
        criteria,
        passed,
        rows,
    })
}

fn rel_error(observed: f64, target: f64) -> f64 {
    if observed == target {
        0.0
    } else {
        (observed - target).abs() / target.abs()
    }
}

/// Pearson correlation; zero when either sample is constant.
fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (montecarlo::mean(a), montecarlo::mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}
