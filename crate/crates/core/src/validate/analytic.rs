//! Deterministic checks of the closed-form law: mass balance, the Bessel
//! integral identities, and the telegraph equation residual.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::intensity::ModelParams;
use crate::law::LawDecomposition;
use crate::quadrature::integrate;
use crate::specfun::{bessel_i0, bessel_i1};

use super::Criterion;

/// Quadrature tolerance used by the identity and normalisation checks.
const CHECK_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub theta: f64,
    pub c: f64,
    pub t: f64,
    pub integral: f64,
    pub target: f64,
    pub error: f64,
    pub passed: bool,
}

/// Integrates the density over `[-ct, ct]` directly in `x` and compares with
/// `1 - 1/cosh(theta t)`, the probability of at least one switch.
pub fn check_normalization(params: &ModelParams, t: f64, tol: f64) -> Result<NormalizationCheck> {
    let law = LawDecomposition::new(*params, t)?;
    let ct = law.reach();
    // split at 0 so both halves see the endpoint behaviour at one end only
    let left = integrate(|x| law.density(x), -ct, 0.0, CHECK_QUAD_TOL)?;
    let right = integrate(|x| law.density(x), 0.0, ct, CHECK_QUAD_TOL)?;
    let integral = left.value + right.value;
    let target = 1.0 - 1.0 / (params.theta() * t).cosh();
    let error = (integral - target).abs();
    Ok(NormalizationCheck {
        theta: params.theta(),
        c: params.c(),
        t,
        integral,
        target,
        error,
        passed: error <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorMatch {
    /// Only `(c/theta)(e^{theta t} - e^{-theta t})` matches.
    COverTheta,
    /// Only `(theta/c)(e^{theta t} - e^{-theta t})` matches.
    ThetaOverC,
    /// The candidates coincide (`theta = c`) and both match.
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselIdentityCheck {
    pub theta: f64,
    pub c: f64,
    pub t: f64,
    /// `int_{-ct}^{ct} I0(theta/c sqrt(c^2 t^2 - x^2)) dx` by quadrature.
    pub i0_integral: f64,
    pub candidate_theta_over_c: f64,
    pub candidate_c_over_theta: f64,
    pub prefactor: PrefactorMatch,
    /// `int_{-ct}^{ct} d/dt I0(...) dx` by quadrature.
    pub dt_integral: f64,
    /// `c (e^{theta t} + e^{-theta t}) - 2c`.
    pub dt_target: f64,
    pub dt_passed: bool,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let d = (a - b).abs();
    d == 0.0 || d <= tol * b.abs()
}

/// Evaluates both integrals by quadrature under `x = ct sin(phi)` and
/// records which of the two candidate prefactors of the first identity agrees.
pub fn check_bessel_identities(params: &ModelParams, t: f64, tol: f64) -> Result<BesselIdentityCheck> {
    check_positive("check_bessel_identities", "t", t)?;
    let theta = params.theta();
    let c = params.c();
    let a = theta * t;
    let ct = c * t;

    // dx = ct cos(phi) dphi and sqrt(c^2 t^2 - x^2) = ct cos(phi)
    let first = integrate(
        |phi| {
            let cos = phi.cos().max(0.0);
            bessel_i0(a * cos).unwrap_or(f64::NAN) * ct * cos
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        CHECK_QUAD_TOL,
    )?;
    // d/dt I0(theta/c s) = I1(theta/c s) theta c t / s, and the 1/s cancels dx
    let second = integrate(
        |phi| bessel_i1(a * phi.cos().max(0.0)).unwrap_or(f64::NAN) * theta * ct,
        -FRAC_PI_2,
        FRAC_PI_2,
        CHECK_QUAD_TOL,
    )?;
    for v in [first.value, second.value] {
        if !v.is_finite() {
            return Err(Error::Overflow { op: "check_bessel_identities", arg: a });
        }
    }

    let two_sinh = 2.0 * a.sinh();
    let candidate_theta_over_c = theta / c * two_sinh;
    // (c/theta)(e^{a} - e^{-a}) -> 2ct as theta -> 0
    let candidate_c_over_theta = if theta == 0.0 { 2.0 * ct } else { c / theta * two_sinh };
    let prefactor = match (
        rel_close(first.value, candidate_theta_over_c, tol),
        rel_close(first.value, candidate_c_over_theta, tol),
    ) {
        (true, true) => PrefactorMatch::Both,
        (true, false) => PrefactorMatch::ThetaOverC,
        (false, true) => PrefactorMatch::COverTheta,
        (false, false) => PrefactorMatch::Neither,
    };
    // c (e^a + e^{-a}) - 2c = 4c sinh^2(a/2)
    let half = (0.5 * a).sinh();
    let dt_target = 4.0 * c * half * half;
    Ok(BesselIdentityCheck {
        theta,
        c,
        t,
        i0_integral: first.value,
        candidate_theta_over_c,
        candidate_c_over_theta,
        prefactor,
        dt_integral: second.value,
        dt_target,
        dt_passed: rel_close(second.value, dt_target, tol),
    })
}

/// Interior evaluation grid for the PDE residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub nt: usize,
    pub nx: usize,
    pub x_fraction_max: f64,
}

impl Default for PdeGrid {
    fn default() -> Self {
        Self { t_min: 0.5, t_max: 2.0, nt: 16, nx: 19, x_fraction_max: 0.9 }
    }
}

impl PdeGrid {
    fn points(&self, c: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let lin = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..self.nt).flat_map(move |i| {
            let t = if self.nt <= 1 { self.t_min } else { lin(self.t_min, self.t_max, self.nt, i) };
            let w = self.x_fraction_max * c * t;
            (0..self.nx).map(move |j| (lin(-w, w, self.nx, j), t))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    /// `max |r| / max(|u_tt|, |2 lambda u_t|, |c^2 u_xx|, floor)` over the grid.
    pub max_relative: f64,
    /// `max |r|` over the grid.
    pub max_raw: f64,
    pub step: f64,
}

const RESIDUAL_FLOOR: f64 = 1e-12;

/// Residual of `u_tt + 2 lambda(t) u_t - c^2 u_xx` for an arbitrary `u(x, t)`
/// by second-order central differences (time step `h`, space step `c h`).
pub fn pde_residual_of<F: Fn(f64, f64) -> f64>(
    u: F,
    params: &ModelParams,
    grid: &PdeGrid,
    h: f64,
) -> Result<PdeResidual> {
    check_positive("pde_residual", "h", h)?;
    let c = params.c();
    let hx = c * h;
    let mut max_relative = 0.0_f64;
    let mut max_raw = 0.0_f64;
    for (x, t) in grid.points(c) {
        if !(t - h > 0.0 && x.abs() + hx < c * (t - h)) {
            return Err(Error::StencilOutsideCone { t, x, step: h });
        }
        let centre = u(x, t);
        let (up, down) = (u(x, t + h), u(x, t - h));
        let (right, left) = (u(x + hx, t), u(x - hx, t));
        let u_tt = (up - 2.0 * centre + down) / (h * h);
        let u_t = (up - down) / (2.0 * h);
        let u_xx = (right - 2.0 * centre + left) / (hx * hx);
        let damping = 2.0 * params.lambda_unchecked(t) * u_t;
        let diffusion = c * c * u_xx;
        let r = (u_tt + damping - diffusion).abs();
        let scale = u_tt.abs().max(damping.abs()).max(diffusion.abs()).max(RESIDUAL_FLOOR);
        max_raw = max_raw.max(r);
        max_relative = max_relative.max(r / scale);
    }
    Ok(PdeResidual { max_relative, max_raw, step: h })
}

/// Telegraph-equation residual of the closed-form density.
pub fn pde_residual(params: &ModelParams, grid: &PdeGrid, h: f64) -> Result<PdeResidual> {
    pde_residual_of(|x, t| law(params, t).density(x), params, grid, h)
}

fn law(params: &ModelParams, t: f64) -> LawDecomposition {
    LawDecomposition::new(*params, t).expect("grid times are positive")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCheck {
    pub coarse: PdeResidual,
    pub fine: PdeResidual,
    /// `coarse.max_raw / fine.max_raw`; about 4 for a second-order stencil.
    pub ratio: f64,
}

/// Residual at `h` and `h/2`. A residual that does not shrink when the step
/// is halved means roundoff dominates and is reported as an error.
pub fn richardson_of<F: Fn(f64, f64) -> f64>(
    u: F,
    params: &ModelParams,
    grid: &PdeGrid,
    h: f64,
) -> Result<RichardsonCheck> {
    let coarse = pde_residual_of(&u, params, grid, h)?;
    let fine = pde_residual_of(&u, params, grid, 0.5 * h)?;
    if fine.max_raw >= coarse.max_raw {
        return Err(Error::RoundoffDominated { step: 0.5 * h, coarse: coarse.max_raw, fine: fine.max_raw });
    }
    Ok(RichardsonCheck { coarse, fine, ratio: coarse.max_raw / fine.max_raw })
}

pub fn richardson(params: &ModelParams, grid: &PdeGrid, h: f64) -> Result<RichardsonCheck> {
    richardson_of(|x, t| law(params, t).density(x), params, grid, h)
}

pub(crate) fn normalization_criterion(check: &NormalizationCheck, tol: f64) -> Criterion {
    Criterion::within(
        format!("normalization(theta={}, c={}, t={})", check.theta, check.c, check.t),
        check.integral,
        check.target,
        tol,
    )
}
