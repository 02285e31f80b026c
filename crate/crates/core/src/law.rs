//! Closed-form law of the position `X(t)` and velocity `V(t)` under the
//! intensity `theta tanh(theta t)`.
//!
//! The law of `X(t)` splits into two atoms of mass `1 / (2 cosh(theta t))`
//! at `x = -ct` and `x = +ct` (no switch yet) and an absolutely continuous
//! part on `(-ct, ct)`:
//!
//! ```text
//! p(x, t) = theta t / cosh(theta t) * I1(theta/c * sqrt(c^2 t^2 - x^2)) / (2 sqrt(c^2 t^2 - x^2))
//! ```
//!
//! Integrals over the cone use `x = ct sin(phi)`, which turns the density
//! into the smooth integrand `theta t / 2 * I1(theta t cos(phi)) / cosh(theta t)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::intensity::ModelParams;
use crate::quadrature::integrate;
use crate::specfun::{i1_over_z_unchecked, i1_scaled_unchecked, BESSEL_SERIES_CUTOFF};

/// Absolute tolerance of the CDF quadrature.
pub const CDF_TOL: f64 = 1e-10;

/// `1 / cosh(a)` without overflow.
fn sech(a: f64) -> f64 {
    let e = (-a.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// `I1(z) / cosh(a)` for `0 <= z <= a`.
fn i1_sech(z: f64, a: f64) -> f64 {
    if z <= BESSEL_SERIES_CUTOFF {
        z * i1_over_z_unchecked(z) * sech(a)
    } else {
        2.0 * i1_scaled_unchecked(z) * (z - a).exp() / (1.0 + (-2.0 * a).exp())
    }
}

/// `I1(z) / (z cosh(a))` for `0 <= z <= a`.
fn i1_over_z_sech(z: f64, a: f64) -> f64 {
    if z <= BESSEL_SERIES_CUTOFF {
        i1_over_z_unchecked(z) * sech(a)
    } else {
        i1_sech(z, a) / z
    }
}

/// The law of `X(t)` at one fixed time: atoms at `-ct`, `+ct` and a density
/// on the open cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawDecomposition {
    params: ModelParams,
    t: f64,
}

impl LawDecomposition {
    pub fn new(params: ModelParams, t: f64) -> Result<Self> {
        check_positive("law", "t", t)?;
        Ok(Self { params, t })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Half-width `ct` of the light cone.
    pub fn reach(&self) -> f64 {
        self.params.c() * self.t
    }

    /// Mass of each atom, `1 / (2 cosh(theta t))`.
    pub fn atom_mass(&self) -> f64 {
        0.5 * sech(self.params.theta() * self.t)
    }

    pub fn atom_minus(&self) -> f64 {
        self.atom_mass()
    }

    pub fn atom_plus(&self) -> f64 {
        self.atom_mass()
    }

    /// Total mass of the absolutely continuous part, `1 - 1/cosh(theta t)`.
    pub fn continuous_mass(&self) -> f64 {
        let a = self.params.theta() * self.t;
        if a < 1.0 {
            // 1 - sech(a) = 2 sinh^2(a/2) / cosh(a)
            let s = (0.5 * a).sinh();
            2.0 * s * s * sech(a)
        } else {
            1.0 - sech(a)
        }
    }

    /// Density of the absolutely continuous part. Zero outside `(-ct, ct)`;
    /// at `|x| = ct` it takes its continuous limit
    /// `theta^2 t / (4 c cosh(theta t))`.
    pub fn density(&self, x: f64) -> f64 {
        let theta = self.params.theta();
        let c = self.params.c();
        let ct = self.reach();
        if x.is_nan() || x.abs() > ct {
            return 0.0;
        }
        let s2 = (ct - x.abs()) * (ct + x.abs());
        let z = theta / c * s2.sqrt();
        theta * theta * self.t / (2.0 * c) * i1_over_z_sech(z, theta * self.t)
    }

    /// Density mass per unit angle after `x = ct sin(phi)`.
    pub fn angular_density(&self, phi: f64) -> f64 {
        let a = self.params.theta() * self.t;
        let z = a * phi.cos().max(0.0);
        0.5 * a * i1_sech(z, a)
    }

    fn phi_of(&self, x: f64) -> f64 {
        (x / self.reach()).clamp(-1.0, 1.0).asin()
    }

    /// `int_{-ct}^{x} p(u, t) du` for `x` in the cone.
    pub fn continuous_cdf(&self, x: f64) -> Result<f64> {
        let ct = self.reach();
        if x <= -ct {
            return Ok(0.0);
        }
        if x >= ct {
            return Ok(self.continuous_mass());
        }
        let r = integrate(|phi| self.angular_density(phi), -FRAC_PI_2, self.phi_of(x), CDF_TOL)?;
        Ok(r.value)
    }

    /// Right-continuous distribution function `P(X(t) <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let ct = self.reach();
        if x.is_nan() {
            return Err(Error::Domain { op: "cdf", name: "x", value: x });
        }
        if x < -ct {
            Ok(0.0)
        } else if x >= ct {
            Ok(1.0)
        } else {
            Ok((self.atom_mass() + self.continuous_cdf(x)?).min(1.0))
        }
    }

    /// Left limit `P(X(t) < x)`.
    pub fn cdf_left(&self, x: f64) -> Result<f64> {
        let ct = self.reach();
        if x.is_nan() {
            return Err(Error::Domain { op: "cdf_left", name: "x", value: x });
        }
        if x <= -ct {
            Ok(0.0)
        } else if x > ct {
            Ok(1.0)
        } else {
            Ok((self.atom_mass() + self.continuous_cdf(x)?).min(1.0))
        }
    }
}

/// Density of the absolutely continuous part of `X(t)` at `x`.
pub fn density(params: &ModelParams, t: f64, x: f64) -> Result<f64> {
    Ok(LawDecomposition::new(*params, t)?.density(x))
}

/// Mass of each of the two atoms at `x = -ct` and `x = +ct`.
pub fn atom_mass(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(LawDecomposition::new(*params, t)?.atom_mass())
}

/// `P(X(t) <= x)`.
pub fn cdf(params: &ModelParams, t: f64, x: f64) -> Result<f64> {
    LawDecomposition::new(*params, t)?.cdf(x)
}

/// `(P(V(t) = V(0)), P(V(t) = -V(0)))`.
pub fn velocity_transition(params: &ModelParams, t: f64) -> Result<(f64, f64)> {
    check_nonnegative("velocity_transition", "t", t)?;
    let decay = (-2.0 * params.big_lambda_unchecked(t)).exp();
    let flip = 0.5 * (1.0 - decay);
    Ok((1.0 - flip, flip))
}

/// `E[V(s) V(t)] = c^2 exp(-2 |Lambda(t) - Lambda(s)|)`.
pub fn velocity_covariance(params: &ModelParams, s: f64, t: f64) -> Result<f64> {
    check_nonnegative("velocity_covariance", "s", s)?;
    check_nonnegative("velocity_covariance", "t", t)?;
    let gap = (params.big_lambda_unchecked(t) - params.big_lambda_unchecked(s)).abs();
    let c = params.c();
    Ok(c * c * (-2.0 * gap).exp())
}

/// Joint characteristic function `E exp(i alpha V(s) + i beta V(t))` for
/// `s <= t`.
pub fn velocity_char_function(
    params: &ModelParams,
    s: f64,
    t: f64,
    alpha: f64,
    beta: f64,
) -> Result<Complex64> {
    check_nonnegative("velocity_char_function", "s", s)?;
    check_nonnegative("velocity_char_function", "t", t)?;
    if s > t {
        return Err(Error::Domain { op: "velocity_char_function", name: "s - t", value: s - t });
    }
    let c = params.c();
    let decay = (-2.0 * (params.big_lambda_unchecked(t) - params.big_lambda_unchecked(s))).exp();
    let re = (alpha * c).cos() * (beta * c).cos() - decay * (alpha * c).sin() * (beta * c).sin();
    Ok(Complex64::new(re, 0.0))
}
