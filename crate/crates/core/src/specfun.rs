//! Special functions: modified Bessel functions of the first kind of orders
//! 0 and 1, and the `ln cosh` / `arccosh(exp)` pair that links the
//! cumulative intensity to the estimator.
//!
//! The Bessel functions use the ascending power series up to
//! [`BESSEL_SERIES_CUTOFF`] and the Hankel asymptotic expansion beyond it.
//! Both routes are also available exponentially scaled (`*_scaled`), which
//! never overflow and are what the law module uses internally.

use crate::error::{check_nonnegative, Error, Result};

/// Crossover between the power series and the asymptotic expansion.
pub const BESSEL_SERIES_CUTOFF: f64 = 15.0;

/// Above this `|y|`, `log_cosh` switches to `|y| - ln 2 + ln(1 + e^{-2|y|})`.
pub const LOG_COSH_SWITCH: f64 = 8.0;

const SERIES_REL_EPS: f64 = 1e-17;

/// Sum of `(z/2)^{2k} / (k! (k + nu)!)` for `nu` in {0, 1}.
fn reduced_series(z: f64, nu: u32) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0_f64;
    let mut sum = term;
    let nu = nu as f64;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + nu));
        sum += term;
        if term < SERIES_REL_EPS * sum {
            return sum;
        }
        k += 1.0;
    }
}

/// `e^{-z} I_nu(z) sqrt(2 pi z)` from the Hankel expansion, valid for large z.
fn hankel_sum(z: f64, nu: u32) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = 1.0_f64;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (k * 8.0 * z);
        if next.abs() >= term.abs() {
            // asymptotic series started to diverge
            return sum;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * 0.25 * sum.abs() {
            return sum;
        }
        k += 1.0;
    }
}

fn check_arg(op: &'static str, z: f64) -> Result<()> {
    if z.is_nan() {
        return Err(Error::Domain { op, name: "z", value: z });
    }
    if z == f64::INFINITY {
        return Err(Error::Overflow { op, arg: z });
    }
    check_nonnegative(op, "z", z)
}

/// `e^{-z} I0(z)` for `z >= 0`.
pub fn bessel_i0_scaled(z: f64) -> Result<f64> {
    check_arg("bessel_i0_scaled", z)?;
    Ok(i0_scaled_unchecked(z))
}

/// `e^{-z} I1(z)` for `z >= 0`.
pub fn bessel_i1_scaled(z: f64) -> Result<f64> {
    check_arg("bessel_i1_scaled", z)?;
    Ok(i1_scaled_unchecked(z))
}

pub(crate) fn i0_scaled_unchecked(z: f64) -> f64 {
    if z <= BESSEL_SERIES_CUTOFF {
        reduced_series(z, 0) * (-z).exp()
    } else {
        hankel_sum(z, 0) / (2.0 * std::f64::consts::PI * z).sqrt()
    }
}

pub(crate) fn i1_scaled_unchecked(z: f64) -> f64 {
    if z <= BESSEL_SERIES_CUTOFF {
        0.5 * z * reduced_series(z, 1) * (-z).exp()
    } else {
        hankel_sum(z, 1) / (2.0 * std::f64::consts::PI * z).sqrt()
    }
}

fn unscale(op: &'static str, z: f64, scaled: f64) -> Result<f64> {
    // e^z overflows first; split it so the product itself is what decides
    let half = (0.5 * z).exp();
    let value = scaled * half * half;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { op, arg: z })
    }
}

/// Modified Bessel function of the first kind, order 0.
///
/// Returns [`Error::Overflow`] once the result exceeds `f64::MAX`
/// (around `z = 713.98`).
pub fn bessel_i0(z: f64) -> Result<f64> {
    check_arg("bessel_i0", z)?;
    if z <= BESSEL_SERIES_CUTOFF {
        Ok(reduced_series(z, 0))
    } else {
        unscale("bessel_i0", z, i0_scaled_unchecked(z))
    }
}

/// Modified Bessel function of the first kind, order 1.
pub fn bessel_i1(z: f64) -> Result<f64> {
    check_arg("bessel_i1", z)?;
    if z <= BESSEL_SERIES_CUTOFF {
        Ok(0.5 * z * reduced_series(z, 1))
    } else {
        unscale("bessel_i1", z, i1_scaled_unchecked(z))
    }
}

/// `I1(z) / z`, continuously extended by `1/2` at the origin.
pub fn bessel_i1_over_z(z: f64) -> Result<f64> {
    check_arg("bessel_i1_over_z", z)?;
    if z <= BESSEL_SERIES_CUTOFF {
        Ok(0.5 * reduced_series(z, 1))
    } else {
        unscale("bessel_i1_over_z", z, i1_scaled_unchecked(z) / z)
    }
}

pub(crate) fn i1_over_z_unchecked(z: f64) -> f64 {
    0.5 * reduced_series(z, 1)
}

/// `ln(cosh(y))` for any finite `y`, without overflow.
pub fn log_cosh(y: f64) -> f64 {
    let y = y.abs();
    if y > LOG_COSH_SWITCH {
        y - std::f64::consts::LN_2 + (-2.0 * y).exp().ln_1p()
    } else {
        // cosh(y) - 1 = 2 sinh^2(y/2) keeps the small-y regime exact
        let s = (0.5 * y).sinh();
        (2.0 * s * s).ln_1p()
    }
}

/// `arccosh(e^u)` for `u >= 0`.
///
/// Written as `u + ln(1 + sqrt(1 - e^{-2u}))`, which neither overflows for
/// large `u` nor cancels for small `u` (where the result is close to
/// `sqrt(2u)`).
pub fn acosh_exp(u: f64) -> Result<f64> {
    check_nonnegative("acosh_exp", "u", u)?;
    Ok(acosh_exp_unchecked(u))
}

pub(crate) fn acosh_exp_unchecked(u: f64) -> f64 {
    u + (-(-2.0 * u).exp_m1()).sqrt().ln_1p()
}
