//! Upper incomplete gamma (any non-pole order) and the non-regularized
//! incomplete beta function.

use statrs::function::{beta as sb, gamma as sg};

use super::gamma::is_nonpositive_integer;
use crate::error::{domain, Error, Result};

const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 5000;

/// `Gamma(rho, x) = int_x^inf e^{-w} w^{rho-1} dw` for `x > 0`.
///
/// Negative non-integer orders are reached by the recurrence
/// `Gamma(rho, x) = (Gamma(rho + 1, x) - x^rho e^{-x}) / rho` for small `x`
/// and by the Legendre continued fraction otherwise.
pub fn upper_incomplete_gamma(rho: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("upper incomplete gamma needs x > 0, got {x}"));
    }
    if !rho.is_finite() {
        return domain("upper incomplete gamma order must be finite");
    }
    if is_nonpositive_integer(rho) {
        return Err(Error::Pole(rho));
    }
    if rho > 0.0 {
        return Ok(sg::gamma_ui(rho, x));
    }
    if x >= 1.5 {
        return continued_fraction(rho, x);
    }
    let shift = (-rho).floor() as i32 + 1;
    let mut a = rho + shift as f64;
    let mut value = sg::gamma_ui(a, x);
    let ln_x = x.ln();
    for _ in 0..shift {
        a -= 1.0;
        value = (value - (a * ln_x - x).exp()) / a;
    }
    Ok(value)
}

/// Modified Lentz evaluation of `Gamma(a, x) = e^{-x} x^a / (x + 1 - a - ...)`.
fn continued_fraction(a: f64, x: f64) -> Result<f64> {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok((a * x.ln() - x).exp() * h);
        }
    }
    Err(Error::Convergence {
        terms: CF_MAX_ITER,
        bound: h,
    })
}

/// `B(a, b; x) = int_0^x z^{a-1} (1 - z)^{b-1} dz`, not regularized.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("incomplete beta needs a, b > 0, got a={a}, b={b}"));
    }
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("incomplete beta needs x in [0, 1], got {x}"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(sb::beta_reg(a, b, x) * sb::ln_beta(a, b).exp())
}
