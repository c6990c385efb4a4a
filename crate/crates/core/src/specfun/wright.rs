//! Wright function `W_{beta,gamma}(x) = sum_k x^k / (k! Gamma(beta k + gamma))`
//! for `-1 < beta <= 0`, and the M-Wright density `M_nu(y) = W_{-nu,1-nu}(-y)`.

use super::gamma::{ln_abs_rgamma, ln_gamma, CompensatedSum};
use crate::error::{domain, Error, Result};
use crate::quad::{self, Tolerance};

/// Largest tolerated ratio between the biggest series term and the result.
pub const CANCELLATION_BUDGET: f64 = 1e8;

const MAX_TERMS: usize = 10_000;

/// Series value together with its cancellation ratio `max|term| / |sum|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightEval {
    pub value: f64,
    pub cancellation: f64,
    pub terms: usize,
}

fn check(beta: f64, gamma: f64, x: f64) -> Result<()> {
    if !(beta > -1.0 && beta <= 0.0) {
        return domain(format!("Wright beta must lie in (-1, 0], got {beta}"));
    }
    if !gamma.is_finite() || !x.is_finite() {
        return domain("Wright arguments must be finite");
    }
    Ok(())
}

/// Compensated series summation with its diagnostics; never errors on
/// cancellation.
pub fn wright_series(beta: f64, gamma: f64, x: f64) -> Result<WrightEval> {
    check(beta, gamma, x)?;
    if x == 0.0 {
        let (ln, sign) = ln_abs_rgamma(gamma);
        return Ok(WrightEval {
            value: sign * ln.exp(),
            cancellation: 1.0,
            terms: 1,
        });
    }
    let ln_x = x.abs().ln();
    let mut acc = CompensatedSum::default();
    let mut quiet = 0;
    // Terms decay once k! dominates x^k / Gamma(beta k + gamma).
    let peak = x.abs().powf(1.0 / (1.0 + beta));
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let (ln_rg, sign) = ln_abs_rgamma(beta * kf + gamma);
        let term = if sign == 0.0 {
            0.0
        } else {
            let ln_term = kf * ln_x - ln_gamma(kf + 1.0) + ln_rg;
            if ln_term > 709.0 {
                return Err(Error::Overflow);
            }
            let t = sign * ln_term.exp();
            if x < 0.0 && k % 2 == 1 {
                -t
            } else {
                t
            }
        };
        acc.add(term);
        if term.abs() <= 1e-17 * acc.value().abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 3 && kf > peak + 2.0 {
            let value = acc.value();
            let cancellation = if value == 0.0 {
                f64::INFINITY
            } else {
                acc.max_abs_term / value.abs()
            };
            return Ok(WrightEval {
                value,
                cancellation,
                terms: k + 1,
            });
        }
    }
    Err(Error::Convergence {
        terms: MAX_TERMS,
        bound: acc.max_abs_term,
    })
}

/// `W_{beta,gamma}(x)`, rejecting results whose cancellation ratio exceeds
/// [`CANCELLATION_BUDGET`].
pub fn wright(beta: f64, gamma: f64, x: f64) -> Result<f64> {
    let eval = wright_series(beta, gamma, x)?;
    if eval.cancellation > CANCELLATION_BUDGET {
        return Err(Error::AccuracyLoss {
            ratio: eval.cancellation,
        });
    }
    Ok(eval.value)
}

/// Largest `|x|` such that the series for `W_{beta,gamma}(-|x|)` stays within
/// the cancellation budget, located by bisection on the diagnostic ratio.
pub fn wright_safe_limit(beta: f64, gamma: f64) -> Result<f64> {
    check(beta, gamma, 0.0)?;
    let ok = |y: f64| {
        wright_series(beta, gamma, -y)
            .map(|e| e.cancellation <= CANCELLATION_BUDGET)
            .unwrap_or(false)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Ok(hi);
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// M-Wright function `M_nu(y)` for `0 <= nu < 1`, `y >= 0`.
///
/// The series is used while its cancellation ratio stays below `1e4`;
/// beyond that the integral representation
/// `M_nu(y) = y^{nu/(1-nu)} / (pi (1-nu)) int_0^pi K(phi) exp(-y^{1/(1-nu)} K(phi)) dphi`
/// with `K(phi) = (sin(nu phi)/sin(phi))^{1/(1-nu)} sin((1-nu) phi) / sin(nu phi)`
/// takes over.
pub fn m_wright(nu: f64, y: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&nu) {
        return domain(format!("M-Wright order must lie in [0, 1), got {nu}"));
    }
    if !(y >= 0.0) || !y.is_finite() {
        return domain(format!(
            "M-Wright argument must be finite and >= 0, got {y}"
        ));
    }
    if nu == 0.0 {
        return Ok((-y).exp());
    }
    if let Ok(e) = wright_series(-nu, 1.0 - nu, -y) {
        if e.cancellation <= 1e4 {
            return Ok(e.value);
        }
    }
    m_wright_integral(nu, y)
}

pub(crate) fn m_wright_integral(nu: f64, y: f64) -> Result<f64> {
    let p = 1.0 / (1.0 - nu);
    let scale = y.powf(p);
    let kernel = |phi: f64| -> f64 {
        let a = (nu * phi).sin();
        let b = phi.sin();
        let c = ((1.0 - nu) * phi).sin();
        if b <= 0.0 {
            return 0.0;
        }
        let k = (a / b).powf(p) * c / a;
        k * (-scale * k).exp()
    };
    let r = quad::integrate(
        kernel,
        &[0.0, 0.5 * std::f64::consts::PI, std::f64::consts::PI],
        Tolerance::new(1e-300, 1e-13),
    )?;
    Ok(y.powf(nu * p) * r.value * p / std::f64::consts::PI)
}
