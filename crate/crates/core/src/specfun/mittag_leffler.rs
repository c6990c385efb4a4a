//! One- and two-parameter Mittag-Leffler functions on the real line.
//!
//! Small arguments use the power series. For negative arguments with
//! `|x|^{1/alpha}` beyond [`SERIES_LIMIT`] the series cancels catastrophically,
//! so the function is evaluated from the Hankel-contour representation
//! collapsed onto the branch cut of `s^alpha`:
//!
//! ```text
//! E_{a,b}(-y) = 1/(a pi) * int_0^inf exp(-w) w^{1-b}
//!               (v sin(pi b) - sin(pi (a - b))) / (v^2 + 2 v cos(pi a) + 1) dv,
//! w = (y v)^{1/a},
//! ```
//!
//! valid for `0 < a < 1`, `b <= 1`. Larger `b` is brought down with
//! `E_{a,b}(x) = (E_{a,b-a}(x) - 1/Gamma(b-a)) / x`.

use super::gamma::{ln_abs_rgamma, rgamma, sin_pi, CompensatedSum};
use crate::error::{domain, Error, Result};
use crate::quad::{self, Tolerance};

/// Series is used for negative arguments while `|x|^{1/alpha}` stays below
/// this value (largest term about `e^4`).
pub const SERIES_LIMIT: f64 = 4.0;

const MAX_TERMS: usize = 20_000;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!(
            "Mittag-Leffler alpha must lie in (0, 1], got {alpha}"
        ));
    }
    Ok(())
}

/// `E_alpha(x) = sum_j x^j / Gamma(alpha j + 1)`.
pub fn mittag_leffler(alpha: f64, x: f64) -> Result<f64> {
    mittag_leffler2(alpha, 1.0, x)
}

/// `E_{alpha,beta}(x) = sum_j x^j / Gamma(alpha j + beta)`, with the
/// convention `1/Gamma(-n) = 0`.
pub fn mittag_leffler2(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !beta.is_finite() || !x.is_finite() {
        return domain("Mittag-Leffler arguments must be finite");
    }
    if x == 0.0 {
        return Ok(rgamma(beta));
    }
    if alpha == 1.0 {
        if beta == 1.0 {
            return Ok(x.exp());
        }
        if beta == 0.0 {
            return Ok(x * x.exp());
        }
        if beta == 2.0 {
            return Ok(x.exp_m1() / x);
        }
    }
    if x > 0.0 || (-x).powf(1.0 / alpha) <= SERIES_LIMIT {
        return series(alpha, beta, x);
    }
    if alpha == 1.0 {
        // Only reached for unusual beta; the series is the only route.
        return series(alpha, beta, x);
    }
    if beta > 1.0 {
        let lower = mittag_leffler2(alpha, beta - alpha, x)?;
        return Ok((lower - rgamma(beta - alpha)) / x);
    }
    branch_cut_integral(alpha, beta, -x)
}

fn series(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let ln_x = x.abs().ln();
    let negative = x < 0.0;
    let mut acc = CompensatedSum::default();
    let mut small_run = 0;
    for j in 0..MAX_TERMS {
        let arg = alpha * j as f64 + beta;
        let (ln_rg, sign_rg) = ln_abs_rgamma(arg);
        if sign_rg != 0.0 {
            let ln_term = j as f64 * ln_x + ln_rg;
            if ln_term > 709.0 {
                return Err(Error::Overflow);
            }
            // Direct products are more accurate than exp(ln) while they fit.
            let direct = x.powi(j as i32) * rgamma(arg);
            let term = if arg < 170.0 && direct.is_finite() && direct != 0.0 {
                direct
            } else if negative && j % 2 == 1 {
                -sign_rg * ln_term.exp()
            } else {
                sign_rg * ln_term.exp()
            };
            acc.add(term);
            if term.abs() <= 1e-17 * acc.value().abs() {
                small_run += 1;
            } else {
                small_run = 0;
            }
        }
        // Terms are eventually monotone in j; require a few negligible ones.
        if small_run >= 3 && (j as f64) * alpha > 1.0 + (x.abs()).powf(1.0 / alpha) {
            let value = acc.value();
            if acc.max_abs_term > 1e6 * value.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::AccuracyLoss {
                    ratio: acc.max_abs_term / value.abs(),
                });
            }
            return Ok(value);
        }
    }
    Err(Error::Convergence {
        terms: MAX_TERMS,
        bound: acc.max_abs_term,
    })
}

fn branch_cut_integral(alpha: f64, beta: f64, y: f64) -> Result<f64> {
    let sin_b = sin_pi(beta);
    let sin_ab = sin_pi(alpha - beta);
    // 1 + cos(pi a) = 2 sin^2(pi (1 - a) / 2), kept accurate near a = 1
    let half_gap = (std::f64::consts::FRAC_PI_2 * (1.0 - alpha)).sin();
    let gap = 4.0 * half_gap * half_gap;
    let inv_alpha = 1.0 / alpha;
    let integrand = |v: f64| -> f64 {
        let w = (y * v).powf(inv_alpha);
        let den = (v - 1.0) * (v - 1.0) + v * gap;
        let num = v * sin_b - sin_ab;
        let weight = if beta == 1.0 {
            (-w).exp()
        } else {
            (-w + (1.0 - beta) * w.ln()).exp()
        };
        weight * num / den
    };
    // Beyond w = 745 the integrand underflows.
    let upper = 745f64.powf(alpha) / y;
    let width = (std::f64::consts::PI * (1.0 - alpha)).sin().max(1e-6);
    let mut points = vec![0.0, upper];
    for p in [1.0 / y, 1.0 - width, 1.0, 1.0 + width] {
        if p > 0.0 && p < upper {
            points.push(p);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let r = quad::integrate(integrand, &points, Tolerance::new(0.0, 1e-13))?;
    Ok(r.value / (alpha * std::f64::consts::PI))
}
