//! Bernstein functions of the stable and tempered-stable subordinators and
//! the Laplace-domain kernels built from them.
//!
//! The drift `drift_b` is carried by [`BernsteinSpec`] but is not part of
//! [`BernsteinSpec::g`]; it only enters path simulation as a linear term.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hiprec::{Big, Mp};
use crate::specfun::{gamma, rgamma, upper_incomplete_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Stable,
    Tempered,
}

/// Laplace exponent `g(theta) = theta^alpha` (stable) or
/// `(theta + mu)^alpha - mu^alpha` (tempered), plus a drift coefficient.
///
/// `alpha = 1` with the stable family is accepted as the classical case
/// `g(theta) = theta`, i.e. `E_g(t) = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernsteinSpec {
    pub family: Family,
    pub alpha: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub drift_b: f64,
}

impl BernsteinSpec {
    pub fn stable(alpha: f64) -> Self {
        Self {
            family: Family::Stable,
            alpha,
            mu: 0.0,
            drift_b: 0.0,
        }
    }

    pub fn tempered(alpha: f64, mu: f64) -> Self {
        Self {
            family: Family::Tempered,
            alpha,
            mu,
            drift_b: 0.0,
        }
    }

    /// The classical hook `g(theta) = theta`.
    pub fn classical() -> Self {
        Self::stable(1.0)
    }

    pub fn with_drift(mut self, drift_b: f64) -> Self {
        self.drift_b = drift_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let alpha_ok = match self.family {
            Family::Stable => self.alpha > 0.0 && self.alpha <= 1.0,
            Family::Tempered => self.alpha > 0.0 && self.alpha < 1.0,
        };
        if !alpha_ok {
            return domain(format!("alpha out of range: {}", self.alpha));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return domain(format!("mu must be finite and >= 0, got {}", self.mu));
        }
        if self.family == Family::Stable && self.mu != 0.0 {
            return domain("the stable family takes no mu");
        }
        if !(self.drift_b >= 0.0) || !self.drift_b.is_finite() {
            return domain(format!(
                "drift_b must be finite and >= 0, got {}",
                self.drift_b
            ));
        }
        Ok(())
    }

    /// Tempering parameter, zero for the stable family.
    pub fn tempering(&self) -> f64 {
        match self.family {
            Family::Stable => 0.0,
            Family::Tempered => self.mu,
        }
    }

    /// True when the exponent is `theta^alpha` (stable, or tempered with `mu = 0`).
    pub fn is_stable_like(&self) -> bool {
        self.tempering() == 0.0
    }

    pub fn is_classical(&self) -> bool {
        self.is_stable_like() && self.alpha == 1.0
    }

    /// `g(theta)`; drift excluded.
    pub fn g(&self, theta: f64) -> f64 {
        let mu = self.tempering();
        if mu == 0.0 {
            if self.alpha == 1.0 {
                return theta;
            }
            return theta.powf(self.alpha);
        }
        // mu^alpha ((1 + theta/mu)^alpha - 1) avoids cancellation for small theta
        mu.powf(self.alpha) * (self.alpha * (theta / mu).ln_1p()).exp_m1()
    }

    /// `g(theta)` in multiprecision.
    pub fn g_mp(&self, theta: &Big, mp: &mut Mp) -> Big {
        let mu = self.tempering();
        if mu == 0.0 {
            if self.alpha == 1.0 {
                return theta.clone();
            }
            return mp.powf(theta, self.alpha);
        }
        let m = mp.num(mu);
        let shifted = mp.add(theta, &m);
        let a = mp.powf(&shifted, self.alpha);
        let b = mp.powf(&m, self.alpha);
        mp.sub(&a, &b)
    }

    /// Tail of the Levy measure `w(s) = nu((s, inf))`.
    pub fn tail_levy(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return domain(format!("tail Levy measure needs s > 0, got {s}"));
        }
        let a = self.alpha;
        let mu = self.tempering();
        if mu == 0.0 {
            return Ok(s.powf(-a) * rgamma(1.0 - a));
        }
        let ig = upper_incomplete_gamma(-a, mu * s)?;
        Ok(a * mu.powf(a) * ig / gamma(1.0 - a))
    }
}

/// `g(theta)` for the given spec.
pub fn g_eval(spec: &BernsteinSpec, theta: f64) -> f64 {
    spec.g(theta)
}

/// Tail Levy measure `w(s)`.
pub fn tail_levy(spec: &BernsteinSpec, s: f64) -> Result<f64> {
    spec.tail_levy(s)
}

/// Resolvent kernel `(g(theta)/theta) / (g(theta) + k^2/2)`.
pub fn dk_laplace(spec: &BernsteinSpec, k: u32, theta: f64) -> f64 {
    dk_laplace_ksq(spec, (k as f64) * (k as f64), theta)
}

/// [`dk_laplace`] with a real effective `k^2 >= 0`.
pub fn dk_laplace_ksq(spec: &BernsteinSpec, k_sq: f64, theta: f64) -> f64 {
    if k_sq == 0.0 {
        return 1.0 / theta;
    }
    let g = spec.g(theta);
    (g / theta) / (g + 0.5 * k_sq)
}

/// [`dk_laplace_ksq`] in multiprecision.
pub fn dk_laplace_mp(spec: &BernsteinSpec, k_sq: f64, theta: &Big, mp: &mut Mp) -> Big {
    let one = mp.int(1);
    if k_sq == 0.0 {
        return mp.div(&one, theta);
    }
    let g = spec.g_mp(theta, mp);
    let den = mp.mul(theta, &mp.add(&g, &mp.num(0.5 * k_sq)));
    mp.div(&g, &den)
}

/// `int_0^inf e^{-theta t} E[e^{-eta E_g(t)}] dt = g(theta) / (theta (eta + g(theta)))`.
pub fn exp_functional_laplace(spec: &BernsteinSpec, eta: f64, theta: f64) -> f64 {
    if eta == 0.0 {
        return 1.0 / theta;
    }
    let g = spec.g(theta);
    g / (theta * (eta + g))
}
