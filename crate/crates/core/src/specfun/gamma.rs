//! Gamma-function helpers shared by the series evaluators.

/// `Gamma(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.trunc() {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    // sin(pi r) for r in [0, 2)
    if r <= 0.25 {
        (std::f64::consts::PI * r).sin()
    } else if r <= 0.75 {
        (std::f64::consts::PI * (0.5 - r)).cos()
    } else if r <= 1.25 {
        (std::f64::consts::PI * (1.0 - r)).sin()
    } else if r <= 1.75 {
        -(std::f64::consts::PI * (1.5 - r)).cos()
    } else {
        (std::f64::consts::PI * (r - 2.0)).sin()
    }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.trunc()
}

/// `1 / Gamma(x)`, zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    if x < -170.0 {
        let (ln, sign) = ln_abs_rgamma(x);
        return sign * ln.exp();
    }
    1.0 / gamma(x)
}

/// `(ln |1/Gamma(x)|, sign(1/Gamma(x)))`; at the poles returns `(-inf, 0)`.
pub fn ln_abs_rgamma(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (f64::NEG_INFINITY, 0.0);
    }
    if x >= 0.5 {
        return (-ln_gamma(x), 1.0);
    }
    // Gamma(x) = pi / (sin(pi x) Gamma(1 - x)), with Gamma(1 - x) > 0 here.
    let s = sin_pi(x);
    let ln = ln_gamma(1.0 - x) + s.abs().ln() - std::f64::consts::PI.ln();
    (ln, s.signum())
}

/// Neumaier-compensated running sum that also tracks the largest term.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
    pub(crate) max_abs_term: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
        self.max_abs_term = self.max_abs_term.max(term.abs());
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
