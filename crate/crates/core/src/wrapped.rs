//! Angles, wrapped-normal densities, the wrapped density of the time-changed
//! circular Brownian motion and its empirical counterparts.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bernstein::BernsteinSpec;
use crate::error::{domain, Error, Result};
use crate::kernels::KernelTable;
use crate::mc::ComplexEstimate;
use crate::solver::fundamental_density_stable;
use crate::subsim::{sample_timechanged_bm, RngStream};

/// Fourier terms are dropped once `d_k(t)` falls below this.
pub const FOURIER_TOL: f64 = 1e-12;
/// Most Fourier terms a density evaluation will use.
pub const MAX_FOURIER_TERMS: u32 = 512;

/// A point of the circle, stored in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn new(x: f64) -> Self {
        wrap(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Representative in `[-pi, pi)`.
    pub fn centered(self) -> f64 {
        if self.0 >= PI {
            self.0 - TAU
        } else {
            self.0
        }
    }
}

/// `x mod 2 pi` in `[0, 2 pi)`.
pub fn wrap(x: f64) -> Angle {
    let r = x.rem_euclid(TAU);
    Angle(if r >= TAU { 0.0 } else { r })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrappedNormalParams {
    pub mean: f64,
    pub variance: f64,
}

impl WrappedNormalParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
            return domain(format!("wrapped normal needs variance > 0, got {variance}"));
        }
        Ok(Self { mean, variance })
    }
}

/// A truncated series value with a bound on the discarded part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    pub bound: f64,
}

/// `sum_{|k| <= k_terms} N(phi - mean + 2 k pi; 0, variance)`.
pub fn wrapped_normal_pdf(
    params: &WrappedNormalParams,
    phi: Angle,
    k_terms: u32,
) -> Result<Truncated> {
    if k_terms < 1 {
        return domain("wrapped normal needs k_terms >= 1");
    }
    WrappedNormalParams::new(params.mean, params.variance)?;
    let sigma = params.variance.sqrt();
    let norm = 1.0 / ((TAU).sqrt() * sigma);
    let d = wrap(phi.value() - params.mean).centered();
    let gauss = |x: f64| (-0.5 * x * x / params.variance).exp();
    let mut s = gauss(d);
    for k in 1..=k_terms {
        let shift = TAU * k as f64;
        s += gauss(d + shift) + gauss(d - shift);
    }
    // |d + 2 k pi| >= (2|k| - 1) pi for |d| <= pi; sum plus integral tail
    let edge = (2 * k_terms + 1) as f64 * PI;
    let tail =
        gauss(edge) + sigma * (PI / 2.0).sqrt() * libm::erfc(edge / (sigma * 2f64.sqrt())) / TAU;
    Ok(Truncated {
        value: norm * s,
        bound: 2.0 * norm * tail,
    })
}

/// Fourier series `(1/2pi)(1 + 2 sum_{k=1}^K c_k cos(k phi))` of a
/// symmetric circular law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierDensity {
    /// `c_1..c_K`.
    pub coefficients: Vec<f64>,
    /// Estimated size of the discarded terms.
    pub bound: f64,
}

/// Result of a density evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    pub bound: f64,
    /// Raw series value when it was negative and has been clamped to 0.
    pub clamped_from: Option<f64>,
}

impl FourierDensity {
    /// Coefficients `d_k(t)` read from `table` until they drop below
    /// [`FOURIER_TOL`] or [`MAX_FOURIER_TERMS`] is reached.
    pub fn from_table(table: &KernelTable, t: f64) -> Result<Self> {
        let mut coefficients = Vec::new();
        let mut k = 1u32;
        loop {
            let d = table.get(k, t).map_err(|e| match e {
                Error::TableCoverage(msg) => Error::TableCoverage(format!(
                    "{msg}; the Fourier series at t = {t} needs k beyond {}",
                    k - 1
                )),
                e => e,
            })?;
            if d.abs() < FOURIER_TOL {
                return Ok(Self {
                    coefficients,
                    bound: d.abs() * k as f64 / PI,
                });
            }
            coefficients.push(d);
            if k == MAX_FOURIER_TERMS {
                return Ok(Self {
                    coefficients,
                    bound: d.abs() * k as f64 / PI,
                });
            }
            k += 1;
        }
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn eval_raw(&self, phi: f64) -> f64 {
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * ((i + 1) as f64 * phi).cos())
            .sum();
        (1.0 + 2.0 * s) / TAU
    }

    pub fn eval(&self, phi: Angle) -> DensityValue {
        let raw = self.eval_raw(phi.value());
        DensityValue {
            value: raw.max(0.0),
            bound: self.bound,
            clamped_from: (raw < 0.0).then_some(raw),
        }
    }

    /// Probability of the arc `[a, b]`, `0 <= a <= b <= 2 pi`.
    pub fn arc_probability(&self, a: f64, b: f64) -> f64 {
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64;
                c * ((k * b).sin() - (k * a).sin()) / k
            })
            .sum();
        (b - a + 2.0 * s) / TAU
    }

    /// Probabilities of `bins` equal arcs of `[0, 2 pi)`.
    pub fn bin_probabilities(&self, bins: usize) -> Vec<f64> {
        let w = TAU / bins as f64;
        (0..bins)
            .map(|i| self.arc_probability(i as f64 * w, (i + 1) as f64 * w))
            .collect()
    }

    /// CSV `phi,mu` on `n` equispaced angles.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("phi,mu\n");
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            out.push_str(&format!(
                "{:.16e},{:.16e}\n",
                phi,
                self.eval(Angle(phi)).value
            ));
        }
        out
    }
}

/// `mu(phi, t) = (1/2pi)(1 + 2 sum_k d_k(t) cos(k phi))` from a kernel table.
pub fn wrapped_density(table: &KernelTable, phi: Angle, t: f64) -> Result<DensityValue> {
    Ok(FourierDensity::from_table(table, t)?.eval(phi))
}

/// Stable wrapped density as the wrap sum `sum_m l_alpha(phi + 2 pi m, t)` of
/// the fundamental density on the line.
pub fn wrapped_fundamental_density(alpha: f64, phi: Angle, t: f64) -> Result<f64> {
    let x = phi.centered();
    let mut s = fundamental_density_stable(alpha, x, t)?;
    for m in 1..10_000 {
        let shift = TAU * m as f64;
        let term = fundamental_density_stable(alpha, x + shift, t)?
            + fundamental_density_stable(alpha, x - shift, t)?;
        s += term;
        if term <= 1e-17 * s {
            return Ok(s);
        }
    }
    Err(Error::Convergence {
        terms: 10_000,
        bound: f64::NAN,
    })
}

/// One path of `wrap(B(E_g(t)))` at `times`.
pub fn sample_wrapped(
    spec: &BernsteinSpec,
    times: &[f64],
    step_dt: f64,
    stream: &RngStream,
) -> Result<Vec<Angle>> {
    Ok(sample_timechanged_bm(spec, times, step_dt, stream)?
        .into_iter()
        .map(wrap)
        .collect())
}

/// CSV `t,theta` for one sampled path.
pub fn samples_csv(times: &[f64], angles: &[Angle]) -> String {
    let mut out = String::from("t,theta\n");
    for (t, a) in times.iter().zip(angles) {
        out.push_str(&format!("{:.16e},{:.16e}\n", t, a.value()));
    }
    out
}

/// Empirical `E[e^{i k Theta}]` with standard errors.
pub fn circular_fourier(samples: &[Angle], k: i64) -> Result<ComplexEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let z: Vec<Complex64> = samples
        .iter()
        .map(|a| Complex64::from_polar(1.0, k as f64 * a.value()))
        .collect();
    ComplexEstimate::from_samples(&z)
}

/// Counts over `bins` equal arcs of `[0, 2 pi)`.
pub fn histogram(samples: &[Angle], bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for a in samples {
        let i = ((a.value() / TAU) * bins as f64) as usize;
        counts[i.min(bins - 1)] += 1;
    }
    counts
}

/// Pearson goodness of fit of `counts` against cell probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if counts.len() != probs.len() || counts.len() < 2 {
        return Err(Error::InvalidArgument(
            "counts and probabilities must match, >= 2 cells".into(),
        ));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut statistic = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if !(p > 0.0) {
            return domain("cell probabilities must be > 0");
        }
        let e = n as f64 * p;
        statistic += (c as f64 - e).powi(2) / e;
    }
    let dof = counts.len() - 1;
    let chi = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: chi.sf(statistic),
    })
}
