//! Circular moments, joint Laplace transforms, mixed moments and the
//! n-dimensional covariance, each with a Monte Carlo counterpart.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bernstein::{dk_laplace_mp, BernsteinSpec};
use crate::error::{domain, Error, Result};
use crate::kernels::KernelTable;
use crate::laplace::{gaver_stehfest_mp, laplace_weights, Inversion, DEFAULT_MP_TERMS};
use crate::mc::{run_paths, ComplexEstimate, MeanEstimate};
use crate::quad::{self, Tolerance};
use crate::specfun::{gamma, incomplete_beta, mittag_leffler, rgamma, CompensatedSum};
use crate::subsim::{brownian_along, purpose, sample_inverse, sample_timechanged_bm, RngStream};

/// Analytic value against a Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub quantity: String,
    pub params: BTreeMap<String, f64>,
    pub analytic: Option<f64>,
    pub mc: f64,
    pub se: f64,
    pub n: usize,
    /// Bias allowance added to the `3 se` band.
    pub allowance: f64,
    /// `|mc - analytic| <= 3 se + allowance`, when there is an analytic value.
    pub pass: Option<bool>,
}

impl MomentReport {
    pub fn new(
        quantity: &str,
        params: &[(&str, f64)],
        analytic: Option<f64>,
        estimate: MeanEstimate,
        allowance: f64,
    ) -> Self {
        Self {
            quantity: quantity.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            analytic,
            mc: estimate.mean,
            se: estimate.se,
            n: estimate.n,
            allowance,
            pass: analytic.map(|a| estimate.within(a, 3.0, allowance)),
        }
    }

    pub fn with_analytic(mut self, analytic: f64) -> Self {
        self.analytic = Some(analytic);
        self.pass = Some((self.mc - analytic).abs() <= 3.0 * self.se + self.allowance);
        self
    }
}

/// `E[B_g(t)^r] = E[e^{-(r^2/2) E_g(t)}] = d_r(t)`.
pub fn circular_moment(table: &KernelTable, r: u32, t: f64) -> Result<f64> {
    if t == 0.0 || r == 0 {
        return Ok(1.0);
    }
    table.get(r, t)
}

/// `2 g(theta) / (theta (r + 2 g(theta)))`, the transform with exponent `r/2`.
pub fn moment_laplace_paper(spec: &BernsteinSpec, r: u32, theta: f64) -> f64 {
    let g = spec.g(theta);
    if r == 0 {
        return 1.0 / theta;
    }
    2.0 * g / (theta * (r as f64 + 2.0 * g))
}

/// Same with exponent `r^2/2`, the transform of [`circular_moment`].
pub fn moment_laplace(spec: &BernsteinSpec, r: u32, theta: f64) -> f64 {
    let g = spec.g(theta);
    if r == 0 {
        return 1.0 / theta;
    }
    2.0 * g / (theta * ((r as f64).powi(2) + 2.0 * g))
}

/// Inverse transform of `g(theta) / (theta (eta + g(theta)))` at `t`, i.e.
/// `E[e^{-eta E_g(t)}]`.
pub fn exp_functional_inverse(spec: &BernsteinSpec, eta: f64, t: f64) -> Result<Inversion> {
    if !(eta >= 0.0) {
        return domain(format!("eta must be >= 0, got {eta}"));
    }
    gaver_stehfest_mp(
        |th, mp| dk_laplace_mp(spec, 2.0 * eta, th, mp),
        t,
        DEFAULT_MP_TERMS,
    )
}

/// Monte Carlo `E[e^{i r B(E_g(t))}]` from raw angles.
pub fn circular_moment_mc(
    spec: &BernsteinSpec,
    r: u32,
    t: f64,
    n: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<ComplexEstimate> {
    let z = run_paths(n, stream, |p| {
        let b = sample_timechanged_bm(spec, &[t], step_dt, p)?[0];
        Ok(Complex64::from_polar(1.0, r as f64 * b))
    })?;
    ComplexEstimate::from_samples(&z)
}

/// One row of the `r` versus `r^2` comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionRow {
    pub r: u32,
    pub t: f64,
    /// Inversion at `eta = r^2/2`.
    pub squared: f64,
    /// Inversion at `eta = r/2`.
    pub linear: f64,
    pub mc: f64,
    pub se: f64,
    pub squared_pass: bool,
    pub linear_pass: bool,
}

/// Inverts the moment transform under both exponent conventions and
/// compares each with simulated circular moments (within `3 se + step_dt`).
pub fn convention_report(
    spec: &BernsteinSpec,
    t: f64,
    rs: &[u32],
    n: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<Vec<ConventionRow>> {
    let angles = run_paths(n, stream, |p| {
        Ok(sample_timechanged_bm(spec, &[t], step_dt, p)?[0])
    })?;
    rs.iter()
        .map(|&r| {
            let rf = r as f64;
            let squared = exp_functional_inverse(spec, 0.5 * rf * rf, t)?.value;
            let linear = exp_functional_inverse(spec, 0.5 * rf, t)?.value;
            let cos: Vec<f64> = angles.iter().map(|b| (rf * b).cos()).collect();
            let est = MeanEstimate::from_samples(&cos)?;
            Ok(ConventionRow {
                r,
                t,
                squared,
                linear,
                mc: est.mean,
                se: est.se,
                squared_pass: est.within(squared, 3.0, step_dt),
                linear_pass: est.within(linear, 3.0, step_dt),
            })
        })
        .collect()
}

/// Double transform of `E[e^{-eta1 E_g(t1) - eta2 E_g(t2)}]` over the
/// quadrant `t1, t2 > 0`.
pub fn joint_exp_laplace(
    spec: &BernsteinSpec,
    eta1: f64,
    eta2: f64,
    theta1: f64,
    theta2: f64,
) -> f64 {
    let g1 = spec.g(theta1);
    let g2 = spec.g(theta2);
    let g12 = spec.g(theta1 + theta2);
    let b1 = eta1 + g1;
    let b2 = eta2 + g2;
    let tt = theta1 * theta2;
    let single = (g1 / b1 + g2 / b2 - 1.0) / tt;
    let cross = eta1 * eta2 / tt * (eta1 + eta2 + g1 + g2) / ((eta1 + eta2 + g12) * b1 * b2);
    single + cross
}

/// The closed form
/// `[4 g1 g2 (g12 + 2) + 3 (g1 + g2 - g12)] / [theta1 theta2 (2 + g12)(3 + 2 g1)(1 + 2 g2)]`,
/// equal to `joint_exp_laplace(3/2, 1/2)`.
pub fn covariance_laplace(spec: &BernsteinSpec, theta1: f64, theta2: f64) -> f64 {
    let g1 = spec.g(theta1);
    let g2 = spec.g(theta2);
    let g12 = spec.g(theta1 + theta2);
    let num = 4.0 * g1 * g2 * (g12 + 2.0) + 3.0 * (g1 + g2 - g12);
    num / (theta1 * theta2 * (2.0 + g12) * (3.0 + 2.0 * g1) * (1.0 + 2.0 * g2))
}

/// Result of comparing `covariance_laplace(a, b)` with `(b, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryScan {
    pub max_relative_asymmetry: f64,
    pub at: (f64, f64),
}

pub fn covariance_symmetry_scan(spec: &BernsteinSpec, thetas: &[f64]) -> SymmetryScan {
    let mut best = SymmetryScan {
        max_relative_asymmetry: 0.0,
        at: (f64::NAN, f64::NAN),
    };
    for &a in thetas {
        for &b in thetas {
            let x = covariance_laplace(spec, a, b);
            let y = covariance_laplace(spec, b, a);
            let rel = (x - y).abs() / x.abs().max(y.abs());
            if rel > best.max_relative_asymmetry {
                best = SymmetryScan {
                    max_relative_asymmetry: rel,
                    at: (a, b),
                };
            }
        }
    }
    best
}

/// Monte Carlo estimate of [`joint_exp_laplace`]: every path's
/// `e^{-eta1 E(t1) - eta2 E(t2)}` surface on `grid x grid` is transformed
/// by the product-trapezoid rule, so the paths give i.i.d. samples.
#[allow(clippy::too_many_arguments)]
pub fn joint_exp_laplace_mc(
    spec: &BernsteinSpec,
    eta1: f64,
    eta2: f64,
    theta1: f64,
    theta2: f64,
    grid: &[f64],
    n: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<MomentReport> {
    let w1 = laplace_weights(grid, theta1)?;
    let w2 = laplace_weights(grid, theta2)?;
    let samples = run_paths(n, stream, |p| {
        let e = sample_inverse(spec, grid, step_dt, &mut p.rng())?;
        let a: f64 = e.iter().zip(&w1).map(|(x, w)| w * (-eta1 * x).exp()).sum();
        let b: f64 = e.iter().zip(&w2).map(|(x, w)| w * (-eta2 * x).exp()).sum();
        Ok(a * b)
    })?;
    let est = MeanEstimate::from_samples(&samples)?;
    Ok(MomentReport::new(
        "joint_exp_laplace",
        &[
            ("eta1", eta1),
            ("eta2", eta2),
            ("theta1", theta1),
            ("theta2", theta2),
        ],
        Some(joint_exp_laplace(spec, eta1, eta2, theta1, theta2)),
        est,
        0.0,
    ))
}

/// Monte Carlo `E[B_g(t) conj(B_g(s))] = E[e^{-(E(t v s) - E(t ^ s))/2}]`
/// from joint samples of one clock path.
pub fn mixed_moment_mc(
    spec: &BernsteinSpec,
    s: f64,
    t: f64,
    n: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<MomentReport> {
    if !(s >= 0.0 && t >= 0.0) {
        return domain("mixed moment needs s, t >= 0");
    }
    let (lo, hi) = (s.min(t), s.max(t));
    let samples = run_paths(n, stream, |p| {
        let e = sample_inverse(spec, &[lo, hi], step_dt, &mut p.rng())?;
        Ok((-0.5 * (e[1] - e[0])).exp())
    })?;
    let est = MeanEstimate::from_samples(&samples)?;
    let analytic = if spec.is_classical() {
        Some((-0.5 * (hi - lo)).exp())
    } else {
        None
    };
    Ok(MomentReport::new(
        "mixed_moment",
        &[
            ("alpha", spec.alpha),
            ("mu", spec.tempering()),
            ("s", s),
            ("t", t),
        ],
        analytic,
        est,
        step_dt,
    ))
}

/// Series value with the size of the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// Stable mixed moment
/// `E_a(-T^a/2) + T^a/(2 Gamma(a)) sum_j (-T^a/2)^j / Gamma(a j + 1) B(a, a j + 1; S/T)`
/// with `T = t v s`, `S = t ^ s`.
pub fn mixed_moment_stable(alpha: f64, s: f64, t: f64, j_max: usize) -> Result<SeriesValue> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(s >= 0.0 && t >= 0.0) || !s.is_finite() || !t.is_finite() {
        return domain("mixed moment needs finite s, t >= 0");
    }
    let (lo, hi) = (s.min(t), s.max(t));
    if hi == 0.0 {
        return Ok(SeriesValue {
            value: 1.0,
            tail_bound: 0.0,
            terms: 0,
        });
    }
    let ta = hi.powf(alpha);
    let x = -0.5 * ta;
    let head = mittag_leffler(alpha, x)?;
    let y = lo / hi;
    if y == 0.0 {
        return Ok(SeriesValue {
            value: head,
            tail_bound: 0.0,
            terms: 0,
        });
    }
    let pre = ta / (2.0 * gamma(alpha));
    // B(a, b; y) <= y^a / a for b >= 1
    let beta_cap = y.powf(alpha) / alpha;
    let mut sum = CompensatedSum::default();
    let mut xj = 1.0;
    for j in 0..=j_max {
        let b = alpha * j as f64 + 1.0;
        let term = xj * rgamma(b) * incomplete_beta(alpha, b, y)?;
        sum.add(term);
        xj *= x;
        // remaining terms are dominated by a ratio-test geometric tail
        let next = xj.abs() * rgamma(b + alpha) * beta_cap;
        let ratio = x.abs() * rgamma(b + 2.0 * alpha) / rgamma(b + alpha).max(f64::MIN_POSITIVE);
        if j > 2 && ratio < 0.5 {
            let tail = pre * next / (1.0 - ratio);
            if tail <= 1e-16 * (head + pre * sum.value()).abs() {
                let value = head + pre * sum.value();
                if sum.max_abs_term > 1e8 * sum.value().abs().max(f64::MIN_POSITIVE) {
                    return Err(Error::AccuracyLoss {
                        ratio: sum.max_abs_term / sum.value().abs(),
                    });
                }
                return Ok(SeriesValue {
                    value,
                    tail_bound: tail,
                    terms: j + 1,
                });
            }
        }
    }
    let bound = pre * xj.abs() * rgamma(alpha * (j_max + 1) as f64 + 1.0) * beta_cap;
    Err(Error::Convergence {
        terms: j_max + 1,
        bound,
    })
}

/// Stable mixed moment by quadrature,
/// `E_a(-T^a/2) + (1/(2 Gamma(a+1))) int_0^{S^a} E_a(-(T - u^{1/a})^a / 2) du`.
pub fn mixed_moment_integral(alpha: f64, s: f64, t: f64, quad_tol: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(s >= 0.0 && t >= 0.0) || !(quad_tol > 0.0) {
        return domain("mixed moment needs s, t >= 0 and quad_tol > 0");
    }
    let (lo, hi) = (s.min(t), s.max(t));
    let head = mittag_leffler(alpha, -0.5 * hi.powf(alpha))?;
    if lo == 0.0 {
        return Ok(head);
    }
    let inv = 1.0 / alpha;
    let upper = lo.powf(alpha);
    let r = quad::integrate_try(
        |u| {
            let tau = u.powf(inv).min(hi);
            mittag_leffler(alpha, -0.5 * (hi - tau).powf(alpha))
        },
        &[0.0, upper],
        Tolerance::new(0.1 * quad_tol, 1e-12),
    )?;
    Ok(head + r.value / (2.0 * gamma(alpha + 1.0)))
}

fn covariance_kernels(table: &KernelTable, t: f64, k_sq: u64) -> Result<(f64, f64)> {
    if t == 0.0 {
        return Ok((1.0, 1.0));
    }
    Ok((table.get_ksq(1, t)?, table.get_ksq(k_sq, t)?))
}

fn check_disk(z: &[Complex64]) -> Result<()> {
    if z.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one coordinate".into(),
        ));
    }
    if z.iter().any(|w| !(w.norm() <= 1.0 + 1e-15)) {
        return domain("coordinates must lie in the closed unit disk");
    }
    Ok(())
}

/// Covariance matrix in the closed form
/// `q_ij = z_i z_j (D_2 - D_1^2)` for `i != j`, `q_ii = z_i^2 (1 - D_1^2)`,
/// with `D_1 = E[e^{-E/2}]`, `D_2 = E[e^{-2E}]` (table rows `k^2 = 1, 4`).
pub fn nd_covariance(z: &[Complex64], t: f64, table: &KernelTable) -> Result<Vec<Vec<Complex64>>> {
    check_disk(z)?;
    let (d1, d2) = covariance_kernels(table, t, 4)?;
    Ok(covariance_matrix(z, |i, j| {
        if i == j {
            z[i] * z[i] * (1.0 - d1 * d1)
        } else {
            z[i] * z[j] * (d2 - d1 * d1)
        }
    }))
}

/// Covariance `E[Z_i conj Z_j] - E Z_i conj(E Z_j)` of
/// `Z_k = z_k e^{-i B_k(E_g(t))}` with independent `B_k`:
/// `z_i conj(z_j) (E[e^{-E}] - D_1^2)` off the diagonal and
/// `|z_i|^2 (1 - D_1^2)` on it (table rows `k^2 = 1, 2`).
pub fn nd_covariance_process(
    z: &[Complex64],
    t: f64,
    table: &KernelTable,
) -> Result<Vec<Vec<Complex64>>> {
    check_disk(z)?;
    let (d1, d_pair) = covariance_kernels(table, t, 2)?;
    Ok(covariance_matrix(z, |i, j| {
        if i == j {
            Complex64::new(z[i].norm_sqr() * (1.0 - d1 * d1), 0.0)
        } else {
            z[i] * z[j].conj() * (d_pair - d1 * d1)
        }
    }))
}

fn covariance_matrix<F: Fn(usize, usize) -> Complex64>(
    z: &[Complex64],
    f: F,
) -> Vec<Vec<Complex64>> {
    (0..z.len())
        .map(|i| (0..z.len()).map(|j| f(i, j)).collect())
        .collect()
}

/// Monte Carlo covariance of `Z_k = z_k e^{-i B_k(E_g(t))}` (one clock,
/// independent Brownian motions), entry-wise estimates of
/// `mean((Z_i - m_i) conj(Z_j - m_j))`.
pub fn nd_covariance_mc(
    spec: &BernsteinSpec,
    z: &[Complex64],
    t: f64,
    n: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<Vec<Vec<ComplexEstimate>>> {
    check_disk(z)?;
    let dim = z.len();
    let rows = run_paths(n, stream, |p| {
        let e = sample_inverse(
            spec,
            &[t],
            step_dt,
            &mut p.substream(purpose::CLOCK, 0).rng(),
        )?[0];
        let mut bm = p.substream(purpose::BROWNIAN, 0).rng();
        Ok((0..dim)
            .map(|k| {
                let b = brownian_along(&[e], &mut bm)[0];
                z[k] * Complex64::from_polar(1.0, -b)
            })
            .collect::<Vec<_>>())
    })?;
    let means: Vec<Complex64> = (0..dim)
        .map(|k| rows.iter().map(|r| r[k]).sum::<Complex64>() / n as f64)
        .collect();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let psi: Vec<Complex64> = rows
                        .iter()
                        .map(|r| (r[i] - means[i]) * (r[j] - means[j]).conj())
                        .collect();
                    ComplexEstimate::from_samples(&psi)
                })
                .collect()
        })
        .collect()
}
