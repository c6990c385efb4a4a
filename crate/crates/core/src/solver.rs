//! Series solutions `W_t f(z) = sum a_k z^k d_k(t)` of the fractional Cauchy
//! problem on the disk, their resolvents, Monte Carlo counterparts, the
//! stable fundamental density and Caputo residual diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::{dk_laplace_ksq, BernsteinSpec};
use crate::error::{domain, Error, Result};
use crate::kernels::{dk_stable, dk_stable_ksq, KernelTable};
use crate::mc::{run_paths, ComplexEstimate};
use crate::specfun::{gamma, m_wright};
use crate::subsim::{sample_timechanged_bm, RngStream};
use crate::wrapped::{wrap, Angle};

/// Taylor coefficients `a_0..a_K` of the initial datum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub coeffs: Vec<Complex64>,
    /// Set when `sum |a_k|` is finite, i.e. the series converges on the
    /// closed disk.
    pub declared_radius_ok: bool,
}

impl TaylorCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("no Taylor coefficients".into()));
        }
        if coeffs
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return domain("Taylor coefficients must be finite");
        }
        let declared_radius_ok = coeffs.iter().map(|a| a.norm()).sum::<f64>().is_finite();
        Ok(Self {
            coeffs,
            declared_radius_ok,
        })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// `sum |a_k|`, a bound for `|f|` and `|W_t f|` on the disk.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).sum()
    }

    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(|(k, _)| k as u32)
    }

    /// `sum_k a_k z^k w_k` for weights `w(k)`.
    fn weighted<F: FnMut(u32) -> Result<f64>>(&self, z: &DiskPoint, mut w: F) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for k in self.support() {
            s += self.coeffs[k as usize] * z.pow(k) * w(k)?;
        }
        Ok(s)
    }

    pub fn eval(&self, z: &DiskPoint) -> Complex64 {
        self.weighted(z, |_| Ok(1.0)).unwrap()
    }

    /// `f` at an arbitrary complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }
}

/// `z = r e^{i phi}` with `r` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub r: f64,
    pub phi: Angle,
}

impl DiskPoint {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return domain(format!("disk radius must lie in (0, 1], got {r}"));
        }
        Ok(Self { r, phi: wrap(phi) })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let (r, phi) = z.to_polar();
        Self::new(r, phi)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.phi.value())
    }

    pub fn pow(&self, k: u32) -> Complex64 {
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(self.r.powi(k as i32), k as f64 * self.phi.value())
    }
}

/// `W_t f(z)` with kernels from `table`; `t = 0` returns `f(z)`.
pub fn evaluate_solution(
    f: &TaylorCoeffs,
    z: &DiskPoint,
    t: f64,
    table: &KernelTable,
) -> Result<Complex64> {
    if !(t >= 0.0) {
        return domain(format!("time must be >= 0, got {t}"));
    }
    if t == 0.0 {
        return Ok(f.eval(z));
    }
    f.weighted(z, |k| table.get(k, t))
}

/// `W_t f(z)` with kernels computed on the fly by the default route.
pub fn evaluate_solution_direct(
    spec: &BernsteinSpec,
    f: &TaylorCoeffs,
    z: &DiskPoint,
    t: f64,
) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(f.eval(z));
    }
    f.weighted(z, |k| crate::kernels::dk(spec, k, t))
}

/// `R_theta f(z) = sum a_k z^k dtilde_k(theta)`.
pub fn resolvent(
    spec: &BernsteinSpec,
    f: &TaylorCoeffs,
    z: &DiskPoint,
    theta: f64,
) -> Result<Complex64> {
    spec.validate()?;
    if !(theta > 0.0) {
        return domain(format!("Laplace variable must be > 0, got {theta}"));
    }
    f.weighted(z, |k| Ok(dk_laplace_ksq(spec, (k as f64).powi(2), theta)))
}

/// Sparse coefficients of a polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdTaylorCoeffs {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, Complex64>,
}

impl NdTaylorCoeffs {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one variable".into()));
        }
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn with(mut self, powers: &[u32], a: Complex64) -> Result<Self> {
        if powers.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "multi-index of length {} for {} variables",
                powers.len(),
                self.n
            )));
        }
        *self
            .terms
            .entry(powers.to_vec())
            .or_insert(Complex64::new(0.0, 0.0)) += a;
        Ok(self)
    }

    /// Effective `k^2 = sum k_j^2` of every term.
    pub fn k_sq_rows(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.terms.keys().map(|k| effective_ksq(k)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn weighted<F: FnMut(u64) -> Result<f64>>(
        &self,
        z: &[DiskPoint],
        mut w: F,
    ) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} points for {} variables",
                z.len(),
                self.n
            )));
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (powers, a) in &self.terms {
            let zk: Complex64 = powers.iter().zip(z).map(|(&k, p)| p.pow(k)).product();
            s += a * zk * w(effective_ksq(powers))?;
        }
        Ok(s)
    }

    pub fn eval(&self, z: &[DiskPoint]) -> Result<Complex64> {
        self.weighted(z, |_| Ok(1.0))
    }
}

fn effective_ksq(powers: &[u32]) -> u64 {
    powers.iter().map(|&k| (k as u64).pow(2)).sum()
}

/// `sum a_{k_1..k_n} z_1^{k_1}..z_n^{k_n} d(sum k_j^2, t)`; the table must
/// hold the rows of [`NdTaylorCoeffs::k_sq_rows`].
pub fn evaluate_solution_nd(
    f: &NdTaylorCoeffs,
    z: &[DiskPoint],
    t: f64,
    table: &KernelTable,
) -> Result<Complex64> {
    if !(t >= 0.0) {
        return domain(format!("time must be >= 0, got {t}"));
    }
    if t == 0.0 {
        return f.eval(z);
    }
    f.weighted(z, |ks| table.get_ksq(ks, t))
}

/// Monte Carlo `E f(z e^{-i Theta(t)})` with `Theta = B(E_g(t))` for every
/// `f` in `fs` and every time in `times` (ascending), all from the same
/// paths. Indexed `[f][time]`.
pub fn solution_mc(
    spec: &BernsteinSpec,
    fs: &[TaylorCoeffs],
    z: &DiskPoint,
    times: &[f64],
    n_paths: usize,
    step_dt: f64,
    stream: &RngStream,
) -> Result<Vec<Vec<ComplexEstimate>>> {
    let zc = z.z();
    let rows = run_paths(n_paths, stream, |p| {
        sample_timechanged_bm(spec, times, step_dt, p)
    })?;
    fs.iter()
        .map(|f| {
            (0..times.len())
                .map(|j| {
                    let col: Vec<Complex64> = rows
                        .iter()
                        .map(|b| f.eval_complex(zc * Complex64::from_polar(1.0, -b[j])))
                        .collect();
                    ComplexEstimate::from_samples(&col)
                })
                .collect()
        })
        .collect()
}

/// One row of a solution-field dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionSample {
    pub r: f64,
    pub phi: f64,
    pub t: f64,
    pub u: Complex64,
}

/// `W_t f` on every `(point, time)` pair, in point-major order.
pub fn solution_grid(
    f: &TaylorCoeffs,
    points: &[DiskPoint],
    times: &[f64],
    table: &KernelTable,
) -> Result<Vec<SolutionSample>> {
    let cells: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..times.len()).map(move |j| (i, j)))
        .collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let p = points[i];
            Ok(SolutionSample {
                r: p.r,
                phi: p.phi.value(),
                t: times[j],
                u: evaluate_solution(f, &p, times[j], table)?,
            })
        })
        .collect()
}

/// CSV `r,phi,t,re_u,im_u`.
pub fn solution_csv(rows: &[SolutionSample]) -> String {
    let mut out = String::from("r,phi,t,re_u,im_u\n");
    for s in rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            s.r, s.phi, s.t, s.u.re, s.u.im
        ));
    }
    out
}

/// Numerical Caputo derivative with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaputoEstimate {
    pub value: f64,
    /// `|D_h - D_{2h}|`.
    pub error: f64,
    /// Step actually used (`t / n` for the nearest even `n`).
    pub h: f64,
}

// Product-integration weights of int_0^{m h} (m h - s)^{-alpha} w(s) ds for
// piecewise-linear w on the nodes j h, applied to w_0..w_m.
fn fractional_integral(w: &[f64], m: usize, h: f64, alpha: f64) -> f64 {
    let a1 = 1.0 - alpha;
    let a2 = 2.0 - alpha;
    let mut s = 0.0;
    for j in 0..m {
        let p = (m - j) as f64;
        let q = p - 1.0;
        let a = h.powf(a1) * (p.powf(a1) - q.powf(a1)) / a1;
        let b = h.powf(a2) * (p.powf(a2) - q.powf(a2)) / a2;
        let c = b / h - q * a;
        s += c * w[j] + (a - c) * w[j + 1];
    }
    s
}

fn caputo_at_step(w: &[f64], n: usize, h: f64, alpha: f64) -> f64 {
    let ip = fractional_integral(w, n + 1, h, alpha);
    let im = fractional_integral(w, n - 1, h, alpha);
    (ip - im) / (2.0 * h * gamma(1.0 - alpha))
}

/// `(d/dt) (1/Gamma(1-alpha)) int_0^t (t-s)^{-alpha} (u(s) - u(0)) ds` by
/// product integration of piecewise-linear `u` and a centred difference.
/// Errors with [`Error::StepTooLarge`] if the estimates at `h` and `2h`
/// differ by more than 10%.
pub fn caputo_derivative_numeric<U>(mut u: U, alpha: f64, t: f64, h: f64) -> Result<CaputoEstimate>
where
    U: FnMut(f64) -> Result<f64>,
{
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(t > 0.0) || !(h > 0.0) || !t.is_finite() {
        return domain("need t > 0 and h > 0");
    }
    let mut n = ((t / h).round() as usize).max(2);
    n += n % 2;
    let h = t / n as f64;
    if alpha == 1.0 {
        let fine = (u(t + h)? - u(t - h)?) / (2.0 * h);
        let coarse = (u(t + 2.0 * h)? - u(t - 2.0 * h)?) / (4.0 * h);
        return finish(fine, coarse, h);
    }
    let u0 = u(0.0)?;
    let mut w = Vec::with_capacity(n + 3);
    for j in 0..=n + 2 {
        w.push(u(j as f64 * h)? - u0);
    }
    let fine = caputo_at_step(&w, n, h, alpha);
    let w2: Vec<f64> = w.iter().step_by(2).copied().collect();
    let coarse = caputo_at_step(&w2, n / 2, 2.0 * h, alpha);
    finish(fine, coarse, h)
}

fn finish(fine: f64, coarse: f64, h: f64) -> Result<CaputoEstimate> {
    let error = (fine - coarse).abs();
    if error > 0.1 * fine.abs().max(coarse.abs()) && error > 1e-12 {
        return Err(Error::StepTooLarge { coarse, fine });
    }
    Ok(CaputoEstimate {
        value: fine,
        error,
        h,
    })
}

/// Residual of a single stable mode `u = d_k(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResidual {
    pub k: u32,
    pub t: f64,
    pub u: f64,
    /// `|D_t^alpha u + (k^2/2) u|`.
    pub residual: f64,
    pub caputo_error: f64,
}

pub fn mode_residual(alpha: f64, k: u32, t: f64, h: f64) -> Result<ModeResidual> {
    let d = caputo_derivative_numeric(|s| dk_stable(alpha, k, s), alpha, t, h)?;
    let u = dk_stable(alpha, k, t)?;
    Ok(ModeResidual {
        k,
        t,
        u,
        residual: (d.value + 0.5 * (k as f64).powi(2) * u).abs(),
        caputo_error: d.error,
    })
}

/// `|D_t^alpha u - (1/2) d^2u/dphi^2|` at `z` for the stable solution; the
/// angular side is exact per mode, the time side numerical.
pub fn pde_residual(
    spec: &BernsteinSpec,
    f: &TaylorCoeffs,
    z: &DiskPoint,
    t: f64,
    h: f64,
) -> Result<f64> {
    spec.validate()?;
    if !spec.is_stable_like() {
        return Err(Error::InvalidArgument(
            "the residual check needs the stable family".into(),
        ));
    }
    let alpha = spec.alpha;
    let r = f.weighted(z, |k| {
        if k == 0 {
            return Ok(0.0);
        }
        let d = caputo_derivative_numeric(|s| dk_stable(alpha, k, s), alpha, t, h)?;
        Ok(d.value + 0.5 * (k as f64).powi(2) * dk_stable(alpha, k, t)?)
    })?;
    Ok(r.norm())
}

/// Density of `B(E_alpha(t))` on the line,
/// `(1/sqrt 2) t^{-alpha/2} M_{alpha/2}(sqrt 2 |x| t^{-alpha/2})`.
pub fn fundamental_density_stable(alpha: f64, x: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(t > 0.0) || !x.is_finite() {
        return domain("need t > 0 and finite x");
    }
    let scale = t.powf(-0.5 * alpha);
    let m = m_wright(0.5 * alpha, std::f64::consts::SQRT_2 * x.abs() * scale)?;
    Ok(scale * m / std::f64::consts::SQRT_2)
}

/// Fourier transform `E_alpha(-k^2 t^alpha / 2)` of the fundamental density
/// at real frequency `k`.
pub fn fundamental_characteristic(alpha: f64, k: f64, t: f64) -> Result<f64> {
    dk_stable_ksq(alpha, k * k, t)
}

/// `1/sqrt(2 pi t)`, the classical value of the density at 0.
pub fn heat_kernel_origin(t: f64) -> f64 {
    1.0 / (2.0 * PI * t).sqrt()
}
