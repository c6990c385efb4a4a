//! The kernels `d_k(t) = E[exp(-(k^2/2) E_g(t))]` by closed form, quadrature
//! and numerical Laplace inversion, and tables of them.
//!
//! Every route accepts a real effective `k^2 >= 0`, which is all the
//! n-dimensional kernel needs. The drift of the spec does not enter.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::{dk_laplace_mp, BernsteinSpec, Family};
use crate::error::{domain, Error, Result};
use crate::laplace::{gaver_stehfest_mp, DEFAULT_MP_TERMS};
use crate::quad::{self, Tolerance};
use crate::specfun::{gamma, mittag_leffler, mittag_leffler2, upper_incomplete_gamma};

/// Default absolute tolerance of the tempered quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    ClosedForm,
    Quadrature,
    Inversion,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Auto => "auto",
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Inversion => "inversion",
        };
        f.write_str(s)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time must be finite and >= 0, got {t}"));
    }
    Ok(())
}

fn check_ksq(k_sq: f64) -> Result<()> {
    if !(k_sq >= 0.0) || !k_sq.is_finite() {
        return domain(format!("k^2 must be finite and >= 0, got {k_sq}"));
    }
    Ok(())
}

/// Stable kernel `E_alpha(-k^2 t^alpha / 2)`.
pub fn dk_stable(alpha: f64, k: u32, t: f64) -> Result<f64> {
    dk_stable_ksq(alpha, (k as f64).powi(2), t)
}

pub fn dk_stable_ksq(alpha: f64, k_sq: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    check_ksq(k_sq)?;
    if k_sq == 0.0 || t == 0.0 {
        return Ok(1.0);
    }
    mittag_leffler(alpha, -0.5 * k_sq * t.powf(alpha))
}

fn upper_gamma_from(a: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        Ok(gamma(a))
    } else {
        upper_incomplete_gamma(a, x)
    }
}

/// Tempered kernel by quadrature:
///
/// ```text
/// d_k(t) = Gamma(a, mu t)/Gamma(a)
///        + 1/Gamma(a) int_0^t Gamma(a, mu (t-z)) e^{-mu z} z^{-1} E_{a,0}((mu^a - k^2/2) z^a) dz
/// ```
///
/// evaluated after `z = u^{1/a}` as
/// `(c/a) int_0^{t^a} Gamma(a, mu (t-z)) e^{-mu z} E_{a,a}(c u) du`, using
/// `E_{a,0}(x) = x E_{a,a}(x)`. The result has absolute error below `quad_tol`.
pub fn dk_tempered(alpha: f64, mu: f64, k: u32, t: f64, quad_tol: f64) -> Result<f64> {
    dk_tempered_ksq(alpha, mu, (k as f64).powi(2), t, quad_tol)
}

pub fn dk_tempered_ksq(alpha: f64, mu: f64, k_sq: f64, t: f64, quad_tol: f64) -> Result<f64> {
    check_t(t)?;
    check_ksq(k_sq)?;
    if !(alpha > 0.0 && alpha <= 1.0) || !(mu >= 0.0) {
        return domain(format!(
            "tempered kernel needs alpha in (0,1], mu >= 0; got {alpha}, {mu}"
        ));
    }
    if !(quad_tol > 0.0) {
        return domain("quadrature tolerance must be > 0");
    }
    if k_sq == 0.0 || t == 0.0 {
        return Ok(1.0);
    }
    let ga = gamma(alpha);
    let c = mu.powf(alpha) - 0.5 * k_sq;
    let head = upper_gamma_from(alpha, mu * t)? / ga;
    if c == 0.0 {
        return Ok(head);
    }
    let inv_alpha = 1.0 / alpha;
    let integrand = |u: f64| -> Result<f64> {
        let z = u.powf(inv_alpha).min(t);
        let tail = upper_gamma_from(alpha, mu * (t - z))?;
        let ml = mittag_leffler2(alpha, alpha, c * u)?;
        Ok(tail * (-mu * z).exp() * ml)
    };
    let upper = t.powf(alpha);
    let tol = Tolerance::new(1e-2 * quad_tol * ga * alpha / c.abs(), 1e-11);
    let r = quad::integrate_try(integrand, &[0.0, 0.5 * upper, upper], tol)?;
    Ok(head + c * r.value / (alpha * ga))
}

/// Kernel by multiprecision Gaver-Stehfest inversion of the resolvent.
pub fn dk_numeric(spec: &BernsteinSpec, k: u32, t: f64, inv_terms: usize) -> Result<f64> {
    dk_numeric_ksq(spec, (k as f64).powi(2), t, inv_terms)
}

pub fn dk_numeric_ksq(spec: &BernsteinSpec, k_sq: f64, t: f64, inv_terms: usize) -> Result<f64> {
    Ok(dk_numeric_report(spec, k_sq, t, inv_terms)?.0)
}

/// Inversion value with its oscillation diagnostic.
pub fn dk_numeric_report(
    spec: &BernsteinSpec,
    k_sq: f64,
    t: f64,
    inv_terms: usize,
) -> Result<(f64, f64)> {
    spec.validate()?;
    check_t(t)?;
    check_ksq(k_sq)?;
    if t == 0.0 {
        return Ok((1.0, 0.0));
    }
    let inv = gaver_stehfest_mp(
        |theta, mp| dk_laplace_mp(spec, k_sq, theta, mp),
        t,
        inv_terms,
    )?;
    Ok((inv.value, inv.oscillation))
}

/// Kernel and the route used; `Method::Auto` picks the closed form for
/// stable-like specs and quadrature for tempered ones.
pub fn dk_with(
    spec: &BernsteinSpec,
    k_sq: f64,
    t: f64,
    method: Method,
) -> Result<(f64, Method, f64)> {
    spec.validate()?;
    let method = match method {
        Method::Auto => {
            if spec.is_stable_like() {
                Method::ClosedForm
            } else {
                Method::Quadrature
            }
        }
        m => m,
    };
    match method {
        Method::ClosedForm => {
            if !spec.is_stable_like() {
                return Err(Error::InvalidArgument(
                    "closed form kernels exist only for the stable family".into(),
                ));
            }
            let v = dk_stable_ksq(spec.alpha, k_sq, t)?;
            Ok((v, method, 1e-12 * v.abs()))
        }
        Method::Quadrature => {
            let v = dk_tempered_ksq(spec.alpha, spec.tempering(), k_sq, t, DEFAULT_QUAD_TOL)?;
            Ok((v, method, DEFAULT_QUAD_TOL))
        }
        Method::Inversion => {
            let (v, osc) = dk_numeric_report(spec, k_sq, t, DEFAULT_MP_TERMS)?;
            Ok((v, method, osc.max(1e-9)))
        }
        Method::Auto => unreachable!(),
    }
}

/// Default-route kernel.
pub fn dk(spec: &BernsteinSpec, k: u32, t: f64) -> Result<f64> {
    Ok(dk_with(spec, (k as f64).powi(2), t, Method::Auto)?.0)
}

/// n-dimensional kernel, the one-dimensional one at `k^2 = sum k_j^2`.
pub fn dk_nd(spec: &BernsteinSpec, k_vec: &[u32], t: f64) -> Result<f64> {
    let k_sq: u64 = k_vec.iter().map(|&k| (k as u64) * (k as u64)).sum();
    Ok(dk_with(spec, k_sq as f64, t, Method::Auto)?.0)
}

/// Precomputed `d(k^2, t)` values on a `(k^2, t)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub spec: BernsteinSpec,
    /// Row keys: the effective `k^2` of each row, ascending.
    pub k_sq: Vec<u64>,
    pub times: Vec<f64>,
    /// Row-major, `values[row * times.len() + col]`.
    pub values: Vec<f64>,
    pub methods: Vec<Method>,
    /// Error allowance of each entry used by the invariant checks.
    pub slack: Vec<f64>,
}

impl KernelTable {
    /// Largest `k` such that every `j^2`, `j <= k`, has a row.
    pub fn k_max(&self) -> u32 {
        let mut k = 0u32;
        while self.row_of(((k + 1) as u64).pow(2)).is_some() {
            k += 1;
        }
        k
    }

    pub fn row_of(&self, k_sq: u64) -> Option<usize> {
        self.k_sq.binary_search(&k_sq).ok()
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| s == t)
    }

    fn lookup(&self, k_sq: u64, t: f64) -> Result<usize> {
        let row = self
            .row_of(k_sq)
            .ok_or_else(|| Error::TableCoverage(format!("no row for k^2 = {k_sq}")))?;
        let col = self
            .time_index(t)
            .ok_or_else(|| Error::TableCoverage(format!("no column for t = {t}")))?;
        Ok(row * self.times.len() + col)
    }

    pub fn get_ksq(&self, k_sq: u64, t: f64) -> Result<f64> {
        Ok(self.values[self.lookup(k_sq, t)?])
    }

    pub fn get(&self, k: u32, t: f64) -> Result<f64> {
        self.get_ksq((k as u64).pow(2), t)
    }

    pub fn method(&self, k_sq: u64, t: f64) -> Result<Method> {
        Ok(self.methods[self.lookup(k_sq, t)?])
    }

    /// CSV with header `k,t,dk,method`; `k` is `sqrt(k^2)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,t,dk,method\n");
        for (r, &ks) in self.k_sq.iter().enumerate() {
            let root = (ks as f64).sqrt().round() as u64;
            let k = if root * root == ks {
                root.to_string()
            } else {
                format!("{:.16e}", (ks as f64).sqrt())
            };
            for (c, &t) in self.times.iter().enumerate() {
                let i = r * self.times.len() + c;
                out.push_str(&format!(
                    "{k},{:.16e},{:.16e},{}\n",
                    t, self.values[i], self.methods[i]
                ));
            }
        }
        out
    }

    /// Checks `d(0, t) = 1`, range `(0, 1]`, and monotonicity in `t` and
    /// `k^2`, each up to the entries' slack.
    pub fn check_invariants(&self) -> Result<()> {
        let nt = self.times.len();
        let at = |r: usize, c: usize| self.values[r * nt + c];
        let sl = |r: usize, c: usize| self.slack[r * nt + c] + 1e-13;
        for (r, &ks) in self.k_sq.iter().enumerate() {
            for (c, &t) in self.times.iter().enumerate() {
                let v = at(r, c);
                let fail = |what: &str| {
                    Err(Error::InvariantViolation {
                        k_sq: ks,
                        t,
                        what: what.to_string(),
                    })
                };
                if !v.is_finite() {
                    return fail("non-finite value");
                }
                if ks == 0 && v != 1.0 {
                    return fail("d_0 differs from 1");
                }
                if v > 1.0 + sl(r, c) || v < -sl(r, c) {
                    return fail("value outside (0, 1]");
                }
                if c > 0 && v > at(r, c - 1) + sl(r, c) + sl(r, c - 1) {
                    return fail("increasing in t");
                }
                if r > 0 && v > at(r - 1, c) + sl(r, c) + sl(r - 1, c) {
                    return fail("increasing in k");
                }
            }
        }
        Ok(())
    }
}

/// Table for `k = 0..=k_max`.
pub fn build_table(
    spec: &BernsteinSpec,
    k_max: u32,
    times: &[f64],
    method: Method,
) -> Result<KernelTable> {
    let ks: Vec<u64> = (0..=k_max as u64).map(|k| k * k).collect();
    build_table_ksq(spec, &ks, times, method)
}

/// Table for arbitrary effective `k^2` rows (sorted and deduplicated here).
pub fn build_table_ksq(
    spec: &BernsteinSpec,
    k_sq: &[u64],
    times: &[f64],
    method: Method,
) -> Result<KernelTable> {
    spec.validate()?;
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return domain("table times must be finite and >= 0");
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("table times must be strictly ascending");
    }
    let mut rows = k_sq.to_vec();
    rows.sort_unstable();
    rows.dedup();
    let nt = times.len();
    let cells: Vec<(f64, Method, f64)> = (0..rows.len() * nt)
        .into_par_iter()
        .map(|i| {
            let ks = rows[i / nt];
            let t = times[i % nt];
            if ks == 0 || t == 0.0 {
                return Ok((1.0, Method::ClosedForm, 0.0));
            }
            dk_with(spec, ks as f64, t, method)
        })
        .collect::<Result<_>>()?;
    let table = KernelTable {
        spec: *spec,
        k_sq: rows,
        times: times.to_vec(),
        values: cells.iter().map(|c| c.0).collect(),
        methods: cells.iter().map(|c| c.1).collect(),
        slack: cells.iter().map(|c| c.2).collect(),
    };
    table.check_invariants()?;
    Ok(table)
}

/// True when the spec family has a closed-form kernel.
pub fn has_closed_form(spec: &BernsteinSpec) -> bool {
    spec.family == Family::Stable || spec.tempering() == 0.0
}
