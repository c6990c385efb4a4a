//! Gaver-Stehfest inversion and forward Laplace transforms of sampled data.

use crate::error::{Error, Result};
use crate::hiprec::{Big, Mp};

/// Default number of Stehfest terms in double precision.
pub const DEFAULT_TERMS: usize = 14;
/// Largest term count accepted by the double-precision inverter.
pub const MAX_F64_TERMS: usize = 18;
/// Default term count of the multiprecision inverter.
pub const DEFAULT_MP_TERMS: usize = 32;
/// Largest term count accepted by the multiprecision inverter.
pub const MAX_MP_TERMS: usize = 64;

fn check_terms(n: usize, max: usize) -> Result<()> {
    if n < 2 || n % 2 == 1 || n > max {
        return Err(Error::InversionTerms(n));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "inversion time must be > 0, got {t}"
        )));
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Stehfest weights `V_1..V_n` in double precision (exact for `n <= 18`).
pub fn stehfest_weights(n: usize) -> Result<Vec<f64>> {
    check_terms(n, MAX_F64_TERMS)?;
    let m = n / 2;
    let mut v = Vec::with_capacity(n);
    for j in 1..=n {
        let mut s = 0.0;
        for k in j.div_ceil(2)..=j.min(m) {
            s += (k as f64).powi(m as i32) * factorial(2 * k)
                / (factorial(m - k)
                    * factorial(k)
                    * factorial(k - 1)
                    * factorial(j - k)
                    * factorial(2 * k - j));
        }
        let sign = if (j + m).is_multiple_of(2) { 1.0 } else { -1.0 };
        v.push(sign * s);
    }
    Ok(v)
}

/// Gaver-Stehfest estimate `(ln2/t) sum_j V_j F(j ln2 / t)` in double
/// precision; `n_terms` must be even and at most [`MAX_F64_TERMS`].
pub fn gaver_stehfest<F>(mut f: F, t: f64, n_terms: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    check_time(t)?;
    let v = stehfest_weights(n_terms)?;
    let a = std::f64::consts::LN_2 / t;
    let s: f64 = v
        .iter()
        .enumerate()
        .map(|(j, w)| w * f((j + 1) as f64 * a))
        .sum();
    let value = a * s;
    if !value.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(value)
}

fn stehfest_weights_mp(n: usize, mp: &Mp) -> Vec<Big> {
    let m = n / 2;
    let mut fact = vec![mp.int(1)];
    for k in 1..=2 * m.max(1) {
        let next = mp.mul(&fact[k - 1], &mp.int(k as u64));
        fact.push(next);
    }
    let mut v = Vec::with_capacity(n);
    for j in 1..=n {
        let mut s = mp.int(0);
        for k in j.div_ceil(2)..=j.min(m) {
            let mut kp = mp.int(1);
            let kb = mp.int(k as u64);
            for _ in 0..m {
                kp = mp.mul(&kp, &kb);
            }
            let num = mp.mul(&kp, &fact[2 * k]);
            let den = mp.mul(
                &mp.mul(
                    &mp.mul(&fact[m - k], &fact[k]),
                    &mp.mul(&fact[k - 1], &fact[j - k]),
                ),
                &fact[2 * k - j],
            );
            s = mp.add(&s, &mp.div(&num, &den));
        }
        if (j + m) % 2 == 1 {
            s = s.neg();
        }
        v.push(s);
    }
    v
}

/// Result of a multiprecision inversion together with its stability
/// diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    /// `|estimate(n) - estimate(n - 2)|`, both from the same transform samples.
    pub oscillation: f64,
    pub terms: usize,
}

/// Working precision (bits) used for `n` Stehfest terms.
pub fn mp_bits(n: usize) -> usize {
    (64 + 6 * n).div_ceil(64) * 64
}

/// Gaver-Stehfest inversion carried out in multiprecision arithmetic. The
/// transform is evaluated by `f` in the supplied context, so its own rounding
/// error stays far below the weight cancellation.
pub fn gaver_stehfest_mp<F>(mut f: F, t: f64, n_terms: usize) -> Result<Inversion>
where
    F: FnMut(&Big, &mut Mp) -> Big,
{
    check_time(t)?;
    check_terms(n_terms, MAX_MP_TERMS)?;
    if n_terms < 4 {
        return Err(Error::InversionTerms(n_terms));
    }
    let mut mp = Mp::new(mp_bits(n_terms));
    let ln2 = mp.ln2();
    let a = mp.div(&ln2, &mp.num(t));
    let samples: Vec<Big> = (1..=n_terms)
        .map(|j| {
            let theta = mp.mul(&a, &mp.int(j as u64));
            f(&theta, &mut mp)
        })
        .collect();
    let estimate = |n: usize, mp: &Mp| -> f64 {
        let w = stehfest_weights_mp(n, mp);
        let mut s = mp.int(0);
        for (wj, fj) in w.iter().zip(&samples) {
            s = mp.add(&s, &mp.mul(wj, fj));
        }
        mp.to_f64(&mp.mul(&s, &a))
    };
    let value = estimate(n_terms, &mp);
    let coarse = estimate(n_terms - 2, &mp);
    let oscillation = (value - coarse).abs();
    if !value.is_finite() || oscillation > (1e-2 * value.abs()).max(1e-8) {
        return Err(Error::InversionInstability {
            estimate: value,
            oscillation,
        });
    }
    Ok(Inversion {
        value,
        oscillation,
        terms: n_terms,
    })
}

/// Forward transform estimate with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    /// Contribution of the constant extrapolation beyond the last sample.
    pub tail: f64,
    /// Richardson estimate of the discretization error (0 if the grid is too
    /// short to form one).
    pub quad_error: f64,
}

// 1 - e^{-x}(1 + x) = sum_{n>=2} (n - 1) (-x)^n / n!, accurate for small x.
fn one_minus_exp_poly(x: f64) -> f64 {
    if x < 0.1 {
        let mut term = 1.0;
        let mut s = 0.0;
        for n in 1..20 {
            term *= -x / n as f64;
            s += (n as f64 - 1.0) * term;
        }
        s
    } else {
        -(-x).exp_m1() - x * (-x).exp()
    }
}

/// Quadrature weights for `int_0^inf e^{-theta t} f(t) dt` with `f` linear
/// between samples and constant after the last one.
pub fn laplace_weights(times: &[f64], theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!(
            "Laplace variable must be > 0, got {theta}"
        )));
    }
    if times.len() < 2 || times[0] != 0.0 {
        return Err(Error::InvalidArgument(
            "sample grid must start at 0 and hold at least two points".into(),
        ));
    }
    let horizon = *times.last().unwrap();
    let required = 8.0 / theta;
    if horizon < required {
        return Err(Error::InsufficientHorizon {
            horizon,
            theta,
            required,
        });
    }
    let mut w = vec![0.0; times.len()];
    for i in 0..times.len() - 1 {
        let (a, b) = (times[i], times[i + 1]);
        let h = b - a;
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(
                "sample times must be strictly ascending".into(),
            ));
        }
        let x = theta * h;
        let ea = (-theta * a).exp();
        let int0 = -(-x).exp_m1() / theta;
        let int1 = one_minus_exp_poly(x) / (theta * x);
        w[i] += ea * (int0 - int1);
        w[i + 1] += ea * int1;
    }
    let last = w.len() - 1;
    w[last] += (-theta * horizon).exp() / theta;
    Ok(w)
}

/// `int_0^inf e^{-theta t} f(t) dt` from samples `(times[i], values[i])`,
/// with `times[0] = 0` and `times.last() >= 8 / theta`.
pub fn forward_laplace(times: &[f64], values: &[f64], theta: f64) -> Result<LaplaceEstimate> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument(
            "times and values differ in length".into(),
        ));
    }
    let w = laplace_weights(times, theta)?;
    let value: f64 = w.iter().zip(values).map(|(a, b)| a * b).sum();
    let horizon = *times.last().unwrap();
    let tail = values[values.len() - 1] * (-theta * horizon).exp() / theta;
    let quad_error = if times.len() >= 5 {
        let t2: Vec<f64> = times.iter().step_by(2).copied().collect();
        let v2: Vec<f64> = values.iter().step_by(2).copied().collect();
        if *t2.last().unwrap() == horizon {
            let w2 = laplace_weights(&t2, theta)?;
            let coarse: f64 = w2.iter().zip(&v2).map(|(a, b)| a * b).sum();
            (value - coarse).abs() / 3.0
        } else {
            0.0
        }
    } else {
        0.0
    };
    Ok(LaplaceEstimate {
        value,
        tail,
        quad_error,
    })
}

/// Double transform of a surface `values[i * t2.len() + j] = f(t1[i], t2[j])`
/// by the tensor product of the one-dimensional rules.
pub fn forward_double_laplace(
    t1: &[f64],
    t2: &[f64],
    values: &[f64],
    theta1: f64,
    theta2: f64,
) -> Result<f64> {
    if values.len() != t1.len() * t2.len() {
        return Err(Error::InvalidArgument(
            "surface shape does not match the grids".into(),
        ));
    }
    let w1 = laplace_weights(t1, theta1)?;
    let w2 = laplace_weights(t2, theta2)?;
    let mut s = 0.0;
    for (i, a) in w1.iter().enumerate() {
        let row = &values[i * t2.len()..(i + 1) * t2.len()];
        s += a * row.iter().zip(&w2).map(|(f, b)| f * b).sum::<f64>();
    }
    Ok(s)
}
