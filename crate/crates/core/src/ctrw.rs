//! Continuous-time random walks on the circle whose scaling limit is the
//! time-changed circular Brownian motion, and convergence diagnostics.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinSpec;
use crate::error::{domain, Error, Result};
use crate::kernels::dk;
use crate::mc::{run_paths, ComplexEstimate, MeanEstimate};
use crate::specfun::gamma;
use crate::subsim::{purpose, IncrementSampler, RngStream};
use crate::wrapped::{circular_fourier, wrap, Angle};

/// Renewal counts above this abort the walk.
pub const MAX_RENEWALS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpMode {
    /// Exact subordinator increments of span `1/c`.
    ExactStable,
    /// `P(J > x) = (x/x0)^{-alpha}` with `x0 = (c Gamma(1-alpha))^{-1/alpha}`.
    Pareto,
    /// Test hook: `J = 1`.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YMode {
    /// `+-c^{-1/2}` with equal probability.
    Rademacher,
    /// `N(0, 1/c)`.
    Gaussian,
    /// Test hook: `Y = 0`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtrwConfig {
    pub scale_c: f64,
    pub alpha: f64,
    #[serde(default)]
    pub mu: f64,
    pub jump_mode: JumpMode,
    pub y_mode: YMode,
}

impl CtrwConfig {
    pub fn new(scale_c: f64, alpha: f64, mu: f64) -> Self {
        Self {
            scale_c,
            alpha,
            mu,
            jump_mode: JumpMode::ExactStable,
            y_mode: YMode::Rademacher,
        }
    }

    pub fn with_modes(mut self, jump_mode: JumpMode, y_mode: YMode) -> Self {
        self.jump_mode = jump_mode;
        self.y_mode = y_mode;
        self
    }

    /// The subordinator whose law `T^{(c)}(c t)` approximates.
    pub fn spec(&self) -> BernsteinSpec {
        if self.mu == 0.0 {
            BernsteinSpec::stable(self.alpha)
        } else {
            BernsteinSpec::tempered(self.alpha, self.mu)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_c >= 1.0) || !self.scale_c.is_finite() {
            return domain(format!(
                "scale_c must be finite and >= 1, got {}",
                self.scale_c
            ));
        }
        if self.jump_mode != JumpMode::Unit {
            if !(self.alpha > 0.0 && self.alpha < 1.0) {
                return domain(format!("alpha must lie in (0, 1), got {}", self.alpha));
            }
            self.spec().validate()?;
        }
        if self.jump_mode == JumpMode::Pareto && self.mu != 0.0 {
            return domain("Pareto waiting times have no tempering");
        }
        Ok(())
    }
}

/// Pareto scale `(c Gamma(1-alpha))^{-1/alpha}`.
pub fn pareto_scale(alpha: f64, c: f64) -> f64 {
    (c * gamma(1.0 - alpha)).powf(-1.0 / alpha)
}

enum Waiting {
    Exact(IncrementSampler),
    Pareto { x0: f64, inv_alpha: f64 },
    Unit,
}

impl Waiting {
    fn new(config: &CtrwConfig) -> Result<Self> {
        Ok(match config.jump_mode {
            JumpMode::ExactStable => {
                Waiting::Exact(IncrementSampler::new(&config.spec(), 1.0 / config.scale_c)?)
            }
            JumpMode::Pareto => Waiting::Pareto {
                x0: pareto_scale(config.alpha, config.scale_c),
                inv_alpha: 1.0 / config.alpha,
            },
            JumpMode::Unit => Waiting::Unit,
        })
    }

    fn next<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Waiting::Exact(s) => s.next(rng),
            Waiting::Pareto { x0, inv_alpha } => {
                let u: f64 = Open01.sample(rng);
                x0 * u.powf(-inv_alpha)
            }
            Waiting::Unit => 1.0,
        }
    }
}

/// `N_t = max{n : J_1 + ... + J_n <= t}` at each ascending time.
pub fn renewal_counts<R: Rng + ?Sized>(
    config: &CtrwConfig,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<u64>> {
    config.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| !(*t >= 0.0)) {
        return domain("times must be ascending and >= 0");
    }
    let waiting = Waiting::new(config)?;
    let mut out = Vec::with_capacity(times.len());
    let mut n = 0u64;
    let mut clock = 0.0;
    let mut next = waiting.next(rng);
    for &t in times {
        while clock + next <= t {
            clock += next;
            n += 1;
            if n > MAX_RENEWALS {
                return Err(Error::RunawayRenewal(n));
            }
            next = waiting.next(rng);
        }
        out.push(n);
    }
    Ok(out)
}

/// `sum_{j <= n} Y_j`, drawn directly from the law of the sum.
pub fn jump_sum<R: Rng + ?Sized>(config: &CtrwConfig, n: u64, rng: &mut R) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let c = config.scale_c;
    match config.y_mode {
        YMode::Rademacher => {
            let up = Binomial::new(n, 0.5).expect("p = 1/2").sample(rng);
            (2.0 * up as f64 - n as f64) / c.sqrt()
        }
        YMode::Gaussian => {
            let z: f64 = StandardNormal.sample(rng);
            (n as f64 / c).sqrt() * z
        }
        YMode::Zero => 0.0,
    }
}

/// `E[e^{i k (Y_1 + ... + Y_n)}]`, exact for the configured jump law.
pub fn conditional_moment(config: &CtrwConfig, n: u64, k: u32) -> f64 {
    let c = config.scale_c;
    let k = k as f64;
    match config.y_mode {
        YMode::Rademacher => (k / c.sqrt()).cos().powf(n as f64),
        YMode::Gaussian => (-0.5 * k * k * n as f64 / c).exp(),
        YMode::Zero => 1.0,
    }
}

/// One walk observed at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtrwSample {
    pub angle: Angle,
    pub renewals: u64,
}

/// `wrap(sum_{j <= N_t} Y_j)`; waiting times use the `JUMPS` sub-stream and
/// the jumps the `SECOND` one.
pub fn simulate_ctrw(config: &CtrwConfig, t: f64, stream: &RngStream) -> Result<CtrwSample> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be > 0, got {t}"));
    }
    let n = renewal_counts(config, &[t], &mut stream.substream(purpose::JUMPS, 0).rng())?[0];
    let y = jump_sum(config, n, &mut stream.substream(purpose::SECOND, 0).rng());
    Ok(CtrwSample {
        angle: wrap(y),
        renewals: n,
    })
}

/// `n` independent walks at `t`.
pub fn sample_ctrw(
    config: &CtrwConfig,
    t: f64,
    n: usize,
    stream: &RngStream,
) -> Result<Vec<Angle>> {
    run_paths(n, stream, |p| Ok(simulate_ctrw(config, t, p)?.angle))
}

/// `E[e^{i k Theta}]` for `k = 0..=k_max`.
pub fn empirical_circular_moments(samples: &[Angle], k_max: u32) -> Result<Vec<ComplexEstimate>> {
    (0..=k_max as i64)
        .map(|k| circular_fourier(samples, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub c: f64,
    pub k: u32,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub se: f64,
    pub dk: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `-ln(mean_k error)` against `ln c`.
    pub gamma: f64,
    /// Every error is at most the previous scale's error plus two of its
    /// standard errors.
    pub monotone: bool,
}

/// Scan of CTRW circular moments against `d_k(t)` over increasing scales.
/// Each walk contributes its conditional moment given `N_t`
/// ([`conditional_moment`]), which has the same mean as `e^{i k Theta}` and
/// no jump noise. All scales reuse the same per-walk streams.
#[allow(clippy::too_many_arguments)]
pub fn convergence_report(
    spec: &BernsteinSpec,
    t: f64,
    k_max: u32,
    scales: &[f64],
    n: usize,
    jump_mode: JumpMode,
    y_mode: YMode,
    stream: &RngStream,
) -> Result<ConvergenceReport> {
    if scales.len() < 2 || scales.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("need at least two increasing scales");
    }
    let dks: Vec<f64> = (1..=k_max).map(|k| dk(spec, k, t)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &c in scales {
        let config = CtrwConfig {
            scale_c: c,
            alpha: spec.alpha,
            mu: spec.tempering(),
            jump_mode,
            y_mode,
        };
        let counts = run_paths(n, stream, |p| {
            Ok(renewal_counts(&config, &[t], &mut p.substream(purpose::JUMPS, 0).rng())?[0])
        })?;
        for k in 1..=k_max {
            let v: Vec<f64> = counts
                .iter()
                .map(|&m| conditional_moment(&config, m, k))
                .collect();
            let e = MeanEstimate::from_samples(&v)?;
            let d = dks[k as usize - 1];
            rows.push(ConvergenceRow {
                c,
                k,
                empirical_re: e.mean,
                empirical_im: 0.0,
                se: e.se,
                dk: d,
                abs_error: (e.mean - d).abs(),
            });
        }
    }
    let km = k_max as usize;
    let mut monotone = true;
    for i in 1..scales.len() {
        for k in 0..km {
            let prev = &rows[(i - 1) * km + k];
            let cur = &rows[i * km + k];
            if cur.abs_error > prev.abs_error + 2.0 * prev.se.max(cur.se) {
                monotone = false;
            }
        }
    }
    let xs: Vec<f64> = scales.iter().map(|c| c.ln()).collect();
    let ys: Vec<f64> = (0..scales.len())
        .map(|i| {
            let m = rows[i * km..(i + 1) * km]
                .iter()
                .map(|r| r.abs_error)
                .sum::<f64>()
                / km as f64;
            m.max(f64::MIN_POSITIVE).ln()
        })
        .collect();
    Ok(ConvergenceReport {
        rows,
        gamma: -least_squares_slope(&xs, &ys),
        monotone,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Two-sample Kuiper test on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KuiperTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kuiper's `V = D+ + D-` between the empirical laws of `a` and `b`, with
/// the asymptotic `Q_KP` tail at the effective size `n m / (n + m)`.
pub fn kuiper_two_sample(a: &[Angle], b: &[Angle]) -> Result<KuiperTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut x: Vec<f64> = a.iter().map(|v| v.value()).collect();
    let mut y: Vec<f64> = b.iter().map(|v| v.value()).collect();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut d_plus, mut d_minus) = (0.0f64, 0.0f64);
    while i < x.len() || j < y.len() {
        let v = match (x.get(i), y.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < x.len() && x[i] == v {
            i += 1;
        }
        while j < y.len() && y[j] == v {
            j += 1;
        }
        let diff = i as f64 / n - j as f64 / m;
        d_plus = d_plus.max(diff);
        d_minus = d_minus.max(-diff);
    }
    let statistic = d_plus + d_minus;
    let ne = n * m / (n + m);
    let lambda = (ne.sqrt() + 0.155 + 0.24 / ne.sqrt()) * statistic;
    Ok(KuiperTest {
        statistic,
        p_value: kuiper_q(lambda),
    })
}

/// `Q_KP(lambda) = 2 sum_j (4 j^2 lambda^2 - 1) e^{-2 j^2 lambda^2}`.
pub fn kuiper_q(lambda: f64) -> f64 {
    if lambda < 0.4 {
        return 1.0;
    }
    let l2 = lambda * lambda;
    let mut s = 0.0;
    for j in 1..=100 {
        let j2 = (j * j) as f64;
        let term = (4.0 * j2 * l2 - 1.0) * (-2.0 * j2 * l2).exp();
        s += term;
        if term.abs() < 1e-16 * s.abs() {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `wrap(B_1(scale |B_2(t)|))` with independent Brownian motions.
pub fn sample_iterated_bm(t: f64, scale: f64, stream: &RngStream) -> f64 {
    let mut rng = stream.rng();
    let b2: f64 = StandardNormal.sample(&mut rng);
    let b1: f64 = StandardNormal.sample(&mut rng);
    let inner = scale * t.sqrt() * b2.abs();
    (inner.sqrt() * b1).rem_euclid(TAU)
}
