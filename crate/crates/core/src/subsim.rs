//! Subordinator sampling, first-passage inversion and time-changed Brownian
//! motion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinSpec;
use crate::error::{Error, Result};

/// Default grid spacing of the operational time.
pub const DEFAULT_STEP_DT: f64 = 1e-3;
/// Smallest tolerated rejection acceptance of the tempered sampler.
pub const MIN_ACCEPTANCE: f64 = 0.1;

/// Sub-stream purposes.
pub mod purpose {
    pub const PATH: u64 = 1;
    pub const CLOCK: u64 = 2;
    pub const BROWNIAN: u64 = 3;
    pub const JUMPS: u64 = 4;
    pub const SECOND: u64 = 5;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Reproducible random stream: identical `(seed, stream_id)` give identical
/// sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }

    /// Child stream for `(purpose, index)`, a counter-based split of this one.
    pub fn substream(&self, purpose: u64, index: u64) -> Self {
        let id = splitmix(splitmix(self.stream_id ^ splitmix(purpose)).wrapping_add(index));
        Self {
            seed: self.seed,
            stream_id: id,
        }
    }

    /// Per-path stream used by the Monte Carlo drivers.
    pub fn path(&self, index: u64) -> Self {
        self.substream(purpose::PATH, index)
    }
}

/// One-sided stable increment with `E[e^{-theta X}] = e^{-dt theta^alpha}`
/// (Kanter's representation; `alpha = 1/2` uses `1/(2 Z^2)`). `alpha = 1`
/// returns `dt`.
pub fn sample_stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return dt;
    }
    dt.powf(1.0 / alpha) * stable_unit(alpha, rng)
}

fn stable_unit<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 0.5 {
        let z: f64 = StandardNormal.sample(rng);
        return 0.5 / (z * z);
    }
    let u01: f64 = Open01.sample(rng);
    let u = std::f64::consts::PI * u01;
    let w: f64 = Exp1.sample(rng);
    let ln_x = (alpha * u).sin().ln() - (u.sin().ln()) / alpha
        + (1.0 - alpha) / alpha * (((1.0 - alpha) * u).sin().ln() - w.ln());
    ln_x.exp()
}

/// Tempered increment with `E[e^{-theta X}] = e^{-dt ((theta+mu)^alpha - mu^alpha)}`,
/// by rejection of stable draws with acceptance `e^{-mu X}`.
pub fn sample_tempered_increment<R: Rng + ?Sized>(
    alpha: f64,
    mu: f64,
    dt: f64,
    rng: &mut R,
) -> Result<f64> {
    if mu == 0.0 {
        return Ok(sample_stable_increment(alpha, dt, rng));
    }
    let acceptance = tempered_acceptance(alpha, mu, dt);
    if acceptance < MIN_ACCEPTANCE {
        return Err(Error::AcceptanceRate { acceptance, dt });
    }
    Ok(tempered_draw(alpha, mu, dt, rng).0)
}

/// Expected acceptance rate of the tempered rejection sampler.
pub fn tempered_acceptance(alpha: f64, mu: f64, dt: f64) -> f64 {
    (-dt * mu.powf(alpha)).exp()
}

/// Accepted draw together with the number of proposals used.
pub fn tempered_draw<R: Rng + ?Sized>(alpha: f64, mu: f64, dt: f64, rng: &mut R) -> (f64, u64) {
    tempered_scaled(alpha, mu, dt.powf(1.0 / alpha), rng)
}

fn tempered_scaled<R: Rng + ?Sized>(alpha: f64, mu: f64, scale: f64, rng: &mut R) -> (f64, u64) {
    let mut tries = 0;
    loop {
        tries += 1;
        let x = scale * stable_unit(alpha, rng);
        let v: f64 = rng.random();
        if v < (-mu * x).exp() {
            return (x, tries);
        }
    }
}

/// Generator of the grid increments `H(s + dt) - H(s)`, drift included.
/// Tempered steps whose acceptance would fall below [`MIN_ACCEPTANCE`] are
/// split into `2^r` exact sub-increments.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    alpha: f64,
    mu: f64,
    step_dt: f64,
    sub_dt: f64,
    // sub_dt^{1/alpha}
    scale: f64,
    substeps: u32,
    drift: f64,
    jumps: bool,
}

impl IncrementSampler {
    pub fn new(spec: &BernsteinSpec, step_dt: f64) -> Result<Self> {
        spec.validate()?;
        if !(step_dt > 0.0) || !step_dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step_dt must be > 0, got {step_dt}"
            )));
        }
        let mu = spec.tempering();
        let mut substeps = 1u32;
        let mut sub_dt = step_dt;
        while mu > 0.0 && tempered_acceptance(spec.alpha, mu, sub_dt) < MIN_ACCEPTANCE {
            substeps *= 2;
            sub_dt = step_dt / substeps as f64;
            if substeps > 1 << 20 {
                return Err(Error::AcceptanceRate {
                    acceptance: tempered_acceptance(spec.alpha, mu, sub_dt),
                    dt: sub_dt,
                });
            }
        }
        Ok(Self {
            alpha: spec.alpha,
            mu,
            step_dt,
            sub_dt,
            scale: if spec.alpha == 1.0 {
                sub_dt
            } else {
                sub_dt.powf(1.0 / spec.alpha)
            },
            substeps,
            drift: spec.drift_b * step_dt,
            jumps: true,
        })
    }

    /// Test hook: keep only the drift part of each increment.
    #[doc(hidden)]
    pub fn without_jumps(mut self) -> Self {
        self.jumps = false;
        self
    }

    pub fn step_dt(&self) -> f64 {
        self.step_dt
    }

    pub fn substeps(&self) -> u32 {
        self.substeps
    }

    /// `H(s) = rate * s` when the clock has no randomness (alpha = 1 or the
    /// drift-only hook).
    pub fn deterministic_rate(&self) -> Option<f64> {
        if !self.jumps {
            Some(self.drift / self.step_dt)
        } else if self.alpha == 1.0 {
            Some(1.0 + self.drift / self.step_dt)
        } else {
            None
        }
    }

    pub fn next<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if !self.jumps {
            return self.drift;
        }
        let mut x = 0.0;
        for _ in 0..self.substeps {
            x += if self.alpha == 1.0 {
                self.sub_dt
            } else if self.mu == 0.0 {
                self.scale * stable_unit(self.alpha, rng)
            } else {
                tempered_scaled(self.alpha, self.mu, self.scale, rng).0
            };
        }
        x + self.drift
    }
}

/// Discretized subordinator trajectory `values[j] = H(j step_dt)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorPath {
    pub step_dt: f64,
    pub values: Vec<f64>,
    pub drift_b: f64,
}

impl SubordinatorPath {
    /// CSV dump with header `s,H`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,H\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", j as f64 * self.step_dt, v));
        }
        out
    }
}

/// Grid path of `H_g`, extended until it exceeds `horizon`.
pub fn sample_subordinator_path<R: Rng + ?Sized>(
    spec: &BernsteinSpec,
    horizon: f64,
    step_dt: f64,
    rng: &mut R,
) -> Result<SubordinatorPath> {
    let sampler = IncrementSampler::new(spec, step_dt)?;
    path_from_sampler(&sampler, spec.drift_b, horizon, rng)
}

/// Path from an explicit increment generator.
pub fn path_from_sampler<R: Rng + ?Sized>(
    sampler: &IncrementSampler,
    drift_b: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<SubordinatorPath> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "horizon must be > 0, got {horizon}"
        )));
    }
    let mut values = vec![0.0];
    let mut h = 0.0;
    while h <= horizon {
        let x = sampler.next(rng);
        if !(x > 0.0) {
            return Err(Error::InvalidArgument(
                "subordinator increments must be positive".into(),
            ));
        }
        h += x;
        values.push(h);
    }
    Ok(SubordinatorPath {
        step_dt: sampler.step_dt(),
        values,
        drift_b,
    })
}

/// First passage `step_dt * min{j : values[j] > t}`, exactly 0 at `t = 0`.
/// The grid bias is at most `step_dt`.
pub fn inverse_at(path: &SubordinatorPath, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let j = path.values.partition_point(|&v| v <= t);
    if j == path.values.len() {
        return Err(Error::HorizonExceeded {
            t,
            last: *path.values.last().unwrap_or(&0.0),
        });
    }
    Ok(j as f64 * path.step_dt)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("need at least one time".into()));
    }
    if times.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "times must be finite and >= 0".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    Ok(())
}

/// `E_g(t_i)` along a single streamed path (bit-identical to building the
/// path and calling [`inverse_at`] with the same generator). Deterministic
/// clocks return `t / rate` exactly.
pub fn sample_inverse<R: Rng + ?Sized>(
    spec: &BernsteinSpec,
    times: &[f64],
    step_dt: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_times(times)?;
    let sampler = IncrementSampler::new(spec, step_dt)?;
    inverse_from_sampler(&sampler, times, rng)
}

pub fn inverse_from_sampler<R: Rng + ?Sized>(
    sampler: &IncrementSampler,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if let Some(rate) = sampler.deterministic_rate().filter(|r| *r > 0.0) {
        return Ok(times.iter().map(|t| t / rate).collect());
    }
    let mut out = Vec::with_capacity(times.len());
    let mut h = 0.0;
    let mut j: u64 = 0;
    for &t in times {
        if t == 0.0 {
            out.push(0.0);
            continue;
        }
        while h <= t {
            h += sampler.next(rng);
            j += 1;
        }
        out.push(j as f64 * sampler.step_dt());
    }
    Ok(out)
}

/// `B(E_g(t_i))`, with the clock driven by the `CLOCK` sub-stream and the
/// Brownian motion by the `BROWNIAN` sub-stream of `stream`.
pub fn sample_timechanged_bm(
    spec: &BernsteinSpec,
    times: &[f64],
    step_dt: f64,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    let mut clock = stream.substream(purpose::CLOCK, 0).rng();
    let mut brownian = stream.substream(purpose::BROWNIAN, 0).rng();
    sample_timechanged_bm_with(spec, times, step_dt, &mut clock, &mut brownian)
}

/// [`sample_timechanged_bm`] with explicit clock and Brownian generators.
pub fn sample_timechanged_bm_with<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    spec: &BernsteinSpec,
    times: &[f64],
    step_dt: f64,
    clock: &mut R1,
    brownian: &mut R2,
) -> Result<Vec<f64>> {
    let e = sample_inverse(spec, times, step_dt, clock)?;
    Ok(brownian_along(&e, brownian))
}

/// Brownian motion evaluated at the nondecreasing times `e`.
pub fn brownian_along<R: Rng + ?Sized>(e: &[f64], rng: &mut R) -> Vec<f64> {
    let mut b = 0.0;
    let mut prev = 0.0;
    e.iter()
        .map(|&s| {
            let z: f64 = StandardNormal.sample(rng);
            b += (s - prev).max(0.0).sqrt() * z;
            prev = s;
            b
        })
        .collect()
}
