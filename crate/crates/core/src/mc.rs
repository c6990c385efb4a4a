//! Deterministic parallel Monte Carlo drivers and sample statistics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsim::RngStream;

/// Runs `f` for every path index in parallel; results come back in index
/// order, so any later reduction is independent of the thread count.
pub fn run_paths<T, F>(n: usize, stream: &RngStream, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&RngStream) -> Result<T> + Sync,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(&stream.path(i)))
        .collect()
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, se, n })
    }

    /// `|mean - target| <= k se + allowance`.
    pub fn within(&self, target: f64, k: f64, allowance: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + allowance
    }
}

/// Complex sample mean with component-wise standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: usize,
}

impl ComplexEstimate {
    pub fn from_samples(xs: &[Complex64]) -> Result<Self> {
        let re: Vec<f64> = xs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = xs.iter().map(|z| z.im).collect();
        let r = MeanEstimate::from_samples(&re)?;
        let i = MeanEstimate::from_samples(&im)?;
        Ok(Self {
            mean: Complex64::new(r.mean, i.mean),
            se_re: r.se,
            se_im: i.se,
            n: r.n,
        })
    }

    pub fn re(&self) -> MeanEstimate {
        MeanEstimate {
            mean: self.mean.re,
            se: self.se_re,
            n: self.n,
        }
    }

    pub fn im(&self) -> MeanEstimate {
        MeanEstimate {
            mean: self.mean.im,
            se: self.se_im,
            n: self.n,
        }
    }

    /// Both components within `k` standard errors (plus allowance) of `target`.
    pub fn within(&self, target: Complex64, k: f64, allowance: f64) -> bool {
        self.re().within(target.re, k, allowance) && self.im().within(target.im, k, allowance)
    }
}

/// Column means of equally sized sample rows.
pub fn column_estimates(rows: &[Vec<f64>]) -> Result<Vec<MeanEstimate>> {
    let first = rows.first().ok_or(Error::EmptySample)?;
    (0..first.len())
        .map(|c| {
            let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            MeanEstimate::from_samples(&col)
        })
        .collect()
}
