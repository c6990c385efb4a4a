use fracdisk::bernstein::BernsteinSpec;
use fracdisk::ctrw::{
    convergence_report, empirical_circular_moments, sample_ctrw, ConvergenceReport, CtrwConfig,
    JumpMode, YMode,
};
use fracdisk::kernels::{build_table, build_table_ksq, Method};
use fracdisk::mc::ComplexEstimate;
use fracdisk::moments::{
    circular_moment, circular_moment_mc, convention_report, mixed_moment_integral, mixed_moment_mc,
    mixed_moment_stable, ConventionRow, MomentReport, SeriesValue,
};
use fracdisk::solver::{
    evaluate_solution_nd, solution_csv, solution_grid, DiskPoint, NdTaylorCoeffs, TaylorCoeffs,
};
use fracdisk::subsim::RngStream;
use fracdisk::wrapped::FourierDensity;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{emit_csv, emit_json, resolve_seed, Failure, Outcome};

fn default_k_max() -> u32 {
    5
}
fn default_method() -> Method {
    Method::Auto
}
fn default_radii() -> Vec<f64> {
    vec![1.0]
}
fn default_n_phi() -> usize {
    16
}
fn default_density_points() -> usize {
    512
}
fn default_density_k_max() -> u32 {
    512
}
fn default_r() -> Vec<u32> {
    vec![1, 2, 3]
}
fn default_times() -> Vec<f64> {
    vec![1.0]
}
fn default_paths() -> usize {
    100_000
}
fn default_step_dt() -> f64 {
    1e-3
}
fn default_j_max() -> usize {
    400
}
fn default_quad_tol() -> f64 {
    1e-10
}
fn default_scales() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}
fn default_t() -> f64 {
    1.0
}
fn default_ctrw_k_max() -> u32 {
    3
}
fn default_jump_mode() -> JumpMode {
    JumpMode::ExactStable
}
fn default_y_mode() -> YMode {
    YMode::Rademacher
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DkConfig {
    pub spec: BernsteinSpec,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    pub times: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub output: Option<String>,
}

pub fn dk(cfg: DkConfig) -> Outcome<()> {
    let table = build_table(&cfg.spec, cfg.k_max, &cfg.times, cfg.method)?;
    emit_csv(cfg.output.as_deref(), &table.to_csv(), &cfg)
}

/// A Taylor coefficient, real or `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Real(f64),
    Complex([f64; 2]),
}

impl Coef {
    fn value(self) -> Complex64 {
        match self {
            Coef::Real(x) => Complex64::new(x, 0.0),
            Coef::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdTerm {
    pub powers: Vec<u32>,
    pub a: Coef,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NdBlock {
    pub terms: Vec<NdTerm>,
    /// One `[r, phi]` per variable.
    pub point: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub spec: BernsteinSpec,
    #[serde(default)]
    pub coeffs: Vec<Coef>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    pub times: Vec<f64>,
    #[serde(default)]
    pub nd: Option<NdBlock>,
    #[serde(default)]
    pub output: Option<String>,
}

pub fn solve(cfg: SolveConfig) -> Outcome<()> {
    cfg.spec.validate()?;
    let csv = match &cfg.nd {
        Some(nd) => solve_nd(&cfg.spec, nd, &cfg.times)?,
        None => {
            if cfg.coeffs.is_empty() {
                return Err(Failure::Config(
                    "solve needs `coeffs` or an `nd` block".into(),
                ));
            }
            let f = TaylorCoeffs::new(cfg.coeffs.iter().map(|c| c.value()).collect())?;
            let mut points = Vec::with_capacity(cfg.radii.len() * cfg.n_phi);
            for &r in &cfg.radii {
                for j in 0..cfg.n_phi {
                    let phi = std::f64::consts::TAU * j as f64 / cfg.n_phi as f64;
                    points.push(DiskPoint::new(r, phi)?);
                }
            }
            let table = build_table(&cfg.spec, f.degree(), &cfg.times, Method::Auto)?;
            solution_csv(&solution_grid(&f, &points, &cfg.times, &table)?)
        }
    };
    emit_csv(cfg.output.as_deref(), &csv, &cfg)
}

fn solve_nd(spec: &BernsteinSpec, nd: &NdBlock, times: &[f64]) -> Outcome<String> {
    let mut f = NdTaylorCoeffs::new(nd.point.len())?;
    for term in &nd.terms {
        f = f.with(&term.powers, term.a.value())?;
    }
    let z: Vec<DiskPoint> = nd
        .point
        .iter()
        .map(|&[r, phi]| DiskPoint::new(r, phi))
        .collect::<Result<_, _>>()?;
    let table = build_table_ksq(spec, &f.k_sq_rows(), times, Method::Auto)?;
    let mut out = String::from("t,re_u,im_u\n");
    for &t in times {
        let u = evaluate_solution_nd(&f, &z, t, &table)?;
        out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", t, u.re, u.im));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub spec: BernsteinSpec,
    pub t: f64,
    #[serde(default = "default_density_points")]
    pub points: usize,
    #[serde(default = "default_density_k_max")]
    pub k_max: u32,
    #[serde(default)]
    pub output: Option<String>,
}

pub fn density(cfg: DensityConfig) -> Outcome<()> {
    if !(cfg.t > 0.0) || cfg.points == 0 {
        return Err(Failure::Config(
            "density needs t > 0 and points >= 1".into(),
        ));
    }
    let table = build_table(&cfg.spec, cfg.k_max, &[cfg.t], Method::Auto)?;
    let fd = FourierDensity::from_table(&table, cfg.t)?;
    eprintln!(
        "fourier terms: {}, truncation bound: {:e}",
        fd.terms(),
        fd.bound
    );
    emit_csv(cfg.output.as_deref(), &fd.to_csv(cfg.points), &cfg)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsConfig {
    pub spec: BernsteinSpec,
    #[serde(default = "default_r")]
    pub r: Vec<u32>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_step_dt")]
    pub step_dt: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Serialize)]
struct MomentsOut {
    records: Vec<MomentReport>,
}

/// Records for every `(r, t)`; the paths at `times[j]` use stream `j`, so
/// every `r` at one time shares its paths.
pub fn moments(mut cfg: MomentsConfig) -> Outcome<()> {
    let seed = resolve_seed(cfg.seed)?;
    cfg.seed = Some(seed);
    let r_max = cfg.r.iter().copied().max().unwrap_or(0);
    let table = build_table(&cfg.spec, r_max, &cfg.times, Method::Auto)?;
    let mut records = Vec::new();
    for (j, &t) in cfg.times.iter().enumerate() {
        let stream = RngStream::new(seed, j as u64);
        for &r in &cfg.r {
            let analytic = circular_moment(&table, r, t)?;
            let est = circular_moment_mc(&cfg.spec, r, t, cfg.paths, cfg.step_dt, &stream)?;
            let allowance = 0.5 * (r as f64).powi(2) * cfg.step_dt;
            records.push(MomentReport::new(
                "circular_moment",
                &[("r", r as f64), ("t", t)],
                Some(analytic),
                est.re(),
                allowance,
            ));
        }
    }
    emit_json(cfg.output.as_deref(), &cfg, &MomentsOut { records })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedConfig {
    pub spec: BernsteinSpec,
    pub s: f64,
    pub t: f64,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_step_dt")]
    pub step_dt: f64,
    #[serde(default = "default_j_max")]
    pub j_max: usize,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Serialize)]
struct MixedOut {
    series: Option<SeriesValue>,
    integral: Option<f64>,
    series_integral_gap: Option<f64>,
    mc: MomentReport,
}

/// The closed forms exist for the stable family only; otherwise just the
/// Monte Carlo record is produced.
pub fn mixed(mut cfg: MixedConfig) -> Outcome<()> {
    let seed = resolve_seed(cfg.seed)?;
    cfg.seed = Some(seed);
    cfg.spec.validate()?;
    let stream = RngStream::new(seed, 0);
    let mut mc = mixed_moment_mc(&cfg.spec, cfg.s, cfg.t, cfg.paths, cfg.step_dt, &stream)?;
    let (series, integral) = if cfg.spec.is_stable_like() {
        let a = cfg.spec.alpha;
        (
            Some(mixed_moment_stable(a, cfg.s, cfg.t, cfg.j_max)?),
            Some(mixed_moment_integral(a, cfg.s, cfg.t, cfg.quad_tol)?),
        )
    } else {
        (None, None)
    };
    if let (Some(sv), None) = (series, mc.analytic) {
        mc = mc.with_analytic(sv.value);
    }
    let gap = series.zip(integral).map(|(s, i)| (s.value - i).abs());
    emit_json(
        cfg.output.as_deref(),
        &cfg,
        &MixedOut {
            series,
            integral,
            series_integral_gap: gap,
            mc,
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtrwCmdConfig {
    pub spec: BernsteinSpec,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_ctrw_k_max")]
    pub k_max: u32,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_jump_mode")]
    pub jump_mode: JumpMode,
    #[serde(default = "default_y_mode")]
    pub y_mode: YMode,
    /// Raw walks at the largest scale for `E[e^{ik Theta}]`, `k = 0..=k_max`.
    #[serde(default)]
    pub raw_samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Serialize)]
struct RawMoment {
    k: u32,
    re: f64,
    im: f64,
    se_re: f64,
    se_im: f64,
}

#[derive(Serialize)]
struct CtrwOut {
    report: ConvergenceReport,
    raw_moments: Option<Vec<RawMoment>>,
}

pub fn ctrw(mut cfg: CtrwCmdConfig) -> Outcome<()> {
    let seed = resolve_seed(cfg.seed)?;
    cfg.seed = Some(seed);
    let report = convergence_report(
        &cfg.spec,
        cfg.t,
        cfg.k_max,
        &cfg.scales,
        cfg.paths,
        cfg.jump_mode,
        cfg.y_mode,
        &RngStream::new(seed, 0),
    )?;
    let raw_moments = if cfg.raw_samples > 0 {
        let c = *cfg.scales.last().expect("checked by the report");
        let walk = CtrwConfig {
            scale_c: c,
            alpha: cfg.spec.alpha,
            mu: cfg.spec.tempering(),
            jump_mode: cfg.jump_mode,
            y_mode: cfg.y_mode,
        };
        let angles = sample_ctrw(&walk, cfg.t, cfg.raw_samples, &RngStream::new(seed, 1))?;
        let m = empirical_circular_moments(&angles, cfg.k_max)?;
        Some(
            m.iter()
                .enumerate()
                .map(|(k, e): (usize, &ComplexEstimate)| RawMoment {
                    k: k as u32,
                    re: e.mean.re,
                    im: e.mean.im,
                    se_re: e.se_re,
                    se_im: e.se_im,
                })
                .collect(),
        )
    } else {
        None
    };
    emit_json(
        cfg.output.as_deref(),
        &cfg,
        &CtrwOut {
            report,
            raw_moments,
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConventionConfig {
    pub spec: BernsteinSpec,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_r")]
    pub r: Vec<u32>,
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_step_dt")]
    pub step_dt: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Serialize)]
struct ConventionOut {
    rows: Vec<ConventionRow>,
}

pub fn convention(mut cfg: ConventionConfig) -> Outcome<()> {
    let seed = resolve_seed(cfg.seed)?;
    cfg.seed = Some(seed);
    let rows = convention_report(
        &cfg.spec,
        cfg.t,
        &cfg.r,
        cfg.paths,
        cfg.step_dt,
        &RngStream::new(seed, 0),
    )?;
    emit_json(cfg.output.as_deref(), &cfg, &ConventionOut { rows })
}
