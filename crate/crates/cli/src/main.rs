//! `fracdisk`: kernels, solutions, densities and Monte Carlo reports for
//! time-changed circular Brownian motion.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies its
//! flags on top and rejects unknown fields. Grids are written as CSV with a
//! `<out>.config.json` sidecar, reports as JSON with the resolved config
//! embedded. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracdisk::bernstein::Family;
use fracdisk::ctrw::{JumpMode, YMode};
use fracdisk::kernels::Method;

use config::{init_threads, Layered, Outcome};

#[derive(Parser)]
#[command(
    name = "fracdisk",
    version,
    about = "Fractional dynamics on the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kernel table d_k(t) as CSV `k,t,dk,method`.
    Dk(DkArgs),
    /// Solution field of the Cauchy problem as CSV.
    Solve(SolveArgs),
    /// Wrapped density on the circle as CSV `phi,mu`.
    Density(DensityArgs),
    /// Circular moments against Monte Carlo, as JSON records.
    Moments(MomentsArgs),
    /// Mixed moment by series, quadrature and Monte Carlo.
    Mixed(MixedArgs),
    /// CTRW convergence scan over increasing scales.
    Ctrw(CtrwArgs),
    /// Compares the r^2/2 and r/2 moment conventions with simulation.
    Convention(ConventionArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (standard output when absent).
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    drift_b: Option<f64>,
}

#[derive(Args)]
struct Stochastic {
    /// Seed; falls back to FRACDISK_SEED, then a fresh one.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct DkArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Real Taylor coefficients a_0, a_1, ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    k_max: Option<u32>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: Stochastic,
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    step_dt: Option<f64>,
}

#[derive(Args)]
struct MixedArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: Stochastic,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    step_dt: Option<f64>,
    #[arg(long)]
    j_max: Option<usize>,
}

#[derive(Args)]
struct CtrwArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: Stochastic,
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long, value_parser = parse_jump_mode)]
    jump_mode: Option<JumpMode>,
    #[arg(long, value_parser = parse_y_mode)]
    y_mode: Option<YMode>,
    #[arg(long)]
    raw_samples: Option<usize>,
}

#[derive(Args)]
struct ConventionArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mc: Stochastic,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    #[arg(long)]
    step_dt: Option<f64>,
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> Result<Family, String> {
    parse_enum(s)
}

fn parse_method(s: &str) -> Result<Method, String> {
    parse_enum(s)
}

fn parse_jump_mode(s: &str) -> Result<JumpMode, String> {
    parse_enum(s)
}

fn parse_y_mode(s: &str) -> Result<YMode, String> {
    parse_enum(s)
}

fn layered(c: &Common) -> Outcome<Layered> {
    let mut l = Layered::load(c.config.as_deref())?;
    l.set_spec("family", c.family);
    l.set_spec("alpha", c.alpha);
    l.set_spec("mu", c.mu);
    l.set_spec("drift_b", c.drift_b);
    l.set("output", c.out.clone());
    Ok(l)
}

fn with_mc(mut l: Layered, mc: &Stochastic) -> Layered {
    l.set("seed", mc.seed);
    l.set("paths", mc.paths);
    l
}

fn run(cmd: Cmd) -> Outcome<()> {
    init_threads()?;
    match cmd {
        Cmd::Dk(a) => {
            let mut l = layered(&a.common)?;
            l.set("k_max", a.k_max);
            l.set("times", a.times);
            l.set("method", a.method);
            commands::dk(l.resolve()?)
        }
        Cmd::Solve(a) => {
            let mut l = layered(&a.common)?;
            l.set("coeffs", a.coeffs);
            l.set("radii", a.radii);
            l.set("n_phi", a.n_phi);
            l.set("times", a.times);
            commands::solve(l.resolve()?)
        }
        Cmd::Density(a) => {
            let mut l = layered(&a.common)?;
            l.set("t", a.t);
            l.set("points", a.points);
            l.set("k_max", a.k_max);
            commands::density(l.resolve()?)
        }
        Cmd::Moments(a) => {
            let mut l = with_mc(layered(&a.common)?, &a.mc);
            l.set("r", a.r);
            l.set("times", a.times);
            l.set("step_dt", a.step_dt);
            commands::moments(l.resolve()?)
        }
        Cmd::Mixed(a) => {
            let mut l = with_mc(layered(&a.common)?, &a.mc);
            l.set("s", a.s);
            l.set("t", a.t);
            l.set("step_dt", a.step_dt);
            l.set("j_max", a.j_max);
            commands::mixed(l.resolve()?)
        }
        Cmd::Ctrw(a) => {
            let mut l = with_mc(layered(&a.common)?, &a.mc);
            l.set("scales", a.scales);
            l.set("t", a.t);
            l.set("k_max", a.k_max);
            l.set("jump_mode", a.jump_mode);
            l.set("y_mode", a.y_mode);
            l.set("raw_samples", a.raw_samples);
            if !l.has("spec") {
                l.set_spec("alpha", Some(0.5));
            }
            commands::ctrw(l.resolve()?)
        }
        Cmd::Convention(a) => {
            let mut l = with_mc(layered(&a.common)?, &a.mc);
            l.set("t", a.t);
            l.set("r", a.r);
            l.set("step_dt", a.step_dt);
            commands::convention(l.resolve()?)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracdisk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
