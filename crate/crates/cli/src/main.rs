//! `chua-relay`: simulations, spectrum reports, cycle searches, parameter
//! scans and regularized runs for the relay system.
//!
//! Exit codes: 0 success, 1 negative or diverged analysis, 2 usage error.

mod config;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chua_relay::flow::{EventKind, IntegratorConfig, Method};
use chua_relay::poincare::{find_cycle, SectionPoint, SEED_MARGIN};
use chua_relay::regularize::{
    find_fast_cycle, integrate_regularized, regularized_equilibrium, FastState, TransitionKind, DEFAULT_EPS,
    DEFAULT_EPS0,
};
use chua_relay::scan::{scan_grid, GridSpec};
use chua_relay::{integrate, Error, Params, SpectrumReport, State};

use config::{parse_range, parse_vector, ConfigFile};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Negative(String),
    Io(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Negative(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Negative(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o error: {e:#}"),
        }
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser)]
#[command(name = "chua-relay", version, about = "Relay Chua system: simulation and limit-cycle analysis")]
struct Cli {
    /// key=value file supplying defaults for any long flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and write CSV plus a JSON events sidecar
    Simulate(SimulateArgs),
    /// Spectrum of T and the parameter predicates, as JSON
    Spectrum(ParamArgs),
    /// Fixed-point search of the first return map, as JSON
    Cycle(CycleArgs),
    /// Predicates over an (alpha, beta) grid, as CSV or JSON
    Scan(ScanArgs),
    /// Regularized system: trajectory and band cycle, or the interior equilibrium
    Regularized(RegularizedArgs),
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// output file (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// initial state x1,x2,x3
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// exact | rk4
    #[arg(long)]
    method: Option<String>,
    /// RK4 step, or output spacing for the exact method
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    crossing_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    equilibrium_tol: Option<f64>,
}

#[derive(Args)]
struct CycleArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// section point x1,x2
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct ScanArgs {
    /// min:max:n
    #[arg(long)]
    alpha_range: Option<String>,
    /// min:max:n
    #[arg(long)]
    beta_range: Option<String>,
    /// run a budgeted cycle search per cell
    #[arg(long)]
    cycles: bool,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegularizedArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps0: Option<f64>,
    /// cubic | smooth | unit-slope
    #[arg(long)]
    kind: Option<String>,
    /// report the interior equilibrium instead of running a trajectory
    #[arg(long)]
    equilibrium: bool,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    /// RK4 step (default eps/10)
    #[arg(long, allow_hyphen_values = true)]
    step: Option<f64>,
    #[arg(long)]
    sample_every: Option<usize>,
}

fn params(cfg: &ConfigFile, a: &ParamArgs) -> Result<Params, CliError> {
    let alpha = cfg.require("alpha", a.alpha)?;
    let beta = cfg.require("beta", a.beta)?;
    Params::new(alpha, beta).map_err(usage)
}

fn out_path(cfg: &ConfigFile, flag: &Option<PathBuf>) -> Result<Option<PathBuf>, CliError> {
    cfg.pick("out", flag.clone())
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{key} must be positive, got {v}")))
    }
}

#[derive(Serialize)]
struct EventsReport<'a> {
    params: Params,
    x0: State,
    events: &'a [chua_relay::flow::Event],
}

fn cmd_simulate(cfg: &ConfigFile, a: &SimulateArgs) -> Result<(), CliError> {
    let p = params(cfg, &a.params)?;
    let x0 = parse_vector::<3>("x0", &cfg.require::<String>("x0", a.x0.clone())?)?;
    let x0 = State::new(x0[0], x0[1], x0[2]);
    let defaults = IntegratorConfig::default();
    let method = match cfg.pick_or("method", a.method.clone(), "exact".into())?.as_str() {
        "exact" => Method::AffineExact,
        "rk4" => Method::Rk4,
        m => return Err(CliError::Usage(format!("--method must be exact or rk4, got {m}"))),
    };
    let ic = IntegratorConfig {
        method,
        step: positive("step", cfg.pick_or("step", a.step, defaults.step)?)?,
        t_max: positive("t-max", cfg.pick_or("t-max", a.t_max, defaults.t_max)?)?,
        crossing_tol: positive("crossing-tol", cfg.pick_or("crossing-tol", a.crossing_tol, defaults.crossing_tol)?)?,
        equilibrium_tol: positive(
            "equilibrium-tol",
            cfg.pick_or("equilibrium-tol", a.equilibrium_tol, defaults.equilibrium_tol)?,
        )?,
    };
    let out = out_path(cfg, &a.params.out)?;
    let traj = integrate(x0, &p, &ic).map_err(usage)?;

    output::write_samples(&mut *output::sink(out.as_deref())?, &traj.samples, None)?;
    let report = EventsReport { params: p, x0, events: &traj.events };
    match &out {
        Some(path) => output::write_json(&mut *output::sink(Some(&output::sidecar(path)))?, &report)?,
        None => output::write_json(&mut std::io::stderr(), &report)?,
    }
    match traj.final_event().map(|e| (e.kind, e.state, e.time)) {
        Some((EventKind::EnteredEscaping { tag }, x, t)) => Err(CliError::Negative(format!(
            "trajectory reached the plane outside the sewing region at t = {t} ({x}, {})",
            tag.label()
        ))),
        _ => Ok(()),
    }
}

fn cmd_spectrum(cfg: &ConfigFile, a: &ParamArgs) -> Result<(), CliError> {
    let p = params(cfg, a)?;
    let report = SpectrumReport::compute(&p);
    output::write_json(&mut *output::sink(out_path(cfg, &a.out)?.as_deref())?, &report)?;
    Ok(())
}

fn cmd_cycle(cfg: &ConfigFile, a: &CycleArgs) -> Result<(), CliError> {
    let p = params(cfg, &a.params)?;
    let [x1, x2] = parse_vector::<2>("seed", &cfg.pick_or("seed", a.seed.clone(), "10,10".into())?)?;
    if x2.abs() < 1.0 + SEED_MARGIN {
        return Err(CliError::Usage(format!("seed ({x1}, {x2}) must satisfy |x2| > 1 + {SEED_MARGIN:e}")));
    }
    let tol = positive("tol", cfg.pick_or("tol", a.tol, 1e-9)?)?;
    let max_iter = cfg.pick_or("max-iter", a.max_iter, 200)?;
    let r = find_cycle(SectionPoint { x1, x2 }, &p, tol, max_iter).map_err(usage)?;
    output::write_json(&mut *output::sink(out_path(cfg, &a.params.out)?.as_deref())?, &r)?;
    if r.converged {
        Ok(())
    } else {
        let why = r.failure.map_or_else(|| format!("no convergence within {max_iter} returns"), |e| e.to_string());
        Err(CliError::Negative(format!("cycle search diverged: {why}")))
    }
}

fn cmd_scan(cfg: &ConfigFile, a: &ScanArgs) -> Result<(), CliError> {
    let (alpha_min, alpha_max, n_alpha) =
        parse_range("alpha-range", &cfg.require("alpha-range", a.alpha_range.clone())?)?;
    let (beta_min, beta_max, n_beta) = parse_range("beta-range", &cfg.require("beta-range", a.beta_range.clone())?)?;
    let grid = GridSpec {
        alpha_min,
        alpha_max,
        beta_min,
        beta_max,
        n_alpha,
        n_beta,
        with_cycle_search: cfg.flag("cycles", a.cycles)?,
    };
    let cells = scan_grid(&grid).map_err(usage)?;
    let mut out = output::sink(cfg.pick("out", a.out.clone())?.as_deref())?;
    match cfg.pick_or("format", a.format.clone(), "csv".into())?.as_str() {
        "json" => output::write_json(&mut *out, &cells)?,
        "csv" => {
            let cycles = grid.with_cycle_search;
            writeln!(
                out,
                "alpha,beta,routh,single_root,geometry,theorem,lambda_star{}",
                if cycles { ",cycle" } else { "" }
            )?;
            for c in &cells {
                write!(
                    out,
                    "{},{},{},{},{},{},{}",
                    output::real(c.params.alpha),
                    output::real(c.params.beta),
                    c.routh,
                    c.single_root,
                    c.geometry_class,
                    c.in_theorem_region,
                    output::real(c.lambda_star)
                )?;
                if let Some(o) = c.cycle_found {
                    write!(out, ",{}", o.as_str())?;
                }
                writeln!(out)?;
            }
            out.flush()?;
        }
        f => return Err(CliError::Usage(format!("--format must be csv or json, got {f}"))),
    }
    Ok(())
}

#[derive(Serialize)]
struct BandCycleReport {
    params: Params,
    eps: f64,
    eps0: f64,
    kind: &'static str,
    band_cycle: chua_relay::regularize::FastCycleResult,
    relay_fixed_point: Option<SectionPoint>,
    /// distance of the band fixed point to the relay fixed point on the section
    distance: Option<f64>,
}

fn cmd_regularized(cfg: &ConfigFile, a: &RegularizedArgs) -> Result<(), CliError> {
    let p = params(cfg, &a.params)?;
    let eps = positive("eps", cfg.pick_or("eps", a.eps, DEFAULT_EPS)?)?;
    let eps0 = positive("eps0", cfg.pick_or("eps0", a.eps0, DEFAULT_EPS0)?)?;
    if eps >= eps0 {
        return Err(CliError::Usage(format!("need eps < eps0, got eps = {eps}, eps0 = {eps0}")));
    }
    let kind_name: String = cfg.pick_or("kind", a.kind.clone(), "cubic".into())?;
    let kind = TransitionKind::from_name(&kind_name)
        .ok_or_else(|| CliError::Usage(format!("--kind must be cubic, smooth or unit-slope, got {kind_name}")))?;
    let out = out_path(cfg, &a.params.out)?;

    if cfg.flag("equilibrium", a.equilibrium)? {
        let e = regularized_equilibrium(&p, eps, kind).map_err(usage)?;
        #[derive(Serialize)]
        struct Report<'a> {
            params: Params,
            eps: f64,
            kind: &'static str,
            #[serde(flatten)]
            equilibrium: &'a chua_relay::regularize::RegularizedEquilibrium,
        }
        let report = Report { params: p, eps, kind: kind.name(), equilibrium: &e };
        output::write_json(&mut *output::sink(out.as_deref())?, &report)?;
        if !e.normal_form.hyperbolic {
            let mut err = std::io::stderr();
            writeln!(err, "note: the interior equilibrium of the rescaled form is not hyperbolic (phi' = 1)")?;
        }
        return Ok(());
    }

    let x0 = parse_vector::<3>("x0", &cfg.pick_or("x0", a.x0.clone(), "10,10,0".into())?)?;
    let x0 = State::new(x0[0], x0[1], x0[2]);
    let t_max = positive("t-max", cfg.pick_or("t-max", a.t_max, 50.0)?)?;
    let step = positive("step", cfg.pick_or("step", a.step, eps / 10.0)?)?;
    let default_every = ((1e-2 / step).round() as usize).max(1);
    let every = cfg.pick_or("sample-every", a.sample_every, default_every)?;
    let samples = integrate_regularized(x0, &p, eps, kind, step, t_max, every).map_err(usage)?;
    output::write_samples(&mut *output::sink(out.as_deref())?, &samples, Some(("layer", eps)))?;

    let seed = FastState::new(10.0, 10.0, 1.0);
    let band_cycle = find_fast_cycle(seed, &p, eps, eps0, 1e-10, 400);
    let relay = find_cycle(SectionPoint { x1: 10.0, x2: 10.0 }, &p, 1e-10, 400).ok().filter(|r| r.converged);
    let (band_cycle, converged) = match band_cycle {
        Ok(r) => {
            let c = r.converged;
            (r, c)
        }
        Err(e) => {
            let failed = chua_relay::regularize::FastCycleResult {
                fixed_point: seed,
                period: f64::NAN,
                contraction: f64::NAN,
                iterations: 0,
                converged: false,
                failure: Some(e.to_string()),
            };
            (failed, false)
        }
    };
    let distance = relay
        .as_ref()
        .filter(|_| converged)
        .map(|r| (band_cycle.fixed_point.y1 - r.fixed_point.x1).hypot(band_cycle.fixed_point.y2 - r.fixed_point.x2));
    let report = BandCycleReport {
        params: p,
        eps,
        eps0,
        kind: kind.name(),
        relay_fixed_point: relay.map(|r| r.fixed_point),
        band_cycle,
        distance,
    };
    match &out {
        Some(path) => output::write_json(&mut *output::sink(Some(&output::sidecar(path)))?, &report)?,
        None => output::write_json(&mut std::io::stderr(), &report)?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = ConfigFile::load(cli.config.as_deref().map(Path::new))?;
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(&cfg, a),
        Command::Spectrum(a) => cmd_spectrum(&cfg, a),
        Command::Cycle(a) => cmd_cycle(&cfg, a),
        Command::Scan(a) => cmd_scan(&cfg, a),
        Command::Regularized(a) => cmd_regularized(&cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chua-relay: {e}");
            ExitCode::from(e.code())
        }
    }
}
