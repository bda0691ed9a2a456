mod config;
mod descriptor;
mod output;
mod scenarios;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::Config;
use coupled_core::flow::{self, FlowMethod};
use coupled_core::models::{self, ModelSpec};
use coupled_core::spectral::{self, SpectrumSample};
use coupled_core::{rates, CoupledSystem, Error as CoreError, LatticeState, NormP, TimeKind};
use descriptor::{build_state, parse_initial};
use num_complex::Complex64;
use output::{fmt_block, fmt_f64, write_trajectory, OutDir};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Usage(String),
    Thresholds(usize),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Thresholds(n) => write!(f, "{n} acceptance check(s) failed"),
        }
    }
}

/// 0 ok, 2 precondition violation, 3 failed acceptance threshold,
/// 4 numeric failure, 1 anything environmental.
fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Usage(_) => 2,
        CliError::Thresholds(_) => 3,
        CliError::Io(_) => 1,
        CliError::Core(e) => match e {
            CoreError::ParameterOutOfRange(_)
            | CoreError::InvalidInput(_)
            | CoreError::NotInSpace
            | CoreError::NotInRange { .. }
            | CoreError::NotEigenvalue
            | CoreError::NotOnLevelSet
            | CoreError::NotSpecialForm => 2,
            _ => 4,
        },
    }
}

#[derive(Parser)]
#[command(
    name = "coupled",
    version,
    about = "Coupled lattice experiments: spectra, evolutions, Cesaro tests and rate fits"
)]
struct Cli {
    /// `key = value` config file; command line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for the data-parallel stages (0 = automatic).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for CSV artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the spectrum and write spectrum.csv.
    Spectrum(SpectrumArgs),
    /// Evolve initial data; writes trajectory.csv plus its sidecar.
    Simulate(SimulateArgs),
    /// Cesaro convergence test; writes cesaro.csv.
    Cesaro(CesaroArgs),
    /// Decay-rate fits; writes rates.csv.
    Rates(RatesArgs),
    /// Re-verify the characteristic identity on fresh samples.
    Verify(VerifyArgs),
    /// Named headline experiment with a pass/fail summary.
    Scenario(ScenarioArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Rendezvous,
    SecondOrder,
    Platoon,
}

#[derive(Args)]
struct ModelArgs {
    /// Model family.
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    /// Rendezvous coupling strength, in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Second-order gain, in (0, 1).
    #[arg(long)]
    alpha0: Option<f64>,
    /// Platoon pole location, positive.
    #[arg(long)]
    zeta: Option<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Angle grid size.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Initial data: delta | constant:<block> | window:<lo>:<blocks> | file:<path>.
    #[arg(long)]
    initial: Option<String>,
    /// Norm exponent: inf or a real >= 1.
    #[arg(long)]
    p: Option<String>,
    /// Discrete horizon; snapshots on the dyadic ladder.
    #[arg(long, value_name = "N")]
    n_max: Option<u64>,
    /// Continuous horizon; snapshots at t/8, t/4, t/2, t.
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    /// Continuous integrator: cascade or rk.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct CesaroArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Ladder horizon, at least 16.
    #[arg(long, value_name = "N")]
    n_max: Option<u64>,
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Quantity to fit: operator, difference or state-error.
    #[arg(long)]
    kind: Option<String>,
    /// Frequency grid size (a power of two).
    #[arg(long)]
    frequencies: Option<usize>,
    #[arg(long, value_name = "N")]
    n_max: Option<u64>,
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Constant limit profile for state-error, as a complex block.
    #[arg(long)]
    limit: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of random resolvent samples.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Which experiment: rendezvous, second-order or platoon.
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Initial data override; the zero sequence short-circuits to an
    /// immediately successful all-zero run.
    #[arg(long)]
    initial: Option<String>,
    /// Cesaro ladder horizon, at least 512.
    #[arg(long, value_name = "N")]
    n_max: Option<u64>,
    /// Horizon of the continuous operator-decay ladder.
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    /// Frequency grid size (a power of two).
    #[arg(long)]
    frequencies: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

struct Lookup<'a> {
    cfg: &'a Config,
    section: &'a str,
}

impl<'a> Lookup<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.cfg.get(self.section, key)
    }

    fn parsed<T: std::str::FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.raw(key) {
            Some(text) => text.parse().map_err(|_| {
                CliError::Usage(format!("config key `{key}`: cannot parse `{text}`"))
            }),
            None => Ok(default),
        }
    }

    fn string(&self, cli: Option<&str>, key: &str, default: &str) -> String {
        match cli {
            Some(v) => v.to_string(),
            None => self.raw(key).unwrap_or(default).to_string(),
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::parse(&std::fs::read_to_string(path)?).map_err(CliError::Usage)?,
        None => Config::default(),
    };
    let section = match &cli.command {
        Command::Spectrum(_) => "spectrum",
        Command::Simulate(_) => "simulate",
        Command::Cesaro(_) => "cesaro",
        Command::Rates(_) => "rates",
        Command::Verify(_) => "verify",
        Command::Scenario(args) => args.name.as_deref().unwrap_or("scenario"),
    };
    let lk = Lookup { cfg: &cfg, section };

    let threads = lk.parsed(cli.threads, "threads", 0usize)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let out_path = cli
        .out
        .clone()
        .or_else(|| lk.raw("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let out = OutDir::new(&out_path)?;

    match &cli.command {
        Command::Spectrum(args) => cmd_spectrum(args, &lk, &out),
        Command::Simulate(args) => cmd_simulate(args, &lk, &out),
        Command::Cesaro(args) => cmd_cesaro(args, &lk, &out),
        Command::Rates(args) => cmd_rates(args, &lk, &out),
        Command::Verify(args) => cmd_verify(args, &lk),
        Command::Scenario(args) => cmd_scenario(args, &cfg, &out),
    }
}

fn resolve_model(args: &ModelArgs, lk: &Lookup) -> Result<CoupledSystem, CliError> {
    let name = match args.model {
        Some(name) => name,
        None => match lk.raw("model") {
            Some("rendezvous") => ModelName::Rendezvous,
            Some("second-order") | Some("second_order") => ModelName::SecondOrder,
            Some("platoon") => ModelName::Platoon,
            Some(other) => return Err(CliError::Usage(format!("unknown model `{other}`"))),
            None => ModelName::Rendezvous,
        },
    };
    let spec = match name {
        ModelName::Rendezvous => {
            ModelSpec::Rendezvous { alpha: lk.parsed(args.alpha, "alpha", 0.5)? }
        }
        ModelName::SecondOrder => {
            ModelSpec::SecondOrder { alpha0: lk.parsed(args.alpha0, "alpha0", 0.25)? }
        }
        ModelName::Platoon => ModelSpec::Platoon { zeta: lk.parsed(args.zeta, "zeta", 1.0)? },
    };
    spec.build().map_err(CliError::from)
}

fn resolve_p(lk: &Lookup, cli: Option<&str>) -> Result<NormP, CliError> {
    let text = lk.string(cli, "p", "inf");
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(NormP::Inf);
    }
    let x: f64 = t.parse().map_err(|_| CliError::Usage(format!("bad norm exponent `{t}`")))?;
    NormP::new(x).map_err(CliError::from)
}

fn resolve_initial(
    lk: &Lookup,
    cli: Option<&str>,
    system: &CoupledSystem,
    p: NormP,
) -> Result<LatticeState, CliError> {
    let text = lk.string(cli, "initial", "delta");
    let data = parse_initial(&text).map_err(CliError::Usage)?;
    build_state(&data, system.dim(), p)
}

/// Centre of the spectrum circle of a single-pole system: the pole sits
/// at distance `param` from the tangency point (1 in discrete time, 0 in
/// continuous time), on the real axis, inside the unit level set.
pub(crate) fn circle_centre(kind: TimeKind, param: f64) -> Complex64 {
    match kind {
        TimeKind::Discrete => Complex64::new(1.0 - param, 0.0),
        TimeKind::Continuous => Complex64::new(-param, 0.0),
    }
}

pub(crate) fn spectrum_rows(
    system: &CoupledSystem,
    samples: &[SpectrumSample],
) -> Result<Vec<String>, CliError> {
    let phi = system.char_fn();
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let abs_phi = match phi.abs_at(s.lambda) {
            Ok(v) => v,
            Err(CoreError::PoleEvaluation { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        rows.push(format!(
            "{},{},{},{}",
            fmt_f64(s.theta),
            fmt_f64(s.lambda.re),
            fmt_f64(s.lambda.im),
            fmt_f64(abs_phi)
        ));
    }
    Ok(rows)
}

fn cmd_spectrum(args: &SpectrumArgs, lk: &Lookup, out: &OutDir) -> Result<(), CliError> {
    let system = resolve_model(&args.model, lk)?;
    let grid = lk.parsed(args.grid, "grid", 512usize)?;
    let samples = spectral::spectrum_curve(&system, grid)?;
    let rows = spectrum_rows(&system, &samples)?;
    let path = out.write_csv("spectrum.csv", "theta,re,im,abs_phi", &rows)?;
    println!("samples = {}", samples.len());
    if let Some(form) = system.special_form() {
        let centre = circle_centre(system.kind(), form.param);
        println!("circle centre = {}", fmt_f64(centre.re));
        println!("circle radius = {}", fmt_f64(form.param));
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, lk: &Lookup) -> Result<(), CliError> {
    let system = resolve_model(&args.model, lk)?;
    let samples = lk.parsed(args.samples, "samples", 100usize)?;
    let residual = system.verify_characteristic(samples)?;
    println!("residual = {}", fmt_f64(residual));
    match system.special_form() {
        Some(form) => {
            println!("special form = ({}, {})", fmt_f64(form.param), form.multiplicity)
        }
        None => println!("special form = none"),
    }
    println!("diagonal spectral radius = {}", fmt_f64(system.diag_spectral_radius()));
    Ok(())
}

fn parse_method(text: &str) -> Result<FlowMethod, CliError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "cascade" => Ok(FlowMethod::ExpmCascade),
        "rk" => Ok(FlowMethod::AdaptiveRk),
        other => Err(CliError::Usage(format!("unknown method `{other}` (cascade or rk)"))),
    }
}

fn cmd_simulate(args: &SimulateArgs, lk: &Lookup, out: &OutDir) -> Result<(), CliError> {
    let system = resolve_model(&args.model, lk)?;
    let p = resolve_p(lk, args.p.as_deref())?;
    let x0 = resolve_initial(lk, args.initial.as_deref(), &system, p)?;
    let mut snapshots: Vec<(String, LatticeState)> = Vec::new();
    match system.kind() {
        TimeKind::Discrete => {
            let n_max = lk.parsed(args.n_max, "n-max", 64u64)?;
            snapshots.push(("0".to_string(), x0.clone()));
            x0.evolve(&system, n_max, |n, s| {
                if n.is_power_of_two() || n == n_max {
                    snapshots.push((n.to_string(), s.clone()));
                }
            })?;
        }
        TimeKind::Continuous => {
            let t_max = lk.parsed(args.t_max, "t-max", 8.0f64)?;
            if !(t_max > 0.0 && t_max.is_finite()) {
                return Err(CliError::Usage("t-max must be positive".to_string()));
            }
            let times: Vec<f64> = (0..4).rev().map(|j| t_max / f64::from(1 << j)).collect();
            let method = parse_method(&lk.string(args.method.as_deref(), "method", "cascade"))?;
            let traj = flow::evolve_continuous(&x0, &system, &times, method)?;
            for (t, s) in traj.times.iter().zip(&traj.states) {
                snapshots.push((fmt_f64(*t), s.clone()));
            }
        }
    }
    let path = write_trajectory(out, &snapshots)?;
    println!("snapshots = {}", snapshots.len());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_cesaro(args: &CesaroArgs, lk: &Lookup, out: &OutDir) -> Result<(), CliError> {
    let system = resolve_model(&args.model, lk)?;
    let p = resolve_p(lk, args.p.as_deref())?;
    let x0 = resolve_initial(lk, args.initial.as_deref(), &system, p)?;
    let n_max = lk.parsed(args.n_max, "n-max", 4096u64)?;
    let report = x0.convergence_test(&system, n_max)?;
    let rows: Vec<String> =
        report.ladder.iter().map(|(n, e)| format!("{n},{}", fmt_f64(*e))).collect();
    let path = out.write_csv("cesaro.csv", "n,error", &rows)?;
    println!("stabilized = {}", report.stabilized);
    println!("estimate = {}", fmt_block(&report.limit_estimate));
    match &report.rate {
        Some(fit) => println!("slope = {}", fmt_f64(fit.slope)),
        None => println!("slope = none"),
    }
    match &report.predicted {
        Some(state) => println!("predicted entry = {}", fmt_block(&state.value_at(state.lo()))),
        None => println!("predicted entry = none"),
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_rates(args: &RatesArgs, lk: &Lookup, out: &OutDir) -> Result<(), CliError> {
    let system = resolve_model(&args.model, lk)?;
    let kind = lk.string(args.kind.as_deref(), "kind", "operator");
    let samples: Vec<(f64, f64)> = match kind.as_str() {
        "operator" => match system.kind() {
            TimeKind::Discrete => {
                let n_freq = lk.parsed(args.frequencies, "frequencies", 1024usize)?;
                let n_max = lk.parsed(args.n_max, "n-max", 10_000u64)?;
                rates::operator_decay_samples_discrete(&system, n_freq, n_max)?
            }
            TimeKind::Continuous => {
                let n_freq = lk.parsed(args.frequencies, "frequencies", 1024usize)?;
                let t_max = lk.parsed(args.t_max, "t-max", 10_000.0f64)?;
                rates::operator_decay_samples_continuous(&system, n_freq, t_max)?
            }
        },
        "difference" => {
            let p = resolve_p(lk, args.p.as_deref())?;
            let x0 = resolve_initial(lk, args.initial.as_deref(), &system, p)?;
            let n_max = lk.parsed(args.n_max, "n-max", 4096u64)?;
            rates::difference_samples(&system, &x0, n_max)?
        }
        "state-error" => {
            let p = resolve_p(lk, args.p.as_deref())?;
            let x0 = resolve_initial(lk, args.initial.as_deref(), &system, p)?;
            let n_max = lk.parsed(args.n_max, "n-max", 4096u64)?;
            let limit = match args.limit.as_deref().or_else(|| lk.raw("limit")) {
                Some(text) => descriptor::parse_block(text).map_err(CliError::Usage)?,
                None => vec![Complex64::new(0.0, 0.0); system.dim()],
            };
            rates::state_error_samples(&system, &x0, &limit, n_max)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown rate kind `{other}` (operator, difference or state-error)"
            )))
        }
    };
    let rows: Vec<String> =
        samples.iter().map(|(a, v)| format!("{},{}", fmt_f64(*a), fmt_f64(*v))).collect();
    let path = out.write_csv("rates.csv", "abscissa,value", &rows)?;
    let fit = rates::rate_fit(&samples, 0.5)?;
    println!("slope = {}", fmt_f64(fit.slope));
    println!("intercept = {}", fmt_f64(fit.intercept));
    println!("residual = {}", fmt_f64(fit.residual));
    println!("window = [{}, {}]", fmt_f64(fit.window.0), fmt_f64(fit.window.1));
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_scenario(args: &ScenarioArgs, cfg: &Config, out: &OutDir) -> Result<(), CliError> {
    let name = match &args.name {
        Some(n) => n.clone(),
        None => match cfg.get("scenario", "name") {
            Some(n) => n.to_string(),
            None => {
                return Err(CliError::Usage(
                    "scenario needs --name (rendezvous, second-order or platoon)".to_string(),
                ))
            }
        },
    };
    let lk = Lookup { cfg, section: &name };
    let freqs = lk.parsed(args.frequencies, "frequencies", 1024usize)?;
    if freqs < 2 || !freqs.is_power_of_two() {
        return Err(CliError::Usage("frequencies must be a power of two >= 2".to_string()));
    }
    let initial = match args.initial.as_deref().or_else(|| lk.raw("initial")) {
        Some(text) => Some(parse_initial(text).map_err(CliError::Usage)?),
        None => None,
    };

    let checks = match name.as_str() {
        "rendezvous" => {
            let alpha = lk.parsed(args.alpha, "alpha", 0.5)?;
            let n_max = scenario_horizon(args, &lk, 4096)?;
            let system = models::rendezvous(alpha)?;
            let x0 = match &initial {
                Some(data) => build_state(data, system.dim(), NormP::Inf)?,
                None => LatticeState::delta(system.dim(), NormP::Inf),
            };
            if x0.lp_norm() == 0.0 {
                return empty_input(out);
            }
            scenarios::rendezvous_checks(&system, &x0, n_max, freqs, out)?
        }
        "second-order" => {
            let alpha0 = lk.parsed(args.alpha0, "alpha0", 0.25)?;
            let n_max = scenario_horizon(args, &lk, 1024)?;
            let system = models::second_order(alpha0)?;
            let kernel = kernel_direction(&system)?;
            let (x0, target) = match &initial {
                Some(data) => (build_state(data, system.dim(), NormP::Inf)?, None),
                None => (perturbed_kernel_state(&kernel)?, Some(kernel.as_slice())),
            };
            if x0.lp_norm() == 0.0 {
                return empty_input(out);
            }
            scenarios::second_order_checks(&system, &x0, target, n_max, freqs, out)?
        }
        "platoon" => {
            let zeta = lk.parsed(args.zeta, "zeta", 1.0)?;
            let n_max = scenario_horizon(args, &lk, 1024)?;
            let t_max = lk.parsed(args.t_max, "t-max", 10_000.0f64)?;
            let system = models::platoon(zeta)?;
            let kernel = kernel_direction(&system)?;
            let (x0, target) = match &initial {
                Some(data) => (build_state(data, system.dim(), NormP::Inf)?, None),
                None => (perturbed_kernel_state(&kernel)?, Some(kernel.as_slice())),
            };
            if x0.lp_norm() == 0.0 {
                return empty_input(out);
            }
            scenarios::platoon_checks(&system, &x0, target, n_max, freqs, t_max, out)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown scenario `{other}` (rendezvous, second-order or platoon)"
            )))
        }
    };

    let mut rows = Vec::with_capacity(checks.len());
    let mut failures = 0usize;
    for c in &checks {
        rows.push(format!("{},{},{},{}", c.metric, fmt_f64(c.value), fmt_f64(c.threshold), c.pass));
        println!(
            "{} {} (value {}, threshold {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.metric,
            fmt_f64(c.value),
            fmt_f64(c.threshold)
        );
        if !c.pass {
            failures += 1;
        }
    }
    let path = out.write_csv("summary.csv", "metric,value,threshold,pass", &rows)?;
    println!("wrote {}", path.display());
    if failures > 0 {
        return Err(CliError::Thresholds(failures));
    }
    Ok(())
}

/// The slope gates need eight dyadic rungs from 4, hence the 512 floor.
fn scenario_horizon(args: &ScenarioArgs, lk: &Lookup, default: u64) -> Result<u64, CliError> {
    let n_max = lk.parsed(args.n_max, "n-max", default)?;
    if n_max < 512 {
        return Err(CliError::Usage("n-max must be at least 512".to_string()));
    }
    Ok(n_max)
}

/// Direction of the constant fixed profiles, found by pushing a probe
/// block through the discrepancy map and inverting the image. For the
/// rank-one couplings here the inversion lands on the kernel line of
/// the zero-frequency block, leading component normalized to one.
fn kernel_direction(system: &CoupledSystem) -> Result<Vec<Complex64>, CliError> {
    let ones = vec![Complex64::new(1.0, 0.0); system.dim()];
    let image = LatticeState::constant(ones)?.m_operator(system)?.value_at(0);
    let direction = coupled_core::lattice::limit_candidate(system, &image)?;
    let lead = direction[0];
    if lead.norm() == 0.0 {
        return Err(CliError::Core(CoreError::DegenerateDerivative));
    }
    Ok(direction.iter().map(|z| z / lead).collect())
}

/// Compactly perturbed multiple of the kernel direction: the reference
/// initial data for the second-order and platoon scenarios.
fn perturbed_kernel_state(kernel: &[Complex64]) -> Result<LatticeState, CliError> {
    let m = kernel.len();
    let bumps = [0.3, -0.2, 0.45, -0.15, 0.25, -0.35];
    let mut values = Vec::with_capacity(2 * m);
    for (site, chunk) in bumps.chunks(m).take(2).enumerate() {
        for comp in 0..m {
            let bump = chunk.get(comp).copied().unwrap_or(0.1 * (site + 1) as f64);
            values.push(kernel[comp] + Complex64::new(bump, -0.5 * bump));
        }
    }
    LatticeState::new(
        0,
        m,
        values,
        kernel.to_vec(),
        kernel.to_vec(),
        coupled_core::TailKind::Constant,
        NormP::Inf,
    )
    .map_err(CliError::from)
}

/// The zero sequence: every artifact is empty or all-zero and the run
/// counts as an immediate success.
fn empty_input(out: &OutDir) -> Result<(), CliError> {
    out.write_csv("spectrum.csv", "theta,re,im,abs_phi", &[])?;
    out.write_csv("cesaro.csv", "n,error", &[])?;
    out.write_csv("rates.csv", "abscissa,value", &[])?;
    write_trajectory(out, &[])?;
    let row = "empty-input,0,0,true".to_string();
    let path = out.write_csv("summary.csv", "metric,value,threshold,pass", &[row])?;
    println!("PASS empty-input (value 0, threshold 0)");
    println!("wrote {}", path.display());
    Ok(())
}
