//! `pdm-spectra`: runs one computation from flags or a JSON config and
//! writes JSON or CSV. Exit codes: 2 for unreadable input, 3 for a violated
//! precondition, 4 when a solver fails; the error is described as JSON on
//! stderr.

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pdm_core::{Error, SystemId};
use serde_json::json;

use config::{Command, OrderingSpec, RunConfig};

const SEED_VAR: &str = "PDM_SPECTRA_SEED";

#[derive(Parser, Debug)]
#[command(name = "pdm-spectra", version, about = "Spectra, wavefunctions and classical orbits of position-dependent-mass oscillators")]
struct Cli {
    /// Read the run configuration from a JSON file; flags given after the
    /// subcommand override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (default: one).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Debug, Default)]
struct SystemArgs {
    /// exp, nonpoly, sextic, log, rational or power.
    #[arg(long)]
    system: Option<SystemId>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    /// Preset (vonroos:a,b,g | vonroos:a34[:g] | vonroos:b2[:g] | gora-williams | bendaniel-duke).
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long)]
    points: Option<usize>,
    /// liouville or physical.
    #[arg(long)]
    coordinate: Option<String>,
    /// Grid end points as `lo:hi` in the chosen coordinate.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Lowest eigenvalues of the discretised Hamiltonian.
    Spectrum {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Closed-form eigenfunctions tabulated as CSV.
    Wavefunction {
        #[command(flatten)]
        sys: SystemArgs,
        /// Comma-separated quantum numbers.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long)]
        bulk_points: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// One classical trajectory as CSV (t, x, xdot, H).
    Classical {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long)]
        periods: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        fixed_step: Option<f64>,
    },
    /// Measured period against amplitude.
    PeriodScan {
        #[command(flatten)]
        sys: SystemArgs,
        /// `lo:hi:count` or a comma list.
        #[arg(long)]
        amplitudes: Option<String>,
        #[arg(long)]
        fixed_step: Option<f64>,
    },
    /// Whether an ordering meets the exact-solvability constraint.
    ConstraintCheck {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Quasi-exact levels of the sextic system.
    Bethe {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Constraint value A when no ordering is given.
        #[arg(long, allow_hyphen_values = true)]
        a_value: Option<f64>,
        /// Also locate each level in the numeric spectrum.
        #[arg(long)]
        check_numeric: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Failures sorted by exit code.
#[derive(Debug)]
enum Failure {
    Parse(anyhow::Error),
    Run(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Run(e) => match e.downcast_ref::<Error>() {
                Some(
                    Error::Quadrature { .. }
                    | Error::EigenSolver(_)
                    | Error::BlowUp { .. }
                    | Error::NonPeriodic(_)
                    | Error::Bethe { .. },
                ) => 4,
                _ => 3,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            2 => "parse",
            3 => "precondition",
            _ => "solver",
        }
    }

    fn message(&self) -> String {
        let (Failure::Parse(e) | Failure::Run(e)) = self;
        format!("{e:#}")
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn apply_system(cfg: &mut RunConfig, a: SystemArgs) {
    set(&mut cfg.system, a.system);
    set(&mut cfg.lambda, a.lambda);
    set(&mut cfg.omega0, a.omega0);
    set(&mut cfg.hbar, a.hbar);
    if let Some(o) = a.ordering {
        cfg.ordering = Some(OrderingSpec::Preset(o));
    }
}

fn apply_grid(cfg: &mut RunConfig, g: GridArgs) -> Result<()> {
    set(&mut cfg.points, g.points);
    if let Some(c) = g.coordinate {
        cfg.coordinate = serde_json::from_value(json!(c)).with_context(|| format!("unknown coordinate `{c}`"))?;
    }
    if let Some(r) = g.range {
        let (lo, hi) = r.split_once(':').with_context(|| format!("range must be lo:hi, got `{r}`"))?;
        cfg.range = Some((lo.trim().parse()?, hi.trim().parse()?));
    }
    Ok(())
}

/// `env_seed` is the raw value of the seed variable, if set.
fn build_config(cli: Cli, env_seed: Option<String>) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    match cli.command {
        None if cli.config.is_none() => anyhow::bail!("give a subcommand or --config"),
        None => {}
        Some(Cmd::Spectrum { sys, grid, levels }) => {
            cfg.command = Command::Spectrum;
            apply_system(&mut cfg, sys);
            apply_grid(&mut cfg, grid)?;
            set(&mut cfg.levels, levels);
        }
        Some(Cmd::Wavefunction { sys, n, bulk_points, threshold }) => {
            cfg.command = Command::Wavefunction;
            apply_system(&mut cfg, sys);
            set(&mut cfg.n, n);
            set(&mut cfg.bulk_points, bulk_points);
            set(&mut cfg.threshold, threshold);
        }
        Some(Cmd::Classical { sys, amplitude, delta, periods, dt, fixed_step }) => {
            cfg.command = Command::Classical;
            apply_system(&mut cfg, sys);
            set(&mut cfg.amplitude, amplitude);
            set(&mut cfg.delta, delta);
            set(&mut cfg.periods, periods);
            set(&mut cfg.dt, dt);
            cfg.fixed_step = fixed_step.or(cfg.fixed_step);
        }
        Some(Cmd::PeriodScan { sys, amplitudes, fixed_step }) => {
            cfg.command = Command::PeriodScan;
            apply_system(&mut cfg, sys);
            set(&mut cfg.amplitudes, amplitudes);
            cfg.fixed_step = fixed_step.or(cfg.fixed_step);
        }
        Some(Cmd::ConstraintCheck { sys }) => {
            cfg.command = Command::ConstraintCheck;
            apply_system(&mut cfg, sys);
        }
        Some(Cmd::Bethe { sys, grid, n, a_value, check_numeric, seed }) => {
            cfg.command = Command::Bethe;
            if cli.config.is_none() {
                cfg.system = SystemId::AppBSextic;
                cfg.lambda = 1.0;
                cfg.omega0 = 1.0;
                cfg.n = vec![0, 1, 2, 3];
            }
            apply_system(&mut cfg, sys);
            apply_grid(&mut cfg, grid)?;
            set(&mut cfg.n, n);
            set(&mut cfg.a_value, a_value);
            cfg.check_numeric |= check_numeric;
            cfg.seed = seed.or(cfg.seed);
        }
    }
    set(&mut cfg.output, cli.output.map(Some));
    if let Some(text) = env_seed {
        let seed = text.trim().parse().with_context(|| format!("{SEED_VAR} must be an unsigned integer, got `{text}`"))?;
        cfg.seed = Some(seed);
    }
    cfg.scheme().context("invalid ordering")?;
    if cfg.command == Command::PeriodScan {
        cfg.amplitude_list()?;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> std::result::Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(1).max(1))
        .build_global()
        .map_err(|e| Failure::Parse(e.into()))?;
    let cfg = build_config(cli, std::env::var(SEED_VAR).ok()).map_err(Failure::Parse)?;
    // open the destination first so an unwritable path fails before any work
    let mut sink: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(
            fs::File::create(path)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::Run)?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let artifact = commands::run(&cfg).map_err(Failure::Run)?;
    sink.write_all(artifact.render().as_bytes())
        .and_then(|_| sink.flush())
        .context("writing output")
        .map_err(Failure::Run)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::Parse(anyhow::anyhow!(e.to_string().trim().to_string()));
            report(&f);
            return ExitCode::from(f.code());
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code())
        }
    }
}

fn report(f: &Failure) {
    let body = json!({ "error": { "kind": f.kind(), "code": f.code(), "message": f.message() } });
    eprintln!("{body}");
}
