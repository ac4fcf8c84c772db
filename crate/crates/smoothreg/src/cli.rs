use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Overrides};
use crate::experiments;
use crate::output::{write_all, Outcome, Summary};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "smoothreg", version, about = "Desk-scale experiments on smoothing regularization of central forces")]
pub struct Cli {
    #[command(flatten)]
    pub globals: Globals,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Globals {
    /// Experiment config, JSON or TOML.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 for all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long = "tol-quad", global = true)]
    pub tol_quad: Option<f64>,
    /// ODE tolerance.
    #[arg(long = "tol-ode", global = true)]
    pub tol_ode: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Class membership and weak type of the configured potential.
    CheckPotential,
    /// Apsidal angle along schedules driving (eps, l) to zero.
    ApsidalSweep,
    /// The singular quadrature identity.
    PiIdentity {
        /// Values of xi > 1; repeat or separate with commas.
        #[arg(long, value_delimiter = ',')]
        xi: Vec<f64>,
    },
    /// Seeded audit of the F and K bounds.
    BoundsAudit,
    /// Distance of regularized flows from the extended flow at time T.
    PoincareContinuity,
    /// Hitting times and traces on a section through the reference.
    PoincareSection,
    /// Collision orbit extended by transmission, exported as a trajectory.
    TransmissionDemo,
    /// Action difference of the standard variation of the transmission path.
    VariationalProbe,
    /// Integrator against closed forms and radial quadratures.
    OracleCrosscheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckPotential => "check-potential",
            Command::ApsidalSweep => "apsidal-sweep",
            Command::PiIdentity { .. } => "pi-identity",
            Command::BoundsAudit => "bounds-audit",
            Command::PoincareContinuity => "poincare-continuity",
            Command::PoincareSection => "poincare-section",
            Command::TransmissionDemo => "transmission-demo",
            Command::VariationalProbe => "variational-probe",
            Command::OracleCrosscheck => "oracle-crosscheck",
        }
    }
}

pub fn execute(command: &Command, cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    match command {
        Command::CheckPotential => experiments::check_potential(cfg),
        Command::ApsidalSweep => experiments::apsidal_sweep(cfg),
        Command::PiIdentity { .. } => experiments::pi_identity_run(cfg),
        Command::BoundsAudit => experiments::bounds_audit(cfg),
        Command::PoincareContinuity => experiments::poincare_continuity(cfg),
        Command::PoincareSection => experiments::poincare_section(cfg),
        Command::TransmissionDemo => experiments::transmission_demo(cfg),
        Command::VariationalProbe => experiments::variational_probe(cfg),
        Command::OracleCrosscheck => experiments::oracle_crosscheck(cfg),
    }
}

pub fn run(cli: Cli) -> ExitCode {
    let g = &cli.globals;
    let overrides = Overrides {
        out: g.out.clone(),
        seed: g.seed,
        jobs: g.jobs,
        tol_quad: g.tol_quad,
        tol_ode: g.tol_ode,
        xis: match &cli.command {
            Command::PiIdentity { xi } if !xi.is_empty() => Some(xi.clone()),
            _ => None,
        },
    };
    let cfg = match ExperimentConfig::load(g.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} workers: {e}", cfg.jobs);
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let name = cli.command.name();
    let outcome = match pool.install(|| execute(&cli.command, &cfg)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {name}: numerical failure: {e:#}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    let hash = cfg.sha256();
    let summary = Summary::new(name, &hash, cfg.seed, &outcome);
    if let Err(e) = write_all(&cfg.output_dir, &cfg.to_json(), &outcome, &summary) {
        eprintln!("error: writing {}: {e:#}", cfg.output_dir.display());
        return ExitCode::from(EXIT_FAILED);
    }
    println!("{}", summary.to_json());
    for cell in &outcome.failures {
        eprintln!("failed cell: {cell}");
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
