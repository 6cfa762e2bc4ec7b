//! Scenario-running command line for the radiation-reaction toolkit.
//!
//! Exit codes: 0 success, 1 physics-constraint violation, 2 numeric failure,
//! 3 usage error. Every run writes a manifest (configuration echo, versions,
//! wall time, checks, output digests) to the output directory, success or
//! failure.

mod commands;
mod descriptors;
mod manifest;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use descriptors::ConfigFile;
use manifest::{CheckRecord, Emitter, RunManifest};
use qlrr::error::Error;
use qlrr::units::{constants_from_key_values, PhysicalConstants, UnitSystem};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    /// Native reduced units (tau_e = 1, M = 1, c = 1 by default).
    Reduced,
    /// CGS-Gaussian at the I/O boundary; computation still runs reduced.
    Cgs,
}

#[derive(Parser, Debug)]
#[command(
    name = "qlrr",
    about = "Radiation-reaction toolkit: bath spectra, response functions, \
             fluctuation-dissipation correlations, trajectory integrators, and \
             stochastic simulation",
    version
)]
pub struct Cli {
    /// Unit system for inputs and outputs.
    #[arg(long, global = true, value_enum, default_value = "reduced")]
    pub units: Units,
    /// Master seed; all subsystem randomness derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory for series, sidecars, and the manifest.
    #[arg(long, global = true, default_value = "qlrr-out")]
    pub out_dir: PathBuf,
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Plain-text key = value file overriding the CODATA constants.
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    /// Suppress progress chatter (outputs and manifest are still written).
    #[arg(long, global = true, default_value_t = false)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate a bath spectral distribution and its boundary values.
    Spectrum(commands::SpectrumArgs),
    /// Evaluate a susceptibility on a frequency grid and report its poles.
    Response(commands::ResponseArgs),
    /// Evaluate fluctuation-dissipation correlation functions over lags.
    Correlate(commands::CorrelateArgs),
    /// Integrate a deterministic radiation-reaction trajectory.
    Trajectory(commands::TrajectoryArgs),
    /// Radiated energy and emission profile of a force pulse.
    Radiate(commands::RadiateArgs),
    /// Relativistic pusher and the parallel-plate capacitor scenario.
    Relativistic(commands::RelativisticArgs),
    /// Classical Brownian ensemble and the Einstein-relation diffusion fit.
    Brownian(commands::BrownianArgs),
    /// Finite-N independent-oscillator bath with its reduced-model check.
    Microbath(commands::MicrobathArgs),
    /// Run the cross-module verification suite.
    Verify(commands::VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Response(_) => "response",
            Command::Correlate(_) => "correlate",
            Command::Trajectory(_) => "trajectory",
            Command::Radiate(_) => "radiate",
            Command::Relativistic(_) => "relativistic",
            Command::Brownian(_) => "brownian",
            Command::Microbath(_) => "microbath",
            Command::Verify(_) => "verify",
        }
    }
}

/// Dimension exponents (time, length, mass) for unit conversion.
#[derive(Debug, Clone, Copy)]
pub struct Dim(pub i32, pub i32, pub i32);

pub const DIMLESS: Dim = Dim(0, 0, 0);
pub const TIME: Dim = Dim(1, 0, 0);
pub const FREQUENCY: Dim = Dim(-1, 0, 0);
pub const LENGTH: Dim = Dim(0, 1, 0);
pub const VELOCITY: Dim = Dim(-1, 1, 0);
pub const ACCEL: Dim = Dim(-2, 1, 0);
pub const MASS: Dim = Dim(0, 0, 1);
pub const FORCE: Dim = Dim(-2, 1, 1);
pub const ENERGY: Dim = Dim(-2, 2, 1);
pub const SPRING: Dim = Dim(-2, 0, 1);
/// Friction / spectral distribution (force per velocity).
pub const FRICTION: Dim = Dim(-1, 0, 1);
pub const POWER: Dim = Dim(-3, 2, 1);

/// Converts between the I/O unit system and the internal reduced system.
pub struct Scale {
    system: Option<UnitSystem>,
    pub constants: PhysicalConstants,
}

impl Scale {
    pub fn new(units: Units, constants: PhysicalConstants) -> Result<Self, Error> {
        let system = match units {
            Units::Reduced => None,
            Units::Cgs => Some(UnitSystem::reduced(&constants)?),
        };
        Ok(Scale { system, constants })
    }

    fn factor(&self, d: Dim) -> f64 {
        match &self.system {
            None => 1.0,
            Some(us) => us.factor_to_cgs(d.0, d.1, d.2),
        }
    }

    /// External value -> internal reduced value.
    pub fn input(&self, v: f64, d: Dim) -> f64 {
        v / self.factor(d)
    }

    /// Internal reduced value -> external value.
    pub fn output(&self, v: f64, d: Dim) -> f64 {
        v * self.factor(d)
    }

    /// Thermal energy kT from the --temperature flag: plain energy in
    /// reduced mode, Kelvin in CGS mode.
    pub fn thermal_energy(&self, temperature: f64) -> f64 {
        match &self.system {
            None => temperature,
            Some(_) => self.input(self.constants.boltzmann * temperature, ENERGY),
        }
    }

    /// hbar in internal units (1 is conventional in reduced mode unless
    /// overridden by the command).
    pub fn hbar_internal(&self) -> Option<f64> {
        self.system.as_ref().map(|_| self.input(self.constants.hbar, Dim(-1, 2, 1)))
    }
}

/// Shared per-run context.
pub struct Ctx {
    pub scale: Scale,
    pub seed: u64,
    pub quiet: bool,
    pub config: ConfigFile,
    pub echo: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub section: &'static str,
}

impl Ctx {
    /// Resolve a parameter: command-line flag wins, then the config file,
    /// then the default. The resolved value lands in the config echo.
    pub fn resolve<T: std::str::FromStr + std::fmt::Display + Clone>(
        &mut self,
        flag: &Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Error> {
        let value = if let Some(v) = flag {
            v.clone()
        } else if let Some(raw) = self.config.get(self.section, key) {
            raw.parse().map_err(|_| {
                Error::Input(format!("config {}.{key}: bad value {raw:?}", self.section))
            })?
        } else {
            default
        };
        self.echo.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn resolve_required<T: std::str::FromStr + std::fmt::Display + Clone>(
        &mut self,
        flag: &Option<T>,
        key: &str,
    ) -> Result<T, Error> {
        let value = if let Some(v) = flag {
            v.clone()
        } else if let Some(raw) = self.config.get(self.section, key) {
            raw.parse().map_err(|_| {
                Error::Input(format!("config {}.{key}: bad value {raw:?}", self.section))
            })?
        } else {
            return Err(Error::Input(format!(
                "missing required parameter --{}",
                key.replace('_', "-")
            )));
        };
        self.echo.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Resolve a numeric parameter and convert it to internal units.
    pub fn resolve_scaled(
        &mut self,
        flag: &Option<f64>,
        key: &str,
        default: f64,
        d: Dim,
    ) -> Result<f64, Error> {
        let v = self.resolve(flag, key, default)?;
        Ok(self.scale.input(v, d))
    }

    pub fn resolve_required_scaled(
        &mut self,
        flag: &Option<f64>,
        key: &str,
        d: Dim,
    ) -> Result<f64, Error> {
        let v = self.resolve_required(flag, key)?;
        Ok(self.scale.input(v, d))
    }

    pub fn check(&mut self, name: &str, passed: bool) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            passed,
        });
    }

    pub fn say(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CutoffConstraint { .. }
        | Error::Domain(_)
        | Error::Pole(_)
        | Error::Unsupported(_) => 1,
        Error::Numeric(_) => 2,
        Error::Config(_) | Error::Input(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::from(0);
            }
            eprint!("{e}");
            return ExitCode::from(3);
        }
    };
    let start = Instant::now();

    let constants = match &cli.constants {
        None => PhysicalConstants::codata(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("read {}: {e}", path.display())))
            .and_then(|text| constants_from_key_values(&text))
        {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        },
    };
    let config = match &cli.config {
        None => ConfigFile::default(),
        Some(path) => match ConfigFile::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        },
    };
    let scale = match Scale::new(cli.units, constants) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };

    let mut emitter = match Emitter::new(&cli.out_dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let mut ctx = Ctx {
        scale,
        seed: cli.seed.unwrap_or(0),
        quiet: cli.quiet,
        config,
        echo: BTreeMap::new(),
        checks: Vec::new(),
        section: cli.command.name(),
    };
    ctx.echo.insert("seed".into(), ctx.seed.to_string());

    let result = commands::dispatch(&cli.command, &mut ctx, &mut emitter);

    let (exit, error) = match &result {
        Ok(()) => (0, None),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code_for(e), Some(e.to_string()))
        }
    };
    let run_manifest = RunManifest {
        command: cli.command.name().to_string(),
        config: ctx.echo.clone(),
        versions: manifest::versions(),
        seed: ctx.seed,
        units: format!("{:?}", cli.units).to_lowercase(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        checks: ctx.checks,
        outputs: std::mem::take(&mut emitter.outputs),
        exit_code: exit,
        error,
    };
    if let Err(e) = emitter
        .emit_config_echo(cli.command.name(), &run_manifest.config)
        .and_then(|_| emitter.emit_manifest(&run_manifest))
    {
        eprintln!("error writing manifest: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(exit as u8)
}
