//! Command-line driver: presets and JSON configs in, CSV curves and JSON
//! reports out.
//!
//! Exit status is 0 on success, 1 on an input error (the message names the
//! offending field) and 2 when a numerical step failed; in the last case every
//! file is still written and the affected rows carry flags.

pub mod config;
pub mod output;

use std::fmt::Display;
use std::path::PathBuf;

use casimir_core::channel_energy::{
    energy, energy_curve_with, find_equilibria_with, force, EnergyCurve, EquilibriumReport, Scan,
};
use casimir_core::lattice::{compare_with_continuum, OracleRow};
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::regression::{run_regression, RegressionCheck};
use casimir_core::separable::{separable_curve, separable_energy, separable_force, FormFactor, GreenKernel};
use casimir_core::waveguide::modes;
use casimir_core::{CasimirError, Execution};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{channel_setup, ChannelSetup, GridConfig, OracleConfig, RunConfig};

/// Environment variable selecting the worker thread count.
pub const THREADS_VAR: &str = "CASIMIR_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Input { field: String, message: String },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn input(field: &str, message: impl Display) -> Self {
        CliError::Input {
            field: field.to_string(),
            message: message.to_string(),
        }
    }

    /// Input-type core errors map to exit 1, numerical failures to exit 2.
    pub fn from_core(field: &str, e: CasimirError) -> Self {
        match e {
            CasimirError::NonConvergence { .. }
            | CasimirError::NonFinite { .. }
            | CasimirError::IndefiniteMatrix(_)
            | CasimirError::EigenNonConvergence
            | CasimirError::BisectionNonConvergence { .. } => CliError::Numerical(format!("{field}: {e}")),
            _ => CliError::input(field, e),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// A run that wrote all its output. `Partial` means some rows are flagged.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Complete,
    Partial(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Complete => 0,
            Outcome::Partial(_) => 2,
        }
    }

    fn merge(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Complete, o) | (o, Outcome::Complete) => o,
            (Outcome::Partial(a), Outcome::Partial(b)) => Outcome::Partial(format!("{a}; {b}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "casimir", version, about = "Two-body Casimir energies and forces in one dimension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Recompute every pinned reference value and fail on drift
    #[arg(long, global = true)]
    pub regression: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multi-channel field between two rank-1 mirrors
    Channels(RunArgs),
    /// Two separable (rank-1 non-local) potentials
    Separable(RunArgs),
    /// Mirrors in a circular waveguide, or its mode table
    Waveguide(RunArgs),
    /// Lattice zero-point energies against the determinant formula
    OracleCompare(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Built-in configuration name
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report (equilibria, modes or oracle rows)
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Locate force zeros on the grid range
    #[arg(long)]
    pub equilibria: bool,
    /// Override the sampling grid, LO:HI:N[:log|linear]
    #[arg(long)]
    pub grid: Option<GridConfig>,
    /// Override the quadrature relative tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Evaluate on one thread
    #[arg(long)]
    pub sequential: bool,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.preset, &self.config) {
            (Some(name), None) => config::preset(name)?,
            (None, Some(path)) => RunConfig::from_file(path)?,
            _ => return Err(CliError::input("preset", "give exactly one of --preset or --config")),
        };
        if let Some(g) = self.grid {
            cfg.set_grid(g);
        }
        if let Some(tol) = self.tol {
            cfg.quadrature_mut().rel_tol = tol;
        }
        cfg.quadrature_mut()
            .validate()
            .map_err(|e| CliError::input("quadrature", e))?;
        Ok(cfg)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::input(THREADS_VAR, format!("expected a positive integer, got {v:?}"))),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    casimir_core::parallel::configure_threads(threads_from_env()?).map_err(|e| CliError::input(THREADS_VAR, e))?;
    if cli.regression {
        return regression();
    }
    let Some(command) = &cli.command else {
        return Err(CliError::input("command", "expected a subcommand or --regression"));
    };
    match command {
        Command::Channels(args) => expect_model(args, "channels").and_then(|cfg| channels(&cfg, args)),
        Command::Separable(args) => expect_model(args, "separable").and_then(|cfg| separable(&cfg, args)),
        Command::Waveguide(args) => expect_model(args, "waveguide").and_then(|cfg| waveguide(&cfg, args)),
        Command::OracleCompare(args) => expect_model(args, "channels").and_then(|cfg| oracle(&cfg, args)),
    }
}

fn expect_model(args: &RunArgs, model: &str) -> Result<RunConfig, CliError> {
    let cfg = args.load()?;
    if cfg.model() != model {
        return Err(CliError::input(
            "model",
            format!("this command needs a {model} configuration, got {}", cfg.model()),
        ));
    }
    Ok(cfg)
}

fn regression() -> Result<Outcome, CliError> {
    let checks = run_regression(Execution::Parallel);
    for c in &checks {
        println!("{}", regression_line(c));
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(Outcome::Complete)
    } else {
        Ok(Outcome::Partial(format!("regression drift in {}", failed.join(", "))))
    }
}

fn regression_line(c: &RegressionCheck) -> String {
    let status = if c.passed { "ok" } else { "DRIFT" };
    match &c.error {
        Some(e) => format!("{status:5} {} failed: {e}", c.name),
        None => format!(
            "{status:5} {} expected {} got {} ({:?})",
            c.name,
            output::number(c.expected),
            output::number(c.actual),
            c.tolerance
        ),
    }
}

#[derive(Serialize)]
struct EquilibriaReport<'a> {
    model: &'a str,
    scan: Scan,
    #[serde(flatten)]
    report: &'a EquilibriumReport,
}

/// Flagged rows of a curve as a partial outcome.
fn curve_outcome(curve: &EnergyCurve) -> Outcome {
    let bad: Vec<String> = curve
        .samples
        .iter()
        .filter(|s| !s.is_clean())
        .map(|s| format!("x={} [{}]", output::number(s.x), s.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(";")))
        .collect();
    if bad.is_empty() {
        Outcome::Complete
    } else {
        Outcome::Partial(format!("{} flagged rows: {}", bad.len(), bad.join(", ")))
    }
}

fn report_outcome(report: &EquilibriumReport) -> Outcome {
    if report.failures.is_empty() {
        Outcome::Complete
    } else {
        Outcome::Partial(format!("equilibrium search: {}", report.failures.join("; ")))
    }
}

/// Write the curve and, when requested, the equilibrium report. The curve
/// goes to stdout only when nothing else claims it.
fn emit(
    args: &RunArgs,
    model: &str,
    curve: &EnergyCurve,
    equilibria: Option<(Scan, EquilibriumReport)>,
) -> Result<Outcome, CliError> {
    if args.out.is_some() || equilibria.is_none() {
        output::write_curve(curve, output::sink(args.out.as_deref())?)?;
    }
    let mut outcome = curve_outcome(curve);
    if let Some((scan, report)) = equilibria {
        output::write_json(
            &EquilibriaReport {
                model,
                scan,
                report: &report,
            },
            output::sink(args.report.as_deref())?,
        )?;
        outcome = outcome.merge(report_outcome(&report));
    }
    Ok(outcome)
}

fn scan_of(grid: &GridConfig) -> Result<Scan, CliError> {
    Scan::new(grid.lo, grid.hi, grid.count.max(8)).map_err(|e| CliError::input("grid", e))
}

fn channel_run(
    setup: &ChannelSetup,
    grid: &GridConfig,
    q: &QuadratureSpec,
    args: &RunArgs,
    model: &str,
) -> Result<Outcome, CliError> {
    let exec = args.execution();
    let xs = grid.points()?;
    let curve = energy_curve_with(&setup.a, &setup.b, &setup.channels, &xs, q, exec)
        .map_err(|e| CliError::from_core("curve", e))?;
    let equilibria = if args.equilibria {
        let scan = scan_of(grid)?;
        let report = find_equilibria_with(
            |x| force(&setup.a, &setup.b, &setup.channels, x, q).map(|e| e.value),
            |x| energy(&setup.a, &setup.b, &setup.channels, x, q),
            scan,
            exec,
        )
        .map_err(|e| CliError::from_core("equilibria", e))?;
        Some((scan, report))
    } else {
        None
    };
    emit(args, model, &curve, equilibria)
}

fn channels(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let RunConfig::Channels {
        channels,
        a,
        b,
        grid,
        quadrature,
        ..
    } = cfg
    else {
        unreachable!("model checked by the caller")
    };
    let setup = channel_setup(&config::channels_from_masses(channels)?, a, b)?;
    channel_run(&setup, grid, quadrature, args, "channels")
}

fn separable(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let RunConfig::Separable {
        kernel,
        a,
        b,
        grid,
        quadrature,
    } = cfg
    else {
        unreachable!("model checked by the caller")
    };
    let kernel = validate_kernel(kernel)?;
    let (fa, fb) = config::separable_bodies(a, b)?;
    let exec = args.execution();
    let xs = grid.points()?;
    let curve = separable_curve(&fa, &fb, &kernel, &xs, quadrature, exec).map_err(|e| CliError::from_core("curve", e))?;
    let equilibria = if args.equilibria {
        let scan = scan_of(grid)?;
        Some((scan, separable_equilibria(&fa, &fb, &kernel, quadrature, scan, exec)?))
    } else {
        None
    };
    emit(args, "separable", &curve, equilibria)
}

fn validate_kernel(kernel: &GreenKernel) -> Result<GreenKernel, CliError> {
    match *kernel {
        GreenKernel::Point3d { smear } => GreenKernel::point3d(smear).map_err(|e| CliError::input("kernel.point3d.smear", e)),
        k => Ok(k),
    }
}

fn separable_equilibria(
    fa: &FormFactor,
    fb: &FormFactor,
    kernel: &GreenKernel,
    q: &QuadratureSpec,
    scan: Scan,
    exec: Execution,
) -> Result<EquilibriumReport, CliError> {
    find_equilibria_with(
        |a| separable_force(fa, fb, kernel, a, q).map(|e| e.value),
        |a| separable_energy(fa, fb, kernel, a, q),
        scan,
        exec,
    )
    .map_err(|e| CliError::from_core("equilibria", e))
}

fn waveguide(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let RunConfig::Waveguide {
        waveguide,
        a,
        b,
        grid,
        quadrature,
    } = cfg
    else {
        unreachable!("model checked by the caller")
    };
    let table = modes(&waveguide.spec()).map_err(|e| CliError::input("waveguide", e))?;
    match (a, b, grid) {
        (None, None, _) => {
            output::write_modes(&table, output::sink(args.out.as_deref())?)?;
            Ok(Outcome::Complete)
        }
        (Some(a), Some(b), Some(grid)) => {
            if let Some(path) = &args.report {
                output::write_json(&table, output::sink(Some(path))?)?;
            }
            let channels = config::channels_from_waveguide(waveguide)?;
            let setup = channel_setup(&channels, a, b)?;
            // The report slot is taken by the mode table unless equilibria were asked for.
            let args = RunArgs {
                report: if args.equilibria { args.report.clone() } else { None },
                ..args.clone()
            };
            channel_run(&setup, grid, quadrature, &args, "waveguide")
        }
        (Some(_), Some(_), None) => Err(CliError::input("grid", "mirrors are given but no grid")),
        _ => Err(CliError::input("a", "give both mirrors a and b, or neither for the mode table")),
    }
}

#[derive(Serialize)]
struct OracleReport<'a> {
    box_length: f64,
    spacing: f64,
    x_ref: f64,
    rows: &'a [OracleRow],
    /// Rows at half the spacing, when refinement was requested.
    refined: Option<Vec<OracleRow>>,
    /// Largest relative change of the lattice energy under h-halving.
    refinement_change: Option<f64>,
}

fn oracle(cfg: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let RunConfig::Channels {
        channels,
        a,
        b,
        quadrature,
        oracle,
        ..
    } = cfg
    else {
        unreachable!("model checked by the caller")
    };
    let Some(o): &Option<OracleConfig> = oracle else {
        return Err(CliError::input("oracle", "the configuration has no oracle section"));
    };
    let setup = channel_setup(&config::channels_from_masses(channels)?, a, b)?;
    let exec = args.execution();
    let compare = |spacing: f64| -> Result<Vec<OracleRow>, CliError> {
        compare_with_continuum(
            &o.lattice(spacing)?,
            &setup.channels,
            &setup.a,
            &setup.b,
            &o.separations,
            o.x_ref,
            quadrature,
            exec,
        )
        .map_err(|e| CliError::from_core("oracle", e))
    };
    let rows = compare(o.spacing)?;
    let refined = if o.refine { Some(compare(o.spacing / 2.0)?) } else { None };
    let refinement_change = refined.as_ref().map(|fine| {
        rows.iter()
            .zip(fine)
            .map(|(c, f)| ((f.lattice - c.lattice) / c.lattice).abs())
            .fold(0.0, f64::max)
    });
    output::write_oracle(&rows, output::sink(args.out.as_deref())?)?;
    if let Some(path) = &args.report {
        output::write_json(
            &OracleReport {
                box_length: o.box_length,
                spacing: o.spacing,
                x_ref: o.x_ref,
                rows: &rows,
                refined: refined.clone(),
                refinement_change,
            },
            output::sink(Some(path))?,
        )?;
    }
    let flagged: Vec<String> = rows
        .iter()
        .chain(refined.iter().flatten())
        .filter(|r| r.flagged)
        .map(|r| format!("x={} differs by {:.3}%", output::number(r.x), 100.0 * r.relative_difference))
        .collect();
    Ok(if flagged.is_empty() {
        Outcome::Complete
    } else {
        Outcome::Partial(format!("oracle rows beyond 2%: {}", flagged.join(", ")))
    })
}
