//! Command-line front end: `simulate`, `figure`, `check` and `rates`.

mod config;
mod csv;
mod presets;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{Auto, B0Spec, ExperimentConfig, ObjectiveName, Overrides};
pub use csv::{header as csv_header, write_trajectory, write_trajectory_file};
pub use presets::{curve, figure_curves, subfigures, sweep, Curve, FigureId, FIGURE_4A_T_END};

use crate::analysis::{check_conditions_polynomial, default_window, fit_rate, RateFit};
use crate::dynamics::{integrate, IntegrationError, Quantity, SystemConfig, Trajectory};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_DIVERGENCE: i32 = 2;
pub const EXIT_CONDITIONS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "inertial-moreau", version, about = "Simulate inertial Moreau-envelope dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Experiment config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV file, or directory for `figure`
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            t_end: self.t_end,
            sample_count: self.samples,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
        }
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_deref()
            .ok_or_else(|| Error::Config("--config is required".into()))?;
        let mut cfg = ExperimentConfig::load(path)?;
        cfg.apply(&self.overrides());
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one config and write its trajectory as CSV
    Simulate(Common),
    /// Reproduce a figure sweep: one CSV per curve plus a manifest
    Figure {
        /// 1, 2, 3, 4a or 4b
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Report the parameter conditions of a config
    Check(Common),
    /// Fit decay exponents and compare them with the predicted orders
    Rates {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_lo: Option<f64>,
        #[arg(long)]
        t_hi: Option<f64>,
    },
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let code = match cli.command {
        Command::Simulate(common) => cmd_simulate(&common),
        Command::Figure { id, common } => cmd_figure(&id, &common),
        Command::Check(common) => cmd_check(&common),
        Command::Rates { common, t_lo, t_hi } => cmd_rates(&common, t_lo, t_hi),
    };
    code.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })
}

/// Runs a config, returning the trajectory (partial on failure) and the error if any.
fn run(cfg: &SystemConfig) -> Result<(Trajectory, Option<IntegrationError>)> {
    match integrate(cfg) {
        Ok(traj) => Ok((traj, None)),
        Err(f) => match f.error {
            IntegrationError::Invalid(e) => Err(e),
            other => Ok((f.partial, Some(other))),
        },
    }
}

fn write_csv(path: &Path, cfg: &SystemConfig, traj: &Trajectory) -> Result<()> {
    write_trajectory_file(path, cfg.dimension(), traj)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

const FITTED: [Quantity; 6] = [
    Quantity::EnvelopeGap,
    Quantity::ProxGap,
    Quantity::GradNorm,
    Quantity::ProxDist,
    Quantity::VelocityNorm,
    Quantity::DistToMinimizer,
];

/// Decay order guaranteed for `quantity` by the schedule exponents, if any.
pub fn predicted_exponent(cfg: &ExperimentConfig, quantity: Quantity) -> Option<f64> {
    let (n, l) = (cfg.n, cfg.l);
    match quantity {
        Quantity::EnvelopeGap | Quantity::ProxGap => Some(-(n + 2.0)),
        Quantity::GradNorm => Some(-(n / 2.0 + 1.0 + l / 2.0)),
        Quantity::ProxDist => Some(-(n / 2.0 + 1.0 - l / 2.0)),
        Quantity::VelocityNorm => Some(-1.0),
        _ => None,
    }
}

fn fits(traj: &Trajectory, window: (f64, f64)) -> Vec<(Quantity, Result<RateFit>)> {
    FITTED.iter().map(|&q| (q, fit_rate(traj, q, window))).collect()
}

fn cmd_simulate(common: &Common) -> Result<i32> {
    let exp = common.load()?;
    let cfg = exp.system_config()?;
    let out = common
        .out
        .clone()
        .or_else(|| exp.output.clone())
        .unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    let (traj, failure) = run(&cfg)?;
    write_csv(&out, &cfg, &traj)?;

    let report = check_conditions_polynomial(&cfg.schedule);
    println!("wrote {} samples to {}", traj.len(), out.display());
    println!("steps: {}", traj.steps);
    if let Some(last) = traj.last() {
        println!("final t: {}", last.t());
        println!("final envelope_gap: {:e}", last.envelope_gap);
        println!("final dist_to_minimizer: {:e}", last.dist_to_minimizer);
    }
    if let Some(window) = default_window(&traj) {
        println!("fitted exponents over [{}, {}]:", window.0, window.1);
        for (q, fit) in fits(&traj, window) {
            match fit {
                Ok(f) => println!("  {:<18} {:>9.4}  (r^2 {:.4})", q.name(), f.exponent, f.r_squared),
                Err(e) => println!("  {:<18} n/a ({e})", q.name()),
            }
        }
    }
    println!("conditions: {}", if report.overall { "pass" } else { "FAIL" });
    match failure {
        None => Ok(EXIT_OK),
        Some(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_DIVERGENCE)
        }
    }
}

fn cmd_check(common: &Common) -> Result<i32> {
    let exp = common.load()?;
    let cfg = exp.system_config()?;
    let report = check_conditions_polynomial(&cfg.schedule);
    println!("{report}");
    println!("--- json");
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if report.overall { EXIT_OK } else { EXIT_CONDITIONS })
}

fn cmd_rates(common: &Common, t_lo: Option<f64>, t_hi: Option<f64>) -> Result<i32> {
    let exp = common.load()?;
    let cfg = exp.system_config()?;
    let (traj, failure) = run(&cfg)?;
    if let Some(e) = &failure {
        eprintln!("error: {e}");
    }
    let Some((lo, hi)) = default_window(&traj) else {
        return Ok(EXIT_DIVERGENCE);
    };
    let window = (t_lo.unwrap_or(lo), t_hi.unwrap_or(hi));
    println!("window [{}, {}]", window.0, window.1);
    println!("{:<18} {:>10} {:>10} {:>8} {:>8}", "quantity", "fitted", "predicted", "r^2", "samples");
    for (q, fit) in fits(&traj, window) {
        let predicted = predicted_exponent(&exp, q)
            .map(|p| format!("{p:.4}"))
            .unwrap_or_else(|| "-".into());
        match fit {
            Ok(f) => println!(
                "{:<18} {:>10.4} {:>10} {:>8.4} {:>8}",
                q.name(),
                f.exponent,
                predicted,
                f.r_squared,
                f.samples
            ),
            Err(e) => println!("{:<18} {:>10} {:>10}  {e}", q.name(), "n/a", predicted),
        }
    }
    Ok(if failure.is_some() { EXIT_DIVERGENCE } else { EXIT_OK })
}

#[derive(Debug, Serialize)]
struct ManifestCurve {
    value: f64,
    csv: String,
    config: String,
    diverging: bool,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    steps: usize,
    t_reached: f64,
    dist_to_minimizer_start: f64,
    dist_to_minimizer_end: f64,
}

#[derive(Debug, Serialize)]
struct Manifest {
    figure: FigureId,
    sweep_parameter: &'static str,
    sweep_values: Vec<f64>,
    note: &'static str,
    /// Panel letter to CSV column.
    subfigures: BTreeMap<&'static str, &'static str>,
    curves: Vec<ManifestCurve>,
}

fn run_curve(curve: &Curve, dir: &Path) -> Result<ManifestCurve> {
    let stem = curve.stem();
    let csv_name = format!("{stem}.csv");
    let config_name = format!("{stem}.json");
    fs::write(dir.join(&config_name), curve.config.to_json())
        .map_err(|e| Error::Config(format!("cannot write {config_name}: {e}")))?;
    let cfg = curve.config.system_config()?;
    let (traj, failure) = run(&cfg)?;
    write_csv(&dir.join(&csv_name), &cfg, &traj)?;
    let dist = |s: Option<&crate::dynamics::Sample>| s.map_or(f64::NAN, |s| s.dist_to_minimizer);
    Ok(ManifestCurve {
        value: curve.value,
        csv: csv_name,
        config: config_name,
        diverging: curve.diverging,
        status: match failure {
            None => "ok",
            Some(IntegrationError::Divergence { .. }) => "divergence",
            Some(_) => "stiffness",
        },
        error: failure.map(|e| e.to_string()),
        steps: traj.steps,
        t_reached: traj.last().map_or(cfg.schedule.t0, |s| s.t()),
        dist_to_minimizer_start: dist(traj.first()),
        dist_to_minimizer_end: dist(traj.last()),
    })
}

fn cmd_figure(id: &str, common: &Common) -> Result<i32> {
    let id: FigureId = id.parse()?;
    if common.config.is_some() {
        return Err(Error::Config("figure takes no --config; presets are built in".into()));
    }
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;

    let mut curves = figure_curves(id);
    for c in &mut curves {
        c.config.apply(&common.overrides());
        c.config.system_config()?;
    }
    let results: Vec<Result<ManifestCurve>> = std::thread::scope(|scope| {
        let handles: Vec<_> = curves
            .iter()
            .map(|c| scope.spawn(|| run_curve(c, &dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("curve worker panicked"))
            .collect()
    });
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;

    let any_failed = entries.iter().any(|e| e.error.is_some());
    for e in &entries {
        println!(
            "{:<28} {:<10} steps {:>10}  t {:>8.3}  dist {:.3e} -> {:.3e}",
            e.csv, e.status, e.steps, e.t_reached, e.dist_to_minimizer_start, e.dist_to_minimizer_end
        );
    }
    let (param, values) = sweep(id);
    let manifest = Manifest {
        figure: id,
        sweep_parameter: param,
        sweep_values: values.to_vec(),
        note: "sweep members, horizon and sampling are preset choices",
        subfigures: subfigures(id).into_iter().collect(),
        curves: entries,
    };
    let path = dir.join(format!("figure{id}_manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    println!("manifest: {}", path.display());
    Ok(if any_failed { EXIT_DIVERGENCE } else { EXIT_OK })
}
