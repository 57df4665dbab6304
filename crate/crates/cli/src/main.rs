//! `ifm`: sweeps and seeded protocol trials for the IFM simulator.

mod grid;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use ifm_core::circuits::{
    bell_generation, chi_preparation, chi_reference, ghz_generation, ghz_reference, BellLabel,
};
use ifm_core::interferometer::{required_splitters, smallest_n_reaching, sweep};
use ifm_core::trials::{bell_measure_trials, cnot_trials, photon_bell_trials};
use ifm_core::{truth_table, IfmGateConfig, IfmMode, QubitDescriptor, StateVector};

use table::{Cell, Table};

#[derive(Parser, Debug)]
#[command(
    name = "ifm",
    version,
    about = "Interaction-free measurement circuit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Splitter counts: `N`, `start..end[..step]` (inclusive), comma-separated.
    /// Protocol commands run the ideal gate when omitted.
    #[arg(long, global = true)]
    n: Option<String>,

    /// Survival probabilities per encounter, comma-separated, each in [0, 1).
    #[arg(long, global = true)]
    eta: Option<String>,

    #[arg(long, global = true, default_value_t = 1000,
          value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and approximate success probability over an (N, eta) grid.
    Sweep,
    /// Bell-pair generation fidelity.
    Bell,
    /// GHZ and four-qubit resource generation fidelity.
    Ghz,
    /// Heralded photon-pair Bell states, one row per trial.
    PhotonBell,
    /// Bell measurement of random Bell inputs, one row per trial.
    BellMeasure,
    /// Teleported CNOT on random inputs, one row per trial.
    Cnot,
    /// Splitter count needed for a target success probability.
    RequiredN {
        #[arg(long, default_value_t = 0.9)]
        target: f64,
        /// Upper limit for the exact scan.
        #[arg(long, default_value_t = 100_000)]
        max_n: u64,
    },
    /// Gate action on the four basis inputs.
    TruthTable,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<ifm_core::SimError> for Failure {
    fn from(e: ifm_core::SimError) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn n_values(cli: &Cli) -> Result<Option<Vec<u64>>, Failure> {
    cli.n
        .as_deref()
        .map(grid::parse_n_list)
        .transpose()
        .map_err(Failure::Usage)
}

fn eta_values(cli: &Cli, default: &[f64]) -> Result<Vec<f64>, Failure> {
    match cli.eta.as_deref() {
        Some(s) => grid::parse_eta_list(s).map_err(Failure::Usage),
        None => Ok(default.to_vec()),
    }
}

/// Gate configurations for the grid commands, η-major; ideal when `--n`
/// is absent.
fn configs(cli: &Cli) -> Result<Vec<IfmGateConfig>, Failure> {
    let Some(ns) = n_values(cli)? else {
        if cli.eta.is_some() {
            return usage("--eta needs --n (the ideal gate has no loss parameter)");
        }
        return Ok(vec![IfmGateConfig::ideal()]);
    };
    let etas = eta_values(cli, &[0.0])?;
    let mut out = Vec::new();
    for &eta in &etas {
        for &n in &ns {
            match IfmGateConfig::finite(n, eta) {
                Ok(c) => out.push(c),
                Err(e) => return usage(e.to_string()),
            }
        }
    }
    Ok(out)
}

fn single_config(cli: &Cli) -> Result<IfmGateConfig, Failure> {
    let all = configs(cli)?;
    if all.len() != 1 {
        return usage("trial commands take a single --n and --eta");
    }
    Ok(all[0])
}

fn mode_cells(config: &IfmGateConfig) -> [Cell; 3] {
    match config.mode() {
        IfmMode::Ideal => ["ideal".into(), Cell::Empty, Cell::Empty],
        IfmMode::Finite { n_splitters, eta } => ["finite".into(), n_splitters.into(), eta.into()],
    }
}

fn label(l: Option<BellLabel>) -> Cell {
    l.map_or(Cell::Empty, |l| l.name().into())
}

fn fidelity_row(
    config: &IfmGateConfig,
    state: &str,
    s: &StateVector,
    reference: &StateVector,
) -> Result<Vec<Cell>, Failure> {
    let mut row = vec![state.into()];
    row.extend(mode_cells(config));
    row.push(s.fidelity(reference)?.into());
    row.push(s.absorbed_mass().into());
    Ok(row)
}

const FIDELITY_HEADER: &[&str] = &[
    "state",
    "mode",
    "n_splitters",
    "eta",
    "fidelity",
    "absorbed_mass",
];

fn build(cli: &Cli) -> Result<Table, Failure> {
    match &cli.command {
        Command::Sweep => {
            let ns = n_values(cli)?.unwrap_or_else(|| (2..=500).collect());
            let etas = eta_values(cli, &[0.0, 0.05, 0.1, 0.2])?;
            if let Some(&n) = ns.iter().find(|&&n| n < 2) {
                return usage(format!("sweep needs N >= 2, got {n}"));
            }
            let mut t = Table::new(&["N", "eta", "p_exact", "p_approx"]);
            for r in sweep(&ns, &etas)? {
                t.push(vec![
                    r.n_splitters.into(),
                    r.eta.into(),
                    r.p_exact.into(),
                    r.p_approx.into(),
                ]);
            }
            Ok(t)
        }
        Command::Bell => {
            let reference = BellLabel::PhiPlus.state(
                QubitDescriptor::positron("positron"),
                QubitDescriptor::electron("electron"),
            )?;
            let mut t = Table::new(FIDELITY_HEADER);
            for c in configs(cli)? {
                t.push(fidelity_row(&c, "bell", &bell_generation(&c)?, &reference)?);
            }
            Ok(t)
        }
        Command::Ghz => {
            let (ghz, chi) = (ghz_reference()?, chi_reference()?);
            let mut t = Table::new(FIDELITY_HEADER);
            for c in configs(cli)? {
                t.push(fidelity_row(&c, "ghz", &ghz_generation(&c)?, &ghz)?);
                t.push(fidelity_row(&c, "chi", &chi_preparation(&c)?, &chi)?);
            }
            Ok(t)
        }
        Command::PhotonBell => {
            let c = single_config(cli)?;
            let mut t = Table::new(&["trial", "label", "fidelity"]);
            for r in photon_bell_trials(&c, cli.trials, cli.seed)? {
                t.push(vec![r.trial.into(), label(r.label), r.fidelity.into()]);
            }
            Ok(t)
        }
        Command::BellMeasure => {
            let c = single_config(cli)?;
            let mut t = Table::new(&[
                "trial",
                "true_label",
                "reported_label",
                "guessed",
                "correct",
            ]);
            for r in bell_measure_trials(&c, cli.trials, cli.seed)? {
                t.push(vec![
                    r.trial.into(),
                    r.true_label.name().into(),
                    r.reported_label.name().into(),
                    r.guessed.into(),
                    r.correct.into(),
                ]);
            }
            Ok(t)
        }
        Command::Cnot => {
            let c = single_config(cli)?;
            let mut t = Table::new(&["trial", "b1", "b2", "success"]);
            for r in cnot_trials(&c, cli.trials, cli.seed)? {
                t.push(vec![
                    r.trial.into(),
                    label(r.b1),
                    label(r.b2),
                    r.success.into(),
                ]);
            }
            Ok(t)
        }
        Command::RequiredN { target, max_n } => {
            if !(*target > 0.0 && *target < 1.0) {
                return usage(format!("--target {target} outside (0, 1)"));
            }
            let etas = eta_values(cli, &[0.0, 0.05, 0.1, 0.2])?;
            let mut t = Table::new(&["target_p", "eta", "n_estimate", "n_exact_search"]);
            for eta in etas {
                let scan = smallest_n_reaching(*target, eta, *max_n)?;
                t.push(vec![
                    (*target).into(),
                    eta.into(),
                    required_splitters(*target, eta)?.into(),
                    scan.into(),
                ]);
            }
            Ok(t)
        }
        Command::TruthTable => {
            let mut t = Table::new(&[
                "mode",
                "n_splitters",
                "eta",
                "control_in",
                "target_in",
                "out0_re",
                "out0_im",
                "out1_re",
                "out1_im",
                "absorbed_mass",
            ]);
            for c in configs(cli)? {
                for r in truth_table(&c)? {
                    let mut row: Vec<Cell> = mode_cells(&c).into();
                    row.extend([
                        u64::from(r.control_in).into(),
                        u64::from(r.target_in).into(),
                        r.target_out[0].re.into(),
                        r.target_out[0].im.into(),
                        r.target_out[1].re.into(),
                        r.target_out[1].im.into(),
                        r.absorbed_mass.into(),
                    ]);
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let table = build(cli)?;
    let bytes = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json()?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .context("cannot write to stdout")?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
