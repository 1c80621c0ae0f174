//! Command-line front door: config parsing, pipeline orchestration, report
//! emission, reproducibility metadata.
//!
//! Exit codes: 0 success, 2 validation/config/budget error, 3 numerical
//! integrity error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pathlab::config::RunDocument;
use pathlab::error::PathlabError;
use pathlab::parsing::{self, PathSet, Strategy, ValidityMode};
use pathlab::report::{self, Manifest};
use pathlab::scenario::{self, ScenarioKind};
use pathlab::{field, propagator};

#[derive(Parser)]
#[command(name = "pathlab", version, about = "Discretized sum-over-histories laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config document (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports.
    #[arg(long, global = true, default_value = "pathlab-out")]
    out: PathBuf,

    /// Solver seed (overrides the config document).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap (requires the parallel build).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Report formats to emit.
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Partition validity mode (overrides the config document).
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Solver strategy (overrides the config document).
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,

    /// Log progress to stderr.
    #[arg(long, global = true, short = 'v')]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Joint and conditional probabilities for the configured ensemble.
    Propagate,
    /// Search for a valid non-interfering partition.
    Parse,
    /// Reconstruct field histories for the configured or solved sets.
    Reconstruct,
    /// Run a canned scenario end to end.
    Scenario,
    /// Exhaustively enumerate and validate every partition (small n only).
    Oracle,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        self != Format::Csv
    }
    fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Copy, Clone, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    PhaseBinning,
    Annealing,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("pathlab: {err}");
            match err {
                PathlabError::Validation(_) | PathlabError::Budget(_) | PathlabError::Config(_) => {
                    ExitCode::from(2)
                }
                PathlabError::NumericalIntegrity(_) => ExitCode::from(3),
                PathlabError::Io(_) => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli) -> pathlab::Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| PathlabError::validation(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some() {
        eprintln!("pathlab: sequential build, --threads ignored");
    }

    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| PathlabError::validation("--config is required"))?;
    let config_text = std::fs::read_to_string(config_path)?;
    let mut doc: RunDocument = serde_json::from_str(&config_text)?;
    apply_overrides(cli, &mut doc);

    std::fs::create_dir_all(&cli.out)?;
    let command_name = match cli.command {
        Command::Propagate => "propagate",
        Command::Parse => "parse",
        Command::Reconstruct => "reconstruct",
        Command::Scenario => "scenario",
        Command::Oracle => "oracle",
    };
    let manifest = Manifest::new(command_name, &config_text, doc.solver.seed);
    report::write_json(&cli.out.join("manifest.json"), &manifest)?;

    if cli.verbose {
        eprintln!("pathlab: {command_name} -> {}", cli.out.display());
    }
    match cli.command {
        Command::Propagate => cmd_propagate(cli, &doc),
        Command::Parse => cmd_parse(cli, &doc),
        Command::Reconstruct => cmd_reconstruct(cli, &doc),
        Command::Scenario => cmd_scenario(cli, &doc),
        Command::Oracle => cmd_oracle(cli, &doc),
    }
}

fn apply_overrides(cli: &Cli, doc: &mut RunDocument) {
    if let Some(seed) = cli.seed {
        doc.solver.seed = seed;
    }
    if let Some(mode) = cli.mode {
        doc.solver.mode = match mode {
            ModeArg::Strict => ValidityMode::Strict,
            ModeArg::Relaxed => ValidityMode::Relaxed,
        };
    }
    if let Some(strategy) = cli.strategy {
        doc.solver.strategy = match strategy {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::PhaseBinning => Strategy::PhaseBinning,
            StrategyArg::Annealing => Strategy::Annealing,
        };
    }
    if let Some(s) = &mut doc.scenario {
        s.solver = doc.solver.clone();
        s.physics = doc.physics;
    }
}

#[derive(Serialize)]
struct PropagateReport {
    seed: u64,
    probability: propagator::ProbabilityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_propagate(cli: &Cli, doc: &RunDocument) -> pathlab::Result<()> {
    let evaluated = doc.evaluated_ensemble()?;
    let probability = propagator::joint_probability(&evaluated);
    let note = probability
        .severed
        .then(|| "severed: barriers eliminate every route".to_string());
    let rep = PropagateReport {
        seed: doc.solver.seed,
        probability,
        note,
    };
    if cli.format.json() {
        report::write_json(&cli.out.join("probability_report.json"), &rep)?;
    }
    if doc.lattice.is_some() && !rep.probability.severed {
        let conditional = propagator::conditional_distribution(
            &doc.lattice()?,
            &doc.functional(),
            &doc.physics,
        )?;
        if cli.format.json() {
            report::write_json(&cli.out.join("conditional.json"), &conditional)?;
        }
        if cli.format.csv() {
            std::fs::write(
                cli.out.join("conditional.csv"),
                report::conditional_csv(&conditional),
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ParseReport {
    seed: u64,
    outcome: parsing::SolveOutcome,
}

fn cmd_parse(cli: &Cli, doc: &RunDocument) -> pathlab::Result<()> {
    let evaluated = doc.evaluated_ensemble()?;
    let outcome = parsing::find_parsing(&evaluated, &doc.solver)?;
    let rep = ParseReport {
        seed: doc.solver.seed,
        outcome,
    };
    report::write_json(&cli.out.join("partition_report.json"), &rep)?;
    Ok(())
}

#[derive(Serialize)]
struct ReconstructReport {
    seed: u64,
    fields: Vec<field::FieldHistory>,
    phase_fronts: Vec<field::PhaseFrontReport>,
}

fn cmd_reconstruct(cli: &Cli, doc: &RunDocument) -> pathlab::Result<()> {
    let evaluated = doc.evaluated_ensemble()?;
    let member_sets: Vec<Vec<usize>> = match &doc.set_members {
        Some(sets) => sets.clone(),
        None => parsing::find_parsing(&evaluated, &doc.solver)?
            .partition
            .member_sets(),
    };
    let mut fields = Vec::new();
    let mut phase_fronts = Vec::new();
    for members in &member_sets {
        let set = PathSet::from_members(members.clone(), &evaluated);
        let f = field::reconstruct_field(&set, &evaluated)?;
        phase_fronts.push(field::phase_front_check(&f, &evaluated)?);
        fields.push(f);
    }
    if cli.format.csv() {
        for (i, f) in fields.iter().enumerate() {
            std::fs::write(cli.out.join(format!("field_{i:03}.csv")), report::field_csv(f))?;
        }
    }
    if cli.format.json() {
        report::write_json(
            &cli.out.join("reconstruction_report.json"),
            &ReconstructReport {
                seed: doc.solver.seed,
                fields,
                phase_fronts,
            },
        )?;
    }
    Ok(())
}

fn cmd_scenario(cli: &Cli, doc: &RunDocument) -> pathlab::Result<()> {
    let scenario_cfg = doc
        .scenario
        .as_ref()
        .ok_or_else(|| PathlabError::validation("config document has no scenario section"))?;
    match &scenario_cfg.kind {
        ScenarioKind::FreeExchange | ScenarioKind::FocusingIndex { .. } => {
            let rep = scenario::run_free_exchange(scenario_cfg)?;
            if cli.format.json() {
                report::write_json(&cli.out.join("free_exchange_report.json"), &rep)?;
            }
            if cli.format.csv() {
                for (i, f) in rep.kink_fields.iter().enumerate() {
                    std::fs::write(
                        cli.out.join(format!("kink_field_{i:03}.csv")),
                        report::field_csv(f),
                    )?;
                }
                for (i, f) in rep.solver_fields.iter().enumerate() {
                    std::fs::write(
                        cli.out.join(format!("solver_field_{i:03}.csv")),
                        report::field_csv(f),
                    )?;
                }
            }
        }
        ScenarioKind::DoubleSlit { .. } => {
            let rep = scenario::run_double_slit(scenario_cfg)?;
            if cli.format.json() {
                report::write_json(&cli.out.join("double_slit_report.json"), &rep)?;
            }
            if cli.format.csv() {
                std::fs::write(cli.out.join("fringe.csv"), report::conditional_csv(&rep.fringe))?;
            }
        }
        ScenarioKind::TripleSlit { .. } => {
            let rep = scenario::run_triple_slit(scenario_cfg)?;
            if cli.format.json() {
                report::write_json(&cli.out.join("triple_slit_report.json"), &rep)?;
            }
            if cli.format.csv() {
                std::fs::write(cli.out.join("sorkin.csv"), report::sorkin_csv(&rep))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    seed: u64,
    num_valid: usize,
    partitions: Vec<parsing::Partition>,
}

fn cmd_oracle(cli: &Cli, doc: &RunDocument) -> pathlab::Result<()> {
    let evaluated = doc.evaluated_ensemble()?;
    let partitions = parsing::enumerate_all_parsings(&evaluated, &doc.solver)?;
    report::write_json(
        &cli.out.join("oracle_parsings.json"),
        &OracleReport {
            seed: doc.solver.seed,
            num_valid: partitions.len(),
            partitions,
        },
    )?;
    Ok(())
}
