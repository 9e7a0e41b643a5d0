//! veritas: validate expectation suites over CSV tables, and generate the
//! deterministic scenario corpora they are calibrated against.
//!
//! Exit codes: 0 every expectation met the threshold; 1 at least one fell
//! below it (or errored); 2 configuration or suite error; 3 data load error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use veritas_core::engine::{evaluate_suite, EvalOptions, Status, ValidationReport};
use veritas_core::model::{
    load_benchmark_table, load_salary_brackets, load_schema_windows, load_suite, Registries,
};
use veritas_core::table::{load_table, Table};
use veritas_core::wrangle::derive_abs_diff_column;
use veritas_corpus::{find_scenario, generate_scenario, scenario_names, Manifest, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "veritas",
    version,
    about = "Declarative data validation over CSV tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expectation suite against a data directory.
    Validate(ValidateArgs),
    /// Generate a scenario corpus (tables, suites, registries, manifest).
    Generate(GenerateArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Expectation suite (JSON).
    #[arg(long)]
    suite: PathBuf,
    /// Directory holding the table CSV files.
    #[arg(long)]
    data: PathBuf,
    /// Table manifest; defaults to <data>/manifest.json.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Schema windows CSV (overrides the manifest's registry entry).
    #[arg(long)]
    windows: Option<PathBuf>,
    /// Benchmark limits CSV (overrides the manifest's registry entry).
    #[arg(long)]
    benchmarks: Option<PathBuf>,
    /// Salary brackets CSV (overrides the manifest's registry entry).
    #[arg(long)]
    brackets: Option<PathBuf>,
    /// Sample the suite's table by this key column before evaluating.
    #[arg(long)]
    sample_key: Option<String>,
    /// Number of distinct key values to draw.
    #[arg(long)]
    sample_k: Option<usize>,
    /// Seed for the key draw.
    #[arg(long)]
    sample_seed: Option<u64>,
    /// Report output path.
    #[arg(long, default_value = "./report.json")]
    report: PathBuf,
    /// Maximum failing row ids kept per expectation.
    #[arg(long, default_value_t = 25)]
    max_samples: usize,
    /// Minimum per-expectation success rate before a nonzero exit.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
}

#[derive(Args)]
struct GenerateArgs {
    /// Name of a shipped scenario.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Scenario configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

enum CliError {
    /// Configuration, flag, suite, or registry problem.
    Config(String),
    /// A table failed to load.
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Data(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn worker_threads() -> Result<usize, CliError> {
    match std::env::var("VERITAS_THREADS") {
        Err(_) => Ok(0),
        Ok(raw) if raw.trim().is_empty() => Ok(0),
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("VERITAS_THREADS is not a number: {raw:?}"))),
    }
}

fn load_data_tables(
    args: &ValidateArgs,
    manifest: &Manifest,
) -> Result<BTreeMap<String, Table>, CliError> {
    let mut tables = BTreeMap::new();
    for entry in &manifest.tables {
        let path = args.data.join(&entry.file);
        let outcome = load_table(&path, &entry.name, &entry.columns)
            .map_err(|e| CliError::Data(e.to_string()))?;
        for diagnostic in &outcome.diagnostics {
            eprintln!("{}", diagnostic.to_json_line());
        }
        let mut table = outcome.table;
        for derived in &entry.derived {
            if derived.op != "abs_diff" {
                return Err(CliError::Config(format!(
                    "unknown derived-column op {:?} on table {:?}",
                    derived.op, entry.name
                )));
            }
            table = derive_abs_diff_column(&table, &derived.total, &derived.parts, &derived.name)
                .map_err(config_err)?;
        }
        tables.insert(entry.name.clone(), table);
    }
    Ok(tables)
}

fn load_registries(args: &ValidateArgs, manifest: &Manifest) -> Result<Registries, CliError> {
    let from_manifest = |name: &Option<String>| name.as_ref().map(|f| args.data.join(f));
    let windows_path = args
        .windows
        .clone()
        .or_else(|| from_manifest(&manifest.registries.windows));
    let benchmarks_path = args
        .benchmarks
        .clone()
        .or_else(|| from_manifest(&manifest.registries.benchmarks));
    let brackets_path = args
        .brackets
        .clone()
        .or_else(|| from_manifest(&manifest.registries.brackets));

    let mut registries = Registries::default();
    if let Some(path) = windows_path {
        registries.windows = load_schema_windows(&path).map_err(config_err)?;
    }
    if let Some(path) = benchmarks_path {
        registries.benchmark = Some(load_benchmark_table(&path).map_err(config_err)?);
    }
    if let Some(path) = brackets_path {
        registries.brackets = load_salary_brackets(&path).map_err(config_err)?;
    }
    Ok(registries)
}

fn print_summary(report: &ValidationReport) {
    println!(
        "{:<44} {:<24} {:>9} {:>10}",
        "id", "kind", "evaluated", "success"
    );
    for result in &report.results {
        let success = match result.status {
            Status::Errored => "error".to_string(),
            _ => format!("{:.4}%", result.success_rate * 100.0),
        };
        println!(
            "{:<44} {:<24} {:>9} {:>10}",
            result.id, result.kind, result.evaluated, success
        );
    }
}

fn run_validate(args: &ValidateArgs) -> Result<bool, CliError> {
    if !(0.0..=1.0).contains(&args.threshold) {
        return Err(CliError::Config(format!(
            "threshold must lie in [0, 1], got {}",
            args.threshold
        )));
    }
    let suite = load_suite(&args.suite).map_err(config_err)?;

    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.data.join("manifest.json"));
    let manifest = Manifest::load(&manifest_path).map_err(config_err)?;

    let mut tables = load_data_tables(args, &manifest)?;
    let registries = load_registries(args, &manifest)?;

    let mut sample_seed = None;
    if let Some(key) = &args.sample_key {
        let k = args
            .sample_k
            .ok_or_else(|| CliError::Config("--sample-key requires --sample-k".to_string()))?;
        let seed = args.sample_seed.unwrap_or(0);
        let table = tables.get(&suite.table).ok_or_else(|| {
            CliError::Config(format!("suite targets unknown table {:?}", suite.table))
        })?;
        let sampled = table.sample_by_key(key, k, seed).map_err(config_err)?;
        tables.insert(suite.table.clone(), sampled);
        sample_seed = Some(seed);
    }

    let opts = EvalOptions {
        threads: worker_threads()?,
        sample_cap: args.max_samples,
        sample_seed,
        ..EvalOptions::default()
    };
    let report = evaluate_suite(&suite, &tables, &registries, &opts).map_err(config_err)?;

    std::fs::write(&args.report, report.to_json_string()).map_err(|e| {
        CliError::Config(format!(
            "cannot write report {}: {e}",
            args.report.display()
        ))
    })?;
    print_summary(&report);

    let all_met = report
        .results
        .iter()
        .all(|r| r.status != Status::Errored && r.success_rate >= args.threshold);
    Ok(all_met)
}

fn load_config_file(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn run_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let mut config = match (&args.scenario, &args.config) {
        (Some(name), None) => find_scenario(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown scenario {:?}; shipped scenarios: {}",
                name,
                scenario_names().join(", ")
            ))
        })?,
        (None, Some(path)) => load_config_file(path)?,
        _ => {
            return Err(CliError::Config(
                "generate needs exactly one of --scenario or --config".to_string(),
            ))
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let manifest = generate_scenario(&config, &args.out).map_err(config_err)?;
    println!(
        "generated scenario {} (seed {}) into {}",
        manifest.scenario,
        manifest.seed,
        args.out.display()
    );
    for table in &manifest.tables {
        println!("  {} ({} rows)", table.file, table.rows);
    }
    for suite in &manifest.suites {
        println!("  {} ({} expectations)", suite.file, suite.expected.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate(args) => run_validate(args).map(|all_met| {
            if all_met {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }),
        Command::Generate(args) => run_generate(args).map(|()| ExitCode::SUCCESS),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
