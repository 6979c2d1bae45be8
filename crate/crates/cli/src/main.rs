use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::{env, fs};

use clap::{Parser, Subcommand};

use vinfo_core::corpus_io::{read_config, read_report};
use vinfo_core::curves::{curves_from_report, curves_from_tables, curves_to_csv, merge_curves, VEntropyTable};
use vinfo_core::oracle::synth_generate;
use vinfo_core::pipeline::{run_config, write_synthetic};
use vinfo_core::selfcheck::run_selfcheck;
use vinfo_core::{Error, Scenario, ScenarioSpec, SplitPart};

#[derive(Parser)]
#[command(name = "vinfo", version, about = "Baselined and conditional probing in bits of V-information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured layer and write `<task>.report.{jsonl,csv}`.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the training seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = ["dev", "test"])]
        eval_split: Option<String>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write a synthetic scenario as a ready-to-run experiment directory.
    Synth {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 4096)]
        train: usize,
        #[arg(long, default_value_t = 1024)]
        dev: usize,
        #[arg(long, default_value_t = 1024)]
        test: usize,
        #[arg(long)]
        ambiguity_rate: Option<f64>,
        #[arg(long)]
        task: Option<String>,
    },
    /// Emit long-format curve data (source,layer,series,bits).
    ReportCurves {
        /// Report files (`.report.jsonl`).
        #[arg(long = "from", num_args = 1..)]
        from: Vec<PathBuf>,
        /// Single-layer V-entropy table CSV.
        #[arg(long, requires = "two_layer_table")]
        single_layer_table: Option<PathBuf>,
        /// Two-layer (baseline-layer) V-entropy table CSV.
        #[arg(long, requires = "single_layer_table")]
        two_layer_table: Option<PathBuf>,
        /// Table columns to use; all columns when omitted.
        #[arg(long = "column")]
        columns: Vec<String>,
        /// Writes `curves.csv` here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the oracle and property checks on small synthetic data.
    Selfcheck {
        #[arg(long, default_value_t = 2)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Numeric(_) | Error::Training { .. } => 4,
        Error::InFile { source, .. } => exit_code(source),
        _ => 3,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
}

fn source_name(path: &Path) -> String {
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    name.strip_suffix(".report.jsonl").unwrap_or(&name).to_owned()
}

fn report_curves(
    from: &[PathBuf],
    tables: Option<(&Path, &Path)>,
    columns: &[String],
    out_dir: Option<&Path>,
) -> Result<(), Error> {
    let mut sources = Vec::new();
    for path in from {
        let report = read_report(path)?;
        sources.push(curves_from_report(&report, &source_name(path)));
    }
    if let Some((single, two)) = tables {
        let single = VEntropyTable::read(single)?;
        let two = VEntropyTable::read(two)?;
        let columns = if columns.is_empty() { single.columns.clone() } else { columns.to_vec() };
        for column in &columns {
            sources.push(curves_from_tables(&single, &two, column, column)?);
        }
    }
    if sources.is_empty() {
        return Err(Error::Config("report-curves needs --from reports or a pair of tables".into()));
    }
    let csv = curves_to_csv(&merge_curves(sources)?);
    match out_dir {
        Some(dir) => write_file(&dir.join("curves.csv"), &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Estimate { config, seed, eval_split, out_dir } => {
            let mut cfg = read_config(&config)?;
            if let Some(seed) = seed {
                cfg.settings.train.seed = seed;
            }
            if let Some(split) = eval_split {
                cfg.settings.eval_split = split.parse::<SplitPart>()?;
            }
            if let Some(dir) = out_dir {
                cfg.output_dir = dir;
            }
            let out = run_config(&cfg)?;
            print!("{}", out.table);
            eprintln!("wrote {} and {}", out.csv_path.display(), out.jsonl_path.display());
        }
        Command::Synth { scenario, seed, out_dir, train, dev, test, ambiguity_rate, task } => {
            let mut spec = ScenarioSpec::new(scenario, seed).with_sizes(train, dev, test);
            if let Some(rate) = ambiguity_rate {
                spec.ambiguity_rate = rate;
            }
            let corpus = synth_generate(&spec)?;
            let task = task.unwrap_or_else(|| scenario.to_string());
            let conf = write_synthetic(&corpus, &out_dir, &task, seed)?;
            println!("{}", conf.display());
        }
        Command::ReportCurves { from, single_layer_table, two_layer_table, columns, out_dir } => {
            let tables = single_layer_table.as_deref().zip(two_layer_table.as_deref());
            report_curves(&from, tables, &columns, out_dir.as_deref())?;
        }
        Command::Selfcheck { seeds, seed } => {
            let outcomes = run_selfcheck(seeds, seed)?;
            for o in &outcomes {
                println!("{o}");
            }
            if outcomes.iter().any(|o| !o.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = env::var("VINFO_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("VINFO_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
