//! `kernelguard` command-line tool.
//!
//! Exit codes: 0 success (and a clean commit for `classify`), 1 a risky
//! commit, 2 any error including bad usage.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernelguard::corpus::CloneType;
use kernelguard::evaluation::CloneScope;
use kernelguard::kernels::KernelKind;

use settings::{parse_instant, Overrides, Settings};

#[derive(Parser, Debug)]
#[command(name = "kernelguard", version, about = "Flag risky method changes by tree-kernel similarity to past bugs")]
struct Cli {
    /// Optional `key = value` file with defaults for the flags below.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, env = "KERNELGUARD_THREADS")]
    threads: Option<usize>,

    /// More diagnostics on standard error; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the snapshot index of one project's change history.
    Index {
        /// Change corpus (JSONL, or a Technical Debt `.csv` export).
        corpus: PathBuf,
        /// Where to write the index.
        #[arg(long)]
        out: PathBuf,
        /// Project to index when the corpus holds several.
        #[arg(long)]
        project: Option<String>,
    },
    /// Classify the method changes of one commit. Exits 1 when risky.
    Classify {
        /// Index written by `index`.
        index: PathBuf,
        /// JSONL of the commit's method changes.
        payload: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Print one JSON object per method instead of the text report.
        #[arg(long)]
        json: bool,
        /// Also save the full results for `report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an evaluation harness.
    Evaluate {
        #[arg(long, value_enum)]
        mode: Mode,
        dataset: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Time-aware defect evaluation over a change corpus.
    EvaluateDefects {
        dataset: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Clone retrieval evaluation over a clone benchmark directory.
    EvaluateClones {
        dataset: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Re-render results saved by `classify --out`.
    Report {
        results: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Defects,
    Clones,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Tree kernel: stk, sstk or ptk.
    #[arg(long, value_parser = parse_kernel)]
    kernel: Option<KernelKind>,
    /// Decay for fragment height.
    #[arg(long)]
    lambda: Option<f64>,
    /// Decay for fragment width (PTK only).
    #[arg(long)]
    mu: Option<f64>,
    /// Neighbours consulted by the biased K-NN rule.
    #[arg(long)]
    k: Option<usize>,
    /// Textual candidates re-ranked by the kernel.
    #[arg(long)]
    candidates: Option<usize>,
    /// Use raw kernel values instead of normalized ones.
    #[arg(long)]
    raw: bool,
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Restrict to one project.
    #[arg(long)]
    project: Option<String>,
    /// Changes before this date only serve as history (defects).
    #[arg(long, value_parser = parse_from)]
    evaluate_from: Option<chrono::DateTime<chrono::Utc>>,
    /// Minimum clone size in lines (clone-type scope).
    #[arg(long)]
    min_lines: Option<usize>,
    /// Comma-separated clone types, e.g. T1,T2,VST3,ST3.
    #[arg(long, value_delimiter = ',', value_parser = parse_clone_type)]
    types: Option<Vec<CloneType>>,
    /// Clone grouping: functionality, project or clone-type.
    #[arg(long, value_parser = parse_scope)]
    scope: Option<CloneScope>,
    /// Write the metrics as JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of the table.
    #[arg(long)]
    json: bool,
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_scope(s: &str) -> Result<CloneScope, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_clone_type(s: &str) -> Result<CloneType, String> {
    s.trim().parse()
}

fn parse_from(s: &str) -> Result<chrono::DateTime<chrono::Utc>, String> {
    parse_instant(s).map_err(|e| e.to_string())
}

impl ModelArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            kernel: self.kernel,
            lambda: self.lambda,
            mu: self.mu,
            k: self.k,
            candidates: self.candidates,
            raw: self.raw,
            ..Default::default()
        }
    }
}

impl EvalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            project: self.project.clone(),
            evaluate_from: self.evaluate_from,
            min_lines: self.min_lines,
            types: self.types.clone(),
            scope: self.scope,
            ..self.model.overrides()
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut overrides = match &cli.command {
        Command::Index { project, .. } => Overrides {
            project: project.clone(),
            ..Default::default()
        },
        Command::Classify { model, .. } => model.overrides(),
        Command::Evaluate { eval, .. } | Command::EvaluateDefects { eval, .. } | Command::EvaluateClones { eval, .. } => {
            eval.overrides()
        }
        Command::Report { .. } => Overrides::default(),
    };
    overrides.threads = cli.threads;
    let settings = Settings::resolve(cli.config.as_deref(), &overrides)?;
    if settings.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(settings.threads).build_global()?;
    }

    let out = &mut std::io::stdout().lock();
    match cli.command {
        Command::Index { corpus, out: path, .. } => commands::index(&corpus, &path, &settings, out),
        Command::Classify {
            index,
            payload,
            json,
            out: save,
            ..
        } => commands::classify(&index, &payload, &settings, json, save.as_deref(), out),
        Command::Evaluate { mode, dataset, eval } => match mode {
            Mode::Defects => commands::evaluate_defects(&dataset, &settings, eval.json, eval.out.as_deref(), out),
            Mode::Clones => commands::evaluate_clones(&dataset, &settings, eval.json, eval.out.as_deref(), out),
        },
        Command::EvaluateDefects { dataset, eval } => {
            commands::evaluate_defects(&dataset, &settings, eval.json, eval.out.as_deref(), out)
        }
        Command::EvaluateClones { dataset, eval } => {
            commands::evaluate_clones(&dataset, &settings, eval.json, eval.out.as_deref(), out)
        }
        Command::Report { results, json } => commands::report(&results, json, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
