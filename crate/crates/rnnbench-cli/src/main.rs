//! rnnbench: generate synthetic behavior series, train and grid-search the
//! recurrent-cell zoo, run the benchmark experiments, and emit guideline
//! reports.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};

fn names_help() -> &'static str {
    static HELP: OnceLock<String> = OnceLock::new();
    HELP.get_or_init(|| {
        format!(
            "DGP names ({}):\n  {}\n\nCell names ({}):\n  {}\n",
            rnnbench::dgp::DgpKind::ALL.len(),
            commands::dgp_name_list(),
            rnnbench::cells::CellKind::all().len(),
            commands::cell_name_list()
        )
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "rnnbench",
    about = "Benchmark engine for recurrent-cell forecasting on synthetic series",
    after_help = names_help()
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file; command-line settings override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dotted-path override, e.g. --set grid.hidden_range=1..4 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (falls back to $RNNBENCH_OUT, then ./rnnbench_out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Top-level seed; every random stream derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker pool size (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate replicated synthetic series as CSV plus JSON sidecars.
    Generate {
        /// Processes to generate (default: all 21).
        #[arg(long, value_delimiter = ',')]
        dgps: Vec<String>,
        /// Series length (default 3000).
        #[arg(long)]
        length: Option<usize>,
        /// Monte Carlo replicates (default 30).
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Train one cell on one process at a fixed configuration.
    Train {
        #[arg(long)]
        cell: Option<String>,
        #[arg(long)]
        dgp: Option<String>,
        /// Hidden width n_H.
        #[arg(long)]
        hidden: Option<usize>,
        /// Estimation window (lags fed per sample).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Grid-search (hidden, window) for one cell on one process, then retrain.
    Grid {
        #[arg(long)]
        cell: Option<String>,
        #[arg(long)]
        dgp: Option<String>,
    },
    /// Run a full experiment over the cell x process x replicate grid.
    Bench {
        /// 1 (LSTM variants) or 2 (cell structures).
        #[arg(long)]
        experiment: Option<u8>,
        /// paper or desk.
        #[arg(long)]
        scale: Option<String>,
        /// Cell subset (default: the experiment roster).
        #[arg(long, value_delimiter = ',')]
        cells: Vec<String>,
        /// Process subset (default: all 21).
        #[arg(long, value_delimiter = ',')]
        dgps: Vec<String>,
        /// Monte Carlo replicates (default: per scale).
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Rebuild reports from earlier run directories.
    Report {
        /// Run directories holding results.jsonl + resolved_config.json.
        #[arg(long, value_delimiter = ',')]
        results: Vec<String>,
    },
    /// Verify exact BPTT gradients against finite differences.
    Gradcheck {
        /// Check every cell kind.
        #[arg(long)]
        all: bool,
        /// Specific cells to check.
        #[arg(long, value_delimiter = ',')]
        cells: Vec<String>,
    },
    /// Print and write the machine-readable cell catalog.
    Catalog,
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Generate { .. } => "generate",
        Command::Train { .. } => "train",
        Command::Grid { .. } => "grid",
        Command::Bench { .. } => "bench",
        Command::Report { .. } => "report",
        Command::Gradcheck { .. } => "gradcheck",
        Command::Catalog => "catalog",
    }
}

/// Fold CLI flags into the file/override config so the echoed resolved
/// config alone reproduces the run.
fn merge_flags(config: &mut config::RunConfig, common: &Common, command: &Command) {
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(jobs) = common.jobs {
        config.jobs = Some(jobs);
    }
    if let Some(out) = &common.out {
        config.out_dir = Some(out.to_string_lossy().into_owned());
    }
    match command {
        Command::Generate { dgps, length, reps } => {
            if !dgps.is_empty() {
                config.dgps = dgps.clone();
            }
            if length.is_some() {
                config.length = *length;
            }
            if reps.is_some() {
                config.reps = *reps;
            }
        }
        Command::Train {
            cell,
            dgp,
            hidden,
            window,
        } => {
            if cell.is_some() {
                config.cell = cell.clone();
            }
            if dgp.is_some() {
                config.dgp = dgp.clone();
            }
            if hidden.is_some() {
                config.hidden = *hidden;
            }
            if window.is_some() {
                config.window = *window;
            }
        }
        Command::Grid { cell, dgp } => {
            if cell.is_some() {
                config.cell = cell.clone();
            }
            if dgp.is_some() {
                config.dgp = dgp.clone();
            }
        }
        Command::Bench {
            experiment,
            scale,
            cells,
            dgps,
            reps,
        } => {
            if let Some(e) = experiment {
                config.experiment = *e;
            }
            if let Some(s) = scale {
                config.scale = s.clone();
            }
            if !cells.is_empty() {
                config.cells = cells.clone();
            }
            if !dgps.is_empty() {
                config.dgps = dgps.clone();
            }
            if reps.is_some() {
                config.reps = *reps;
            }
        }
        Command::Report { results } => {
            if !results.is_empty() {
                config.results = results.clone();
            }
        }
        Command::Gradcheck { .. } | Command::Catalog => {}
    }
}

fn out_dir_of(config: &config::RunConfig) -> PathBuf {
    config
        .out_dir
        .clone()
        .or_else(|| std::env::var("RNNBENCH_OUT").ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("rnnbench_out"))
}

/// Usage/config problems exit 1; runtime failures exit 2.
fn is_usage_error(err: &anyhow::Error) -> bool {
    let text = format!("{err:#}");
    text.contains("unknown cell")
        || text.contains("unknown DGP")
        || text.contains("unknown scale")
        || text.contains("config")
        || text.contains("needs ")
        || text.contains("range")
        || text.contains("experiment must be")
        || text.contains("is not part of experiment")
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut config = config::resolve(cli.common.config.as_deref(), &cli.common.overrides)?;
    merge_flags(&mut config, &cli.common, &cli.command);
    let out_dir = out_dir_of(&config);
    std::fs::create_dir_all(&out_dir)?;
    config::echo_resolved(&out_dir, &config, command_name(&cli.command))?;

    match &cli.command {
        Command::Generate { .. } => commands::generate(&config, &out_dir),
        Command::Train { .. } => commands::train_one(&config, &out_dir),
        Command::Grid { .. } => commands::grid_one(&config, &out_dir),
        Command::Bench { .. } => commands::bench(&config, &out_dir),
        Command::Report { .. } => commands::report(&config, &out_dir),
        Command::Gradcheck { all, cells } => commands::gradcheck(&config, cells, *all),
        Command::Catalog => commands::catalog(&out_dir),
    }
}

fn main() -> ExitCode {
    // clap's own usage failures should also exit 1
    let cli = match Cli::try_parse() {
        Ok(_) => {}
        Err(err) if err.use_stderr() => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
        Err(err) => {
            // --help / --version
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    let _ = cli;
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_usage_error(&err) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
