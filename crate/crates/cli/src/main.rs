use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use timtin_cli::commands::{self, ScOrder, TimSource, ZestArgs};
use timtin_cli::config::{parse_config, ExperimentKind};
use timtin_cli::{exit_code, experiments, io, Verification};
use timtin_core::{Decomposition, NeighborLayout};

#[derive(Parser)]
#[command(name = "timtin", version, about = "GDoF analysis and experiments for interference channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-user GDoF of a transmit configuration.
    Gdof {
        channel: PathBuf,
        txconfig: PathBuf,
        /// Decoding order for the zero-forcing receivers.
        #[arg(long, value_enum, default_value = "lexicographic")]
        order: ScOrder,
    },
    /// Run ZEST from a random start.
    Zest {
        channel: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Streams per user.
        #[arg(long, default_value_t = 1)]
        b: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = timtin_core::zest::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = timtin_core::zest::DEFAULT_TOL)]
        tol: f64,
        /// Per-iteration trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the final transmit configuration here.
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Evaluate a TIM-TIN decomposition.
    Decompose {
        /// Channel file; the decomposition file carries its own channel.
        #[arg(required_unless_present = "decomposition")]
        channel: Option<PathBuf>,
        #[arg(long, conflicts_with_all = ["threshold", "channel"])]
        decomposition: Option<PathBuf>,
        /// Links with exponent at or below this value go to TIN.
        #[arg(long, required_unless_present = "decomposition")]
        threshold: Option<f64>,
        /// Single-stream beamformers for the TIM component.
        #[arg(long, conflicts_with = "neighbor_width")]
        tim_config: Option<PathBuf>,
        /// Use the neighbouring construction with this many interferers per side.
        #[arg(long)]
        neighbor_width: Option<usize>,
        #[arg(long, value_enum, default_value = "ring")]
        layout: Layout,
    },
    /// Sum-rate against SNR for several algorithms.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; overrides the config file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Per-iteration traces on one realization.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        dump_config: Option<PathBuf>,
    },
    /// Symmetric scheme for the neighbouring channel.
    Neighboring {
        #[arg(short = 'S', long = "S")]
        strong: usize,
        #[arg(short = 'M', long = "M")]
        medium: usize,
        #[arg(short = 'K', long = "K")]
        users: usize,
        #[arg(long, value_enum, default_value = "ring")]
        layout: Layout,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Layout {
    Ring,
    Line,
}

impl From<Layout> for NeighborLayout {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Ring => NeighborLayout::Ring,
            Layout::Line => NeighborLayout::Line,
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("TIMTIN_THREADS") {
        let threads: usize = value.parse().with_context(|| format!("TIMTIN_THREADS={value} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Gdof { channel, txconfig, order } => {
            let spec = io::read_channel(&channel)?;
            let tx = io::read_tx(&txconfig)?;
            io::write_csv(&commands::gdof_report(&spec, &tx, order)?, stdout.lock())
        }
        Command::Zest { channel, n, b, seed, max_iter, tol, trace, dump_config } => {
            let spec = io::read_channel(&channel)?;
            let args =
                ZestArgs { n, streams: b, seed, max_iter, tol, trace: trace.as_deref(), dump_config: dump_config.as_deref() };
            let run = commands::zest_command(&spec, &args)?;
            let rows: Vec<_> = run.gdof.0.iter().enumerate().map(|(k, d)| (k + 1, *d)).collect();
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(["user", "gdof"])?;
            for (k, d) in rows {
                w.write_record([k.to_string(), d.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Decompose { channel, decomposition, threshold, tim_config, neighbor_width, layout } => {
            let (spec, split) = match (decomposition, channel, threshold) {
                (Some(path), _, _) => io::read_decomposition(&path)?,
                (None, Some(path), Some(t)) => {
                    let spec = io::read_channel(&path)?;
                    let split = Decomposition::by_threshold(&spec, t);
                    (spec, split)
                }
                _ => anyhow::bail!("need a decomposition file or a channel with --threshold"),
            };
            let source = match (tim_config, neighbor_width) {
                (Some(path), _) => TimSource::Config(io::read_tx(&path)?),
                (None, Some(width)) => TimSource::Neighboring { width, layout: layout.into() },
                (None, None) => TimSource::Trivial,
            };
            let report = commands::decompose(&spec, &split, &source)?;
            commands::print_report(&report, stdout.lock())?;
            if !report.verified {
                return Err(Verification("composed scheme does not reach the product tuple".into()).into());
            }
            Ok(())
        }
        Command::Sweep { config, output, dump_config } => {
            let cfg = parse_config(&config)?;
            if cfg.kind != ExperimentKind::Sweep {
                anyhow::bail!("{} is not a sweep configuration", config.display());
            }
            let rows = experiments::run_sweep(&cfg, dump_config.as_deref())?;
            io::write_csv_to(&rows, output.as_deref().or(cfg.output.as_deref()))
        }
        Command::Converge { config, output, dump_config } => {
            let cfg = parse_config(&config)?;
            if cfg.kind != ExperimentKind::Converge {
                anyhow::bail!("{} is not a convergence configuration", config.display());
            }
            let rows = experiments::run_converge(&cfg, dump_config.as_deref())?;
            io::write_csv_to(&rows, output.as_deref().or(cfg.output.as_deref()))
        }
        Command::Neighboring { strong, medium, users, layout } => {
            let (report, _) = commands::neighboring(strong, medium, users, layout.into())?;
            io::write_csv(&[report], stdout.lock())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(timtin_cli::EXIT_VALIDATION as u8) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
