use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use folmetlab::config::{ExperimentConfig, ExperimentType};
use folmetlab::report::{self, PlotKind, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "folmetlab", version, about = "Leafwise Poincaré metric experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment a config declares.
    Run { config: PathBuf },
    /// Run a config as a kernel-convergence check.
    Kernel { config: PathBuf },
    /// Run a config as a batch of η estimates.
    Eta { config: PathBuf },
    /// Plot an existing report CSV.
    Report {
        csv: PathBuf,
        /// eta_vs_n, gap_vs_n, scatter or scatterK
        #[arg(long, default_value = "eta_vs_n")]
        plot: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn run(path: &Path, force: Option<ExperimentType>) -> folmetlab::Result<i32> {
    let text = std::fs::read_to_string(path).map_err(|e| folmetlab::Error::Io(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(kind) = force {
        cfg.experiment = kind;
    }
    let out = report::run_at(&cfg, path)?;
    for p in &out.written {
        eprintln!("wrote {}", p.display());
    }
    print!("{}", out.summary);
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FOLMETLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match cli.cmd {
        Cmd::Run { config } => run(&config, None),
        Cmd::Kernel { config } => run(&config, Some(ExperimentType::Kernel)),
        Cmd::Eta { config } => run(&config, Some(ExperimentType::Eta)),
        Cmd::Report { csv, plot, out } => PlotKind::parse(&plot)
            .and_then(|k| report::plot_csv(&csv, k, out.as_deref()))
            .map(|p| {
                eprintln!("wrote {}", p.display());
                0
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
