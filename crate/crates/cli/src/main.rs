use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minmod_cli::{
    cmd_minmod, cmd_sweep, cmd_verify, emit, load_json, report_to_csv, sweep_to_csv, CliError,
    ForcedMethod, Format, JobConfig, Perturbation,
};

#[derive(Parser)]
#[command(
    name = "minmod",
    version,
    about = "Minimum moduli of truncated and dual truncated Toeplitz operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one minimum modulus with the most specific method available.
    Minmod(JobArgs),
    /// Galerkin sweep over increasing truncations.
    Sweep(JobArgs),
    /// Run the catalog of worked examples.
    Verify {
        /// Shift expected values of items with this id prefix (negative control).
        #[arg(long, requires = "perturb_by")]
        perturb: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        perturb_by: Option<f64>,
    },
}

#[derive(Args)]
struct JobArgs {
    /// Inner function as JSON, inline or a file path.
    #[arg(long)]
    inner: Option<String>,
    /// Symbol as JSON, inline or a file path.
    #[arg(long)]
    symbol: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    truncations: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, value_enum)]
    force_method: Option<ForcedMethod>,
}

impl JobArgs {
    fn config(&self) -> Result<JobConfig, CliError> {
        let inner = self.inner.as_deref().map(load_json).transpose()?;
        let mut cfg = JobConfig::new(inner, load_json(&self.symbol)?);
        cfg.tol = self.tol;
        cfg.truncations = self.truncations.clone();
        cfg.output = self.out.clone();
        cfg.format = self.format;
        cfg.force_method = self.force_method;
        Ok(cfg)
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MINMOD_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Input(format!("MINMOD_THREADS={v} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Minmod(args) => {
            let cfg = args.config()?;
            let report = cmd_minmod(&cfg)?;
            let text = match cfg.format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report_to_csv(&report),
            };
            emit(&cfg, &text)
        }
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let reports = cmd_sweep(&cfg)?;
            let text = match cfg.format {
                Format::Json => serde_json::to_string(&reports).expect("reports serialize") + "\n",
                Format::Csv => sweep_to_csv(&reports, cfg.tol),
            };
            emit(&cfg, &text)
        }
        Command::Verify {
            perturb,
            perturb_by,
        } => {
            let p = perturb.map(|prefix| Perturbation {
                prefix,
                delta: perturb_by.unwrap_or(0.0),
            });
            let summary = cmd_verify(p.as_ref());
            print!("{}", summary.report());
            if summary.passed() {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "{} of {} items failed",
                    summary.failures(),
                    summary.executed()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("minmod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
