use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use contbound::hamiltonians::{solve_beta, SpectrumSequence};
use contbound::harness::{
    evaluate_named, parse_grid, parse_params, run_campaign, tally, tightness_sweep, write_reports, write_rows_csv,
    CampaignConfig, OutputFormat,
};
use contbound::Error;

#[derive(Parser)]
#[command(name = "contbound", version, about = "Evaluate and stress-test entropy continuity bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound evaluation.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Run a seeded sampling campaign and judge every bound it lists.
    Verify(VerifyArgs),
    /// Extremal-pair gaps against the energy-constrained bounds on a grid.
    Tightness(TightnessArgs),
    /// Gibbs state of a spectrum at a given mean energy.
    Gibbs(GibbsArgs),
}

#[derive(Subcommand)]
enum BoundCommand {
    /// Evaluate one bound, e.g. `bound eval --name sh-cb --params E=1 eps=0.1`.
    Eval {
        #[arg(long)]
        name: String,
        #[arg(long, num_args = 0..)]
        params: Vec<String>,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Report destination; overrides the config, `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TightnessArgs {
    /// Spectrum JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated energies.
    #[arg(long = "E")]
    energies: String,
    /// Comma-separated distances.
    #[arg(long)]
    eps: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GibbsArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "E")]
    energy: f64,
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) if p != Path::new("-") => {
            let f = fs::File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        _ => Ok(Box::new(io::stdout().lock())),
    }
}

fn verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let mut cfg = CampaignConfig::from_json(&read(&args.config)?)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    let cfg = cfg.validated()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    let reports = pool.install(|| run_campaign(&cfg))?;
    let out = args.out.or_else(|| cfg.output.path.clone());
    write_reports(&reports, cfg.output.format, sink(out.as_deref())?)?;
    let t = tally(&reports);
    eprintln!(
        "{} reports: {} hold, {} violated, {} not applicable",
        reports.len(),
        t.holds,
        t.violated,
        t.not_applicable
    );
    Ok(if t.violated > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Bound(BoundCommand::Eval { name, params, format }) => {
            let params = parse_params(params.iter().map(String::as_str))?;
            let report = evaluate_named(&name, &params)?;
            write_reports(std::slice::from_ref(&report), format, io::stdout().lock())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(args) => verify(args),
        Command::Tightness(args) => {
            let spec = SpectrumSequence::from_json(&read(&args.spec)?)?;
            let rows = tightness_sweep(&spec, &parse_grid(&args.energies)?, &parse_grid(&args.eps)?)?;
            write_rows_csv(&rows, sink(args.out.as_deref())?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gibbs(args) => {
            let spec = SpectrumSequence::from_json(&read(&args.spec)?)?;
            let sol = solve_beta(&spec, args.energy, 1e-12 * args.energy.abs().max(1.0))?;
            let text = serde_json::to_string_pretty(&sol).map_err(|e| Error::Config(e.to_string()))?;
            match writeln!(io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::Config(e.to_string())),
                _ => Ok(ExitCode::SUCCESS),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
