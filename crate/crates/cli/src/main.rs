use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hypmass_cli::{build_metric, check_radii, output, run, CliError, Format, RunConfig};

/// Mass of an asymptotically hyperbolic half-space metric.
#[derive(Parser, Debug)]
#[command(name = "hypmass", version)]
struct Args {
    /// Run description in TOML.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the quadrature; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed of the sampled checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Report files to write.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn execute(args: Args) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(out) = args.out {
        cfg.output.dir = Some(out);
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    cfg.validate()?;
    let metric = build_metric(&cfg)?;
    check_radii(&cfg, &metric)?;
    let report = run(&cfg, &metric)?;
    let (dir, stem) = cfg.output_target();
    for p in output::write_report(&report, &dir, &stem, cfg.format)? {
        eprintln!("wrote {}", p.display());
    }
    print!("{}", report.render_table());
    Ok(report.passed())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("hypmass: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}
