use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperleaf::commands::{cmd_oracle, cmd_solve, cmd_sweep, cmd_verify, output_dir};
use hyperleaf::{Failure, RunConfig};

/// CMC leaves asymptotic to a star-shaped ideal curve in hyperbolic 3-space.
#[derive(Parser)]
#[command(name = "hyperleaf", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve a single leaf at mean curvature H.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve every H of the sweep block and write the family manifest.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parallel leaves (only used when solver.warm_start = false).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the enabled foliation checks on a family manifest.
    Verify {
        /// Path to manifest.json.
        manifest: PathBuf,
        /// Report directory (defaults to the manifest's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Closed-form suites: cap-compare, h2-foliation, h2-exchange.
    Oracle {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &std::path::Path, seed: Option<u64>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.verb {
        Verb::Solve { config, h, out, seed } => {
            let cfg = load(&config, seed)?;
            cmd_solve(&cfg, h, &output_dir(out.as_deref(), &cfg.output))
        }
        Verb::Sweep { config, out, jobs, seed } => {
            let cfg = load(&config, seed)?;
            if jobs > 1 && cfg.solver.warm_start {
                eprintln!("note: --jobs is ignored while solver.warm_start = true");
            }
            let m = cmd_sweep(&cfg, &output_dir(out.as_deref(), &cfg.output), jobs.max(1))?;
            eprintln!("solved {} leaves", m.leaves.len());
            Ok(())
        }
        Verb::Verify { manifest, out, seed } => {
            let dir = out.unwrap_or_else(|| manifest.parent().map(PathBuf::from).unwrap_or_default());
            let doc = cmd_verify(&manifest, &dir, seed)?;
            eprintln!("{} checks passed", doc.checks.len());
            Ok(())
        }
        Verb::Oracle { suite, config, out, seed } => {
            let cfg = config.map(|c| load(&c, seed)).transpose()?;
            let default_out = cfg.as_ref().map(|c| c.output.clone()).unwrap_or_default();
            let seed = seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            cmd_oracle(&suite, cfg.as_ref(), &output_dir(out.as_deref(), &default_out), seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hyperleaf: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
