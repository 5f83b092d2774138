//! Batch runner: one JSON config in, one JSON or CSV record out.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 unusable config or flags,
//! 3 violated precondition, 4 numeric failure.

mod config;
mod output;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{config_hash, Config, Format};

#[derive(Parser, Debug)]
#[command(name = "focklab", version, about = "Run one weighted Fock space experiment from a JSON config")]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output.path`. Without either, writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

fn main() -> ExitCode {
    let args = Args::parse();

    let mut cfg = match Config::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(p) = cfg.output.path.take() {
        cfg.output.path = Some(cfg.base_dir.join(p));
    }
    if let Some(f) = args.format {
        cfg.output.format = f;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(p) = args.out {
        cfg.output.path = Some(p);
    }
    if let Some(n) = args.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up thread pool: {e}");
            return ExitCode::from(EXIT_IO);
        }
    }

    let outcome = run::resolve(&mut cfg).and_then(|()| run::run(&cfg));
    let report = match outcome {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_numeric() { EXIT_NUMERIC } else { EXIT_PRECONDITION };
            return ExitCode::from(code);
        }
    };

    let echo = cfg.echo();
    let hash = config_hash(&echo);
    let text = match cfg.output.format {
        Format::Json => output::render_json(&echo, &hash, &report),
        Format::Csv => output::render_csv(&echo, &hash, &report),
    };
    let written = match &cfg.output.path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::SUCCESS
}
