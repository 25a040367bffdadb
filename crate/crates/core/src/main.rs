use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cubekh::job::{self, JobError, RunOptions};

/// Khovanov-type homology, branched-cover and surgery computations driven by JSON jobs.
#[derive(Parser, Debug)]
#[command(name = "cubekh", version)]
struct Cli {
    /// Job file, or `-` for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Command to run; overrides the job's "command" field.
    #[arg(long)]
    command: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Crossing cap; overrides CUBEKH_MAX_CROSSINGS.
    #[arg(long)]
    max_crossings: Option<usize>,
    /// Arc carrying the basepoint for reduced theories.
    #[arg(long)]
    basepoint: Option<u32>,
    /// Spaces per indentation level, 0 for compact output.
    #[arg(long, default_value_t = 2)]
    json_indent: usize,
}

fn read_input(src: &str) -> Result<String, JobError> {
    let mut text = String::new();
    let res = if src == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(PathBuf::from(src)).map(|t| text = t)
    };
    res.map_err(|e| JobError::validation(format!("cannot read {src}: {e}")))?;
    Ok(text)
}

fn execute(cli: &Cli) -> Result<serde_json::Value, JobError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| JobError::validation(format!("thread pool: {e}")))?;
    }
    let text = if cli.command.as_deref() == Some("selftest") && cli.input == "-" {
        "{}".to_string()
    } else {
        read_input(&cli.input)?
    };
    let opts = RunOptions {
        max_crossings: cli.max_crossings,
        basepoint: cli.basepoint,
    };
    job::run_str(&text, cli.command.as_deref(), &opts)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(v) => {
            println!("{}", job::render(&v, cli.json_indent));
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", job::render(&e.to_json(), cli.json_indent));
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
