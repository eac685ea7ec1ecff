//! `simulate --config <path> --out <dir> [--dump-fields <cadence>] [--seed <u64>]`
//!
//! Exit status: 0 when every summary expectation passes, 1 when one fails,
//! 2 on configuration, I/O or numerical errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use poincare_lorentz::sim::{parse_config, run, validate, RunSummary};

#[derive(Debug, Parser)]
#[command(name = "simulate", about = "Run an invariant-drift scenario and write CSV plus summary.json")]
struct Args {
    /// `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Dump raw fields every this many steps.
    #[arg(long, value_name = "CADENCE")]
    dump_fields: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let result = (|| -> poincare_lorentz::Result<RunSummary> {
        let text = std::fs::read_to_string(&args.config)?;
        let mut config = parse_config(&text)?;
        if let Some(every) = args.dump_fields {
            config.dump_every = Some(every.max(1));
        }
        if let Some(seed) = args.seed {
            config.seed = seed;
        }
        config.warnings.clear();
        validate(&mut config, &|_| 0)?;
        let summary = run(&config, &args.out)?;
        for c in summary.checks.iter().filter(|c| c.expected) {
            let verdict = if c.pass == Some(true) { "PASS" } else { "FAIL" };
            println!("{verdict} {:<14} {:.3e} (limit {:.1e})", c.name, c.value, c.limit);
        }
        Ok(summary)
    })();
    match result {
        Ok(s) if s.error.is_some() => {
            eprintln!("error: {}", s.error.unwrap_or_default());
            ExitCode::from(2)
        }
        Ok(s) if s.all_pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
