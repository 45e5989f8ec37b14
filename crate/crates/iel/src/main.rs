use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use iel::{distinguish, read_matrix, run, write_outputs, ExperimentConfig, Parallel};

const EXIT_CONFIG: u8 = 1;
const EXIT_ESTIMATOR: u8 = 2;

#[derive(Parser)]
#[command(name = "iel", version, about = "Inverse entropy of non-invertible maps")]
struct Cli {
    /// Override the estimator seed (takes precedence over IEL_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of an experiment configuration.
    Run { config: PathBuf },
    /// Compare the exact invariants of two toral endomorphisms.
    Distinguish { a: PathBuf, b: PathBuf },
    /// Print the exact invariants of a toral endomorphism.
    Exact {
        #[arg(long)]
        matrix: PathBuf,
    },
}

fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var("IEL_SEED") {
        Err(_) => Ok(None),
        Ok(v) => {
            let v = v.trim();
            let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => v.parse(),
            };
            parsed.map(Some).map_err(|_| format!("IEL_SEED: `{v}` is not a 64-bit unsigned integer"))
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("iel: {msg}");
    ExitCode::from(code)
}

fn run_config(cli: &Cli, path: &PathBuf) -> ExitCode {
    let name = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, format!("{name}: {e}")),
    };
    let mut config = match ExperimentConfig::from_str_named(&text, &name) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    match env_seed() {
        Ok(Some(s)) => config.estimator.seed = s,
        Ok(None) => {}
        Err(e) => return fail(EXIT_CONFIG, e),
    }
    if let Some(s) = cli.seed {
        config.estimator.seed = s;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    let exp = match config.validate(Some(&text), &name) {
        Ok(e) => e,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let pool = match iel::exec::pool(cli.threads) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    let report = pool.install(|| run(&exp, &Parallel));
    if let Err(e) = write_outputs(&report, &exp.config.output_dir) {
        return fail(EXIT_ESTIMATOR, format!("writing {}: {e}", exp.config.output_dir.display()));
    }
    print!("{}", iel::report::summary(&report));
    if report.failed() {
        return fail(EXIT_ESTIMATOR, "one or more tasks failed; see report.json");
    }
    ExitCode::SUCCESS
}

fn print_json<T: serde::Serialize>(value: &T) -> ExitCode {
    match serde_json::to_string_pretty(value) {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(EXIT_ESTIMATOR, e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run { config } => run_config(&cli, config),
        Command::Distinguish { a, b } => {
            let (ma, mb) = match (read_matrix(a), read_matrix(b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return fail(EXIT_CONFIG, e),
            };
            match distinguish(&ma, &mb) {
                Ok(v) => print_json(&v),
                Err(e) => fail(EXIT_CONFIG, e),
            }
        }
        Command::Exact { matrix } => {
            let m = match read_matrix(matrix) {
                Ok(m) => m,
                Err(e) => return fail(EXIT_CONFIG, e),
            };
            match iel_core::exact::toral_invariants(&m) {
                Ok(p) => print_json(&p),
                Err(e) => fail(EXIT_CONFIG, e),
            }
        }
    }
}
