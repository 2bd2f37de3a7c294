use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use regreg::{
    bench, classes, resolve_seed, sequence, solve, BenchParams, CliError, Engine, SequenceParams,
};
use regreg_core::families::FamilySpec;

#[derive(Parser)]
#[command(
    name = "regreg",
    version,
    about = "Structured subset-sum instances: generate, check, solve, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count order-type classes for arity k, cross-checked against the
    /// surjection formula
    Classes {
        #[arg(short)]
        k: usize,
        /// Also list every signature
        #[arg(long)]
        list: bool,
    },
    /// Generate instance files h_002.json .. h_{pmax}.json
    Sequence {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        t: u32,
        #[arg(long)]
        pmax: usize,
        /// MIN, MIN_FIELD, or MAX_MIN
        #[arg(long, default_value = "MIN")]
        family: String,
        /// Overridden by REGREG_SEED when set
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(short, long)]
        out: PathBuf,
        /// Candidate grids to try per p before giving up
        #[arg(long, default_value_t = 1000)]
        budget: u64,
    },
    /// Solve one instance file and print the result as JSON
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Structured)]
        engine: EngineArg,
    },
    /// Per-p scaling benchmark, CSV output
    Bench {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        t: u32,
        #[arg(long)]
        pmin: usize,
        #[arg(long)]
        pmax: usize,
        /// Overridden by REGREG_SEED when set
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Allow k=3 (the negative side may enumerate up to 2^27 subsets)
        #[arg(long)]
        allow_k3: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Structured,
    Mitm,
    Dp,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Structured => Engine::Structured,
            EngineArg::Mitm => Engine::Mitm,
            EngineArg::Dp => Engine::Dp,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classes { k, list } => {
            let report = classes(k, list)?;
            println!(
                "{}",
                serde_json::to_string(&report).expect("report serializes")
            );
        }
        Command::Sequence {
            k,
            t,
            pmax,
            family,
            seed,
            out,
            budget,
        } => {
            let family =
                FamilySpec::from_id(&family).map_err(|e| CliError::Usage(e.to_string()))?;
            let params = SequenceParams {
                k,
                t,
                p_max: pmax,
                family,
                seed: resolve_seed(seed)?,
                out_dir: out,
                budget,
            };
            let summary = sequence(&params)?;
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
        }
        Command::Solve { file, engine } => {
            let result = solve(&file, engine.into())?;
            println!("{}", result.to_json_string());
        }
        Command::Bench {
            k,
            t,
            pmin,
            pmax,
            seed,
            out,
            budget,
            allow_k3,
        } => {
            let params = BenchParams {
                k,
                t,
                p_min: pmin,
                p_max: pmax,
                seed: resolve_seed(seed)?,
                out_csv: out.clone(),
                budget,
                allow_k3,
            };
            let report = bench(&params)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            for (p, reason) in &report.skipped {
                eprintln!("skipped p={p}: {reason}");
            }
            println!(
                "{}",
                serde_json::json!({
                    "rows": report.rows.len(),
                    "skipped": report.skipped.len(),
                    "out": out.display().to_string(),
                })
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
