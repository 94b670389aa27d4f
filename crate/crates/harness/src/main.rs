use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ibdl_harness::{benchmark, builtin_benchmarks, run, HarnessError, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "ibdl", version, about = "Run immersed boundary experiments and write CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        exec: Exec,
    },
    /// Print the names of the built-in benchmarks.
    ListBenchmarks,
    /// Run a built-in benchmark.
    RunBenchmark {
        name: String,
        #[command(flatten)]
        exec: Exec,
    },
}

#[derive(clap::Args)]
struct Exec {
    /// Output directory (default: results/<name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel rows.
    #[arg(long)]
    threads: Option<usize>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

fn execute(cfg: &RunConfig, exec: &Exec) -> Result<bool, HarnessError> {
    if let Some(k) = exec.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| HarnessError::Invalid(format!("--threads: {e}")))?;
    }
    let opts = RunOptions { out: exec.out.clone(), write: true, progress: !exec.quiet };
    let out = run(cfg, &opts)?;
    for f in &out.files {
        println!("{}", f.display());
    }
    for f in &out.failures {
        eprintln!("failed row: {f}");
    }
    Ok(out.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::ListBenchmarks => {
            for c in builtin_benchmarks() {
                println!("{}\t{:?}\tN = {:?}", c.name, c.kind, c.grids);
            }
            Ok(true)
        }
        Command::Run { config, exec } => RunConfig::from_file(config).and_then(|c| execute(&c, exec)),
        Command::RunBenchmark { name, exec } => match benchmark(name) {
            Some(c) => execute(&c, exec),
            None => Err(HarnessError::Invalid(format!("unknown benchmark {name:?} (see `ibdl list-benchmarks`)"))),
        },
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
