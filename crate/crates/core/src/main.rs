use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flash_core::experiment::{cmd_run, cmd_stats, cmd_tree, Algorithm, ExperimentSpec, Measure, ProblemSource};
use flash_core::flash::FlashConfig;
use flash_core::monrp::MonrpInstance;
use flash_core::nsga2::Nsga2Config;

#[derive(Parser)]
#[command(name = "flash", version, about = "Surrogate-assisted multi-objective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run optimizers over seeded repeats and write a results table.
    Run {
        /// Tabular CSV path, `monrp:N-P-M-dep-funding`, `monrp-file:<path>` or `synth:<line|sphere2|step>`.
        #[arg(long)]
        problem: String,
        /// Comma-separated list of flash, sway, nsga2, random.
        #[arg(long, value_delimiter = ',', required = true)]
        algo: Vec<String>,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        pool: usize,
        #[arg(long)]
        out: PathBuf,
        /// FLASH lives.
        #[arg(long, default_value_t = 10)]
        lives: usize,
        /// FLASH initial sample size.
        #[arg(long, default_value_t = 20)]
        init: usize,
        /// NSGA-II population size.
        #[arg(long, default_value_t = 100)]
        pop: usize,
        /// NSGA-II generations.
        #[arg(long, default_value_t = 50)]
        gens: usize,
        /// Random-search budget when flash is not part of the run.
        #[arg(long)]
        budget: Option<usize>,
        /// Record wall-clock times (makes the results file nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Print the domination tree of one run.
    Tree {
        /// Directory holding the results file and its `runs/` folder.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        run_id: usize,
        #[arg(long)]
        algo: String,
    },
    /// Rank algorithms on one measure with Scott-Knott.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        /// gd, igd or evals.
        #[arg(long)]
        measure: String,
        /// Algorithm whose median is 100%. Defaults to the first in the file.
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Generate a next-release planning instance and write it as text.
    Monrp {
        /// `N-P-M-dep-funding`, e.g. 50-4-5-4-90.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> flash_core::Result<()> {
    match command {
        Command::Run {
            problem,
            algo,
            repeats,
            seed,
            pool,
            out,
            lives,
            init,
            pop,
            gens,
            budget,
            timing,
        } => {
            let algorithms = algo.iter().map(|a| a.trim().parse()).collect::<flash_core::Result<Vec<Algorithm>>>()?;
            let mut spec = ExperimentSpec::new(problem.parse()?, algorithms);
            spec.repeats = repeats;
            spec.seed = seed;
            spec.pool = pool;
            spec.flash = FlashConfig {
                size0: init,
                lives,
                seed,
            };
            spec.nsga2 = Nsga2Config {
                pop_size: pop,
                generations: gens,
                ..Nsga2Config::default()
            };
            spec.random_budget = budget;
            let exp = cmd_run(&spec, &out, timing)?;
            eprintln!("wrote {} rows to {}", exp.records.len(), out.display());
        }
        Command::Tree { input, run_id, algo } => {
            print!("{}", cmd_tree(&input, run_id, algo.parse()?)?);
        }
        Command::Stats {
            input,
            measure,
            baseline,
        } => {
            print!("{}", cmd_stats(&input, measure.parse::<Measure>()?, baseline.as_deref())?);
        }
        Command::Monrp { spec, seed, out } => {
            let ProblemSource::Monrp {
                requirements,
                releases,
                clients,
                dep_pct,
                funding_pct,
            } = format!("monrp:{spec}").parse()?
            else {
                unreachable!("monrp: prefix always parses to a generated source");
            };
            let text = MonrpInstance::generate(requirements, releases, clients, dep_pct, funding_pct, seed)?.to_string();
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
