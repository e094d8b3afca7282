//! `tareach check` runs one search configuration on a model file;
//! `tareach gen` prints a benchmark model.
//!
//! Exit status: 0 unreachable, 1 reachable, 2 usage or parse error,
//! 3 search failure (node limit, oracle disagreement, failed replay).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tareach::model::{gen, parse_model};
use tareach::search::{self, Algorithm, SearchOptions, Verdict};

#[derive(Parser)]
#[command(
    name = "tareach",
    version,
    about = "Reachability for networks of timed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the model's query is reachable.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "closure-lu", value_parser = parse_algo)]
        algo: Algorithm,
        /// Confirm every closure subsumption by region enumeration (small bounds only).
        #[arg(long)]
        oracle: bool,
        /// Print the path to the target when it is reachable.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
        stats_format: StatsFormat,
        /// Abort after storing this many nodes.
        #[arg(long, default_value_t = 5_000_000)]
        node_limit: usize,
    },
    /// Print a generated model.
    Gen {
        /// fischer, fischer-buggy, csma, fddi, paper-a1, paper-a2, paper-a3 or fig1.
        family: String,
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsFormat {
    Text,
    Tsv,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

const UNREACHABLE: u8 = 0;
const REACHABLE: u8 = 1;
const USAGE: u8 = 2;
const FAILURE: u8 = 3;

fn report(model: &str, algo: Algorithm, v: &Verdict, format: StatsFormat) -> String {
    let verdict = if v.reachable {
        "reachable"
    } else {
        "unreachable"
    };
    let s = &v.stats;
    let ms = s.elapsed.as_millis();
    match format {
        StatsFormat::Text => format!(
            "model={model}\nalgo={algo}\nverdict={verdict}\nvisited={}\nstored={}\nsubsumption_tests={}\nreopenings={}\nms={ms}\n",
            s.visited, s.stored, s.subsumption_tests, s.reopenings
        ),
        StatsFormat::Tsv => format!(
            "{model}\t{algo}\t{verdict}\t{}\t{}\t{}\t{ms}\n",
            s.visited, s.stored, s.reopenings
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Gen { family, n } => match gen::generate(&family, n) {
            Ok(net) => {
                print!("{net}");
                ExitCode::from(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(USAGE)
            }
        },
        Command::Check {
            file,
            algo,
            oracle,
            trace,
            stats_format,
            node_limit,
        } => {
            let text = match fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(USAGE);
                }
            };
            let net = match parse_model(&text) {
                Ok(n) => n,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(USAGE);
                }
            };
            let opts = SearchOptions {
                algorithm: algo,
                oracle,
                node_limit,
                ..SearchOptions::default()
            };
            let v = match search::run(&net, &opts) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(FAILURE);
                }
            };
            print!("{}", report(&net.name, algo, &v, stats_format));
            if trace {
                if let Some(steps) = &v.trace {
                    println!("trace:");
                    println!("  {}", net.describe(&net.initial_state()));
                    for step in steps {
                        println!("  -> {}", step.label.describe(&net));
                        println!("  {}", net.describe(&step.state));
                    }
                }
            }
            ExitCode::from(if v.reachable { REACHABLE } else { UNREACHABLE })
        }
    }
}
