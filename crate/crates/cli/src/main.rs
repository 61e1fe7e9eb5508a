use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use unitcoh::field::TowerSpec;
use unitcoh::verify::{self, Options, DEFAULT_MAX_LEVEL};
use unitcoh::cohomology::DEFAULT_BRUTE_FORCE_BUDGET;

#[derive(Parser)]
#[command(name = "unitcoh", version, about = "First cohomology of higher unit groups of p-adic fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every entry of a corpus and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fixed precision N instead of choosing one by stabilization.
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
        max_level: u32,
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
        brute_force_budget: u128,
    },
    /// Print H^1(G, U^level/U^N) for one extension.
    H1 {
        #[arg(long)]
        p: u64,
        /// Eisenstein polynomial, comma-separated, lowest degree first; repeat for a tower.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        eisenstein: Vec<String>,
        /// Irreducible polynomial mod p defining the unramified floor.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        unramified: Option<Vec<i64>>,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        precision: Option<u32>,
    },
}

fn parse_polys(raw: &[String]) -> Result<Vec<Vec<i64>>, String> {
    // clap splits on commas, so one flag occurrence arrives as several
    // values; polynomials are separated by an explicit ';'.
    let joined = raw.join(",");
    joined
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|poly| {
            poly.split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad coefficient {c:?}: {e}")))
                .collect()
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { config, out, precision, max_level, brute_force_budget } => {
            let options = Options { precision, max_level, brute_force_budget, ..Options::default() };
            match verify::run_corpus(&config, &out, &options) {
                Ok(0) => ExitCode::SUCCESS,
                Ok(_) => {
                    eprintln!("some checks failed; see {}", out.display());
                    ExitCode::from(1)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::H1 { p, eisenstein, unramified, level, precision } => {
            let polys = match parse_polys(&eisenstein) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let spec = TowerSpec::new(p, unramified, polys);
            match verify::level_summary(&spec, level, precision) {
                Ok(s) => {
                    println!("precision: {}", s.precision);
                    println!("invariant factors of H^1(G, U^{}): {:?}", s.level, s.invariant_factors);
                    println!("invariant factors of H^1(G, U^{}/U^N): {:?}", s.level, s.truncated_invariant_factors);
                    println!("order of the fundamental class: {}", s.fundamental_class_order);
                    println!("order of the image in H^1(G, U/U^N): {}", s.image_order);
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
