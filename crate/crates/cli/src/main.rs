use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tricluster::clustertri::{cluster_tri, SolveOptions};
use tricluster::dyadic::PolyBox;
use tricluster::error::SolveError;
use tricluster::generate::{generate, GeneratorSpec};
use tricluster::opoly::TriangularSystem;
use tricluster::report::{self, Report};
use tricluster::system::{centered_roi, parse_roi, parse_system, print_system};
use tricluster::verify::verify;

#[derive(Parser)]
#[command(
    name = "tricluster",
    version,
    about = "Certified clustering of zeros of triangular polynomial systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a system read from a file.
    Solve {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Solve generated systems for a range of seeds and tabulate the totals.
    Bench {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Print a generated system.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
    },
    /// Check a result against a brute-force reference solver. Without
    /// --result the system is solved first.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        result: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Region of interest "cx,cy,w;..." with one triple per variable.
    #[arg(long, conflicts_with_all = ["global", "local"])]
    roi: Option<String>,
    /// Centered region of width 10^6 in every variable.
    #[arg(long, conflicts_with = "local")]
    global: bool,
    /// Centered region of width 2 in every variable.
    #[arg(long)]
    local: bool,
    #[arg(long, default_value_t = -53, allow_hyphen_values = true)]
    epsilon_log2: i64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Abort once a level needs more than 2^k bits.
    #[arg(long, default_value_t = 16)]
    max_precision_log2: u32,
}

#[derive(Args)]
struct GenArgs {
    /// Degree type d1,d2,...
    #[arg(long = "type", value_delimiter = ',', required = true)]
    degrees: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    multiple: bool,
    /// Coefficients are drawn from [-2^k, 2^k].
    #[arg(long, default_value_t = 9)]
    bound_log2: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::PrecisionLimit { .. } => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn read_system(path: &PathBuf) -> Result<TriangularSystem, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

impl SolveArgs {
    fn roi(&self, n: usize) -> Result<PolyBox, Failure> {
        match &self.roi {
            Some(spec) => parse_roi(spec, n).map_err(input),
            None if self.local => Ok(centered_roi(n, 2)),
            None if self.global => Ok(centered_roi(n, 1_000_000)),
            None => Err(input("one of --roi, --global or --local is required")),
        }
    }

    fn solve(&self, sys: &TriangularSystem) -> Result<Report, Failure> {
        let roi = self.roi(sys.n())?;
        if self.epsilon_log2 > -2 {
            return Err(input("--epsilon-log2 must be at most -2"));
        }
        if self.threads == 0 {
            return Err(input("--threads must be positive"));
        }
        if self.max_precision_log2 > 40 {
            return Err(input("--max-precision-log2 must be at most 40"));
        }
        let opts = SolveOptions {
            max_precision: 1 << self.max_precision_log2,
            threads: self.threads,
            memoize: false,
        };
        let res = cluster_tri(sys, &roi, (-self.epsilon_log2) as u64, &opts)?;
        Ok(Report::new(roi, self.epsilon_log2, res))
    }
}

impl GenArgs {
    fn spec(&self, seed: u64) -> Result<GeneratorSpec, Failure> {
        if self.degrees.is_empty() || self.degrees.contains(&0) {
            return Err(input("--type needs positive degrees"));
        }
        if self.bound_log2 > 61 {
            return Err(input("--bound-log2 must be at most 61"));
        }
        Ok(GeneratorSpec {
            degrees: self.degrees.clone(),
            seed,
            bound_log2: self.bound_log2,
            multiple: self.multiple,
        })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            system,
            solve,
            output,
        } => {
            let sys = read_system(&system)?;
            let r = solve.solve(&sys)?;
            match output {
                Output::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report::to_json(&r)).unwrap()
                ),
                Output::Text => print!("{}", report::to_text(&r)),
            }
        }
        Command::Gen { gen } => print!("{}", print_system(&generate(&gen.spec(gen.seed)?))),
        Command::Bench { gen, seeds, solve } => {
            println!(
                "{:>6} {:>9} {:>7} {:>7} {:>10}",
                "seed", "clusters", "total", "bezout", "seconds"
            );
            let mut worst = None;
            for seed in gen.seed..gen.seed.saturating_add(seeds) {
                let sys = generate(&gen.spec(seed)?);
                match solve.solve(&sys) {
                    Ok(r) => {
                        let total: u64 = r.clusters.iter().map(|c| c.total).sum();
                        println!(
                            "{seed:>6} {:>9} {total:>7} {:>7} {:>10.3}",
                            r.clusters.len(),
                            sys.bezout(),
                            r.stats.wall_time.as_secs_f64()
                        );
                    }
                    Err(f) => {
                        println!("{seed:>6} {}", f.message);
                        worst = Some(f);
                    }
                }
            }
            if let Some(f) = worst {
                return Err(f);
            }
        }
        Command::Verify {
            system,
            result,
            solve,
        } => {
            let sys = read_system(&system)?;
            let r = match result {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| input(format!("{}: {e}", path.display())))?;
                    let v: serde_json::Value = serde_json::from_str(&text)
                        .map_err(|e| input(format!("{}: {e}", path.display())))?;
                    report::from_json(&v).map_err(|e| input(format!("{}: {e}", path.display())))?
                }
                None => solve.solve(&sys)?,
            };
            let verdict = verify(&sys, &r).map_err(|e| input(e.to_string()))?;
            for (k, c) in r.clusters.iter().enumerate() {
                let m: Vec<String> = c.multiplicities.iter().map(|m| m.to_string()).collect();
                println!("cluster {k}: total {} ({})", c.total, m.join("x"));
            }
            for p in &verdict.problems {
                println!("FAIL {p}");
            }
            if !verdict.passed() {
                return Err(input(format!(
                    "verification failed with {} problem(s)",
                    verdict.problems.len()
                )));
            }
            println!(
                "PASS {} clusters agree with {} reference solutions",
                r.clusters.len(),
                verdict.solutions.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
