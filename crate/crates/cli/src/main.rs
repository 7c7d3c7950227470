use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zygdist::io::{Report, Status};
use zygdist::Error;

mod commands;
mod suites;

#[derive(Parser, Debug)]
#[command(name = "zygdist", version, about = "Distances from Zygmund functions and measures to I(BMO)")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    /// Comma separated depths, at least three for a threshold estimate.
    #[arg(long, value_delimiter = ',')]
    pub depths: Vec<u32>,

    /// `auto` or a comma separated list of epsilons.
    #[arg(long = "eps-grid", default_value = "auto")]
    pub eps_grid: EpsGrid,

    /// Growth tolerance of the threshold rule.
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EpsGrid {
    Auto,
    List(Vec<f64>),
}

impl std::str::FromStr for EpsGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(EpsGrid::Auto);
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() || values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err("epsilons must be positive and finite".into());
        }
        Ok(EpsGrid::List(values))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grid and dyadic Zygmund seminorms.
    Seminorm {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also estimate the continuous seminorm on a twice finer interpolated grid.
        #[arg(long)]
        interpolate: bool,
    },
    /// Strichartz box functional and the box density profile C.
    Strichartz {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Counting profile D, its threshold and the measured dyadic distances.
    DistanceIbmo {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Splits f into a part in I(BMO) and a small Zygmund remainder.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "eps-grid", default_value = "auto")]
        eps_grid: EpsGrid,
        /// Translates in [-1, 1) (power of two; default 2^depth, at most 1024).
        #[arg(long)]
        alphas: Option<u32>,
    },
    /// Cone counting and truncated quadratic profiles in L^p.
    Sobolev {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Distance profiles and truncation of a measure.
    Measure {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Numerical checks of the lemma inequalities.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Lemmas)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Writes a synthetic function or measure file.
    Generate {
        #[arg(long, value_enum)]
        kind: KindName,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 8)]
        levels: u32,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        dim: u32,
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        theta: Vec<f64>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Predecessor,
    Bdg,
    Consistency,
    Measures,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindName {
    Linear,
    Hat,
    Square,
    Weierstrass,
    RandomJumps,
    SingleBranch,
    Lacunary,
    Cascade,
}

/// The command line without the flags that must not change the report.
fn echo() -> Vec<String> {
    let mut out = Vec::new();
    let mut args = std::env::args().skip(1);
    while let Some(a) = args.next() {
        match a.as_str() {
            "--threads" | "--out" => {
                args.next();
            }
            "--timing" => {}
            _ if a.starts_with("--threads=") || a.starts_with("--out=") => {}
            _ => out.push(a),
        }
    }
    out
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Inconclusive => 3,
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut report = Report::new(echo());
    let outcome = match cli.command {
        Command::Seminorm { input, interpolate } => {
            commands::seminorm(&mut report, &input, interpolate)
        }
        Command::Strichartz { input, profile } => {
            commands::strichartz(&mut report, &input, &profile)
        }
        Command::DistanceIbmo { input, profile } => {
            commands::distance_ibmo(&mut report, &input, &profile)
        }
        Command::Decompose {
            input,
            eps_grid,
            alphas,
        } => commands::decompose(&mut report, &input, &eps_grid, alphas),
        Command::Sobolev { input, profile, p } => {
            commands::sobolev(&mut report, &input, &profile, p)
        }
        Command::Measure { input, profile } => commands::measure(&mut report, &input, &profile),
        Command::Verify {
            suite,
            seed,
            samples,
        } => suites::verify(&mut report, suite, seed, samples),
        Command::Generate {
            kind,
            depth,
            seed,
            delta,
            levels,
            c,
            r,
            dim,
            theta,
        } => {
            let kind = commands::kind(kind, delta, levels, c, r, dim, theta);
            return match commands::generate(&kind, depth, seed) {
                Ok(text) => write_out(cli.out.as_ref(), &text, 0),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            };
        }
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    if cli.timing {
        report.wall_time_seconds = Some(started.elapsed().as_secs_f64());
    }
    let code = match report.status {
        Status::Ok => 0,
        Status::Failed => 1,
        Status::Inconclusive => 3,
    };
    write_out(cli.out.as_ref(), &report.render(), code)
}

fn write_out(path: Option<&PathBuf>, text: &str, code: u8) -> ExitCode {
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
