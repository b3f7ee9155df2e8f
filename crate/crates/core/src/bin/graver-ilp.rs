use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::Value;

use graver_ilp::cli::{
    cmd_analyze, cmd_bench, cmd_embed, cmd_generate_lowerbound, cmd_generate_nfold, cmd_generate_random,
    cmd_generate_subset_sum, cmd_graver, cmd_solve, parse_box, BenchOptions, EmbedSide, NfoldOptions, OracleKind,
    RandomOptions, SolveOptions,
};
use graver_ilp::json::{instance_from_value, to_canonical_string};
use graver_ilp::structure::EmbedMode;
use graver_ilp::Result;

#[derive(Parser)]
#[command(name = "graver-ilp", version, about = "Exact integer programming by Graver-best augmentation")]
struct Cli {
    /// Output format; JSON is the only one.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file ("-" for stdin).
    Solve {
        file: PathBuf,
        /// exact, primal-dp, dual-dp, auto or brute.
        #[arg(long, default_value = "auto")]
        oracle: OracleKind,
        /// Norm bound for the oracle; refused when below the certified one.
        #[arg(long)]
        radius: Option<BigInt>,
        /// Finite box LO:HI for the brute-force oracle.
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
    },
    /// Report graphs, decompositions, block structure and norms.
    Analyze { file: PathBuf },
    /// Dump the Graver basis of the constraint matrix.
    Graver {
        file: PathBuf,
        /// Enumerate only up to this max-norm.
        #[arg(long)]
        radius: Option<BigInt>,
    },
    /// Rewrite along an elimination forest as a block-structured program.
    Embed {
        file: PathBuf,
        #[arg(long, default_value = "primal")]
        side: EmbedSide,
        /// Materialize every pattern row in the primal embedding.
        #[arg(long)]
        strict: bool,
    },
    #[command(subcommand)]
    Generate(Generate),
    /// Compare oracles against brute force on random instances.
    Bench {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "exact,primal-dp,dual-dp")]
        oracles: Vec<OracleKind>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Feasible iff some subset of ITEMS sums to TARGET.
    SubsetSum {
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<BigInt>,
        #[arg(long)]
        target: BigInt,
    },
    /// The doubling chain with a Graver element of max-norm 2^(n-1).
    Lowerbound {
        #[arg(long)]
        n: usize,
    },
    /// Random n-fold program.
    Nfold {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Random dense program.
    Random {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Draw b at random instead of planting a feasible point.
        #[arg(long)]
        unplanted: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn read_json(path: &PathBuf) -> Result<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: Cli) -> Result<(Value, u8)> {
    let Format::Json = cli.format;
    match cli.command {
        Command::Solve { file, oracle, radius, bbox } => {
            let inst = instance_from_value(&read_json(&file)?)?;
            let bbox = bbox.as_deref().map(parse_box).transpose()?;
            let out = cmd_solve(&inst, &SolveOptions { oracle, radius, bbox })?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            Ok((out.to_json(), out.exit_code() as u8))
        }
        Command::Analyze { file } => Ok((cmd_analyze(&read_json(&file)?)?, 0)),
        Command::Graver { file, radius } => {
            let inst = instance_from_value(&read_json(&file)?)?;
            Ok((cmd_graver(inst.a(), radius.as_ref())?, 0))
        }
        Command::Embed { file, side, strict } => {
            let inst = instance_from_value(&read_json(&file)?)?;
            let mode = if strict { EmbedMode::Strict } else { EmbedMode::Lazy };
            Ok((cmd_embed(&inst, side, mode)?, 0))
        }
        Command::Generate(g) => {
            let v = match g {
                Generate::SubsetSum { items, target } => cmd_generate_subset_sum(&items, &target)?,
                Generate::Lowerbound { n } => cmd_generate_lowerbound(n)?,
                Generate::Nfold { r, s, t, n, seed } => {
                    cmd_generate_nfold(&NfoldOptions { r, s, t, n, seed, ..Default::default() })?
                }
                Generate::Random { n, m, unplanted, seed } => {
                    cmd_generate_random(&RandomOptions { n, m, planted: !unplanted, seed, ..Default::default() })?
                }
            };
            Ok((v, 0))
        }
        Command::Bench { count, n, m, oracles, workers, seed } => {
            Ok((cmd_bench(&BenchOptions { count, n, m, oracles, workers, seed })?, 0))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((v, code)) => {
            println!("{}", to_canonical_string(&v));
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
