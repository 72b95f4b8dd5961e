mod commands;
mod error;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use serde_json::Value;

use commands::Method;
use error::CliError;
use io::Input;

/// Forest matrices of weighted digraphs.
///
/// Digraph files: a header `n <count>`, then `tail head weight` per line
/// (1-based ids, decimal or p/q weights, `#` comments). `markov` also reads
/// transition matrices: a header `matrix <count>`, then one row per line.
/// Use `-` to read standard input.
#[derive(Parser, Debug)]
#[command(name = "forestmat", version)]
struct Cli {
    /// Compute with exact rationals instead of doubles.
    #[arg(long, global = true)]
    exact: bool,
    /// Sum the weights of repeated arcs instead of rejecting them.
    #[arg(long, global = true)]
    merge_parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized matrix of maximum out forests, with σ, v and the knots.
    Jbar {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Polynomial)]
        method: Method,
    },
    /// Cesàro limit of a related Markov chain along three routes.
    Markov {
        input: PathBuf,
        /// Step size of the related chain P = I − αL; defaults to half the admissible bound.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Knots, block-form permutation of Ĵ and reachability.
    Structure { input: PathBuf },
    /// Score-system basis, mean-row aggregate and the induced order.
    Rank { input: PathBuf },
    /// Spanning diverging forests with k arcs (default: the maximum).
    Forests {
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Reachability read off (I + τL)⁻¹.
    Reach {
        input: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Proximity conditions checked on Ĵᵀ.
    Audit {
        input: PathBuf,
        /// Seed for triple sampling on large digraphs.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Jbar { .. } => "jbar",
            Command::Markov { .. } => "markov",
            Command::Structure { .. } => "structure",
            Command::Rank { .. } => "rank",
            Command::Forests { .. } => "forests",
            Command::Reach { .. } => "reach",
            Command::Audit { .. } => "audit",
        }
    }

    fn input(&self) -> &PathBuf {
        match self {
            Command::Jbar { input, .. }
            | Command::Markov { input, .. }
            | Command::Structure { input }
            | Command::Rank { input }
            | Command::Forests { input, .. }
            | Command::Reach { input, .. }
            | Command::Audit { input, .. } => input,
        }
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    let failed = |source| CliError::Read {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(failed)
    } else {
        std::fs::read_to_string(path).map_err(failed)
    }
}

/// Dispatches on the scalar type chosen by `--exact`.
macro_rules! in_mode {
    ($exact:expr, $f:ident ( $($arg:expr),* )) => {
        if $exact {
            commands::$f::<BigRational>($($arg),*)
        } else {
            commands::$f::<f64>($($arg),*)
        }
    };
}

fn run(cli: &Cli) -> Result<Value, CliError> {
    let input = io::parse_input(&read(cli.command.input())?, cli.merge_parallel)?;
    let (kind, canonical) = match &input {
        Input::Digraph(g) => ("digraph", io::write_digraph(g)),
        Input::Matrix(m) => ("matrix", io::write_matrix(m)),
    };
    let digraph = || match &input {
        Input::Digraph(g) => Ok(g),
        Input::Matrix(_) => Err(CliError::Parse {
            line: 1,
            message: format!("`{}` needs a digraph file, found a matrix", cli.command.name()),
        }),
    };
    let exact = cli.exact;
    // Routes that only exist in floating point ignore --exact.
    let mut float_only = false;
    let result = match &cli.command {
        Command::Jbar { method, .. } => {
            float_only = *method == Method::Limit;
            in_mode!(exact && !float_only, jbar_cmd(digraph()?, *method))?
        }
        Command::Markov { alpha, .. } => commands::markov_cmd(&input, alpha.as_deref(), exact)?,
        Command::Structure { .. } => in_mode!(exact, structure_cmd(digraph()?))?,
        Command::Rank { .. } => in_mode!(exact, rank_cmd(digraph()?))?,
        Command::Forests { k, .. } => in_mode!(exact, forests_cmd(digraph()?, *k))?,
        Command::Reach { tau, .. } => {
            float_only = true;
            commands::reach_cmd(digraph()?, *tau)?
        }
        Command::Audit { seed, .. } => {
            float_only = true;
            commands::audit_cmd(digraph()?, *seed)?
        }
    };
    let mode = if exact && !float_only { "rational" } else { "float" };
    Ok(report::envelope(cli.command.name(), mode, kind, &canonical, result))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report::render(&report));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("forestmat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
