use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use wittforms_core::verify::DEFAULT_SEED;

mod commands;
mod config;

use config::CliError;

const AFTER_HELP: &str = "\
Form literals:
  field mode     1,2,4        coefficients; integers mod p when t = 1,
                              polynomial-basis encodings sum c_i p^i when t > 1
  abstract mode  @0,1,2       class list
                 @{0:2,1:1}   class multiplicities; tuples like (1,0) for product groups
  separable      tr[2]{10},3  transfer symbols tr[m]{c} with c encoded in F_(q^m)
  empty form     <>

Exit codes: 0 success, 1 a verification check failed, 2 domain error, 64 usage error.";

#[derive(Debug, Parser)]
#[command(name = "wittforms", version, about = "Witt rings of diagonal and separable forms of degree d >= 3")]
#[command(after_help = AFTER_HELP)]
pub struct Cli {
    /// Field order q = p^t (alternative to --p/--t).
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Field characteristic.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Extension degree over F_p.
    #[arg(long, global = true)]
    pub t: Option<u32>,
    /// Abstract power-class group, e.g. 3, 2x2, Z/2xZ/4.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Form degree.
    #[arg(long, global = true, default_value_t = 3)]
    pub d: u32,
    /// Subgroup H: max, trivial, order:t, gens:a,b.
    #[arg(long = "H", global = true, default_value = "max")]
    pub h: String,
    /// Equivalence kind: H or I.
    #[arg(long, global = true, default_value = "H")]
    pub kind: String,
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Largest exhaustive isotropy search, in vectors.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the power classes and mark the members of H.
    Classes,
    /// Canonical reduced representative of a form.
    Reduce { form: String },
    /// Whether two forms are Witt equivalent.
    Equiv { a: String, b: String },
    /// Dimension, dimension index and permanent.
    Invariants { form: String },
    /// Search for a nontrivial zero.
    Isotropy { form: String },
    /// Round, universal, H_max-form, isotropic and I-form flags.
    Classify { form: String },
    /// Additive inverse in the Witt ring.
    Neg { form: String },
    /// Addition or multiplication table of reduced classes.
    Table {
        #[arg(long, default_value = "add", value_parser = ["add", "mul"])]
        op: String,
        #[arg(long, default_value_t = 2)]
        max_dim: u64,
    },
    /// Run theorem checks by id, or all of them.
    Verify {
        /// Check id, or `all`.
        #[arg(default_value = "all")]
        id: String,
        /// Parameter override key=value (value read as JSON when possible).
        #[arg(long = "param")]
        params: Vec<String>,
        /// Re-run the check recorded in a replay file.
        #[arg(long)]
        replay: Option<std::path::PathBuf>,
        /// Directory for replay files of failing checks.
        #[arg(long, default_value = ".")]
        replay_dir: std::path::PathBuf,
        /// List check ids and exit.
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(64)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
