mod commands;
mod error;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "shard-ledger", version, about = "Public ledger for sensitive data")]
pub struct Cli {
    /// Ledger directory.
    #[arg(long, global = true, default_value = "ledger")]
    pub ledger: PathBuf,

    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Hex seed making every random choice reproducible. Toy backend only.
    #[arg(long, global = true, value_name = "HEX")]
    pub seed: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// BLS12-381.
    Production,
    /// Integers modulo 101. Insecure; for tests and demonstrations.
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WarrantyArg {
    Sig,
    Pow,
    ThirdParty,
    None,
}

impl WarrantyArg {
    pub fn name(self) -> &'static str {
        match self {
            WarrantyArg::Sig => "sig",
            WarrantyArg::Pow => "pow",
            WarrantyArg::ThirdParty => "third-party",
            WarrantyArg::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Role {
    User,
    Provider,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Create a ledger with epoch-0 masking shards.
    Init {
        #[arg(long, value_enum, default_value_t = Backend::Production)]
        backend: Backend,
        /// Block length |B| in bytes; the shard count is |B| divided by the shard width, rounded up.
        #[arg(long, default_value_t = 4096)]
        block_bytes: usize,
        /// Default warranty for published blocks.
        #[arg(long, value_enum, default_value_t = WarrantyArg::Sig)]
        warranty: WarrantyArg,
        /// Leading zero bits required of proof-of-work warranties.
        #[arg(long, default_value_t = 8)]
        pow_difficulty: u32,
        /// Keep payloads outside the chain and record only their digests.
        #[arg(long)]
        shrunk: bool,
    },
    /// Create a user or provider identity.
    Keygen {
        #[arg(long, value_enum)]
        role: Role,
        name: String,
    },
    /// Encrypt a file and append it as the next block.
    Publish {
        #[arg(long)]
        user: String,
        file: PathBuf,
        /// Override the ledger's default warranty.
        #[arg(long, value_enum)]
        warranty: Option<WarrantyArg>,
    },
    /// Re-key all masking shards and encapsulated keys, revoking every grant.
    Update,
    /// Seal the current unlocked key of a block to a provider.
    Grant {
        #[arg(long)]
        user: String,
        #[arg(long)]
        block: u64,
        #[arg(long)]
        provider: String,
        /// Grant file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a block with a sealed grant.
    Decrypt {
        #[arg(long)]
        provider: String,
        #[arg(long)]
        block: u64,
        #[arg(long)]
        grant: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check both ledger sections; exits 7 if anything fails.
    Audit,
    /// Hand the time-key to a new keeper and retire the current one.
    RotateKeeper,
    /// Print a secret as hex.
    ExportSecret {
        /// `keeper`, `witness` or an identity name.
        name: String,
    },
    /// Print a ledger file in the text format.
    Inspect {
        #[arg(value_enum)]
        what: InspectTarget,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InspectTarget {
    Params,
    Chain,
    State,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
