use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "corrsim", version, about = "Correlation erasure experiments on finite-dimensional quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report destination; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Check the configuration and print diagnostics without running anything.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// State source: a named id or a matrix literal file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// Named state: bell, bell_dephased, ghz3, werner:p, haar:dA,dB:seed, diag:p1,..., schmidt:l1,...
    #[arg(long, conflicts_with = "state_file")]
    pub state: Option<String>,

    /// JSON `{ "rows", "cols", "entries": [[re, im], ...], "dims"? }`.
    #[arg(long)]
    pub state_file: Option<PathBuf>,

    /// Subsystem counts on each side, e.g. `1|1` or `1|2`.
    #[arg(long)]
    pub cut: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EpsRoles {
    /// Expose the three roles of eps separately.
    #[arg(long)]
    pub debug: bool,

    #[arg(long, requires = "debug")]
    pub eps_typical: Option<f64>,

    #[arg(long, requires = "debug")]
    pub eps_cut: Option<f64>,

    #[arg(long, requires = "debug")]
    pub eps_chernoff: Option<f64>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Entropies and mutual information across a cut.
    Entropy {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
    },
    /// Two-step erasure of a Bell pair by Pauli twirls on A.
    EraseBell {
        /// Twirl axes in order, from x, y, z.
        #[arg(long, default_value = "z,x")]
        order: String,
    },
    /// Random-unitary decorrelation of n copies, swept over the number of unitaries.
    Decorrelate {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        /// Comma-separated list of ensemble sizes.
        #[arg(long, value_delimiter = ',', default_value = "16")]
        n_unitaries: Vec<usize>,
        /// Number of seeds per ensemble size, starting at `--seed`.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(flatten)]
        roles: EpsRoles,
    },
    /// Schmidt-basis phase randomization of a pure state.
    Disentangle {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
    },
    /// Classical correlation left after local Schmidt-basis dephasing.
    Classical {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
    },
    /// Disentangle-then-erase cost against one-shot erasure.
    TwoStep {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
        /// Local mixed-unitary channel; defaults to Schmidt dephasing for pure states.
        #[arg(long)]
        channel_file: Option<PathBuf>,
    },
    /// Total correlation of a multiparty state, one party per subsystem.
    Multiparty {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
    },
    /// Conditional mutual information over random tripartite states.
    SsaScan {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        include_ghz: bool,
    },
    /// Search for pure states whose local disentangling leaves more than E(psi) of correlation.
    ConjectureScan {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// schmidt_dephasing, trace_replace or random_dephasing_unitary.
        #[arg(long, default_value = "schmidt_dephasing")]
        family: String,
    },
    /// Operator Chernoff bench with random Weyl conjugations on A.
    Chernoff {
        /// Local dimension of each side of the random state `tau` when no state is given.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 64)]
        n_samples: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
    },
    /// Typical subspace of n copies.
    Typicality {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Gentle measurement bound for the typical projector, or a given effect.
    Gentle {
        #[command(flatten)]
        #[serde(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0.4)]
        eps: f64,
        /// Measurement effect as a matrix literal; replaces the typical projector.
        #[arg(long)]
        operator_file: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy { .. } => "entropy",
            Command::EraseBell { .. } => "erase-bell",
            Command::Decorrelate { .. } => "decorrelate",
            Command::Disentangle { .. } => "disentangle",
            Command::Classical { .. } => "classical",
            Command::TwoStep { .. } => "two-step",
            Command::Multiparty { .. } => "multiparty",
            Command::SsaScan { .. } => "ssa-scan",
            Command::ConjectureScan { .. } => "conjecture-scan",
            Command::Chernoff { .. } => "chernoff",
            Command::Typicality { .. } => "typicality",
            Command::Gentle { .. } => "gentle",
        }
    }

    pub fn state_args(&self) -> Option<&StateArgs> {
        match self {
            Command::Entropy { state }
            | Command::Decorrelate { state, .. }
            | Command::Disentangle { state }
            | Command::Classical { state }
            | Command::TwoStep { state, .. }
            | Command::Multiparty { state }
            | Command::Chernoff { state, .. }
            | Command::Typicality { state, .. }
            | Command::Gentle { state, .. } => Some(state),
            Command::EraseBell { .. } | Command::SsaScan { .. } | Command::ConjectureScan { .. } => None,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Command::Decorrelate { seed, .. }
            | Command::SsaScan { seed, .. }
            | Command::ConjectureScan { seed, .. }
            | Command::Chernoff { seed, .. } => *seed,
            _ => 0,
        }
    }

    pub fn default_state(&self) -> &'static str {
        match self {
            Command::Multiparty { .. } => "ghz3",
            Command::Typicality { .. } | Command::Gentle { .. } => "diag:0.9,0.1",
            Command::Decorrelate { .. } => "bell_dephased",
            _ => "bell",
        }
    }
}

/// Everything that determines a report body.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub format: Format,
}
