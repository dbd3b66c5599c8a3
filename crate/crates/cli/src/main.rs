//! `ordbij`: command-line driver for the verification toolkit.
//!
//! Exit codes: 0 when every checked property holds, 1 when a refutation was
//! found, 2 on operational errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ordbij::group::DEFAULT_ELEMENT_CAP;
use ordbij::lab::Property;

#[derive(Parser, Debug)]
#[command(name = "ordbij", version, about = "Order-divisibility bijections and related checks on finite groups")]
pub struct Cli {
    /// Extra catalog entries (JSON list), searched before the built-in catalog.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,

    /// Append verification reports to this JSON-lines file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,

    /// Worker threads for catalog sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Shuffle ties between equal-order elements with this seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Largest group, in elements, that will be constructed.
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_CAP)]
    pub cap: usize,

    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find an order-divisibility bijection from G onto C_|G|.
    VerifyBijection { group: String },
    /// Match every coset of every normal subgroup against the cyclic cosets.
    VerifyMin { group: String },
    /// Report Bij, Min, AM and semisimplicity.
    Classify { group: String },
    /// Elementary and power-sum aggregates of a weight over element orders.
    Psi {
        group: String,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Also compare against the cyclic group of the same order.
        #[arg(long)]
        compare: bool,
    },
    /// Check p_k against the Newton determinant in e_1..e_k.
    NewtonCheck {
        group: String,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
    /// Run properties across the catalog up to an order bound.
    Sweep {
        #[arg(long)]
        max_order: usize,
        #[arg(long, default_value_t = 1)]
        min_order: usize,
        /// Comma-separated list of bij, min, am, psi.
        #[arg(long, value_delimiter = ',', default_value = "bij")]
        property: Vec<Property>,
        /// Largest k for the psi property.
        #[arg(long, default_value_t = 6)]
        psi_k: usize,
    },
    /// Build and verify a chain A(d) over Div(bases).
    Chain {
        group: String,
        /// Divisor bases; defaults to |G|.
        #[arg(long, value_delimiter = ',')]
        bases: Vec<u64>,
    },
    /// Induced cyclic topology: axioms, separation, homeomorphism, continuity.
    Topology {
        group: String,
        /// Print the open family when it is materialized.
        #[arg(long)]
        opens: bool,
    },
    /// Group summary: orders, classes, normal subgroups, predicates.
    Show { group: String },
}

#[derive(clap::Args, Debug, Clone)]
pub struct WeightArgs {
    /// `identity`, `reciprocal` or a CSV table `order,numerator,denominator`.
    #[arg(long, default_value = "identity")]
    pub weight: String,
    /// Declared monotonicity of a CSV table.
    #[arg(long, value_enum, default_value_t = MonotonicityArg::None)]
    pub monotonicity: MonotonicityArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MonotonicityArg {
    Increasing,
    Decreasing,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Refuted,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Verdict::Verified) => ExitCode::SUCCESS,
        Ok(Verdict::Refuted) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
