//! The `gen` subcommand: write instance fixtures.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use subord_core::instances::{
    gen_example1, gen_hidden_set, gen_markov_4item, gen_random_coverage, gen_random_markov,
    gen_random_mnl, markov_to_spec, mnl_to_spec, save_instance, ConstraintSpec, InstanceFile,
    InstanceSpec,
};
use subord_core::oracle::SetFunction;

use crate::{resolve_seed, CliError};

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenKind,
}

#[derive(Subcommand)]
pub enum GenKind {
    /// Two-tier decoy instance on 2k+1 elements.
    Example1 {
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long = "eps-f", default_value_t = 0.01)]
        eps_f: f64,
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
    /// Planted-optimum instance on n1 + k2 elements.
    HiddenSet {
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        k1: usize,
        #[arg(long)]
        k2: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
    /// Random MNL choice model.
    Mnl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
    /// Random Markov choice model.
    Markov {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
    /// The 4-product Markov fixture with prices (8, 4, 4, 2).
    Markov4 {
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
    /// Random weighted-coverage function, stored as an explicit value table
    /// (n <= 16).
    Coverage {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cardinality: Option<usize>,
        out: PathBuf,
    },
}

pub fn execute(args: GenArgs) -> Result<(), CliError> {
    let (spec, cardinality, out) = match args.kind {
        GenKind::Example1 {
            k,
            eps_f,
            cardinality,
            out,
        } => {
            gen_example1(k, eps_f)?; // validate parameters
            (InstanceSpec::Example1 { k, eps_f }, cardinality, out)
        }
        GenKind::HiddenSet {
            n1,
            k1,
            k2,
            r,
            seed,
            cardinality,
            out,
        } => {
            let seed = resolve_seed(seed);
            gen_hidden_set(n1, k1, k2, r, seed)?;
            (
                InstanceSpec::HiddenSet {
                    n1,
                    k1,
                    k2,
                    r,
                    seed,
                },
                cardinality,
                out,
            )
        }
        GenKind::Mnl {
            n,
            seed,
            cardinality,
            out,
        } => {
            let model = gen_random_mnl(n, resolve_seed(seed));
            (mnl_to_spec(&model), cardinality, out)
        }
        GenKind::Markov {
            n,
            seed,
            cardinality,
            out,
        } => {
            let model = gen_random_markov(n, resolve_seed(seed));
            (markov_to_spec(&model), cardinality, out)
        }
        GenKind::Markov4 { cardinality, out } => {
            (markov_to_spec(&gen_markov_4item()), cardinality, out)
        }
        GenKind::Coverage {
            n,
            seed,
            cardinality,
            out,
        } => {
            let f = gen_random_coverage(n, resolve_seed(seed));
            let table = f.to_explicit()?;
            (
                InstanceSpec::ExplicitFunction {
                    n: table.n(),
                    values: table.values().to_vec(),
                },
                cardinality,
                out,
            )
        }
    };
    let file = InstanceFile {
        spec,
        constraint: cardinality.map(|k| ConstraintSpec::Cardinality { k }),
        order: None,
    };
    save_instance(&file, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
