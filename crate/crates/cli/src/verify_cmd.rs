//! The `verify` subcommand.

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use subord_core::algorithms::AlgorithmTag;
use subord_core::framework::{check_piecewise_order, run_framework};
use subord_core::instances::load_instance;
use subord_core::verify::{
    check_compatibility, check_compatibility_monotonized, check_monotone, check_strong_order,
    check_subadditive, check_substitutable, check_weak_order, Witness,
};
use subord_core::Order;

use crate::common::{resolve_constraint, Source};
use crate::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PropertyArg {
    Monotone,
    Subadditive,
    StrongOrder,
    WeakOrder,
    Substitutable,
    Compatible,
    Piecewise,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderArg {
    /// The instance's declared order, falling back to the natural one.
    Declared,
    /// Identity order on element ids.
    Natural,
    /// Sort products by nonincreasing price (choice models only).
    DescendingPrice,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    /// Property to check.
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    /// Traversal order for the order-dependent checks.
    #[arg(long, value_enum, default_value_t = OrderArg::Declared)]
    pub order: OrderArg,
    /// Algorithm tag for the piecewise check's phase runs.
    #[arg(long, value_enum, default_value_t = crate::run::AlgoArg::Cardinality)]
    pub algo: crate::run::AlgoArg,
    /// Error parameter for the piecewise check's phase runs.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Cardinality override for the piecewise check.
    #[arg(long)]
    pub k: Option<usize>,
}

fn outcome_line(name: &str, witness: Option<Witness>) -> bool {
    match witness {
        None => {
            println!("PASS {name}");
            true
        }
        Some(w) => {
            println!("FAIL {name}: {w}");
            false
        }
    }
}

pub fn execute(args: VerifyArgs) -> Result<(), CliError> {
    let instance = load_instance(&args.instance)?;
    let source = Source::of(&instance);
    let n = source.n();

    let order = match args.order {
        OrderArg::Natural => Order::identity(n),
        OrderArg::Declared => instance.order.clone().unwrap_or_else(|| Order::identity(n)),
        OrderArg::DescendingPrice => source.price_order().ok_or_else(|| {
            CliError::usage("--order descending-price needs a choice-model instance")
        })?,
    };

    match args.property {
        PropertyArg::Monotone => {
            let f = source.oracle();
            outcome_line("monotone", check_monotone(f.as_ref())?);
        }
        PropertyArg::Subadditive => {
            let f = source.oracle();
            outcome_line("subadditive", check_subadditive(f.as_ref())?);
        }
        PropertyArg::StrongOrder => {
            let f = source.oracle();
            outcome_line("strong-order", check_strong_order(f.as_ref(), &order)?);
        }
        PropertyArg::WeakOrder => {
            let f = source.oracle();
            outcome_line("weak-order", check_weak_order(f.as_ref(), &order)?);
        }
        PropertyArg::Substitutable => {
            let model = source.choice_model().ok_or_else(|| {
                CliError::usage("--property substitutable needs an mnl or markov instance")
            })?;
            outcome_line("substitutable", check_substitutable(model)?);
        }
        PropertyArg::Compatible => {
            let model = source.choice_model().ok_or_else(|| {
                CliError::usage("--property compatible needs an mnl or markov instance")
            })?;
            outcome_line(
                "compatible (literal revenue marginals)",
                check_compatibility(model)?,
            );
            outcome_line(
                "compatible (monotonized marginals)",
                check_compatibility_monotonized(model)?,
            );
        }
        PropertyArg::Piecewise => {
            let model = source.choice_model().ok_or_else(|| {
                CliError::usage("--property piecewise needs an mnl or markov instance")
            })?;
            let tag: AlgorithmTag = args.algo.tag().ok_or_else(|| {
                CliError::usage("--property piecewise needs a tagged algorithm, not greedy")
            })?;
            let constraint = resolve_constraint(&instance, args.k, None)?;
            let result = run_framework(tag, model, &constraint, args.epsilon, None)?;
            let mut all_ok = true;
            for (i, outcome) in result.outcomes.iter().enumerate() {
                let oracle = source.oracle();
                let witness = check_piecewise_order(oracle.as_ref(), &outcome.history)?;
                all_ok &= outcome_line(
                    &format!(
                        "piecewise (setting {i}, {} phases)",
                        outcome.history.phases.len()
                    ),
                    witness,
                );
            }
            if all_ok {
                println!(
                    "PASS piecewise: all {} phase histories",
                    result.outcomes.len()
                );
            }
        }
    }
    Ok(())
}
