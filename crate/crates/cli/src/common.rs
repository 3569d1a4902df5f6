//! Shared instance plumbing for the subcommands.

use subord_core::assortment::{
    descending_price_order, mixture_oracle, AssortmentOracle, ChoiceModel, MarkovModel, MixtureMnl,
    MnlModel,
};
use subord_core::constraints::Constraint;
use subord_core::instances::{BuiltKind, Instance};
use subord_core::oracle::{CountingOracle, SetFunction};
use subord_core::{Order, ValueOracle};

use crate::CliError;

/// A borrowed view of the instance payload that can mint fresh oracles.
pub enum Source<'a> {
    Function(&'a dyn SetFunction),
    Mnl(&'a MnlModel),
    Markov(&'a MarkovModel),
    Mixture(&'a MixtureMnl),
}

impl<'a> Source<'a> {
    pub fn of(instance: &'a Instance) -> Self {
        match &instance.kind {
            BuiltKind::Function(f) => Source::Function(f.as_ref()),
            BuiltKind::Mnl(m) => Source::Mnl(m),
            BuiltKind::Markov(m) => Source::Markov(m),
            BuiltKind::Mixture(m) => Source::Mixture(m),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Source::Function(f) => f.n(),
            Source::Mnl(m) => m.n_products(),
            Source::Markov(m) => m.n_products(),
            Source::Mixture(m) => m.n_products(),
        }
    }

    /// A fresh value oracle with its own query counter.
    pub fn oracle(&self) -> Box<dyn ValueOracle + 'a> {
        match self {
            Source::Function(f) => Box::new(CountingOracle::new(*f)),
            Source::Mnl(m) => Box::new(AssortmentOracle::new(*m)),
            Source::Markov(m) => Box::new(AssortmentOracle::new(*m)),
            Source::Mixture(m) => Box::new(mixture_oracle(m)),
        }
    }

    pub fn choice_model(&self) -> Option<&'a dyn ChoiceModel> {
        match self {
            Source::Mnl(m) => Some(*m),
            Source::Markov(m) => Some(*m),
            _ => None,
        }
    }

    /// The model's own descending-price order, when prices exist.
    pub fn price_order(&self) -> Option<Order> {
        match self {
            Source::Function(_) => None,
            Source::Mnl(m) => Some(descending_price_order(m.prices())),
            Source::Markov(m) => Some(descending_price_order(m.prices())),
            Source::Mixture(m) => Some(descending_price_order(m.prices())),
        }
    }
}

/// Resolves the run constraint: flag overrides first, then the instance's
/// own constraint block.
pub fn resolve_constraint(
    instance: &Instance,
    k: Option<usize>,
    budget_total: Option<f64>,
) -> Result<Constraint, CliError> {
    if let Some(k) = k {
        return Ok(Constraint::Cardinality(k));
    }
    if let Some(total) = budget_total {
        match &instance.constraint {
            Some(Constraint::Budget(bc)) => {
                let mut bc = bc.clone();
                bc.total = total;
                return Ok(Constraint::Budget(bc));
            }
            _ => return Err(CliError::usage(
                "--budget-total overrides an instance budget constraint, but the instance has none",
            )),
        }
    }
    instance.constraint.clone().ok_or_else(|| {
        CliError::usage("instance declares no constraint; pass --k or add a constraint block")
    })
}

pub fn constraint_name(c: &Constraint) -> String {
    match c {
        Constraint::Cardinality(k) => format!("cardinality(k={k})"),
        Constraint::Budget(bc) => format!("budget(total={})", bc.total),
        Constraint::Matroid(m) => format!("matroid(rank={})", m.rank_of_ground()),
    }
}
