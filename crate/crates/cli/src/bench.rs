//! The `bench` subcommand: ratio and query-count audits over seeded random
//! corpora, emitting one CSV row per (instance, algorithm) pair.

use std::path::PathBuf;

use clap::Args;

use subord_core::algorithms::{budget_half, budget_third, cardinality_max, matroid_local_search};
use subord_core::assortment::{descending_price_order, AssortmentOracle, ChoiceModel};
use subord_core::constraints::Constraint;
use subord_core::instances::{
    gen_random_budgets, gen_random_coverage, gen_random_matroid, gen_random_mnl,
};
use subord_core::oracle::CountingOracle;
use subord_core::verify::brute_force_opt;
use subord_core::Order;

use crate::CliError;

#[derive(Args)]
pub struct BenchArgs {
    /// Benchmark suite to run.
    #[arg(long, default_value = "acceptance")]
    pub suite: String,
    /// Write rows as CSV (instance, algo, ratio, bound, queries, query-bound).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

struct Row {
    instance: String,
    algo: &'static str,
    ratio: f64,
    bound: f64,
    queries: u64,
    query_bound: Option<f64>,
}

pub fn execute(args: BenchArgs) -> Result<(), CliError> {
    if args.suite != "acceptance" {
        return Err(CliError::usage(format!(
            "unknown suite '{}'; available: acceptance",
            args.suite
        )));
    }
    let mut rows = Vec::new();
    cardinality_rows(&mut rows)?;
    budget_rows(&mut rows)?;
    matroid_rows(&mut rows)?;

    let mut violations = 0;
    for r in &rows {
        if r.ratio < r.bound - 1e-9 {
            violations += 1;
        }
        if let Some(qb) = r.query_bound {
            if (r.queries as f64) > qb {
                violations += 1;
            }
        }
    }
    let worst = rows
        .iter()
        .map(|r| r.ratio - r.bound)
        .fold(f64::INFINITY, f64::min);
    println!(
        "bench acceptance: {} rows, {} violations, worst ratio slack {:+.4}",
        rows.len(),
        violations,
        worst
    );

    if let Some(path) = &args.csv {
        let mut out = String::from("instance,algo,ratio,bound,queries,query-bound\n");
        for r in &rows {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{},{}\n",
                r.instance,
                r.algo,
                r.ratio,
                r.bound,
                r.queries,
                r.query_bound.map(|q| format!("{q:.1}")).unwrap_or_default()
            ));
        }
        std::fs::write(path, out)?;
        println!("wrote {}", path.display());
    }
    if violations > 0 {
        return Err(CliError::instance(format!(
            "{violations} benchmark rows violated their bounds"
        )));
    }
    Ok(())
}

fn cardinality_rows(rows: &mut Vec<Row>) -> Result<(), CliError> {
    let eps = 0.1;
    for trial in 0..30u64 {
        let n = 6 + (trial % 5) as usize;
        let k = 2 + (trial % 3) as usize;
        let (name, value, queries, opt) = if trial % 2 == 0 {
            let f = CountingOracle::new(gen_random_coverage(n, 10_000 + trial));
            let result = cardinality_max(&f, &Order::identity(n), k, eps)?;
            let audit = CountingOracle::new(gen_random_coverage(n, 10_000 + trial));
            let (_, opt) = brute_force_opt(&audit, &Constraint::Cardinality(k))?;
            (
                format!("coverage-{trial}"),
                result.best_run().value,
                result.total_queries(),
                opt,
            )
        } else {
            let model = gen_random_mnl(n, 20_000 + trial);
            let f = AssortmentOracle::new(&model);
            let order = descending_price_order(model.prices());
            let result = cardinality_max(&f, &order, k, eps)?;
            let audit = AssortmentOracle::new(&model);
            let (_, opt) = brute_force_opt(&audit, &Constraint::Cardinality(k))?;
            (
                format!("mnl-{trial}"),
                result.best_run().value,
                result.total_queries(),
                opt,
            )
        };
        rows.push(Row {
            instance: name,
            algo: "cardinality",
            ratio: value / opt,
            bound: (1.0 - eps) * 0.5,
            queries,
            query_bound: Some(4.0 * (n as f64 / eps) * (k as f64).ln()),
        });
    }
    Ok(())
}

fn budget_rows(rows: &mut Vec<Row>) -> Result<(), CliError> {
    for trial in 0..20u64 {
        let n = 5 + (trial % 4) as usize;
        let bc = gen_random_budgets(n, 30_000 + trial);
        let f = CountingOracle::new(gen_random_coverage(n, 11_000 + trial));
        let audit = CountingOracle::new(gen_random_coverage(n, 11_000 + trial));
        let (_, opt) = brute_force_opt(&audit, &Constraint::Budget(bc.clone()))?;

        let third = budget_third(&f, &Order::identity(n), &bc, 0.1)?;
        rows.push(Row {
            instance: format!("coverage-{trial}"),
            algo: "budget-third",
            ratio: third.best_run().value / opt,
            bound: (1.0 - 0.1) / 3.0,
            queries: third.total_queries(),
            query_bound: None,
        });
        let half = budget_half(&f, &Order::identity(n), &bc, 0.25)?;
        rows.push(Row {
            instance: format!("coverage-{trial}"),
            algo: "budget-half",
            ratio: half.best_run().value / opt,
            bound: 0.25,
            queries: half.total_queries(),
            query_bound: None,
        });
    }
    Ok(())
}

fn matroid_rows(rows: &mut Vec<Row>) -> Result<(), CliError> {
    for trial in 0..30u64 {
        let n = 6 + (trial % 5) as usize;
        let matroid = gen_random_matroid(n, 40_000 + trial);
        let d = matroid.rank_of_ground();
        let f = CountingOracle::new(gen_random_coverage(n, 12_000 + trial));
        let run = matroid_local_search(&f, Order::identity(n).as_slice(), &matroid);
        let audit = CountingOracle::new(gen_random_coverage(n, 12_000 + trial));
        let (_, opt) = brute_force_opt(&audit, &Constraint::Matroid(matroid.clone()))?;
        rows.push(Row {
            instance: format!("coverage-{trial}"),
            algo: "matroid",
            ratio: run.value / opt,
            bound: 0.25,
            queries: run.independence_queries,
            query_bound: Some((n * d) as f64),
        });
    }
    Ok(())
}
