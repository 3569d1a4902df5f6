//! The `run` subcommand.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;

use subord_core::algorithms::{
    enumerate_params, greedy, run_one, AlgorithmTag, ParamSetting, RunResult,
};
use subord_core::constraints::Constraint;
use subord_core::framework::run_framework;
use subord_core::instances::load_instance;
use subord_core::oracle::wrap_noisy;
use subord_core::verify::{brute_force_opt, CAP_BRUTE_FORCE, CAP_BRUTE_FORCE_MATROID};
use subord_core::{ValueOracle, TOL};

use crate::common::{constraint_name, resolve_constraint, Source};
use crate::{resolve_seed, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Cardinality,
    BudgetThird,
    BudgetHalf,
    Matroid,
    /// Marginal-greedy baseline (cardinality only, not single-pass).
    Greedy,
}

impl AlgoArg {
    pub(crate) fn tag(self) -> Option<AlgorithmTag> {
        match self {
            AlgoArg::Cardinality => Some(AlgorithmTag::Cardinality),
            AlgoArg::BudgetThird => Some(AlgorithmTag::BudgetThird),
            AlgoArg::BudgetHalf => Some(AlgorithmTag::BudgetHalf),
            AlgoArg::Matroid => Some(AlgorithmTag::Matroid),
            AlgoArg::Greedy => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            AlgoArg::Cardinality => "cardinality",
            AlgoArg::BudgetThird => "budget-third",
            AlgoArg::BudgetHalf => "budget-half",
            AlgoArg::Matroid => "matroid",
            AlgoArg::Greedy => "greedy",
        }
    }
}

#[derive(Args)]
pub struct RunArgs {
    /// Instance file (JSON).
    pub instance: PathBuf,
    /// Algorithm to run.
    #[arg(long, value_enum)]
    pub algo: AlgoArg,
    /// Error parameter for the threshold grids.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Override: cardinality bound.
    #[arg(long)]
    pub k: Option<usize>,
    /// Override: total budget (keeps the instance's per-element budgets).
    #[arg(long)]
    pub budget_total: Option<f64>,
    /// Relative oracle noise in [0, 1); 0 disables the wrapper.
    #[arg(long, default_value_t = 0.0)]
    pub noisy: f64,
    /// Noise seed (falls back to SUBORD_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the per-setting breakdown as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Parameter settings evaluated in parallel (direct runs only).
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Serialize)]
struct GammaRow {
    setting: String,
    value: f64,
    queries: u64,
}

#[derive(Serialize)]
struct RunReport {
    instance: String,
    algo: &'static str,
    epsilon: f64,
    noisy: f64,
    seed: u64,
    n: usize,
    constraint: String,
    via_framework: bool,
    value: f64,
    opt: Option<f64>,
    ratio: Option<f64>,
    queries: u64,
    independence_queries: u64,
    wall_ms: u128,
    solution: Vec<usize>,
    removed: Vec<usize>,
    per_gamma: Vec<GammaRow>,
}

pub fn execute(args: RunArgs) -> Result<(), CliError> {
    if !(0.0..1.0).contains(&args.noisy) {
        return Err(CliError::usage(format!(
            "--noisy must be in [0, 1), got {}",
            args.noisy
        )));
    }
    let started = Instant::now();
    let seed = resolve_seed(args.seed);
    let instance = load_instance(&args.instance)?;
    let source = Source::of(&instance);
    let constraint = resolve_constraint(&instance, args.k, args.budget_total)?;
    let n = source.n();

    let (rows, best_idx, solution, removed, value, queries, independence_queries, via_framework) =
        if args.algo == AlgoArg::Greedy {
            let k = match &constraint {
                Constraint::Cardinality(k) => *k,
                _ => {
                    return Err(CliError::usage(
                        "the greedy baseline needs a cardinality constraint",
                    ))
                }
            };
            let oracle = source.oracle();
            let run =
                run_with_optional_noise(oracle.as_ref(), args.noisy, seed, |f| Ok(greedy(f, k)))?;
            let rows = vec![GammaRow {
                setting: "greedy".into(),
                value: run.value,
                queries: run.queries,
            }];
            (
                rows,
                0,
                run.solution,
                run.removed,
                run.value,
                run.queries,
                0,
                false,
            )
        } else {
            let tag = args.algo.tag().expect("non-greedy algorithms carry a tag");
            let declared_order = instance.order.as_ref();
            let direct_seq: Option<Vec<usize>> = match (&source, declared_order) {
                (_, Some(ord)) => Some(ord.as_slice().to_vec()),
                (Source::Function(_), None) => Some((0..n).collect()),
                (Source::Mixture(_), None) => Some(
                    source
                        .price_order()
                        .expect("mixtures carry prices")
                        .as_slice()
                        .to_vec(),
                ),
                _ => None,
            };
            match direct_seq {
                Some(seq) => {
                    let (settings, runs) =
                        direct_runs(&source, &args, seed, tag, &seq, &constraint)?;
                    let best = pick_best(&runs);
                    let rows = settings
                        .iter()
                        .zip(&runs)
                        .map(|(s, r)| GammaRow {
                            setting: setting_label(s),
                            value: r.value,
                            queries: r.queries,
                        })
                        .collect();
                    let total: u64 = runs.iter().map(|r| r.queries).sum();
                    let iq: u64 = runs.iter().map(|r| r.independence_queries).sum();
                    let best_run = runs[best].clone();
                    (
                        rows,
                        best,
                        best_run.solution,
                        best_run.removed,
                        best_run.value,
                        total,
                        iq,
                        false,
                    )
                }
                None => {
                    let model = source
                        .choice_model()
                        .expect("framework path only reached for mnl/markov instances");
                    let noise = if args.noisy > 0.0 {
                        Some((args.noisy, seed))
                    } else {
                        None
                    };
                    let result = run_framework(tag, model, &constraint, args.epsilon, noise)?;
                    let rows = result
                        .outcomes
                        .iter()
                        .map(|o| GammaRow {
                            setting: setting_label(&o.setting),
                            value: o.result.value,
                            queries: o.total_queries,
                        })
                        .collect();
                    let total: u64 = result.outcomes.iter().map(|o| o.total_queries).sum();
                    let iq: u64 = result
                        .outcomes
                        .iter()
                        .map(|o| o.result.independence_queries)
                        .sum();
                    let best = result.best;
                    let run = result.best_outcome().result.clone();
                    (
                        rows,
                        best,
                        run.solution,
                        run.removed,
                        run.value,
                        total,
                        iq,
                        true,
                    )
                }
            }
        };

    let opt = compute_opt(&source, &constraint, n);
    let report = RunReport {
        instance: args
            .instance
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        algo: args.algo.name(),
        epsilon: args.epsilon,
        noisy: args.noisy,
        seed,
        n,
        constraint: constraint_name(&constraint),
        via_framework,
        value,
        opt,
        ratio: opt.map(|o| if o > 0.0 { value / o } else { 1.0 }),
        queries,
        independence_queries,
        wall_ms: started.elapsed().as_millis(),
        solution: solution.to_vec(),
        removed: removed.to_vec(),
        per_gamma: rows,
    };

    if let Some(path) = &args.csv {
        write_csv(path, &report, best_idx)?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    Ok(())
}

fn run_with_optional_noise<T>(
    oracle: &dyn ValueOracle,
    noisy: f64,
    seed: u64,
    body: impl FnOnce(&dyn ValueOracle) -> Result<T, CliError>,
) -> Result<T, CliError> {
    if noisy > 0.0 {
        let wrapped = wrap_noisy(oracle, noisy, seed)?;
        body(&wrapped)
    } else {
        body(oracle)
    }
}

/// Enumerates the parameter settings once, then runs them sequentially on a
/// single oracle (reproducible query counts) or in parallel with one fresh
/// oracle per worker.
fn direct_runs(
    source: &Source,
    args: &RunArgs,
    seed: u64,
    tag: AlgorithmTag,
    seq: &[usize],
    constraint: &Constraint,
) -> Result<(Vec<ParamSetting>, Vec<RunResult>), CliError> {
    let setup_oracle = source.oracle();
    let settings = run_with_optional_noise(setup_oracle.as_ref(), args.noisy, seed, |f| {
        Ok(enumerate_params(tag, f, seq, constraint, args.epsilon)?)
    })?;

    if args.jobs <= 1 {
        let oracle = source.oracle();
        let runs = run_with_optional_noise(oracle.as_ref(), args.noisy, seed, |f| {
            settings
                .iter()
                .map(|s| run_one(s, f, seq, constraint).map_err(CliError::from))
                .collect::<Result<Vec<_>, _>>()
        })?;
        return Ok((settings, runs));
    }

    let jobs = args.jobs.min(settings.len().max(1));
    // Each worker owns a fresh constraint handle so matroid query counters
    // stay per-run; the clones are made before spawning because counter
    // cells are not shareable across threads.
    let worker_constraints: Vec<Constraint> = (0..jobs).map(|_| constraint.clone()).collect();
    let noisy = args.noisy;
    let mut slots: Vec<Option<RunResult>> = vec![None; settings.len()];
    let mut first_error: Option<CliError> = None;
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (worker, wc) in worker_constraints.into_iter().enumerate() {
            let settings = &settings;
            let handle = scope.spawn(move || -> Result<Vec<(usize, RunResult)>, CliError> {
                let oracle = source.oracle();
                run_with_optional_noise(oracle.as_ref(), noisy, seed, |f| {
                    settings
                        .iter()
                        .enumerate()
                        .skip(worker)
                        .step_by(jobs)
                        .map(|(i, s)| Ok((i, run_one(s, f, seq, &wc)?)))
                        .collect()
                })
            });
            handles.push(handle);
        }
        for handle in handles {
            match handle.join().expect("worker panicked") {
                Ok(pairs) => {
                    for (i, r) in pairs {
                        slots[i] = Some(r);
                    }
                }
                Err(e) => {
                    if first_error.is_none() {
                        first_error = Some(e);
                    }
                }
            }
        }
    });
    if let Some(e) = first_error {
        return Err(e);
    }
    let runs = slots
        .into_iter()
        .map(|r| r.expect("every setting ran"))
        .collect();
    Ok((settings, runs))
}

fn pick_best(runs: &[RunResult]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if r.value > runs[best].value + TOL {
            best = i;
        }
    }
    best
}

fn setting_label(s: &ParamSetting) -> String {
    let mut parts = Vec::new();
    if let Some(x) = &s.enumerated {
        parts.push(format!("X={:?}", x.to_vec()));
    }
    match s.threshold {
        Some(tau) => parts.push(format!("tau={tau:.6}")),
        None => parts.push(match s.algo {
            AlgorithmTag::BudgetThird => "singletons".to_string(),
            AlgorithmTag::Matroid => "single-pass".to_string(),
            _ => "default".to_string(),
        }),
    }
    parts.join(",")
}

/// Brute-force optimum when the instance fits the enumeration caps; the
/// audit uses a fresh, noiseless oracle.
fn compute_opt(source: &Source, constraint: &Constraint, n: usize) -> Option<f64> {
    let cap = match constraint {
        Constraint::Matroid(_) => CAP_BRUTE_FORCE_MATROID,
        _ => CAP_BRUTE_FORCE,
    };
    if n > cap {
        return None;
    }
    let audit = source.oracle();
    let constraint = constraint.clone();
    brute_force_opt(audit.as_ref(), &constraint)
        .ok()
        .map(|(_, v)| v)
}

fn write_csv(path: &PathBuf, report: &RunReport, best_idx: usize) -> Result<(), CliError> {
    let mut out = String::from("instance,algo,epsilon,gamma,setting,value,queries\n");
    for (i, row) in report.per_gamma.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},\"{}\",{},{}\n",
            report.instance, report.algo, report.epsilon, i, row.setting, row.value, row.queries
        ));
    }
    out.push_str(&format!(
        "{},{},{},best,\"{}\",{},{}\n",
        report.instance,
        report.algo,
        report.epsilon,
        report
            .per_gamma
            .get(best_idx)
            .map(|r| r.setting.as_str())
            .unwrap_or(""),
        report.value,
        report.queries
    ));
    std::fs::write(path, out)?;
    Ok(())
}
