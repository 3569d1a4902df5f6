//! Single-pass maximization of ordered monotone subadditive functions under
//! cardinality, budget, and matroid constraints.
//!
//! Every composite algorithm is "the best run over an enumerated set of
//! parameter settings": [`enumerate_params`] produces the settings and
//! [`run_one`] executes a single setting in exactly one pass over the
//! ordered ground set, returning the solution together with the set of
//! elements it once held and later discarded.

use std::fmt;

use crate::constraints::{BudgetConstraint, Constraint, Matroid};
use crate::error::Error;
use crate::ground::{ElemSet, Order};
use crate::oracle::ValueOracle;
use crate::TOL;

/// Which composite algorithm a parameter setting belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmTag {
    Cardinality,
    BudgetThird,
    BudgetHalf,
    Matroid,
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgorithmTag::Cardinality => "cardinality",
            AlgorithmTag::BudgetThird => "budget-third",
            AlgorithmTag::BudgetHalf => "budget-half",
            AlgorithmTag::Matroid => "matroid",
        };
        f.write_str(s)
    }
}

/// One enumerated parameter setting of a composite algorithm.
///
/// For the budget algorithms a missing threshold denotes the singleton
/// sweep; the enumerated set and the error parameter appear only for the
/// partial-enumeration budget algorithm.
#[derive(Clone, Debug)]
pub struct ParamSetting {
    pub algo: AlgorithmTag,
    pub threshold: Option<f64>,
    pub enumerated: Option<ElemSet>,
    pub eps: Option<f64>,
}

impl ParamSetting {
    fn threshold_only(algo: AlgorithmTag, tau: f64) -> Self {
        ParamSetting {
            algo,
            threshold: Some(tau),
            enumerated: None,
            eps: None,
        }
    }
}

/// One add/swap/reject step of a run.
#[derive(Clone, Debug)]
pub enum TraceAction {
    Add { gain: f64 },
    Reject,
    Swap { removed: usize, gain: f64 },
    FinalAdd { removed: Vec<usize>, added: bool },
}

/// Trace entry: the parsed element and what the run did with it.
#[derive(Clone, Debug)]
pub struct TraceEvent {
    pub element: usize,
    pub action: TraceAction,
}

/// Output of a single-parameter run.
#[derive(Clone, Debug)]
pub struct RunResult {
    /// The feasible solution.
    pub solution: ElemSet,
    /// Elements once held and later discarded.
    pub removed: ElemSet,
    /// `f(solution)`.
    pub value: f64,
    /// Value-oracle evaluations spent by this run.
    pub queries: u64,
    /// Independence-oracle queries spent by this run (matroid runs only).
    pub independence_queries: u64,
    /// Parse log, in traversal order.
    pub trace: Vec<TraceEvent>,
}

impl RunResult {
    pub(crate) fn empty() -> Self {
        RunResult {
            solution: ElemSet::new(),
            removed: ElemSet::new(),
            value: 0.0,
            queries: 0,
            independence_queries: 0,
            trace: Vec::new(),
        }
    }
}

/// A composite algorithm's enumerated runs and the index of the winner
/// (the first setting attaining the best value).
#[derive(Clone, Debug)]
pub struct CompositeResult {
    pub settings: Vec<ParamSetting>,
    pub runs: Vec<RunResult>,
    pub best: usize,
    /// Queries spent outside the runs (threshold-grid initialization).
    pub setup_queries: u64,
}

impl CompositeResult {
    pub fn best_run(&self) -> &RunResult {
        &self.runs[self.best]
    }

    pub fn best_setting(&self) -> &ParamSetting {
        &self.settings[self.best]
    }

    pub fn total_queries(&self) -> u64 {
        self.setup_queries + self.runs.iter().map(|r| r.queries).sum::<u64>()
    }
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

/// `⌈log_ratio(x)⌉` with a one-ulp guard so exact powers do not round up.
fn grid_len(x: f64, ratio: f64) -> usize {
    if x <= 1.0 {
        return 1;
    }
    let t = x.ln() / ratio.ln();
    let r = t.round();
    let steps = if (t - r).abs() < 1e-9 { r } else { t.ceil() };
    (steps as usize).max(1)
}

/// Geometric threshold grid `base · ratio^i`, `i = 0..len`.
fn tau_grid(base: f64, ratio: f64, len: usize) -> Vec<f64> {
    (0..len).map(|i| base * ratio.powi(i as i32)).collect()
}

/// Largest singleton value along the parse sequence; one query per element.
fn max_singleton(f: &dyn ValueOracle, seq: &[usize]) -> f64 {
    seq.iter()
        .map(|&e| f.eval(&ElemSet::singleton(e)))
        .fold(0.0, f64::max)
}

/// Single pass accepting elements whose marginal clears `tau`, stopping at
/// `k` elements. The running set's value is cached, so each parsed element
/// costs one query.
pub fn threshold_add(f: &dyn ValueOracle, seq: &[usize], k: usize, tau: f64) -> RunResult {
    let q0 = f.queries();
    let mut solution = ElemSet::new();
    let mut current = 0.0;
    let mut trace = Vec::new();
    for &e in seq {
        if solution.len() >= k {
            break;
        }
        let with = f.eval(&solution.with(e));
        let gain = with - current;
        if gain >= tau - TOL {
            solution.insert(e);
            current = with;
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Add { gain },
            });
        } else {
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Reject,
            });
        }
    }
    RunResult {
        solution,
        removed: ElemSet::new(),
        value: current,
        queries: f.queries() - q0,
        independence_queries: 0,
        trace,
    }
}

/// Threshold grid over a single-pass add rule: the best-possible cardinality
/// algorithm for ordered instances. Errors on `k < 1` or `ε ∉ (0, 1)`.
pub fn cardinality_max(
    f: &dyn ValueOracle,
    order: &Order,
    k: usize,
    eps: f64,
) -> Result<CompositeResult, Error> {
    let q0 = f.queries();
    let settings = enumerate_params(
        AlgorithmTag::Cardinality,
        f,
        order.as_slice(),
        &Constraint::Cardinality(k),
        eps,
    )?;
    run_all(
        settings,
        f,
        order.as_slice(),
        &Constraint::Cardinality(k),
        f.queries() - q0,
    )
}

/// Single pass accepting elements that fit the remaining budget and whose
/// marginal per unit budget clears `tau`. Elements with budgets above the
/// total are never parsed.
pub fn budget_threshold_add(
    f: &dyn ValueOracle,
    seq: &[usize],
    bc: &BudgetConstraint,
    tau: f64,
) -> RunResult {
    let q0 = f.queries();
    let mut solution = ElemSet::new();
    let mut current = 0.0;
    let mut spent = 0.0;
    let mut trace = Vec::new();
    for &e in seq {
        let b = bc.budgets[e];
        if b > bc.total + TOL {
            continue;
        }
        if spent >= bc.total - TOL {
            break;
        }
        if spent + b > bc.total + TOL {
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Reject,
            });
            continue;
        }
        let with = f.eval(&solution.with(e));
        let gain = with - current;
        if gain >= tau * b - TOL {
            solution.insert(e);
            current = with;
            spent += b;
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Add { gain },
            });
        } else {
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Reject,
            });
        }
    }
    RunResult {
        solution,
        removed: ElemSet::new(),
        value: current,
        queries: f.queries() - q0,
        independence_queries: 0,
        trace,
    }
}

/// Best feasible singleton, scanned in traversal order.
fn singleton_sweep(f: &dyn ValueOracle, seq: &[usize], bc: &BudgetConstraint) -> RunResult {
    let q0 = f.queries();
    let mut best: Option<(usize, f64)> = None;
    let mut parsed = Vec::new();
    for &e in seq {
        if bc.budgets[e] > bc.total + TOL {
            continue;
        }
        let v = f.eval(&ElemSet::singleton(e));
        parsed.push(e);
        if best.is_none_or(|(_, bv)| v > bv + TOL) {
            best = Some((e, v));
        }
    }
    let trace = parsed
        .iter()
        .map(|&e| TraceEvent {
            element: e,
            action: if best.is_some_and(|(be, _)| be == e) {
                TraceAction::Add {
                    gain: best.unwrap().1,
                }
            } else {
                TraceAction::Reject
            },
        })
        .collect();
    let (solution, value) = match best {
        Some((e, v)) => (ElemSet::singleton(e), v),
        None => (ElemSet::new(), 0.0),
    };
    RunResult {
        solution,
        removed: ElemSet::new(),
        value,
        queries: f.queries() - q0,
        independence_queries: 0,
        trace,
    }
}

/// Threshold grid on marginal-per-unit-budget plus a singleton sweep: the
/// near-linear budget algorithm.
pub fn budget_third(
    f: &dyn ValueOracle,
    order: &Order,
    bc: &BudgetConstraint,
    eps: f64,
) -> Result<CompositeResult, Error> {
    let constraint = Constraint::Budget(bc.clone());
    let q0 = f.queries();
    let settings = enumerate_params(
        AlgorithmTag::BudgetThird,
        f,
        order.as_slice(),
        &constraint,
        eps,
    )?;
    run_all(settings, f, order.as_slice(), &constraint, f.queries() - q0)
}

/// Outcome of the drop-small-then-add repair step.
#[derive(Clone, Debug)]
pub struct FinalAddOutcome {
    /// The repaired set (input set when `added` is false).
    pub set: ElemSet,
    /// Elements dropped to make room, in removal order.
    pub removed: Vec<usize>,
    /// Whether the blocked element was added.
    pub added: bool,
}

/// Repairs a budget overflow: repeatedly removes the lowest-ranked element
/// with budget below `eps · B` until the blocked element `j` fits, then
/// adds it. If the removable elements run out first, the input set is
/// returned unchanged and `j` stays out.
pub fn final_add(
    bc: &BudgetConstraint,
    eps: f64,
    s: &ElemSet,
    j: usize,
    rank: impl Fn(usize) -> usize,
) -> FinalAddOutcome {
    let cutoff = eps * bc.total;
    let mut kept = s.clone();
    let mut removed = Vec::new();
    while bc.budgets[j] + bc.spent(&kept) > bc.total + TOL {
        let next = kept
            .iter()
            .filter(|&i| bc.budgets[i] < cutoff - TOL)
            .min_by_key(|&i| rank(i));
        match next {
            Some(i) => {
                kept.remove(i);
                removed.push(i);
            }
            None => {
                return FinalAddOutcome {
                    set: s.clone(),
                    removed: Vec::new(),
                    added: false,
                };
            }
        }
    }
    kept.insert(j);
    FinalAddOutcome {
        set: kept,
        removed,
        added: true,
    }
}

/// One pass of the partial-enumeration budget algorithm for a fixed
/// high-budget set `x` and threshold `tau`: the ground set is filtered to
/// budgets at most `min_{i∈x} b_i`, overflow of a passing element triggers
/// the repair step, and the pass ends there.
pub fn budget_half_run(
    f: &dyn ValueOracle,
    seq: &[usize],
    bc: &BudgetConstraint,
    eps: f64,
    x: &ElemSet,
    tau: f64,
) -> RunResult {
    let q0 = f.queries();
    let filtered = filter_by_enumerated(seq, bc, x);
    let rank_of = |i: usize| filtered.iter().position(|&e| e == i).unwrap_or(usize::MAX);
    let mut solution = ElemSet::new();
    let mut removed = ElemSet::new();
    let mut current = 0.0;
    let mut spent = 0.0;
    let mut trace = Vec::new();
    for &e in &filtered {
        if spent >= bc.total - TOL {
            break;
        }
        let b = bc.budgets[e];
        let with = f.eval(&solution.with(e));
        let gain = with - current;
        if gain >= tau * b - TOL {
            if spent + b <= bc.total + TOL {
                solution.insert(e);
                current = with;
                spent += b;
                trace.push(TraceEvent {
                    element: e,
                    action: TraceAction::Add { gain },
                });
            } else {
                let outcome = final_add(bc, eps, &solution, e, rank_of);
                trace.push(TraceEvent {
                    element: e,
                    action: TraceAction::FinalAdd {
                        removed: outcome.removed.clone(),
                        added: outcome.added,
                    },
                });
                if outcome.added {
                    for &i in &outcome.removed {
                        removed.insert(i);
                    }
                    solution = outcome.set;
                    current = if outcome.removed.is_empty() {
                        with
                    } else {
                        f.eval(&solution)
                    };
                }
                break;
            }
        } else {
            trace.push(TraceEvent {
                element: e,
                action: TraceAction::Reject,
            });
        }
    }
    RunResult {
        solution,
        removed,
        value: current,
        queries: f.queries() - q0,
        independence_queries: 0,
        trace,
    }
}

fn filter_by_enumerated(seq: &[usize], bc: &BudgetConstraint, x: &ElemSet) -> Vec<usize> {
    let min_x = x
        .iter()
        .map(|i| bc.budgets[i])
        .fold(f64::INFINITY, f64::min);
    seq.iter()
        .copied()
        .filter(|&e| bc.budgets[e] <= bc.total + TOL && bc.budgets[e] <= min_x + TOL)
        .collect()
}

/// Partial enumeration over small high-budget sets combined with threshold
/// grids: the best-possible budget algorithm. Errors unless `ε ∈ (0, 0.5)`.
pub fn budget_half(
    f: &dyn ValueOracle,
    order: &Order,
    bc: &BudgetConstraint,
    eps: f64,
) -> Result<CompositeResult, Error> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("need 0 < eps < 0.5, got {eps}")));
    }
    let constraint = Constraint::Budget(bc.clone());
    let q0 = f.queries();
    let settings = enumerate_params(
        AlgorithmTag::BudgetHalf,
        f,
        order.as_slice(),
        &constraint,
        eps,
    )?;
    run_all(settings, f, order.as_slice(), &constraint, f.queries() - q0)
}

/// Directed local search along the traversal order under a matroid
/// constraint. Each element is parsed once; a swap displaces the
/// lowest-valued element of the circuit it closes, and displaced value
/// accumulates along swap chains so a chain's terminal has paid for all of
/// its predecessors.
pub fn matroid_local_search(f: &dyn ValueOracle, seq: &[usize], matroid: &Matroid) -> RunResult {
    let q0 = f.queries();
    let iq0 = matroid.queries();
    let d = matroid.rank_of_ground();
    let mut solution = ElemSet::new();
    let mut removed = ElemSet::new();
    let mut held = ElemSet::new(); // solution ∪ removed
    let mut held_value = 0.0;
    let mut chain_value: Vec<f64> = vec![0.0; matroid.n()];
    let mut trace = Vec::new();
    for &j in seq {
        let with = f.eval(&held.with(j));
        let gain = with - held_value;
        // A full-rank running set cannot absorb j; skip the oracle call so
        // each parsed element costs at most d independence queries.
        let independent = solution.len() < d && matroid.is_independent(&solution.with(j));
        if independent {
            chain_value[j] = gain;
            solution.insert(j);
            held.insert(j);
            held_value = with;
            trace.push(TraceEvent {
                element: j,
                action: TraceAction::Add { gain },
            });
            continue;
        }
        let circuit = matroid.circuit(&solution, j);
        let candidates = circuit.without(j);
        let weakest = candidates.iter().min_by(|&a, &b| {
            chain_value[a]
                .partial_cmp(&chain_value[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        match weakest {
            Some(out) if gain > chain_value[out] + TOL => {
                chain_value[j] = chain_value[out] + gain;
                solution.remove(out);
                solution.insert(j);
                removed.insert(out);
                held.insert(j);
                held_value = with;
                trace.push(TraceEvent {
                    element: j,
                    action: TraceAction::Swap { removed: out, gain },
                });
            }
            _ => {
                trace.push(TraceEvent {
                    element: j,
                    action: TraceAction::Reject,
                });
            }
        }
    }
    let value = if removed.is_empty() {
        held_value
    } else {
        f.eval(&solution)
    };
    RunResult {
        solution,
        removed,
        value,
        queries: f.queries() - q0,
        independence_queries: matroid.queries() - iq0,
        trace,
    }
}

/// Plain greedy baseline: repeatedly add the element with the largest
/// marginal until `k` elements are held. Not single-pass and not
/// order-aware; kept for comparisons.
pub fn greedy(f: &dyn ValueOracle, k: usize) -> RunResult {
    let q0 = f.queries();
    let n = f.n();
    let mut solution = ElemSet::new();
    let mut current = 0.0;
    let mut trace = Vec::new();
    while solution.len() < k && solution.len() < n {
        let mut best: Option<(usize, f64)> = None;
        for e in 0..n {
            if solution.contains(e) {
                continue;
            }
            let gain = f.eval(&solution.with(e)) - current;
            if best.is_none_or(|(_, bg)| gain > bg) {
                best = Some((e, gain));
            }
        }
        let (e, gain) = best.expect("candidates remain while |S| < n");
        solution.insert(e);
        current += gain;
        trace.push(TraceEvent {
            element: e,
            action: TraceAction::Add { gain },
        });
    }
    RunResult {
        solution: solution.clone(),
        removed: ElemSet::new(),
        value: current,
        queries: f.queries() - q0,
        independence_queries: 0,
        trace,
    }
}

/// Enumerates the parameter settings a composite algorithm tries. Threshold
/// grids are seeded from the largest singleton value along `seq`, so this
/// spends oracle queries.
pub fn enumerate_params(
    tag: AlgorithmTag,
    f: &dyn ValueOracle,
    seq: &[usize],
    constraint: &Constraint,
    eps: f64,
) -> Result<Vec<ParamSetting>, Error> {
    match tag {
        AlgorithmTag::Cardinality => {
            let k = match constraint {
                Constraint::Cardinality(k) => *k,
                _ => {
                    return Err(Error::Incompatible(
                        "cardinality algorithm needs a cardinality constraint".into(),
                    ))
                }
            };
            if k < 1 {
                return Err(Error::invalid("cardinality bound must be at least 1"));
            }
            check_eps(eps)?;
            let base = max_singleton(f, seq) / k as f64;
            Ok(tau_grid(base, 1.0 + eps, grid_len(k as f64, 1.0 + eps))
                .into_iter()
                .map(|t| ParamSetting::threshold_only(AlgorithmTag::Cardinality, t))
                .collect())
        }
        AlgorithmTag::BudgetThird => {
            let bc = budget_of(constraint, "budget algorithm")?;
            check_eps(eps)?;
            let feasible: Vec<usize> = seq
                .iter()
                .copied()
                .filter(|&e| bc.budgets[e] <= bc.total + TOL)
                .collect();
            let mut settings = Vec::new();
            if !feasible.is_empty() && bc.total > 0.0 {
                let base = max_singleton(f, &feasible) / bc.total;
                let len = grid_len(feasible.len() as f64, 1.0 + eps);
                settings.extend(
                    tau_grid(base, 1.0 + eps, len)
                        .into_iter()
                        .map(|t| ParamSetting::threshold_only(AlgorithmTag::BudgetThird, t)),
                );
            }
            // The singleton sweep is a parameter setting of its own.
            settings.push(ParamSetting {
                algo: AlgorithmTag::BudgetThird,
                threshold: None,
                enumerated: None,
                eps: None,
            });
            Ok(settings)
        }
        AlgorithmTag::BudgetHalf => {
            let bc = budget_of(constraint, "budget algorithm")?;
            check_eps(eps)?;
            let cap = (1.0 / eps + TOL).floor() as usize;
            let mut settings = Vec::new();
            for x in enumerate_small_sets(seq, bc, cap) {
                let filtered = filter_by_enumerated(seq, bc, &x);
                if filtered.is_empty() || bc.total <= 0.0 {
                    continue;
                }
                let base = max_singleton(f, &filtered) / bc.total;
                let len = grid_len(filtered.len() as f64, 1.0 + eps);
                for tau in tau_grid(base, 1.0 + eps, len) {
                    settings.push(ParamSetting {
                        algo: AlgorithmTag::BudgetHalf,
                        threshold: Some(tau),
                        enumerated: Some(x.clone()),
                        eps: Some(eps),
                    });
                }
            }
            Ok(settings)
        }
        AlgorithmTag::Matroid => {
            if !matches!(constraint, Constraint::Matroid(_)) {
                return Err(Error::Incompatible(
                    "matroid algorithm needs a matroid constraint".into(),
                ));
            }
            Ok(vec![ParamSetting {
                algo: AlgorithmTag::Matroid,
                threshold: None,
                enumerated: None,
                eps: None,
            }])
        }
    }
}

fn check_eps(eps: f64) -> Result<(), Error> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("need 0 < eps < 1, got {eps}")));
    }
    Ok(())
}

fn budget_of<'a>(constraint: &'a Constraint, who: &str) -> Result<&'a BudgetConstraint, Error> {
    match constraint {
        Constraint::Budget(bc) => Ok(bc),
        _ => Err(Error::Incompatible(format!(
            "{who} needs a budget constraint"
        ))),
    }
}

/// All subsets of `seq` with at most `cap` elements and total budget within
/// the constraint, the empty set included.
fn enumerate_small_sets(seq: &[usize], bc: &BudgetConstraint, cap: usize) -> Vec<ElemSet> {
    let mut out = Vec::new();
    let mut current = ElemSet::new();
    fn recurse(
        seq: &[usize],
        bc: &BudgetConstraint,
        cap: usize,
        i: usize,
        spent: f64,
        current: &mut ElemSet,
        out: &mut Vec<ElemSet>,
    ) {
        if i == seq.len() {
            out.push(current.clone());
            return;
        }
        recurse(seq, bc, cap, i + 1, spent, current, out);
        let e = seq[i];
        let b = bc.budgets[e];
        if current.len() < cap && spent + b <= bc.total + TOL {
            current.insert(e);
            recurse(seq, bc, cap, i + 1, spent + b, current, out);
            current.remove(e);
        }
    }
    recurse(seq, bc, cap, 0, 0.0, &mut current, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.lex_cmp(b)));
    out
}

/// Executes one parameter setting in a single pass over `seq`.
pub fn run_one(
    setting: &ParamSetting,
    f: &dyn ValueOracle,
    seq: &[usize],
    constraint: &Constraint,
) -> Result<RunResult, Error> {
    match setting.algo {
        AlgorithmTag::Cardinality => {
            let k = match constraint {
                Constraint::Cardinality(k) => *k,
                _ => {
                    return Err(Error::Incompatible(
                        "cardinality setting on a non-cardinality constraint".into(),
                    ))
                }
            };
            let tau = setting
                .threshold
                .ok_or_else(|| Error::invalid("cardinality setting lacks a threshold"))?;
            Ok(threshold_add(f, seq, k, tau))
        }
        AlgorithmTag::BudgetThird => {
            let bc = budget_of(constraint, "budget setting")?;
            Ok(match setting.threshold {
                Some(tau) => budget_threshold_add(f, seq, bc, tau),
                None => singleton_sweep(f, seq, bc),
            })
        }
        AlgorithmTag::BudgetHalf => {
            let bc = budget_of(constraint, "budget setting")?;
            let tau = setting
                .threshold
                .ok_or_else(|| Error::invalid("partial-enumeration setting lacks a threshold"))?;
            let x = setting.enumerated.as_ref().ok_or_else(|| {
                Error::invalid("partial-enumeration setting lacks its enumerated set")
            })?;
            let eps = setting.eps.ok_or_else(|| {
                Error::invalid("partial-enumeration setting lacks its error parameter")
            })?;
            Ok(budget_half_run(f, seq, bc, eps, x, tau))
        }
        AlgorithmTag::Matroid => match constraint {
            Constraint::Matroid(m) => Ok(matroid_local_search(f, seq, m)),
            _ => Err(Error::Incompatible(
                "matroid setting on a non-matroid constraint".into(),
            )),
        },
    }
}

fn run_all(
    settings: Vec<ParamSetting>,
    f: &dyn ValueOracle,
    seq: &[usize],
    constraint: &Constraint,
    setup_queries: u64,
) -> Result<CompositeResult, Error> {
    if settings.is_empty() {
        return Ok(CompositeResult {
            settings,
            runs: vec![RunResult::empty()],
            best: 0,
            setup_queries,
        });
    }
    let mut runs = Vec::with_capacity(settings.len());
    for s in &settings {
        runs.push(run_one(s, f, seq, constraint)?);
    }
    let best = pick_best(&runs);
    Ok(CompositeResult {
        settings,
        runs,
        best,
        setup_queries,
    })
}
