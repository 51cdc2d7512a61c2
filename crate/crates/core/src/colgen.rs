//! Column generation over the restricted master.
//!
//! Each round solves the LP, then prices in two stages: first over patterns
//! holding at most one copy of each item (the cheap section), and only when
//! that section has no improving column, over the full bounded knapsack,
//! which also certifies LP optimality. When the best priced pattern is a
//! forbidden bin, the knapsack is re-solved with a profit cap just below the
//! forbidden pattern's profit until a permitted pattern appears.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::heuristics::subset_sum_n_heuristic;
use crate::instance::{Instance, Pattern};
use crate::knapsack::{
    solve_2d_decrement, solve_binary_many, solve_bounded_many, solve_bounded_excluding, KnapsackResult,
    PricingProblem,
};
use crate::simplex::{LpSolution, LpStatus, RestrictedMaster};

/// A column enters only when its reduced cost exceeds this.
pub const EPS_RC: f64 = 1e-9;
/// Slack used when rounding the LP value up to a bin count.
pub const EPS_INT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ColGenConfig {
    /// Price over the one-copy section before the full knapsack.
    pub sectional: bool,
    /// Initial decrement below a forbidden pattern's profit.
    pub delta0: f64,
    /// Largest decrement the adaptive schedule may reach.
    pub delta_max: f64,
    /// Consecutive forbidden hits in one chain before the decrement grows.
    pub delta_patience: usize,
    /// Most columns added per round; extra ones come from the same pricing
    /// solve when it is cheap to extract them.
    pub columns_per_round: usize,
    /// When a decrement chain ends without a usable column, settle the node
    /// with an exact search that skips forbidden patterns instead of
    /// stopping prematurely.
    pub certify: bool,
    /// Round limit; `None` means `50·n + 1000`.
    pub max_iterations: Option<usize>,
    pub deadline: Option<Instant>,
}

impl Default for ColGenConfig {
    fn default() -> Self {
        ColGenConfig {
            sectional: true,
            delta0: 1e-5,
            delta_max: 1e-2,
            delta_patience: 3,
            columns_per_round: 8,
            certify: true,
            max_iterations: None,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ColGenStats {
    pub columns_generated: usize,
    pub exact_pricing_calls: usize,
    pub sectional_pricing_calls: usize,
    pub decrement_solves: usize,
    /// Exact searches over non-forbidden patterns run after a chain gave up.
    pub certify_solves: usize,
    pub rounds: usize,
    pub pricing_time: Duration,
    pub lp_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Exact pricing found no improving column.
    Optimal,
    /// A decrement chain ended the loop; the bound is not certified.
    Premature,
    /// The pool cannot meet the demands and exact pricing proved no column helps.
    Infeasible,
    /// Infeasible pool, and a decrement chain stopped the search for a fix.
    InfeasibleUnproven,
    IterationLimit,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColGenOutcome {
    pub z_lp: f64,
    /// `⌈z_lp - EPS_INT⌉`.
    pub lower_bound: u64,
    /// LP solution aligned with the master's columns at return.
    pub lp: LpSolution,
    pub proven_optimal: bool,
    pub termination: Termination,
    /// The adaptive decrement grew above `delta0` at least once.
    pub delta_grew: bool,
    pub stats: ColGenStats,
}

impl ColGenOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self.termination,
            Termination::Infeasible | Termination::InfeasibleUnproven
        )
    }

    /// Pool columns with positive LP value.
    pub fn support<'a>(&'a self, master: &'a RestrictedMaster) -> impl Iterator<Item = (&'a Pattern, f64)> + 'a {
        master
            .columns()
            .iter()
            .zip(&self.lp.primal)
            .filter(|(_, &v)| v > EPS_INT)
            .map(|(p, &v)| (p, v))
    }

    /// True when every column value is within `EPS_INT` of an integer.
    pub fn is_integral(&self) -> bool {
        self.lp.primal.iter().all(|&v| (v - v.round()).abs() <= EPS_INT)
    }
}

/// `⌈z - EPS_INT⌉`, clamped at zero.
pub fn round_up_bound(z: f64) -> u64 {
    let v = (z - EPS_INT).ceil();
    if v <= 0.0 {
        0
    } else {
        v as u64
    }
}

/// Root pool: one singleton column per item with `min(d_i, ⌊c/w_i⌋)`
/// copies, plus the bins of the subset-sum heuristic.
pub fn initialize_pool(inst: &Instance) -> RestrictedMaster {
    let mut master = RestrictedMaster::new(inst.weights(), inst.capacity(), inst.demands());
    master.ensure_singletons(|_| true);
    for bin in subset_sum_n_heuristic(inst).bins {
        let _ = master.add_column(bin.counts);
    }
    master
}

/// Rebuilds `master` for a node: demands become `residual`, columns that
/// exceed it or are forbidden are dropped, and singleton columns are
/// re-injected where allowed.
pub fn enter_node(master: &mut RestrictedMaster, residual: &[u32], forbidden: &HashSet<Pattern>) {
    master.set_rhs(residual.to_vec());
    master.discard_columns(|p| forbidden.contains(p));
    master.ensure_singletons(|p| !forbidden.contains(p));
}

enum Priced {
    /// Improving, permitted columns, best first.
    Columns(Vec<KnapsackResult>),
    /// No improving column exists.
    Done,
    /// The decrement chain found nothing usable.
    ChainExhausted,
}

/// Runs column generation to completion on `master`, avoiding `forbidden`.
pub fn generate_columns(
    master: &mut RestrictedMaster,
    forbidden: &HashSet<Pattern>,
    config: &ColGenConfig,
) -> ColGenOutcome {
    let n = master.weights().len();
    let max_rounds = config.max_iterations.unwrap_or(50 * n + 1000);
    let mut stats = ColGenStats::default();
    let mut delta_grew = false;

    loop {
        stats.rounds += 1;
        let started = Instant::now();
        let lp = master.solve();
        stats.lp_time += started.elapsed();

        let farkas = match lp.status {
            LpStatus::Optimal => false,
            LpStatus::Infeasible => true,
            LpStatus::IterationLimit => {
                return finish(lp, Termination::IterationLimit, delta_grew, false, stats);
            }
        };
        if stats.rounds > max_rounds {
            return finish(lp, Termination::IterationLimit, delta_grew, false, stats);
        }
        if config.deadline.is_some_and(|d| Instant::now() >= d) {
            return finish(lp, Termination::TimeLimit, delta_grew, false, stats);
        }

        // Phase-two columns cost 1; phase-one (feasibility) pricing uses cost 0.
        let cost = if farkas { 0.0 } else { 1.0 };
        let problem = PricingProblem::new(
            lp.duals.clone(),
            master.weights().to_vec(),
            master.capacity(),
            master.rhs().to_vec(),
        );

        let started = Instant::now();
        let priced = price(&problem, cost, forbidden, config, &mut stats, &mut delta_grew);
        stats.pricing_time += started.elapsed();

        let columns = match priced {
            Priced::Columns(cols) => cols,
            Priced::Done => {
                let term = if farkas { Termination::Infeasible } else { Termination::Optimal };
                return finish(lp, term, delta_grew, false, stats);
            }
            Priced::ChainExhausted if config.certify => {
                stats.certify_solves += 1;
                let started = Instant::now();
                let best = solve_bounded_excluding(&problem, forbidden);
                stats.pricing_time += started.elapsed();
                if best.profit - cost <= EPS_RC {
                    let term = if farkas { Termination::Infeasible } else { Termination::Optimal };
                    return finish(lp, term, delta_grew, true, stats);
                }
                vec![best]
            }
            Priced::ChainExhausted => {
                let term = if farkas { Termination::InfeasibleUnproven } else { Termination::Premature };
                return finish(lp, term, delta_grew, false, stats);
            }
        };
        let mut added = 0;
        for col in columns {
            debug_assert!(col.profit - cost > EPS_RC);
            if master.add_column(col.counts).is_ok() {
                added += 1;
            }
        }
        stats.columns_generated += added;
        // Pricing stalled on pool columns: numerically converged.
        if added == 0 {
            let term = if farkas { Termination::InfeasibleUnproven } else { Termination::Premature };
            return finish(lp, term, delta_grew, false, stats);
        }
    }
}

fn price(
    problem: &PricingProblem,
    cost: f64,
    forbidden: &HashSet<Pattern>,
    config: &ColGenConfig,
    stats: &mut ColGenStats,
    delta_grew: &mut bool,
) -> Priced {
    let k = config.columns_per_round.max(1);
    let permitted = |cols: Vec<KnapsackResult>| -> Vec<KnapsackResult> {
        cols.into_iter()
            .filter(|c| c.profit - cost > EPS_RC && !forbidden.contains(&c.counts))
            .collect()
    };
    if config.sectional {
        stats.sectional_pricing_calls += 1;
        let found = permitted(solve_binary_many(problem, k, cost + EPS_RC));
        if !found.is_empty() {
            return Priced::Columns(found);
        }
    }
    stats.exact_pricing_calls += 1;
    let mut all = solve_bounded_many(problem, k, cost + EPS_RC);
    let exact = all.swap_remove(0);
    if exact.profit - cost <= EPS_RC {
        return Priced::Done;
    }
    if !forbidden.contains(&exact.counts) {
        let mut found = vec![exact];
        found.extend(permitted(all));
        return Priced::Columns(found);
    }
    let extra = permitted(all);
    if !extra.is_empty() {
        return Priced::Columns(extra);
    }

    if let Some(near) = neighbour(problem, &exact.counts, cost, forbidden) {
        return Priced::Columns(vec![near]);
    }

    // Decrement chain below the forbidden optimum.
    let mut ceiling = exact.profit;
    let mut delta = config.delta0;
    let mut repeats = 0usize;
    loop {
        stats.decrement_solves += 1;
        let capped = problem.clone().with_cap(ceiling - delta - 1.0);
        let next = solve_2d_decrement(&capped);
        if next.counts.is_zero() || next.profit - cost <= EPS_RC {
            return Priced::ChainExhausted;
        }
        if !forbidden.contains(&next.counts) {
            return Priced::Columns(vec![next]);
        }
        if let Some(near) = neighbour(problem, &next.counts, cost, forbidden) {
            return Priced::Columns(vec![near]);
        }
        ceiling = next.profit;
        repeats += 1;
        if repeats >= config.delta_patience && delta < config.delta_max {
            delta = (delta * 10.0).min(config.delta_max);
            *delta_grew = true;
            repeats = 0;
        }
    }
}

/// Best permitted pattern one unit away from `base` (one copy added or
/// removed) that still prices out. Catches ties the decrement would skip.
fn neighbour(
    problem: &PricingProblem,
    base: &Pattern,
    cost: f64,
    forbidden: &HashSet<Pattern>,
) -> Option<KnapsackResult> {
    let load = base.total_weight(&problem.weights);
    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut consider = |counts: Vec<u32>| {
        if counts.iter().all(|&x| x == 0) {
            return;
        }
        let profit = problem.profit_of(&counts);
        if profit - cost <= EPS_RC || best.as_ref().is_some_and(|(b, _)| *b >= profit) {
            return;
        }
        let p = Pattern::new(counts);
        if !forbidden.contains(&p) {
            best = Some((profit, p.counts().to_vec()));
        }
    };
    for i in 0..problem.len() {
        let x = base.counts()[i];
        if x < problem.bounds[i] && load + problem.weights[i] <= problem.capacity {
            let mut c = base.counts().to_vec();
            c[i] += 1;
            consider(c);
        }
        if x > 0 {
            let mut c = base.counts().to_vec();
            c[i] -= 1;
            consider(c);
        }
    }
    best.map(|(profit, counts)| KnapsackResult {
        counts: Pattern::new(counts),
        profit,
        reduced_cost: profit - 1.0,
    })
}

/// `certified`: the last pricing was the exact search over permitted
/// patterns, so a grown decrement cannot have hidden a column.
fn finish(
    lp: LpSolution,
    termination: Termination,
    delta_grew: bool,
    certified: bool,
    stats: ColGenStats,
) -> ColGenOutcome {
    let feasible = lp.status == LpStatus::Optimal;
    let z_lp = if feasible { lp.objective } else { f64::INFINITY };
    let proven_optimal = match termination {
        Termination::Optimal => certified || !delta_grew,
        Termination::Infeasible => true,
        _ => false,
    };
    ColGenOutcome {
        z_lp,
        lower_bound: if feasible { round_up_bound(z_lp) } else { 0 },
        lp,
        proven_optimal,
        termination,
        delta_grew,
        stats,
    }
}
