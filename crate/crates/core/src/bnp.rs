//! Depth-first binary branch-and-price.
//!
//! A node is a residual demand vector, the bins already fixed, and a set of
//! forbidden patterns. Branching picks the best-scored bin `b` of the node LP:
//! the left child fixes one copy of `b`, the right child forbids `b` in its
//! whole subtree. Every packing of the node contains `b` or does not, so no
//! solution is lost.

use std::collections::HashSet;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::colgen::{enter_node, generate_columns, initialize_pool, ColGenConfig, ColGenOutcome, Termination};
use crate::diving::{batch_dive, score_bins, BatchMode, BatchSense, DivingCriterion, ScoredBin};
use crate::heuristics::{bound_pair, lower_bound, subset_sum_n_heuristic};
use crate::instance::{verify_solution, Instance, Pattern, Solution};
use crate::simplex::{LpStatus, RestrictedMaster};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub criterion: DivingCriterion,
    pub delta0: f64,
    pub time_limit: Duration,
    /// Batch-diving plunges run at the root and at every depth divisible by
    /// this stride. `None` disables them.
    pub batch_stride: Option<usize>,
    pub batch_mode: BatchMode,
    pub batch_sense: BatchSense,
    pub sectional: bool,
    /// Settle inconclusive decrement chains with an exact search over
    /// permitted patterns. With `false`, such nodes stay uncertified.
    pub certify: bool,
    /// `false` solves the root only.
    pub branching: bool,
    pub node_limit: Option<usize>,
    /// LRU cap on the master's pool; `None` keeps every column.
    pub column_limit: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            criterion: DivingCriterion::default(),
            delta0: 1e-5,
            time_limit: Duration::from_secs(60),
            batch_stride: Some(3),
            batch_mode: BatchMode::default(),
            batch_sense: BatchSense::default(),
            sectional: true,
            certify: true,
            branching: true,
            node_limit: None,
            column_limit: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Columns generated by the root column generation.
    pub n_col_root: usize,
    /// Exact (full bounded knapsack) pricing calls at the root.
    pub n_exact_root: usize,
    /// Nodes processed, the root included.
    pub n_total_node: usize,
    /// Nodes whose column generation needed at least one decrement solve.
    pub n_poll_node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapStatus {
    /// The incumbent equals the rounded-up root LP value.
    Closed,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeBound {
    pub value: u64,
    /// False when column generation did not prove the node LP optimal; such
    /// a bound must not be used for pruning.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub optimum: u64,
    pub solution: Solution,
    pub proved_optimal: bool,
    /// Best certified global lower bound.
    pub lower_bound: u64,
    pub root_lp: f64,
    pub root_bound: NodeBound,
    pub root_gap: GapStatus,
    pub counters: Counters,
    pub wall_time: Duration,
    pub timed_out: bool,
    /// Nodes dropped without a proof that they hold nothing better.
    pub uncertain_discards: usize,
}

impl SolveReport {
    pub fn gap(&self) -> u64 {
        self.optimum.saturating_sub(self.lower_bound)
    }
}

/// Fixed bin count plus the rounded node LP value.
pub fn node_bound(fixed_count: u64, outcome: &ColGenOutcome) -> NodeBound {
    NodeBound {
        value: fixed_count + outcome.lower_bound,
        certified: outcome.proven_optimal,
    }
}

/// Whether an incumbent already matches the rounded-up root LP value.
pub fn root_gap_check(root: &ColGenOutcome, incumbent: u64) -> GapStatus {
    debug_assert!(root.proven_optimal || root.lp.objective == 0.0);
    if incumbent <= root.lower_bound {
        GapStatus::Closed
    } else {
        GapStatus::Open
    }
}

struct Node {
    residual: Vec<u32>,
    fixed: Solution,
    forbidden: Rc<HashSet<Pattern>>,
    depth: usize,
    /// Certified bound inherited from the parent (valid for every child).
    parent_bound: u64,
    pool: Rc<Vec<Pattern>>,
}

struct Solver<'a> {
    inst: &'a Instance,
    config: &'a SolverConfig,
    deadline: Instant,
    incumbent: Solution,
    best: u64,
    global_lb: u64,
    counters: Counters,
    timed_out: bool,
    uncertain: usize,
    root: Option<ColGenOutcome>,
}

/// Solves `inst` to proven optimality unless a limit is hit first.
pub fn solve(inst: &Instance, config: &SolverConfig) -> SolveReport {
    let started = Instant::now();
    let bounds = bound_pair(inst);
    let mut solver = Solver {
        inst,
        config,
        deadline: started + config.time_limit,
        best: bounds.ub,
        incumbent: bounds.ub_solution,
        global_lb: bounds.lb,
        counters: Counters::default(),
        timed_out: false,
        uncertain: 0,
        root: None,
    };
    let exhausted = solver.search();

    let root = solver.root.take();
    let (root_lp, root_bound, root_gap) = match &root {
        Some(out) if !out.is_infeasible() => {
            let b = node_bound(0, out);
            let gap = if b.certified {
                root_gap_check(out, solver.best)
            } else {
                GapStatus::Open
            };
            (out.z_lp, b, gap)
        }
        _ => (
            f64::NAN,
            NodeBound {
                value: 0,
                certified: false,
            },
            GapStatus::Open,
        ),
    };
    if exhausted && solver.uncertain == 0 && !solver.timed_out {
        solver.global_lb = solver.best;
    }
    let mut solution = solver.incumbent;
    solution.normalize();
    SolveReport {
        optimum: solver.best,
        proved_optimal: solver.best <= solver.global_lb,
        lower_bound: solver.global_lb.min(solver.best),
        solution,
        root_lp,
        root_bound,
        root_gap,
        counters: solver.counters,
        wall_time: started.elapsed(),
        timed_out: solver.timed_out,
        uncertain_discards: solver.uncertain,
    }
}

impl Solver<'_> {
    fn colgen_config(&self) -> ColGenConfig {
        ColGenConfig {
            sectional: self.config.sectional,
            delta0: self.config.delta0,
            certify: self.config.certify,
            deadline: Some(self.deadline),
            ..ColGenConfig::default()
        }
    }

    fn out_of_time(&mut self) -> bool {
        if Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn offer(&mut self, sol: Solution) {
        let value = sol.objective();
        if value < self.best && verify_solution(self.inst, &sol).is_valid() {
            self.best = value;
            self.incumbent = sol;
        }
    }

    fn closed(&self) -> bool {
        self.best <= self.global_lb
    }

    /// Runs the tree; true when every open node was processed.
    fn search(&mut self) -> bool {
        let mut master = initialize_pool(self.inst);
        master.set_column_limit(self.config.column_limit);
        let mut stack = vec![Node {
            residual: self.inst.demands(),
            fixed: Solution::new(),
            forbidden: Rc::new(HashSet::new()),
            depth: 0,
            parent_bound: 0,
            pool: Rc::new(master.columns().to_vec()),
        }];

        while let Some(node) = stack.pop() {
            // The root always runs so its LP statistics are reported.
            if self.closed() && self.counters.n_total_node > 0 {
                return true;
            }
            if self.out_of_time() {
                return false;
            }
            if self.config.node_limit.is_some_and(|l| self.counters.n_total_node >= l) {
                return false;
            }
            self.counters.n_total_node += 1;
            let children = self.process(node, &mut master);
            stack.extend(children);
        }
        self.config.branching
    }

    fn process(&mut self, node: Node, master: &mut RestrictedMaster) -> Vec<Node> {
        let fixed_count = node.fixed.objective();
        let root = node.depth == 0 && self.root.is_none();

        let Some((residual_inst, _)) = self.inst.residual(&node.residual) else {
            self.offer(node.fixed);
            return Vec::new();
        };
        let combinatorial = fixed_count + lower_bound(&residual_inst);
        let inherited = node.parent_bound.max(combinatorial);
        if !root && inherited >= self.best {
            return Vec::new();
        }

        *master = rebuild(self.inst, &node, self.config.column_limit);
        let outcome = generate_columns(master, &node.forbidden, &self.colgen_config());
        if outcome.stats.decrement_solves > 0 {
            self.counters.n_poll_node += 1;
        }
        if root {
            self.counters.n_col_root = outcome.stats.columns_generated;
            self.counters.n_exact_root = outcome.stats.exact_pricing_calls;
            self.root = Some(outcome.clone());
        }

        match outcome.termination {
            Termination::Infeasible => return Vec::new(),
            Termination::InfeasibleUnproven => {
                self.uncertain += 1;
                return Vec::new();
            }
            Termination::TimeLimit => {
                self.timed_out = true;
                return Vec::new();
            }
            _ => {}
        }
        if outcome.lp.status != LpStatus::Optimal {
            self.uncertain += 1;
            return Vec::new();
        }

        let bound = node_bound(fixed_count, &outcome);
        let certified = if bound.certified {
            bound.value.max(inherited)
        } else {
            inherited
        };
        if root && bound.certified {
            self.global_lb = self.global_lb.max(bound.value);
        }
        if bound.certified && bound.value >= self.best {
            return Vec::new();
        }

        if outcome.is_integral() {
            self.offer(rounded(&node.fixed, master, &outcome));
            if bound.certified {
                return Vec::new();
            }
        }

        if self.config.batch_stride.is_some_and(|k| root || (k > 0 && node.depth.is_multiple_of(k))) {
            self.plunge(&node, master, &outcome);
            if certified >= self.best {
                return Vec::new();
            }
        }
        if !self.config.branching {
            return Vec::new();
        }

        let weights = self.inst.weights();
        let ranked = score_bins(master.columns(), &outcome.lp.primal, &weights, self.config.criterion);
        let Some(top) = ranked.first() else {
            self.uncertain += 1;
            return Vec::new();
        };
        let b = top.pattern.clone();
        let pool = Rc::new(master.columns().to_vec());

        let mut forbidden = (*node.forbidden).clone();
        forbidden.insert(b.clone());
        let right = Node {
            residual: node.residual.clone(),
            fixed: node.fixed.clone(),
            forbidden: Rc::new(forbidden),
            depth: node.depth + 1,
            parent_bound: certified,
            pool: Rc::clone(&pool),
        };
        let mut fixed = node.fixed;
        fixed.push(b.clone(), 1);
        let left = Node {
            residual: subtract(&node.residual, &b),
            fixed,
            forbidden: node.forbidden,
            depth: node.depth + 1,
            parent_bound: certified,
            pool,
        };
        // Popped last-in first-out: left is explored first.
        vec![right, left]
    }

    /// Repeated batch dives with re-optimization; only feeds the incumbent.
    fn plunge(&mut self, node: &Node, master: &RestrictedMaster, outcome: &ColGenOutcome) {
        let weights = self.inst.weights();
        let mut dive = master.clone();
        let mut residual = node.residual.clone();
        let mut fixed = node.fixed.clone();
        let mut lp = outcome.clone();
        let none = HashSet::new();
        let cfg = self.colgen_config();

        loop {
            if fixed.objective() >= self.best {
                return;
            }
            if lp.is_integral() {
                self.offer(rounded(&fixed, &dive, &lp));
                return;
            }
            let ranked = score_bins(dive.columns(), &lp.lp.primal, &weights, self.config.criterion);
            let chosen = select_batch(&ranked, &residual, self.config.batch_mode, self.config.batch_sense);
            if chosen.is_empty() {
                break;
            }
            for p in chosen {
                residual = subtract(&residual, p);
                fixed.push(p.clone(), 1);
            }
            if residual.iter().all(|&d| d == 0) {
                self.offer(fixed);
                return;
            }
            if self.out_of_time() {
                break;
            }
            enter_node(&mut dive, &residual, &none);
            lp = generate_columns(&mut dive, &none, &cfg);
            if lp.lp.status != LpStatus::Optimal {
                break;
            }
        }
        // Finish whatever is left greedily.
        if let Some((rest, map)) = self.inst.residual(&residual) {
            for bin in subset_sum_n_heuristic(&rest).bins {
                let mut counts = vec![0; weights.len()];
                for (j, &x) in bin.counts.counts().iter().enumerate() {
                    counts[map[j]] += x;
                }
                fixed.push(Pattern::new(counts), bin.load);
            }
        }
        self.offer(fixed);
    }
}

/// Batch selection with a single-bin fallback when the batch comes back empty.
fn select_batch<'a>(ranked: &'a [ScoredBin], residual: &[u32], mode: BatchMode, sense: BatchSense) -> Vec<&'a Pattern> {
    let sel = batch_dive(ranked, residual, mode, sense);
    if sel.chosen.is_empty() {
        return ranked.iter().take(1).map(|b| &b.pattern).collect();
    }
    sel.chosen.iter().map(|&k| &ranked[k].pattern).collect()
}

fn rebuild(inst: &Instance, node: &Node, column_limit: Option<usize>) -> RestrictedMaster {
    let mut master = RestrictedMaster::new(inst.weights(), inst.capacity(), node.residual.clone());
    master.set_column_limit(column_limit);
    for p in node.pool.iter() {
        if p.within(&node.residual) && !node.forbidden.contains(p) {
            let _ = master.add_column(p.clone());
        }
    }
    enter_node(&mut master, &node.residual, &node.forbidden);
    master
}

fn subtract(residual: &[u32], p: &Pattern) -> Vec<u32> {
    residual
        .iter()
        .zip(p.counts())
        .map(|(&d, &x)| {
            debug_assert!(x <= d);
            d - x
        })
        .collect()
}

fn rounded(fixed: &Solution, master: &RestrictedMaster, outcome: &ColGenOutcome) -> Solution {
    let mut sol = fixed.clone();
    for (p, v) in outcome.support(master) {
        let load = v.round() as u32;
        if load > 0 {
            sol.push(p.clone(), load);
        }
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{canonicalize, Item};

    fn example_one() -> Instance {
        canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap()
    }

    #[test]
    fn example_every_criterion() {
        for criterion in DivingCriterion::ALL {
            let cfg = SolverConfig {
                criterion,
                ..SolverConfig::default()
            };
            let r = solve(&example_one(), &cfg);
            assert_eq!(r.optimum, 3);
            assert!(r.proved_optimal);
            assert_eq!(r.root_bound.value, 3);
            assert!(r.root_bound.certified);
            assert_eq!(r.root_gap, GapStatus::Closed);
            assert!(verify_solution(&example_one(), &r.solution).is_valid());
        }
    }

    #[test]
    fn full_width_items_solve_at_root() {
        let inst = Instance::from_items(40, [Item { weight: 40, demand: 9 }]).unwrap();
        let r = solve(&inst, &SolverConfig::default());
        assert_eq!(r.optimum, 9);
        assert!(r.proved_optimal);
        assert_eq!(r.counters.n_total_node, 1);
        assert_eq!(r.counters.n_poll_node, 0);
    }

    #[test]
    fn node_bound_adds_fixed_bins() {
        let inst = example_one();
        let mut master = initialize_pool(&inst);
        let out = generate_columns(&mut master, &HashSet::new(), &ColGenConfig::default());
        let b = node_bound(2, &out);
        assert_eq!(b.value, 5);
        assert!(b.certified);
        assert_eq!(root_gap_check(&out, 3), GapStatus::Closed);
        assert_eq!(root_gap_check(&out, 4), GapStatus::Open);
    }

    #[test]
    fn premature_bound_is_not_certified() {
        let inst = example_one();
        let mut master = initialize_pool(&inst);
        let mut out = generate_columns(&mut master, &HashSet::new(), &ColGenConfig::default());
        out.proven_optimal = false;
        out.termination = Termination::Premature;
        assert!(!node_bound(0, &out).certified);
    }

    #[test]
    fn root_only_has_one_node() {
        let inst = canonicalize(10, &[6, 6, 4, 4, 3, 3, 2]).unwrap();
        let cfg = SolverConfig {
            branching: false,
            ..SolverConfig::default()
        };
        let r = solve(&inst, &cfg);
        assert_eq!(r.counters.n_total_node, 1);
        assert_eq!(r.counters.n_poll_node, 0);
        assert!(verify_solution(&inst, &r.solution).is_valid());
    }

    #[test]
    fn zero_time_limit_still_returns_a_packing() {
        let inst = canonicalize(100, &[60, 50, 45, 40, 35, 30, 25, 20, 15, 10]).unwrap();
        let cfg = SolverConfig {
            time_limit: Duration::ZERO,
            ..SolverConfig::default()
        };
        let r = solve(&inst, &cfg);
        assert!(verify_solution(&inst, &r.solution).is_valid());
        assert!(r.lower_bound <= r.optimum);
    }
}
