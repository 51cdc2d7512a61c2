//! Geometric diving criteria and batch selection of bins.
//!
//! A bin is scored by a Lehmer mean of its weight multiset (each item weight
//! repeated by its count), by the integral of `p·L_p` over `p ∈ [0, 2]`, or
//! simply by its LP value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::instance::Pattern;

/// LP values at or below this are treated as zero.
pub const EPS_INT: f64 = 1e-6;
/// Branch-and-bound node cap for [`batch_dive`].
pub const DEFAULT_BATCH_NODE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivingError {
    #[error("weight multiset is empty")]
    Empty,
    #[error("weights must be positive")]
    NonPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DivingCriterion {
    /// The bin's LP value.
    HighestValue,
    /// Harmonic mean.
    L0,
    /// Contra-harmonic mean.
    #[default]
    L2,
    /// `∫₀² p·L_p(W) dp`.
    Ls,
}

impl DivingCriterion {
    pub const ALL: [DivingCriterion; 4] = [
        DivingCriterion::HighestValue,
        DivingCriterion::L0,
        DivingCriterion::L2,
        DivingCriterion::Ls,
    ];

    /// Score `γ` of a bin with LP value `value`.
    pub fn score(self, pattern: &Pattern, value: f64, weights: &[u64]) -> f64 {
        let w = pattern.weight_multiset(weights);
        let result = match self {
            DivingCriterion::HighestValue => return value,
            DivingCriterion::L0 => lehmer_mean(&w, 0.0),
            DivingCriterion::L2 => lehmer_mean(&w, 2.0),
            DivingCriterion::Ls => ls_integral(&w),
        };
        result.unwrap_or(0.0)
    }

    pub fn label(self) -> &'static str {
        match self {
            DivingCriterion::HighestValue => "hv",
            DivingCriterion::L0 => "l0",
            DivingCriterion::L2 => "l2",
            DivingCriterion::Ls => "ls",
        }
    }
}

impl fmt::Display for DivingCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DivingCriterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hv" | "highest" | "highest_value" => Ok(DivingCriterion::HighestValue),
            "l0" => Ok(DivingCriterion::L0),
            "l2" => Ok(DivingCriterion::L2),
            "ls" => Ok(DivingCriterion::Ls),
            other => Err(format!("unknown criterion `{other}` (expected hv, l0, l2 or ls)")),
        }
    }
}

fn check(weights: &[f64]) -> Result<f64, DivingError> {
    if weights.is_empty() {
        return Err(DivingError::Empty);
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(DivingError::NonPositive);
    }
    Ok(weights.iter().copied().fold(f64::MIN, f64::max))
}

/// `L_p(W) = Σ w^p / Σ w^(p-1)`.
pub fn lehmer_mean(weights: &[f64], p: f64) -> Result<f64, DivingError> {
    let top = check(weights)?;
    Ok(top * scaled_lehmer(weights, top, p))
}

/// Lehmer mean of `W / top`; keeps the powers near 1.
fn scaled_lehmer(weights: &[f64], top: f64, p: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &w in weights {
        let r = w / top;
        let lower = r.powf(p - 1.0);
        num += lower * r;
        den += lower;
    }
    num / den
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre_16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = Vec::with_capacity(N);
        for k in 0..N {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=N {
                    let j = j as f64;
                    let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// Number of equal panels on `[0, 2]`, each integrated with 16 points.
const LS_PANELS: usize = 8;

/// `∫₀² p·L_p(W) dp` by composite 16-point Gauss–Legendre quadrature.
pub fn ls_integral(weights: &[f64]) -> Result<f64, DivingError> {
    let top = check(weights)?;
    let bottom = weights.iter().copied().fold(f64::MAX, f64::min);
    if bottom == top {
        return Ok(2.0 * top);
    }
    let rule = gauss_legendre_16();
    let h = 2.0 / LS_PANELS as f64;
    let mut total = 0.0;
    for panel in 0..LS_PANELS {
        let mid = h * (panel as f64 + 0.5);
        for &(x, wt) in rule {
            let p = mid + 0.5 * h * x;
            total += wt * p * scaled_lehmer(weights, top, p);
        }
    }
    Ok(top * total * 0.5 * h)
}

/// A pool column with positive LP value and its criterion score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBin {
    /// Index into the pool the LP was solved over.
    pub column: usize,
    pub pattern: Pattern,
    pub value: f64,
    pub score: f64,
}

/// Ranks columns with LP value above [`EPS_INT`] by decreasing score; ties
/// go to the lexicographically larger count vector.
pub fn score_bins(
    columns: &[Pattern],
    primal: &[f64],
    weights: &[u64],
    criterion: DivingCriterion,
) -> Vec<ScoredBin> {
    let mut ranked: Vec<ScoredBin> = columns
        .iter()
        .zip(primal)
        .enumerate()
        .filter(|(_, (_, &v))| v > EPS_INT)
        .map(|(column, (p, &value))| ScoredBin {
            column,
            pattern: p.clone(),
            value,
            score: criterion.score(p, value, weights),
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.pattern.cmp(&a.pattern))
    });
    ranked
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchMode {
    /// Selected bins must cover the residual demand exactly.
    Equality,
    /// Selected bins must not exceed the residual demand.
    #[default]
    Inequality,
}

impl FromStr for BatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eq" | "equality" => Ok(BatchMode::Equality),
            "ineq" | "inequality" => Ok(BatchMode::Inequality),
            other => Err(format!("unknown batch mode `{other}` (expected eq or ineq)")),
        }
    }
}

/// Objective sense of the batch selection. `Minimize` is the literal
/// `min Σ γ_k μ_k` reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchSense {
    #[default]
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSelection {
    /// Indices into the candidate slice.
    pub chosen: Vec<usize>,
    /// Mode of the returned selection.
    pub mode: BatchMode,
    /// True when equality was requested, found infeasible, and inequality used.
    pub fell_back: bool,
    /// False when the node limit stopped the search early.
    pub optimal: bool,
    /// `Σ γ_k` over the chosen candidates.
    pub score: f64,
}

/// Picks a 0/1 subset of `candidates` maximizing total score (or minimizing,
/// per `sense`) subject to the demand constraints of `mode`.
pub fn batch_dive(
    candidates: &[ScoredBin],
    residual: &[u32],
    mode: BatchMode,
    sense: BatchSense,
) -> BatchSelection {
    batch_dive_with_limit(candidates, residual, mode, sense, DEFAULT_BATCH_NODE_LIMIT)
}

pub fn batch_dive_with_limit(
    candidates: &[ScoredBin],
    residual: &[u32],
    mode: BatchMode,
    sense: BatchSense,
    node_limit: usize,
) -> BatchSelection {
    if mode == BatchMode::Equality {
        let mut search = BatchSearch::new(candidates, residual, sense, true, node_limit);
        search.run();
        if let Some(chosen) = search.best.take() {
            return BatchSelection {
                score: chosen.iter().map(|&k| candidates[k].score).sum::<f64>() + 0.0,
                chosen,
                mode,
                fell_back: false,
                optimal: !search.truncated,
            };
        }
        if !search.truncated {
            let mut sel = batch_dive_with_limit(candidates, residual, BatchMode::Inequality, sense, node_limit);
            sel.fell_back = true;
            return sel;
        }
        // Truncated without finding an exact cover: fall back, not provably infeasible.
        let mut sel = batch_dive_with_limit(candidates, residual, BatchMode::Inequality, sense, node_limit);
        sel.fell_back = true;
        sel.optimal = false;
        return sel;
    }
    let mut search = BatchSearch::new(candidates, residual, sense, false, node_limit);
    search.run();
    let chosen = search.best.take().unwrap_or_default();
    BatchSelection {
        score: chosen.iter().map(|&k| candidates[k].score).sum::<f64>() + 0.0, // empty sum is -0.0
        chosen,
        mode,
        fell_back: false,
        optimal: !search.truncated,
    }
}

struct BatchSearch<'a> {
    candidates: &'a [ScoredBin],
    /// Candidate indices sorted by decreasing signed score.
    order: Vec<usize>,
    gain: Vec<f64>,
    /// `optimistic[k]`: sum of positive gains from position `k` on.
    optimistic: Vec<f64>,
    /// `coverage[k][i]`: units of item `i` available from position `k` on.
    coverage: Vec<Vec<u64>>,
    remaining: Vec<u32>,
    exact: bool,
    current: Vec<usize>,
    best: Option<Vec<usize>>,
    best_gain: f64,
    nodes: usize,
    node_limit: usize,
    truncated: bool,
}

impl<'a> BatchSearch<'a> {
    fn new(
        candidates: &'a [ScoredBin],
        residual: &[u32],
        sense: BatchSense,
        exact: bool,
        node_limit: usize,
    ) -> Self {
        let sign = match sense {
            BatchSense::Maximize => 1.0,
            BatchSense::Minimize => -1.0,
        };
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| {
            (sign * candidates[b].score)
                .total_cmp(&(sign * candidates[a].score))
                .then(a.cmp(&b))
        });
        let gain: Vec<f64> = order.iter().map(|&k| sign * candidates[k].score).collect();
        let mut optimistic = vec![0.0; order.len() + 1];
        for k in (0..order.len()).rev() {
            optimistic[k] = optimistic[k + 1] + gain[k].max(0.0);
        }
        let n = residual.len();
        let mut coverage = vec![vec![0u64; n]; order.len() + 1];
        for k in (0..order.len()).rev() {
            let counts = candidates[order[k]].pattern.counts();
            for i in 0..n {
                coverage[k][i] = coverage[k + 1][i] + u64::from(counts[i]);
            }
        }
        BatchSearch {
            candidates,
            order,
            gain,
            optimistic,
            coverage,
            remaining: residual.to_vec(),
            exact,
            current: Vec::new(),
            best: None,
            best_gain: f64::NEG_INFINITY,
            nodes: 0,
            node_limit,
            truncated: false,
        }
    }

    fn run(&mut self) {
        self.dfs(0, 0.0);
    }

    fn dfs(&mut self, k: usize, gain: f64) {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.truncated = true;
            return;
        }
        if self.exact
            && self
                .remaining
                .iter()
                .zip(&self.coverage[k])
                .any(|(&r, &avail)| u64::from(r) > avail)
        {
            return;
        }
        if self.best.is_some() && gain + self.optimistic[k] <= self.best_gain + 1e-12 {
            return;
        }
        if k == self.order.len() {
            let feasible = !self.exact || self.remaining.iter().all(|&r| r == 0);
            if feasible && gain.partial_cmp(&self.best_gain) == Some(Ordering::Greater) {
                self.best_gain = gain;
                self.best = Some(self.current.clone());
            }
            return;
        }
        let idx = self.order[k];
        let counts = self.candidates[idx].pattern.counts();
        let fits = counts.iter().zip(&self.remaining).all(|(&x, &r)| x <= r);
        let take_first = self.gain[k] >= 0.0;
        for take in [take_first, !take_first] {
            if take {
                if !fits {
                    continue;
                }
                for (r, &x) in self.remaining.iter_mut().zip(counts) {
                    *r -= x;
                }
                self.current.push(idx);
                self.dfs(k + 1, gain + self.gain[k]);
                self.current.pop();
                for (r, &x) in self.remaining.iter_mut().zip(counts) {
                    *r += x;
                }
            } else {
                self.dfs(k + 1, gain);
            }
            if self.truncated {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE_WEIGHTS: [u64; 6] = [72, 54, 34, 33, 19, 18];

    fn example_pool() -> (Vec<Pattern>, Vec<f64>) {
        let bins = [
            [1, 0, 0, 0, 1, 0],
            [0, 1, 1, 0, 0, 0],
            [0, 0, 1, 1, 0, 1],
            [0, 1, 0, 1, 0, 0],
            [0, 1, 0, 0, 1, 1],
            [1, 0, 0, 0, 0, 1],
        ];
        (
            bins.iter().map(|b| Pattern::new(b.to_vec())).collect(),
            vec![0.8, 0.4, 0.6, 0.4, 0.2, 0.2],
        )
    }

    /// Composite trapezoid rule with `n` intervals.
    fn trapezoid_ls(w: &[f64], n: usize) -> f64 {
        let h = 2.0 / n as f64;
        let f = |p: f64| p * lehmer_mean(w, p).unwrap();
        let mut s = 0.5 * (f(0.0) + f(2.0));
        for k in 1..n {
            s += f(k as f64 * h);
        }
        s * h
    }

    #[test]
    fn lehmer_examples() {
        let w = [72.0, 19.0];
        assert!((lehmer_mean(&w, 2.0).unwrap() - 5545.0 / 91.0).abs() < 1e-12);
        assert!((lehmer_mean(&w, 0.0).unwrap() - 2.0 / (1.0 / 72.0 + 1.0 / 19.0)).abs() < 1e-12);
        assert!((lehmer_mean(&w, 1.0).unwrap() - 45.5).abs() < 1e-12);
        assert_eq!(lehmer_mean(&[7.0], 1.3).unwrap(), 7.0);
        assert_eq!(lehmer_mean(&[], 1.0), Err(DivingError::Empty));
        assert_eq!(lehmer_mean(&[3.0, 0.0], 1.0), Err(DivingError::NonPositive));
    }

    #[test]
    fn ls_examples() {
        assert_eq!(ls_integral(&[37.0]).unwrap(), 74.0);
        assert_eq!(ls_integral(&[5.0, 5.0, 5.0]).unwrap(), 10.0);
        let w = [72.0, 19.0];
        let got = ls_integral(&w).unwrap();
        assert!((got - trapezoid_ls(&w, 100_000)).abs() < 1e-6);
        assert!(19.0 <= got / 2.0 && got / 2.0 <= 72.0);
    }

    #[test]
    fn ls_handles_wide_spread() {
        let w = [1.0, 1000.0, 3.0];
        let got = ls_integral(&w).unwrap();
        assert!((got - trapezoid_ls(&w, 100_000)).abs() < 1e-6, "{got}");
    }

    #[test]
    fn example_rankings() {
        let (cols, vals) = example_pool();
        let top = |c| score_bins(&cols, &vals, &EXAMPLE_WEIGHTS, c)[0].column;
        assert_eq!(top(DivingCriterion::HighestValue), 0);
        assert_eq!(top(DivingCriterion::L0), 1);
        assert_eq!(top(DivingCriterion::L2), 5);
        let l2 = score_bins(&cols, &vals, &EXAMPLE_WEIGHTS, DivingCriterion::L2);
        assert!((l2[0].score - 61.2).abs() < 1e-9);
        assert_eq!(l2[1].column, 0);
    }

    #[test]
    fn l0_scores_of_example_bins() {
        let (cols, vals) = example_pool();
        let ranked = score_bins(&cols, &vals, &EXAMPLE_WEIGHTS, DivingCriterion::L0);
        let mut by_col = [0.0; 6];
        for r in &ranked {
            by_col[r.column] = r.score;
        }
        // 2/(1/72+1/19), 2/(1/54+1/34), 3/(1/34+1/33+1/18), ...
        let expect = [30.0659, 41.7273, 26.0258, 40.9655, 23.6769, 28.8];
        for (got, want) in by_col.iter().zip(expect) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn ls_ranking_is_total_order() {
        let (cols, vals) = example_pool();
        let ranked = score_bins(&cols, &vals, &EXAMPLE_WEIGHTS, DivingCriterion::Ls);
        assert_eq!(ranked.len(), 6);
        assert!(ranked.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn zero_valued_columns_are_not_ranked() {
        let (cols, _) = example_pool();
        let ranked = score_bins(&cols, &[0.0; 6], &EXAMPLE_WEIGHTS, DivingCriterion::L2);
        assert!(ranked.is_empty());
    }

    #[test]
    fn example_equality_batch_falls_back() {
        let (cols, vals) = example_pool();
        let ranked = score_bins(&cols, &vals, &EXAMPLE_WEIGHTS, DivingCriterion::L2);
        let sel = batch_dive(&ranked, &[1; 6], BatchMode::Equality, BatchSense::Maximize);
        assert!(sel.fell_back);
        assert_eq!(sel.mode, BatchMode::Inequality);
        assert!(sel.optimal);
        assert!(!sel.chosen.is_empty());
    }

    fn singleton_bin(column: usize, item: usize, n: usize, score: f64) -> ScoredBin {
        ScoredBin {
            column,
            pattern: Pattern::singleton(n, item, 1),
            value: 0.5,
            score,
        }
    }

    #[test]
    fn conflicting_singletons_keep_best() {
        let c = vec![singleton_bin(0, 0, 1, 5.0), singleton_bin(1, 0, 1, 3.0)];
        // Same pattern twice is not a valid pool, but the selector only sees scores.
        let sel = batch_dive(&c, &[1], BatchMode::Inequality, BatchSense::Maximize);
        assert_eq!(sel.chosen, vec![0]);
    }

    #[test]
    fn disjoint_candidates_all_selected() {
        let c: Vec<ScoredBin> = (0..4).map(|i| singleton_bin(i, i, 4, 1.0 + i as f64)).collect();
        let sel = batch_dive(&c, &[1; 4], BatchMode::Inequality, BatchSense::Maximize);
        let mut chosen = sel.chosen.clone();
        chosen.sort();
        assert_eq!(chosen, vec![0, 1, 2, 3]);
        let lit = batch_dive(&c, &[1; 4], BatchMode::Inequality, BatchSense::Minimize);
        assert!(lit.chosen.is_empty());
    }

    #[test]
    fn node_limit_flags_non_optimal() {
        let c: Vec<ScoredBin> = (0..12).map(|i| singleton_bin(i, i % 3, 3, 1.0 + i as f64)).collect();
        let sel = batch_dive_with_limit(&c, &[2; 3], BatchMode::Inequality, BatchSense::Maximize, 3);
        assert!(!sel.optimal);
    }
}
