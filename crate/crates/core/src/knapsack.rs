//! Pricing sub-problem solvers: bounded and binary knapsack, subset-sum, and
//! the knapsack with an additional upper bound on profit (the decrement
//! constraint used to step past forbidden bins).

use std::collections::HashSet;

use crate::instance::Pattern;

/// Absolute tolerance used when comparing profits.
pub const PROFIT_TOL: f64 = 1e-9;
/// Slack on the profit cap test `profit - 1 <= cap`.
pub const CAP_TOL: f64 = 1e-12;

/// Above this many table cells the exact suffix bound is not built and the
/// search falls back to the fractional bound alone.
const TABLE_CELL_LIMIT: usize = 4_000_000;
const TABLE_WORK_LIMIT: u64 = 60_000_000;
/// Capacity DP is used only below this many (item part × capacity) cells.
const DP_CELL_LIMIT: u64 = 200_000_000;
/// Search nodes granted before switching to the capacity DP, on top of a
/// share proportional to the DP's own cost.
const NODE_BUDGET_BASE: u64 = 20_000;
/// Subset-sum switches from the reachability table to branch-and-bound above
/// this capacity.
const SUBSET_SUM_DP_LIMIT: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PricingProblem {
    pub profits: Vec<f64>,
    pub weights: Vec<u64>,
    pub capacity: u64,
    /// Per-item upper bounds on the copy count (residual demands).
    pub bounds: Vec<u32>,
    /// Upper bound on the reduced cost `profit - 1`; set only for the
    /// decrement-constrained problem.
    pub profit_cap: Option<f64>,
}

impl PricingProblem {
    pub fn new(profits: Vec<f64>, weights: Vec<u64>, capacity: u64, bounds: Vec<u32>) -> Self {
        debug_assert_eq!(profits.len(), weights.len());
        debug_assert_eq!(bounds.len(), weights.len());
        PricingProblem {
            profits,
            weights,
            capacity,
            bounds,
            profit_cap: None,
        }
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.profit_cap = Some(cap);
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ π_i x_i`, summed in item order.
    pub fn profit_of(&self, counts: &[u32]) -> f64 {
        counts
            .iter()
            .zip(&self.profits)
            .map(|(&x, &p)| f64::from(x) * p)
            .sum()
    }

    fn binary(&self) -> PricingProblem {
        PricingProblem {
            bounds: self.bounds.iter().map(|&u| u.min(1)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackResult {
    pub counts: Pattern,
    pub profit: f64,
    pub reduced_cost: f64,
}

impl KnapsackResult {
    fn from_counts(p: &PricingProblem, counts: Vec<u32>) -> Self {
        let profit = p.profit_of(&counts);
        KnapsackResult {
            counts: Pattern::new(counts),
            profit,
            reduced_cost: profit - 1.0,
        }
    }
}

/// Exact maximizer of `Σ π_i x_i` s.t. `Σ w_i x_i <= c`, `0 <= x_i <= u_i`.
pub fn solve_bounded(p: &PricingProblem) -> KnapsackResult {
    solve_bounded_many(p, 1, f64::INFINITY).remove(0)
}

/// As [`solve_bounded`] with every bound clipped to `min(u_i, 1)`.
pub fn solve_binary(p: &PricingProblem) -> KnapsackResult {
    solve_binary_many(p, 1, f64::INFINITY).remove(0)
}

/// The optimum first, then up to `k - 1` further patterns with profit above
/// `min_profit` when they come for free (each the best pattern lighter
/// than the one before it).
pub fn solve_bounded_many(p: &PricingProblem, k: usize, min_profit: f64) -> Vec<KnapsackResult> {
    debug_assert!(p.profit_cap.is_none(), "use solve_2d_decrement for capped problems");
    solve_uncapped(p, k.max(1), min_profit)
        .into_iter()
        .map(|c| KnapsackResult::from_counts(p, c))
        .collect()
}

/// As [`solve_bounded_many`] over single-copy patterns.
pub fn solve_binary_many(p: &PricingProblem, k: usize, min_profit: f64) -> Vec<KnapsackResult> {
    debug_assert!(p.profit_cap.is_none(), "use solve_2d_decrement for capped problems");
    solve_uncapped(&p.binary(), k.max(1), min_profit)
        .into_iter()
        .map(|c| KnapsackResult::from_counts(p, c))
        .collect()
}

/// Branch-and-bound with the fractional bound first; when it runs past its
/// node budget the capacity DP takes over.
fn solve_uncapped(p: &PricingProblem, k: usize, min_profit: f64) -> Vec<Vec<u32>> {
    let Some(plan) = DpPlan::new(p) else {
        return vec![Search::new(p, None).run()];
    };
    let mut search = Search::without_table(p);
    search.budget = Some(NODE_BUDGET_BASE + plan.cells / 1024);
    match search.run_budgeted() {
        Some(counts) => vec![counts],
        None => plan.solve(k, min_profit),
    }
}

/// Bounded knapsack by dynamic programming over capacity, after dividing
/// weights by their gcd and splitting copies into powers of two. One decision
/// bit per (part, capacity) cell recovers the optimal counts.
struct DpPlan {
    /// `(item, multiplicity, scaled weight, profit)` per part.
    parts: Vec<(usize, u32, usize, f64)>,
    capacity: usize,
    cells: u64,
    n: usize,
}

impl DpPlan {
    fn new(p: &PricingProblem) -> Option<Self> {
        let items: Vec<(usize, u32)> = (0..p.len())
            .filter(|&i| p.profits[i] > 0.0 && p.weights[i] <= p.capacity && p.bounds[i] > 0)
            .map(|i| (i, u64::from(p.bounds[i]).min(p.capacity / p.weights[i]) as u32))
            .collect();
        let g = items.iter().fold(0u64, |g, &(i, _)| gcd(g, p.weights[i])).max(1);
        let fill: u64 = items.iter().map(|&(i, k)| p.weights[i] * u64::from(k)).sum();
        let capacity = (p.capacity.min(fill) / g) as usize;
        let mut parts = Vec::new();
        for &(i, copies) in &items {
            let w = (p.weights[i] / g) as usize;
            let mut left = copies;
            let mut m = 1u32;
            while left > 0 {
                let take = m.min(left);
                parts.push((i, take, w * take as usize, p.profits[i] * f64::from(take)));
                left -= take;
                m = m.saturating_mul(2);
            }
        }
        let cells = (parts.len() as u64).checked_mul(capacity as u64 + 1)?;
        (cells <= DP_CELL_LIMIT).then_some(DpPlan {
            parts,
            capacity,
            cells,
            n: p.len(),
        })
    }

    /// The optimum, then the best pattern strictly lighter than the previous
    /// one, until `k` patterns or the value drops to `min_profit`.
    fn solve(&self, k: usize, min_profit: f64) -> Vec<Vec<u32>> {
        let cap = self.capacity;
        let words = cap / 64 + 1;
        let mut value = vec![0.0f64; cap + 1];
        let mut next = vec![0.0f64; cap + 1];
        let mut take = vec![0u64; self.parts.len() * words];
        for (j, &(_, _, w, profit)) in self.parts.iter().enumerate() {
            if w > cap {
                continue;
            }
            let row = &mut take[j * words..(j + 1) * words];
            next[..w].copy_from_slice(&value[..w]);
            // Cells are processed in 64-wide words so the decisions pack
            // straight into the bit row.
            for (q, bits) in row.iter_mut().enumerate().skip(w / 64) {
                let lo = (q * 64).max(w);
                let hi = (q * 64 + 64).min(cap + 1);
                if lo >= hi {
                    continue;
                }
                let mut word = 0u64;
                for r in lo..hi {
                    let keep = value[r];
                    let add = value[r - w] + profit;
                    let better = add > keep;
                    next[r] = if better { add } else { keep };
                    word |= u64::from(better) << (r - q * 64);
                }
                *bits = word;
            }
            std::mem::swap(&mut value, &mut next);
        }
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut top = cap;
        loop {
            let mut counts = vec![0u32; self.n];
            let mut r = top;
            let mut used = 0;
            for (j, &(i, m, w, _)) in self.parts.iter().enumerate().rev() {
                if take[j * words + r / 64] >> (r % 64) & 1 == 1 {
                    counts[i] += m;
                    r -= w;
                    used += w;
                }
            }
            out.push(counts);
            if out.len() >= k || used == 0 || value[used - 1] <= min_profit {
                break;
            }
            top = used - 1;
        }
        out
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact maximizer subject to the extra constraint `Σ π_i x_i - 1 <= cap`.
///
/// Returns the zero pattern when no pattern respects the cap. Without a cap
/// this is identical to [`solve_bounded`].
pub fn solve_2d_decrement(p: &PricingProblem) -> KnapsackResult {
    let limit = p.profit_cap.map(|cap| cap + 1.0 + CAP_TOL);
    match Search::new(p, limit).run_capped() {
        Some(counts) => KnapsackResult::from_counts(p, counts),
        None => KnapsackResult::from_counts(p, vec![0; p.len()]),
    }
}

/// Exact maximizer over patterns not in `excluded`.
///
/// Items with non-positive profit are searched as well, since a permitted
/// pattern may differ from an excluded optimum only by such items.
pub fn solve_bounded_excluding(p: &PricingProblem, excluded: &HashSet<Pattern>) -> KnapsackResult {
    debug_assert!(p.profit_cap.is_none());
    let mut search = Search::new(p, None);
    search.include_non_positive(p);
    search.excluded = Some(excluded);
    let counts = search.run();
    KnapsackResult::from_counts(p, counts)
}

/// Maximum fill `Σ w_i x_i <= capacity` with `0 <= x_i <= bounds_i`.
pub fn solve_subset_sum(weights: &[u64], bounds: &[u32], capacity: u64) -> Pattern {
    let n = weights.len();
    if capacity == 0 || n == 0 {
        return Pattern::zeros(n);
    }
    if capacity > SUBSET_SUM_DP_LIMIT {
        let p = PricingProblem::new(
            weights.iter().map(|&w| w as f64).collect(),
            weights.to_vec(),
            capacity,
            bounds.to_vec(),
        );
        return solve_bounded(&p).counts;
    }
    subset_sum_table(weights, bounds, capacity)
}

/// Bounded subset-sum by reachability. `first[s]` records the item that first
/// made fill `s` reachable and how many copies it used; the remainder
/// `s - copies * w` was reachable from earlier items only.
fn subset_sum_table(weights: &[u64], bounds: &[u32], capacity: u64) -> Pattern {
    const UNREACHED: u32 = u32::MAX;
    let n = weights.len();
    let cap = capacity as usize;
    let mut first_item = vec![UNREACHED; cap + 1];
    let mut first_copies = vec![0u32; cap + 1];
    let mut used = vec![0u32; cap + 1];
    first_item[0] = n as u32;
    for (i, (&w, &b)) in weights.iter().zip(bounds).enumerate() {
        let w = w as usize;
        if b == 0 || w > cap {
            continue;
        }
        used.iter_mut().for_each(|u| *u = 0);
        for s in w..=cap {
            if first_item[s] != UNREACHED {
                continue;
            }
            let prev = s - w;
            if first_item[prev] != UNREACHED
                && (first_item[prev] as usize != i || used[prev] < b)
            {
                let copies = if first_item[prev] as usize == i {
                    used[prev] + 1
                } else {
                    1
                };
                first_item[s] = i as u32;
                first_copies[s] = copies;
                used[s] = copies;
            }
        }
    }
    let mut counts = vec![0u32; n];
    let mut s = (0..=cap).rev().find(|&s| first_item[s] != UNREACHED).unwrap_or(0);
    while s > 0 {
        let i = first_item[s] as usize;
        let copies = first_copies[s];
        counts[i] += copies;
        s -= copies as usize * weights[i] as usize;
    }
    Pattern::new(counts)
}

/// Depth-first branch-and-bound over items sorted by decreasing profit
/// density. Items with positive profit come first; negative-profit items are
/// only considered under a profit cap, where adding them can bring a
/// pattern back under the cap.
struct Search<'a> {
    /// Original item index per search position.
    order: Vec<usize>,
    profit: Vec<f64>,
    weight: Vec<u64>,
    copies: Vec<u32>,
    /// Number of leading positions holding positive-profit items.
    positive: usize,
    /// `neg_reach[k]`: lowest profit change achievable from positions `k..`.
    neg_reach: Vec<f64>,
    /// Exact bound table `suffix[k][r]` over positive items, when affordable.
    suffix: Option<Vec<Vec<f64>>>,
    limit: Option<f64>,
    excluded: Option<&'a HashSet<Pattern>>,
    /// Node allowance; exceeding it aborts the search.
    budget: Option<u64>,
    nodes: u64,
    aborted: bool,
    capacity: u64,
    n: usize,
    current: Vec<u32>,
    best: Vec<u32>,
    best_profit: f64,
    found: bool,
}

impl<'a> Search<'a> {
    fn without_table(p: &PricingProblem) -> Self {
        Search::new_inner(p, None, false)
    }

    fn new(p: &PricingProblem, limit: Option<f64>) -> Self {
        Search::new_inner(p, limit, true)
    }

    fn new_inner(p: &PricingProblem, limit: Option<f64>, table: bool) -> Self {
        let n = p.len();
        let cap = p.capacity;
        let copies_of = |i: usize| -> u32 {
            if p.weights[i] > cap {
                0
            } else {
                let fit = cap / p.weights[i];
                u64::from(p.bounds[i]).min(fit) as u32
            }
        };
        let mut pos: Vec<usize> = (0..n)
            .filter(|&i| p.profits[i] > 0.0 && copies_of(i) > 0)
            .collect();
        pos.sort_by(|&a, &b| {
            let ra = p.profits[a] / p.weights[a] as f64;
            let rb = p.profits[b] / p.weights[b] as f64;
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let positive = pos.len();
        if limit.is_some() {
            pos.extend((0..n).filter(|&i| p.profits[i] < 0.0 && copies_of(i) > 0));
        }
        let order = pos;
        let profit: Vec<f64> = order.iter().map(|&i| p.profits[i]).collect();
        let weight: Vec<u64> = order.iter().map(|&i| p.weights[i]).collect();
        let copies: Vec<u32> = order.iter().map(|&i| copies_of(i)).collect();

        let mut neg_reach = vec![0.0; order.len() + 1];
        for k in (0..order.len()).rev() {
            neg_reach[k] = neg_reach[k + 1] + profit[k].min(0.0) * f64::from(copies[k]);
        }

        let suffix = if table {
            build_suffix_table(&profit[..positive], &weight[..positive], &copies[..positive], cap)
        } else {
            None
        };

        Search {
            order,
            profit,
            weight,
            copies,
            positive,
            neg_reach,
            suffix,
            limit,
            excluded: None,
            budget: None,
            nodes: 0,
            aborted: false,
            capacity: cap,
            n,
            current: Vec::new(),
            best: Vec::new(),
            best_profit: 0.0,
            found: false,
        }
    }

    /// Appends zero- and negative-profit items after the positive ones.
    fn include_non_positive(&mut self, p: &PricingProblem) {
        let cap = self.capacity;
        for i in 0..self.n {
            let w = p.weights[i];
            if p.profits[i] > 0.0 || w > cap || p.bounds[i] == 0 || self.order[..self.positive].contains(&i) {
                continue;
            }
            if self.order.contains(&i) {
                continue;
            }
            self.order.push(i);
            self.profit.push(p.profits[i]);
            self.weight.push(w);
            self.copies.push(u64::from(p.bounds[i]).min(cap / w) as u32);
        }
        self.neg_reach = vec![0.0; self.order.len() + 1];
        for k in (0..self.order.len()).rev() {
            self.neg_reach[k] = self.neg_reach[k + 1] + self.profit[k].min(0.0) * f64::from(self.copies[k]);
        }
    }

    fn is_excluded(&self) -> bool {
        let Some(set) = self.excluded else {
            return false;
        };
        let mut counts = vec![0u32; self.n];
        for (k, &x) in self.current.iter().enumerate() {
            counts[self.order[k]] = x;
        }
        set.contains(&Pattern::new(counts))
    }

    /// `None` when the node budget ran out.
    fn run_budgeted(mut self) -> Option<Vec<u32>> {
        self.run_into()?;
        (!self.aborted).then(|| self.original_counts())
    }

    fn run(self) -> Vec<u32> {
        self.run_capped().unwrap_or_else(|| unreachable!("uncapped search always has the zero pattern"))
    }

    fn run_capped(mut self) -> Option<Vec<u32>> {
        self.run_into()?;
        Some(self.original_counts())
    }

    /// Runs the search; `None` when no pattern respects the cap.
    fn run_into(&mut self) -> Option<()> {
        let m = self.order.len();
        self.current = vec![0; m];
        self.best = vec![0; m];
        // The empty pattern is the first incumbent whenever it respects the cap.
        self.found = self.limit.is_none_or(|l| 0.0 <= l);
        self.best_profit = if self.found { 0.0 } else { f64::NEG_INFINITY };
        self.dfs(0, self.capacity, 0.0);
        self.found.then_some(())
    }

    fn original_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for (k, &x) in self.best.iter().enumerate() {
            counts[self.order[k]] = x;
        }
        counts
    }

    /// Fractional upper bound on the profit obtainable from positions `k..`
    /// (positive items only) with `residual` capacity.
    fn upper_bound(&self, k: usize, residual: u64) -> f64 {
        if k >= self.positive {
            return 0.0;
        }
        if let Some(table) = &self.suffix {
            let r = residual.min((table[k].len() - 1) as u64) as usize;
            return table[k][r];
        }
        let mut room = residual;
        let mut bound = 0.0;
        for j in k..self.positive {
            let w = self.weight[j];
            let take = u64::from(self.copies[j]).min(room / w);
            bound += take as f64 * self.profit[j];
            room -= take * w;
            if take < u64::from(self.copies[j]) {
                bound += self.profit[j] * room as f64 / w as f64;
                break;
            }
        }
        bound
    }

    fn dfs(&mut self, k: usize, residual: u64, profit: f64) {
        if self.aborted {
            return;
        }
        if let Some(b) = self.budget {
            self.nodes += 1;
            if self.nodes > b {
                self.aborted = true;
                return;
            }
        }
        let within = self.limit.is_none_or(|l| profit <= l);
        if within && (!self.found || profit > self.best_profit + PROFIT_TOL) && !self.is_excluded() {
            self.best_profit = profit;
            self.best.copy_from_slice(&self.current);
            self.found = true;
        }
        if k == self.order.len() {
            return;
        }
        if let Some(l) = self.limit {
            if profit + self.neg_reach[k] > l {
                return;
            }
        }
        let mut upper = profit + self.upper_bound(k, residual);
        if let Some(l) = self.limit {
            upper = upper.min(l);
        }
        if self.found && upper <= self.best_profit + PROFIT_TOL {
            return;
        }
        let w = self.weight[k];
        let most = u64::from(self.copies[k]).min(residual / w) as u32;
        let p = self.profit[k];
        if p > 0.0 {
            for x in (0..=most).rev() {
                self.current[k] = x;
                self.dfs(k + 1, residual - u64::from(x) * w, profit + f64::from(x) * p);
            }
        } else {
            for x in 0..=most {
                self.current[k] = x;
                self.dfs(k + 1, residual - u64::from(x) * w, profit + f64::from(x) * p);
            }
        }
        self.current[k] = 0;
    }
}

/// `table[k][r]` = best profit from positions `k..` with capacity `r`.
fn build_suffix_table(profit: &[f64], weight: &[u64], copies: &[u32], capacity: u64) -> Option<Vec<Vec<f64>>> {
    let m = profit.len();
    if m == 0 {
        return None;
    }
    let total_fill: u64 = weight.iter().zip(copies).map(|(&w, &c)| w * u64::from(c)).sum();
    let cap = capacity.min(total_fill) as usize;
    let cells = (m + 1).checked_mul(cap + 1)?;
    if cells > TABLE_CELL_LIMIT {
        return None;
    }
    let work: u64 = copies.iter().map(|&c| u64::from(c) * (cap as u64 + 1)).sum();
    if work > TABLE_WORK_LIMIT {
        return None;
    }
    let mut table = vec![vec![0.0; cap + 1]; m + 1];
    for k in (0..m).rev() {
        let (head, tail) = table.split_at_mut(k + 1);
        let next = &tail[0];
        let row = &mut head[k];
        let w = weight[k] as usize;
        for r in 0..=cap {
            let mut best = next[r];
            let mut x = 1usize;
            while x <= copies[k] as usize && x * w <= r {
                let v = next[r - x * w] + x as f64 * profit[k];
                if v > best {
                    best = v;
                }
                x += 1;
            }
            row[r] = best;
        }
    }
    Some(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive enumeration over every bounded count vector.
    fn brute_force(p: &PricingProblem, cap: Option<f64>) -> Option<(Vec<u32>, f64)> {
        let n = p.len();
        let mut x = vec![0u32; n];
        let mut best: Option<(Vec<u32>, f64)> = None;
        loop {
            let weight: u64 = x.iter().zip(&p.weights).map(|(&a, &w)| u64::from(a) * w).sum();
            if weight <= p.capacity {
                let profit = p.profit_of(&x);
                let ok = cap.is_none_or(|c| profit - 1.0 <= c + CAP_TOL);
                if ok && best.as_ref().is_none_or(|(_, b)| profit > *b + PROFIT_TOL) {
                    best = Some((x.clone(), profit));
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                if x[i] < p.bounds[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }

    fn triple() -> PricingProblem {
        PricingProblem::new(vec![0.6, 0.5, 0.4], vec![60, 50, 40], 100, vec![1, 1, 1])
    }

    #[test]
    fn bounded_matches_enumeration_on_triple() {
        let p = triple();
        let r = solve_bounded(&p);
        assert_eq!(r.counts.counts(), &[1, 0, 1]);
        assert!((r.profit - 1.0).abs() < 1e-12);
        let (_, oracle) = brute_force(&p, None).unwrap();
        assert!((oracle - r.profit).abs() < 1e-12);
    }

    #[test]
    fn zero_profits_give_zero_pattern() {
        let p = PricingProblem::new(vec![0.0; 3], vec![60, 50, 40], 100, vec![1, 1, 1]);
        let r = solve_bounded(&p);
        assert!(r.counts.is_zero());
        assert_eq!(r.profit, 0.0);
        assert_eq!(r.reduced_cost, -1.0);
    }

    #[test]
    fn bounded_respects_capacity_over_demand() {
        let p = PricingProblem::new(vec![0.9], vec![72], 100, vec![2]);
        let r = solve_bounded(&p);
        assert_eq!(r.counts.counts(), &[1]);
        assert!((r.profit - 0.9).abs() < 1e-12);
    }

    #[test]
    fn binary_cases() {
        let r = solve_binary(&triple());
        assert_eq!(r.counts.counts(), &[1, 0, 1]);
        let none = PricingProblem::new(vec![0.6, 0.5, 0.4], vec![60, 50, 40], 100, vec![0, 0, 0]);
        assert!(solve_binary(&none).counts.is_zero());
        let single = PricingProblem::new(vec![0.3], vec![100], 100, vec![5]);
        let r = solve_binary(&single);
        assert_eq!(r.counts.counts(), &[1]);
        assert!((r.profit - 0.3).abs() < 1e-12);
    }

    #[test]
    fn subset_sum_cases() {
        let x = solve_subset_sum(&[54, 34, 33, 19, 18], &[1; 5], 100);
        assert_eq!(x.counts(), &[1, 0, 0, 1, 1]);
        assert_eq!(x.total_weight(&[54, 34, 33, 19, 18]), 91);
        assert!(solve_subset_sum(&[5, 3], &[1, 1], 0).is_zero());
        assert_eq!(solve_subset_sum(&[7], &[3], 20).counts(), &[2]);
    }

    #[test]
    fn subset_sum_large_capacity_uses_search() {
        let w = [30_000_000u64, 20_000_003, 19_999_999, 7];
        let x = solve_subset_sum(&w, &[1, 1, 1, 1], 50_000_006);
        assert_eq!(x.counts(), &[1, 0, 1, 1]);
        assert_eq!(x.total_weight(&w), 50_000_006);
    }

    #[test]
    fn decrement_skips_best_pattern() {
        let p = triple().with_cap(1.0 - 1e-5 - 1.0);
        let r = solve_2d_decrement(&p);
        assert_eq!(r.counts.counts(), &[0, 1, 1]);
        assert!((r.profit - 0.9).abs() < 1e-12);
    }

    #[test]
    fn decrement_with_unreachable_cap_returns_zero() {
        // Every non-zero pattern has reduced cost at least -0.6.
        let p = triple().with_cap(-0.7);
        let r = solve_2d_decrement(&p);
        assert!(r.counts.is_zero());
        assert_eq!(r.reduced_cost, -1.0);
    }

    #[test]
    fn infinite_cap_matches_bounded() {
        let p = PricingProblem::new(vec![0.31, 0.27, 0.2, 0.11], vec![45, 38, 26, 13], 100, vec![2, 1, 3, 4]);
        let a = solve_bounded(&p);
        let b = solve_2d_decrement(&p.clone().with_cap(f64::INFINITY));
        assert_eq!(a, b);
    }

    #[test]
    fn decrement_can_use_negative_profits() {
        // The only way under the cap is to add the negative item.
        let p = PricingProblem::new(vec![1.0, -0.05], vec![50, 10], 100, vec![1, 1]).with_cap(-0.01);
        let r = solve_2d_decrement(&p);
        assert_eq!(r.counts.counts(), &[1, 1]);
        let (oracle, _) = brute_force(&p, p.profit_cap).unwrap();
        assert_eq!(r.counts.counts(), oracle.as_slice());
    }

    #[test]
    fn fractional_bound_path_agrees_with_table_path() {
        // Large capacity disables the table; compare with a scaled-down twin.
        let small = PricingProblem::new(vec![0.5, 0.4, 0.35, 0.2], vec![50, 41, 33, 17], 100, vec![1, 2, 2, 3]);
        let mut big = small.clone();
        big.weights.iter_mut().for_each(|w| *w *= 1_000_000);
        big.capacity *= 1_000_000;
        let a = solve_bounded(&small);
        let b = solve_bounded(&big);
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn excluding_finds_tied_neighbour() {
        // (1,0,0) and (1,1,0) tie at profit 1; forbidding the first must
        // return the second, which needs the zero-profit item.
        let p = PricingProblem::new(vec![1.0, 0.0, -0.2], vec![72, 19, 18], 100, vec![1, 1, 1]);
        let excluded: HashSet<Pattern> = [Pattern::new(vec![1, 0, 0])].into_iter().collect();
        let r = solve_bounded_excluding(&p, &excluded);
        assert_eq!(r.counts.counts(), &[1, 1, 0]);
        assert!((r.profit - 1.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn excluding_matches_enumeration(
            items in proptest::collection::vec((-20i32..40, 1u64..60, 0u32..3), 1..6),
            capacity in 1u64..100,
            forbid in proptest::collection::vec(0usize..64, 0..4),
        ) {
            let p = PricingProblem::new(
                items.iter().map(|t| f64::from(t.0) / 40.0).collect(),
                items.iter().map(|t| t.1).collect(),
                capacity,
                items.iter().map(|t| t.2).collect(),
            );
            // Forbid some of the best patterns by enumeration rank.
            let mut all = Vec::new();
            let n = p.len();
            let mut x = vec![0u32; n];
            'outer: loop {
                let weight: u64 = x.iter().zip(&p.weights).map(|(&a, &w)| u64::from(a) * w).sum();
                if weight <= p.capacity {
                    all.push((p.profit_of(&x), x.clone()));
                }
                let mut i = 0;
                loop {
                    if i == n {
                        break 'outer;
                    }
                    if x[i] < p.bounds[i] {
                        x[i] += 1;
                        break;
                    }
                    x[i] = 0;
                    i += 1;
                }
            }
            all.sort_by(|a, b| b.0.total_cmp(&a.0));
            let excluded: HashSet<Pattern> = forbid
                .iter()
                .filter_map(|&k| all.get(k))
                .filter(|(_, c)| c.iter().any(|&v| v > 0))
                .map(|(_, c)| Pattern::new(c.clone()))
                .collect();
            let oracle = all
                .iter()
                .filter(|(_, c)| !excluded.contains(&Pattern::new(c.clone())))
                .map(|(v, _)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            let r = solve_bounded_excluding(&p, &excluded);
            proptest::prop_assert!(!excluded.contains(&r.counts));
            proptest::prop_assert!(r.counts.fits(&p.weights, p.capacity));
            proptest::prop_assert!(r.counts.within(&p.bounds));
            proptest::prop_assert!((r.profit - oracle).abs() < 1e-9);
        }
    }

    proptest::proptest! {
        #[test]
        fn capacity_dp_matches_enumeration(
            items in proptest::collection::vec((-10i32..40, 1u64..40, 0u32..4), 1..6),
            capacity in 1u64..90,
            scale in 1u64..4,
        ) {
            let p = PricingProblem::new(
                items.iter().map(|t| f64::from(t.0) / 40.0).collect(),
                items.iter().map(|t| t.1 * scale).collect(),
                capacity * scale,
                items.iter().map(|t| t.2).collect(),
            );
            let counts = DpPlan::new(&p).unwrap().solve(1, f64::INFINITY).remove(0);
            let pattern = Pattern::new(counts.clone());
            proptest::prop_assert!(pattern.fits(&p.weights, p.capacity));
            proptest::prop_assert!(pattern.within(&p.bounds));
            let (_, oracle) = brute_force(&p, None).unwrap();
            proptest::prop_assert!((p.profit_of(&counts) - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_exhaustion_falls_back_to_dp() {
        // Many near-equal densities at a large capacity defeat the fractional
        // bound; the answer must still be exact.
        let n = 60;
        let weights: Vec<u64> = (0..n).map(|i| 20_000 + 237 * i as u64).collect();
        let profits: Vec<f64> = weights.iter().map(|&w| w as f64 / 100_000.0 + 1e-7 * (w % 7) as f64).collect();
        let p = PricingProblem::new(profits, weights, 100_000, vec![1; n]);
        let mut search = Search::new(&p, None);
        assert!(search.suffix.is_none());
        search.budget = Some(10);
        assert!(search.run_budgeted().is_none());
        let via_dp = DpPlan::new(&p).unwrap().solve(1, f64::INFINITY).remove(0);
        let via_search = Search::new(&p, None).run();
        assert!((p.profit_of(&via_dp) - p.profit_of(&via_search)).abs() < 1e-12);
        assert!((solve_binary(&p).profit - p.profit_of(&via_dp)).abs() < 1e-12);
    }
}
