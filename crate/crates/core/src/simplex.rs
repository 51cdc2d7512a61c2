//! Restricted master LP: `min Σ λ_k` s.t. `Σ_k x_ik λ_k = d̄_i`, `λ >= 0`,
//! solved by a dense revised simplex with a two-phase start.
//!
//! Only rows with positive residual demand enter the LP; items with zero
//! residual demand get a zero dual. The basis inverse is kept explicitly and
//! updated by elementary row operations, with periodic refactorization.

use std::collections::HashMap;

use thiserror::Error;

use crate::instance::Pattern;

pub const PIVOT_TOL: f64 = 1e-10;
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Reduced-cost threshold for an entering column.
pub const OPTIMALITY_TOL: f64 = 1e-9;

const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MasterError {
    #[error("column {0} already in the pool")]
    Duplicate(Pattern),
    #[error("column {pattern} weighs {weight}, capacity is {capacity}")]
    ExceedsCapacity {
        pattern: Pattern,
        weight: u64,
        capacity: u64,
    },
    #[error("column {0} exceeds the residual demand")]
    ExceedsDemand(Pattern),
    #[error("column {0} is empty or has the wrong length")]
    Malformed(Pattern),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// The equality rows cannot be met with the current pool. `duals` then
    /// holds the phase-one prices: any column with `Σ y_i x_i > 0` would
    /// reduce the infeasibility.
    Infeasible,
    /// The pivot limit was hit; values are those of the last basis.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    /// One value per pool column, in pool order at solve time.
    pub primal: Vec<f64>,
    /// One price per item (zero for items without residual demand).
    pub duals: Vec<f64>,
    /// Sum of artificial values left after phase one.
    pub infeasibility: f64,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Var {
    Art(usize),
    Col(usize),
}

#[derive(Debug, Clone)]
struct Basis {
    vars: Vec<Var>,
    /// Dense `B^{-1}`, row-major.
    inv: Vec<Vec<f64>>,
    values: Vec<f64>,
    since_refactor: usize,
}

/// The restricted master problem over a pool of patterns.
#[derive(Debug, Clone)]
pub struct RestrictedMaster {
    weights: Vec<u64>,
    capacity: u64,
    rhs: Vec<u32>,
    columns: Vec<Pattern>,
    lookup: HashMap<Pattern, usize>,
    /// Solve counter at which each column was last basic (or added).
    last_used: Vec<u64>,
    clock: u64,
    column_limit: Option<usize>,
    /// Item index for each LP row.
    rows: Vec<usize>,
    row_of: Vec<Option<usize>>,
    basis: Option<Basis>,
}

impl RestrictedMaster {
    /// An empty pool over the given items with residual demands `rhs`.
    pub fn new(weights: Vec<u64>, capacity: u64, rhs: Vec<u32>) -> Self {
        debug_assert_eq!(weights.len(), rhs.len());
        let mut m = RestrictedMaster {
            weights,
            capacity,
            rhs: Vec::new(),
            columns: Vec::new(),
            lookup: HashMap::new(),
            last_used: Vec::new(),
            clock: 0,
            column_limit: None,
            rows: Vec::new(),
            row_of: Vec::new(),
            basis: None,
        };
        m.set_rows(rhs);
        m
    }

    fn set_rows(&mut self, rhs: Vec<u32>) {
        self.rows = (0..rhs.len()).filter(|&i| rhs[i] > 0).collect();
        self.row_of = vec![None; rhs.len()];
        for (r, &i) in self.rows.iter().enumerate() {
            self.row_of[i] = Some(r);
        }
        self.rhs = rhs;
        self.basis = None;
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn rhs(&self) -> &[u32] {
        &self.rhs
    }

    pub fn columns(&self) -> &[Pattern] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, p: &Pattern) -> bool {
        self.lookup.contains_key(p)
    }

    /// Caps the pool size; beyond it the least recently basic non-basic
    /// column is evicted on every insertion. `None` disables eviction.
    pub fn set_column_limit(&mut self, limit: Option<usize>) {
        self.column_limit = limit;
    }

    /// Replaces the residual demands. Columns exceeding the new demands are
    /// removed and the basis is discarded.
    pub fn set_rhs(&mut self, rhs: Vec<u32>) {
        debug_assert_eq!(rhs.len(), self.weights.len());
        self.set_rows(rhs);
        let rhs = self.rhs.clone();
        self.retain(|p| p.within(&rhs));
    }

    /// Appends a column; the current basis stays valid as a warm start.
    pub fn add_column(&mut self, p: Pattern) -> Result<usize, MasterError> {
        if p.len() != self.weights.len() || p.is_zero() {
            return Err(MasterError::Malformed(p));
        }
        let weight = p.total_weight(&self.weights);
        if weight > self.capacity {
            return Err(MasterError::ExceedsCapacity {
                pattern: p,
                weight,
                capacity: self.capacity,
            });
        }
        if !p.within(&self.rhs) {
            return Err(MasterError::ExceedsDemand(p));
        }
        if self.lookup.contains_key(&p) {
            return Err(MasterError::Duplicate(p));
        }
        let index = self.columns.len();
        self.lookup.insert(p.clone(), index);
        self.columns.push(p);
        self.last_used.push(self.clock);
        self.evict_if_needed();
        Ok(self.lookup.get(&self.columns[self.columns.len() - 1]).copied().unwrap_or(index))
    }

    fn evict_if_needed(&mut self) {
        let Some(limit) = self.column_limit else {
            return;
        };
        while self.columns.len() > limit {
            let basic: Vec<bool> = self.basic_flags();
            let newest = self.columns.len() - 1;
            let victim = (0..self.columns.len())
                .filter(|&j| !basic[j] && j != newest && !self.is_singleton(&self.columns[j]))
                .min_by_key(|&j| (self.last_used[j], j));
            match victim {
                Some(j) => {
                    self.retain_indices(|k| k != j);
                }
                None => break,
            }
        }
    }

    fn basic_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.columns.len()];
        if let Some(b) = &self.basis {
            for v in &b.vars {
                if let Var::Col(j) = *v {
                    flags[j] = true;
                }
            }
        }
        flags
    }

    fn is_singleton(&self, p: &Pattern) -> bool {
        p.counts().iter().filter(|&&x| x > 0).count() == 1
    }

    /// Removes every column matching `pred`, then re-injects a singleton
    /// column for each active row that has none. Returns the number of
    /// columns removed.
    pub fn remove_columns<F>(&mut self, pred: F) -> usize
    where
        F: Fn(&Pattern) -> bool,
    {
        let before = self.columns.len();
        self.retain(|p| !pred(p));
        let removed = before - self.columns.len();
        self.ensure_singletons(|_| true);
        removed
    }

    /// Removes every column matching `pred` without re-injecting anything.
    /// Returns the number of columns removed.
    pub fn discard_columns<F>(&mut self, pred: F) -> usize
    where
        F: Fn(&Pattern) -> bool,
    {
        let before = self.columns.len();
        self.retain(|p| !pred(p));
        before - self.columns.len()
    }

    /// Makes sure every active row has a column covering only that item,
    /// using `min(d̄_i, ⌊c/w_i⌋)` copies or, if `allowed` rejects it, the
    /// largest smaller multiple it accepts. Returns the rows left uncovered.
    pub fn ensure_singletons<F>(&mut self, allowed: F) -> Vec<usize>
    where
        F: Fn(&Pattern) -> bool,
    {
        let n = self.weights.len();
        let mut has = vec![false; n];
        for p in &self.columns {
            let mut nz = p.counts().iter().enumerate().filter(|(_, &x)| x > 0);
            if let (Some((i, _)), None) = (nz.next(), nz.next()) {
                has[i] = true;
            }
        }
        let mut uncovered = Vec::new();
        for r in 0..self.rows.len() {
            let i = self.rows[r];
            if has[i] {
                continue;
            }
            let most = (self.capacity / self.weights[i]).min(u64::from(self.rhs[i])) as u32;
            let pick = (1..=most)
                .rev()
                .map(|k| Pattern::singleton(n, i, k))
                .find(|p| allowed(p));
            match pick {
                Some(p) => {
                    let _ = self.add_column(p);
                }
                None => uncovered.push(i),
            }
        }
        uncovered
    }

    fn retain<F>(&mut self, keep: F)
    where
        F: Fn(&Pattern) -> bool,
    {
        let flags: Vec<bool> = self.columns.iter().map(&keep).collect();
        self.retain_indices(|j| flags[j]);
    }

    fn retain_indices<F>(&mut self, keep: F)
    where
        F: Fn(usize) -> bool,
    {
        let mut remap = vec![None; self.columns.len()];
        let mut columns = Vec::with_capacity(self.columns.len());
        let mut last_used = Vec::with_capacity(self.columns.len());
        for (j, p) in std::mem::take(&mut self.columns).into_iter().enumerate() {
            if keep(j) {
                remap[j] = Some(columns.len());
                columns.push(p);
                last_used.push(self.last_used[j]);
            }
        }
        self.columns = columns;
        self.last_used = last_used;
        self.lookup = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, p)| (p.clone(), j))
            .collect();
        if let Some(b) = &mut self.basis {
            let mut intact = true;
            for v in b.vars.iter_mut() {
                if let Var::Col(j) = *v {
                    match remap[j] {
                        Some(k) => *v = Var::Col(k),
                        None => intact = false,
                    }
                }
            }
            if !intact {
                self.basis = None;
            }
        }
    }

    /// Dense column of pattern `j` restricted to the active rows.
    fn column(&self, var: Var) -> Vec<f64> {
        let m = self.rows.len();
        let mut a = vec![0.0; m];
        match var {
            Var::Art(r) => a[r] = 1.0,
            Var::Col(j) => {
                for (r, &i) in self.rows.iter().enumerate() {
                    a[r] = f64::from(self.columns[j].counts()[i]);
                }
            }
        }
        a
    }

    fn sparse_columns(&self) -> Vec<Vec<(usize, f64)>> {
        self.columns
            .iter()
            .map(|p| {
                p.counts()
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .filter_map(|(i, &x)| self.row_of[i].map(|r| (r, f64::from(x))))
                    .collect()
            })
            .collect()
    }

    fn b_vector(&self) -> Vec<f64> {
        self.rows.iter().map(|&i| f64::from(self.rhs[i])).collect()
    }

    fn factorize(&self, vars: &[Var]) -> Option<Vec<Vec<f64>>> {
        let m = vars.len();
        // Augmented [B | I], Gauss-Jordan with partial pivoting.
        let mut a: Vec<Vec<f64>> = vec![vec![0.0; 2 * m]; m];
        for (c, &v) in vars.iter().enumerate() {
            let col = self.column(v);
            for r in 0..m {
                a[r][c] = col[r];
            }
        }
        for (r, row) in a.iter_mut().enumerate() {
            row[m + r] = 1.0;
        }
        for c in 0..m {
            let piv = (c..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
            if a[piv][c].abs() < 1e-11 {
                return None;
            }
            a.swap(c, piv);
            let d = a[c][c];
            a[c].iter_mut().for_each(|v| *v /= d);
            let pivot_row = a[c].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != c && row[c] != 0.0 {
                    let f = row[c];
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[m..].to_vec()).collect())
    }

    fn mat_vec(inv: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        inv.iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn refactor(&self, basis: &mut Basis) -> bool {
        match self.factorize(&basis.vars) {
            Some(inv) => {
                basis.values = Self::mat_vec(&inv, &self.b_vector());
                basis.inv = inv;
                basis.since_refactor = 0;
                true
            }
            None => false,
        }
    }

    fn cold_basis(&self) -> Basis {
        let m = self.rows.len();
        let mut inv = vec![vec![0.0; m]; m];
        for (r, row) in inv.iter_mut().enumerate() {
            row[r] = 1.0;
        }
        Basis {
            vars: (0..m).map(Var::Art).collect(),
            inv,
            values: self.b_vector(),
            since_refactor: 0,
        }
    }

    /// Solves the LP to optimality, warm-starting from the previous basis
    /// when it is still primal feasible.
    pub fn solve(&mut self) -> LpSolution {
        self.solve_inner(true)
    }

    fn solve_inner(&mut self, allow_restart: bool) -> LpSolution {
        self.clock += 1;
        let m = self.rows.len();
        let n_items = self.weights.len();
        let k = self.columns.len();
        if m == 0 {
            return LpSolution {
                status: LpStatus::Optimal,
                objective: 0.0,
                primal: vec![0.0; k],
                duals: vec![0.0; n_items],
                infeasibility: 0.0,
                pivots: 0,
            };
        }

        let mut basis = match self.basis.take() {
            Some(mut b) if b.vars.len() == m => {
                if self.refactor(&mut b) && b.values.iter().all(|&x| x >= -FEASIBILITY_TOL) {
                    b
                } else {
                    self.cold_basis()
                }
            }
            _ => self.cold_basis(),
        };

        let cols = self.sparse_columns();
        let limit = 50 * (m + k) + 10_000;
        let mut pivots = 0usize;
        let scale = self.b_vector().iter().fold(1.0f64, |a, &b| a.max(b));

        let needs_phase_one = basis
            .vars
            .iter()
            .zip(&basis.values)
            .any(|(v, &x)| matches!(v, Var::Art(_)) && x > FEASIBILITY_TOL);
        let mut status = LpStatus::Optimal;
        if needs_phase_one {
            status = self.iterate(&mut basis, &cols, Phase::One, &mut pivots, limit);
            let infeasibility: f64 = self.artificial_sum(&basis);
            if status == LpStatus::Optimal && infeasibility > FEASIBILITY_TOL * scale {
                let duals = self.duals(&basis, Phase::One);
                let sol = self.snapshot(&basis, LpStatus::Infeasible, duals, infeasibility, pivots);
                self.basis = Some(basis);
                return sol;
            }
        }
        if status == LpStatus::Optimal {
            self.drive_out_artificials(&mut basis, &cols);
            status = self.iterate(&mut basis, &cols, Phase::Two, &mut pivots, limit);
        }
        if !self.refactor(&mut basis) {
            if allow_restart {
                // Singular after the warm start: restart from artificials.
                self.basis = None;
                let mut sol = self.solve_inner(false);
                sol.pivots += pivots;
                return sol;
            }
            let duals = vec![0.0; n_items];
            let infeasibility = self.artificial_sum(&basis);
            return self.snapshot(&basis, LpStatus::IterationLimit, duals, infeasibility, pivots);
        }
        for x in basis.values.iter_mut() {
            if *x < 0.0 && *x > -FEASIBILITY_TOL {
                *x = 0.0;
            }
        }
        let duals = self.duals(&basis, Phase::Two);
        let infeasibility = self.artificial_sum(&basis);
        let sol = self.snapshot(&basis, status, duals, infeasibility, pivots);
        for v in &basis.vars {
            if let Var::Col(j) = *v {
                self.last_used[j] = self.clock;
            }
        }
        self.basis = Some(basis);
        sol
    }

    fn artificial_sum(&self, basis: &Basis) -> f64 {
        basis
            .vars
            .iter()
            .zip(&basis.values)
            .filter(|(v, _)| matches!(v, Var::Art(_)))
            .map(|(_, &x)| x.max(0.0))
            .sum()
    }

    fn snapshot(
        &self,
        basis: &Basis,
        status: LpStatus,
        duals: Vec<f64>,
        infeasibility: f64,
        pivots: usize,
    ) -> LpSolution {
        let mut primal = vec![0.0; self.columns.len()];
        for (v, &x) in basis.vars.iter().zip(&basis.values) {
            if let Var::Col(j) = *v {
                primal[j] = x.max(0.0);
            }
        }
        let objective = primal.iter().sum();
        LpSolution {
            status,
            objective,
            primal,
            duals,
            infeasibility,
            pivots,
        }
    }

    fn cost(var: Var, phase: Phase) -> f64 {
        match (phase, var) {
            (Phase::One, Var::Art(_)) => 1.0,
            (Phase::One, Var::Col(_)) => 0.0,
            (Phase::Two, Var::Art(_)) => 0.0,
            (Phase::Two, Var::Col(_)) => 1.0,
        }
    }

    fn row_prices(&self, basis: &Basis, phase: Phase) -> Vec<f64> {
        let m = basis.vars.len();
        let mut y = vec![0.0; m];
        for (r, &v) in basis.vars.iter().enumerate() {
            let c = Self::cost(v, phase);
            if c != 0.0 {
                for (yi, &b) in y.iter_mut().zip(&basis.inv[r]) {
                    *yi += c * b;
                }
            }
        }
        y
    }

    fn duals(&self, basis: &Basis, phase: Phase) -> Vec<f64> {
        let y = self.row_prices(basis, phase);
        let mut duals = vec![0.0; self.weights.len()];
        for (r, &i) in self.rows.iter().enumerate() {
            duals[i] = y[r];
        }
        duals
    }

    fn iterate(
        &self,
        basis: &mut Basis,
        cols: &[Vec<(usize, f64)>],
        phase: Phase,
        pivots: &mut usize,
        limit: usize,
    ) -> LpStatus {
        let m = basis.vars.len();
        let mut is_basic = vec![false; cols.len()];
        for v in &basis.vars {
            if let Var::Col(j) = *v {
                is_basic[j] = true;
            }
        }
        let bland_after = 5 * (m + cols.len());
        let mut degenerate_run = 0usize;
        let mut skip = vec![false; cols.len()];
        loop {
            if *pivots >= limit {
                return LpStatus::IterationLimit;
            }
            if basis.since_refactor >= REFACTOR_EVERY && !self.refactor(basis) {
                return LpStatus::IterationLimit;
            }
            let y = self.row_prices(basis, phase);
            let bland = degenerate_run > bland_after;
            let mut entering: Option<(usize, f64)> = None;
            for (j, col) in cols.iter().enumerate() {
                if is_basic[j] || skip[j] {
                    continue;
                }
                let d = Self::cost(Var::Col(j), phase)
                    - col.iter().map(|&(r, a)| y[r] * a).sum::<f64>();
                if d < -OPTIMALITY_TOL {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d < best) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, _)) = entering else {
                return LpStatus::Optimal;
            };

            let mut a_q = vec![0.0; m];
            for &(r, a) in &cols[q] {
                for (i, out) in a_q.iter_mut().enumerate() {
                    *out += basis.inv[i][r] * a;
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let alpha = a_q[r];
                if alpha <= PIVOT_TOL {
                    continue;
                }
                let ratio = basis.values[r].max(0.0) / alpha;
                let better = match leave {
                    None => true,
                    Some((lr, lt)) => {
                        if ratio < lt - 1e-12 {
                            true
                        } else if ratio <= lt + 1e-12 {
                            if bland {
                                basis.vars[r] < basis.vars[lr]
                            } else {
                                alpha > a_q[lr]
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, t)) = leave else {
                // No blocking row: numerically unbounded direction.
                skip[q] = true;
                continue;
            };
            if t <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            for (i, x) in basis.values.iter_mut().enumerate() {
                *x -= t * a_q[i];
            }
            basis.values[r] = t;
            let pivot = a_q[r];
            let pivot_row: Vec<f64> = basis.inv[r].iter().map(|v| v / pivot).collect();
            for (i, row) in basis.inv.iter_mut().enumerate() {
                if i == r {
                    row.copy_from_slice(&pivot_row);
                } else if a_q[i] != 0.0 {
                    let f = a_q[i];
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
            if let Var::Col(j) = basis.vars[r] {
                is_basic[j] = false;
            }
            basis.vars[r] = Var::Col(q);
            is_basic[q] = true;
            basis.since_refactor += 1;
            *pivots += 1;
        }
    }

    /// Pivots zero-valued artificials out of the basis where some column has
    /// a nonzero entry in their row.
    fn drive_out_artificials(&self, basis: &mut Basis, cols: &[Vec<(usize, f64)>]) {
        let m = basis.vars.len();
        let mut is_basic = vec![false; cols.len()];
        for v in &basis.vars {
            if let Var::Col(j) = *v {
                is_basic[j] = true;
            }
        }
        for r in 0..m {
            if !matches!(basis.vars[r], Var::Art(_)) {
                continue;
            }
            let row = basis.inv[r].clone();
            let mut best: Option<(usize, f64)> = None;
            for (j, col) in cols.iter().enumerate() {
                if is_basic[j] {
                    continue;
                }
                let alpha: f64 = col.iter().map(|&(i, a)| row[i] * a).sum();
                if alpha.abs() > 1e-7 && best.is_none_or(|(_, b)| alpha.abs() > b.abs()) {
                    best = Some((j, alpha));
                }
            }
            let Some((q, _)) = best else {
                continue;
            };
            let mut a_q = vec![0.0; m];
            for &(k, a) in &cols[q] {
                for (i, out) in a_q.iter_mut().enumerate() {
                    *out += basis.inv[i][k] * a;
                }
            }
            let t = basis.values[r] / a_q[r];
            for (i, x) in basis.values.iter_mut().enumerate() {
                *x -= t * a_q[i];
            }
            basis.values[r] = t;
            let pivot = a_q[r];
            let pivot_row: Vec<f64> = basis.inv[r].iter().map(|v| v / pivot).collect();
            for (i, inv_row) in basis.inv.iter_mut().enumerate() {
                if i == r {
                    inv_row.copy_from_slice(&pivot_row);
                } else if a_q[i] != 0.0 {
                    let f = a_q[i];
                    for (v, p) in inv_row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
            basis.vars[r] = Var::Col(q);
            is_basic[q] = true;
            basis.since_refactor += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

/// Solves the restricted master to optimality.
pub fn solve_rmp(m: &mut RestrictedMaster) -> LpSolution {
    m.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_certificates(m: &RestrictedMaster, lp: &LpSolution) {
        assert_eq!(lp.status, LpStatus::Optimal);
        for &i in &m.rows {
            let lhs: f64 = m
                .columns()
                .iter()
                .zip(&lp.primal)
                .map(|(p, &l)| f64::from(p.counts()[i]) * l)
                .sum();
            assert!((lhs - f64::from(m.rhs()[i])).abs() < 1e-7, "row {i}: {lhs}");
        }
        for p in m.columns() {
            let price: f64 = p.counts().iter().zip(&lp.duals).map(|(&x, &y)| f64::from(x) * y).sum();
            assert!(price <= 1.0 + 1e-7, "column {p} prices at {price}");
        }
        let dual_obj: f64 = m.rhs().iter().zip(&lp.duals).map(|(&d, &y)| f64::from(d) * y).sum();
        assert!((dual_obj - lp.objective).abs() < 1e-6);
    }

    #[test]
    fn single_row_single_column() {
        let mut m = RestrictedMaster::new(vec![100], 100, vec![5]);
        m.add_column(Pattern::new(vec![1])).unwrap();
        let lp = m.solve();
        assert_eq!(lp.status, LpStatus::Optimal);
        assert!((lp.objective - 5.0).abs() < 1e-12);
        assert!((lp.primal[0] - 5.0).abs() < 1e-12);
        assert!((lp.duals[0] - 1.0).abs() < 1e-12);
        assert_certificates(&m, &lp);
    }

    fn example_pool() -> RestrictedMaster {
        let weights = vec![72, 54, 34, 33, 19, 18];
        let mut m = RestrictedMaster::new(weights, 100, vec![1; 6]);
        for bin in [
            [1, 0, 0, 0, 1, 0],
            [0, 1, 1, 0, 0, 0],
            [0, 0, 1, 1, 0, 1],
            [0, 1, 0, 1, 0, 0],
            [0, 1, 0, 0, 1, 1],
            [1, 0, 0, 0, 0, 1],
        ] {
            m.add_column(Pattern::new(bin.to_vec())).unwrap();
        }
        m
    }

    #[test]
    fn example_pool_is_feasible() {
        let mut m = example_pool();
        let lp = m.solve();
        assert!(lp.objective <= 2.6 + 1e-9);
        assert_certificates(&m, &lp);
    }

    #[test]
    fn redundant_column_keeps_objective() {
        let mut single = RestrictedMaster::new(vec![40], 100, vec![2]);
        single.add_column(Pattern::new(vec![2])).unwrap();
        let z1 = single.solve().objective;

        let mut double = RestrictedMaster::new(vec![40], 100, vec![2]);
        double.add_column(Pattern::new(vec![2])).unwrap();
        double.add_column(Pattern::new(vec![1])).unwrap();
        let lp = double.solve();
        assert!((lp.objective - z1).abs() < 1e-12);
        assert_eq!(lp.primal.iter().filter(|&&l| l > 1e-9).count(), 1);
    }

    #[test]
    fn add_column_errors() {
        let mut m = RestrictedMaster::new(vec![60, 50], 100, vec![1, 2]);
        m.add_column(Pattern::new(vec![1, 0])).unwrap();
        assert!(matches!(m.add_column(Pattern::new(vec![1, 0])), Err(MasterError::Duplicate(_))));
        assert!(matches!(
            m.add_column(Pattern::new(vec![1, 1])),
            Err(MasterError::ExceedsCapacity { weight: 110, .. })
        ));
        assert!(matches!(m.add_column(Pattern::new(vec![2, 0])), Err(MasterError::ExceedsCapacity { .. })));
        assert!(matches!(m.add_column(Pattern::new(vec![0, 0])), Err(MasterError::Malformed(_))));
    }

    #[test]
    fn improving_column_lowers_objective() {
        let mut m = RestrictedMaster::new(vec![60, 40], 100, vec![3, 3]);
        m.ensure_singletons(|_| true);
        let z0 = m.solve().objective;
        m.add_column(Pattern::new(vec![1, 1])).unwrap();
        let lp = m.solve();
        assert!(lp.objective <= z0 + 1e-12);
        assert!((lp.objective - 3.0).abs() < 1e-9);
        assert_certificates(&m, &lp);
    }

    #[test]
    fn remove_all_restores_singletons() {
        let mut m = example_pool();
        m.remove_columns(|_| true);
        assert_eq!(m.len(), 6);
        let lp = m.solve();
        assert!((lp.objective - 6.0).abs() < 1e-9);
        assert_certificates(&m, &lp);
    }

    #[test]
    fn remove_nonbasic_column_keeps_objective() {
        let mut m = RestrictedMaster::new(vec![60, 40], 100, vec![3, 3]);
        m.ensure_singletons(|_| true);
        m.add_column(Pattern::new(vec![1, 1])).unwrap();
        m.add_column(Pattern::new(vec![0, 1])).ok();
        let lp = m.solve();
        let z = lp.objective;
        let nonbasic: Vec<Pattern> = m
            .columns()
            .iter()
            .zip(&lp.primal)
            .filter(|(_, &l)| l < 1e-12)
            .map(|(p, _)| p.clone())
            .collect();
        assert!(!nonbasic.is_empty());
        let victim = nonbasic[0].clone();
        m.remove_columns(|p| *p == victim);
        let lp = m.solve();
        assert!((lp.objective - z).abs() < 1e-9);
    }

    #[test]
    fn remove_unique_cover_reinjects_singleton() {
        let mut m = RestrictedMaster::new(vec![60, 40], 100, vec![1, 1]);
        m.add_column(Pattern::new(vec![1, 1])).unwrap();
        assert_eq!(m.solve().objective, 1.0);
        m.remove_columns(|p| p.counts() == [1, 1]);
        let lp = m.solve();
        assert_eq!(lp.status, LpStatus::Optimal);
        assert!((lp.objective - 2.0).abs() < 1e-9);
        assert!(m.contains(&Pattern::new(vec![1, 0])));
        assert!(m.contains(&Pattern::new(vec![0, 1])));
    }

    #[test]
    fn infeasible_pool_reports_farkas_prices() {
        let mut m = RestrictedMaster::new(vec![60, 40], 100, vec![1, 2]);
        m.add_column(Pattern::new(vec![1, 1])).unwrap();
        let lp = m.solve();
        assert_eq!(lp.status, LpStatus::Infeasible);
        // The singleton of the short item would reduce infeasibility.
        assert!(lp.duals[1] > 1e-9);
    }

    #[test]
    fn zero_rows_solve_trivially() {
        let mut m = RestrictedMaster::new(vec![60, 40], 100, vec![0, 0]);
        let lp = m.solve();
        assert_eq!(lp.objective, 0.0);
    }

    #[test]
    fn set_rhs_filters_columns() {
        let mut m = RestrictedMaster::new(vec![30], 100, vec![5]);
        m.add_column(Pattern::new(vec![3])).unwrap();
        m.add_column(Pattern::new(vec![1])).unwrap();
        m.set_rhs(vec![2]);
        assert_eq!(m.columns(), &[Pattern::new(vec![1])]);
        // Item 0 already has a singleton column, so nothing is injected.
        assert!(m.ensure_singletons(|_| true).is_empty());
        assert_eq!(m.len(), 1);
        let lp = m.solve();
        assert!((lp.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn column_limit_evicts_nonbasic() {
        let mut m = RestrictedMaster::new(vec![50, 30, 20], 100, vec![2, 2, 2]);
        m.set_column_limit(Some(5));
        m.ensure_singletons(|_| true);
        m.solve();
        m.add_column(Pattern::new(vec![1, 1, 1])).unwrap();
        m.solve();
        m.add_column(Pattern::new(vec![0, 1, 1])).unwrap();
        m.add_column(Pattern::new(vec![1, 0, 1])).unwrap();
        assert!(m.len() <= 5);
        let lp = m.solve();
        assert_certificates(&m, &lp);
    }
}
