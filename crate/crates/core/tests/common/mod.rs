#![allow(dead_code)]

use std::collections::HashMap;

use binpack::instance::{Instance, Item};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random instance with at most `max_items` distinct weights, at most
/// `max_units` units in total and capacity at most `max_capacity`.
pub fn random_instance(seed: u64, max_items: usize, max_units: u32, max_capacity: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let capacity = rng.gen_range(10..=max_capacity);
    let n = rng.gen_range(1..=max_items);
    let mut budget = max_units;
    let mut items = Vec::new();
    for _ in 0..n {
        if budget == 0 {
            break;
        }
        let weight = rng.gen_range(1..=capacity);
        let demand = rng.gen_range(1..=budget.min(4));
        budget -= demand;
        items.push(Item { weight, demand });
    }
    Instance::from_items(capacity, items).expect("generated weights fit")
}

/// Exact bin count by memoized search over residual demand vectors. The
/// first item with remaining demand is always placed, which breaks the
/// symmetry between bins.
pub fn optimal_bins(inst: &Instance) -> u64 {
    let weights = inst.weights();
    let mut memo = HashMap::new();
    solve(&weights, inst.capacity(), inst.demands(), &mut memo)
}

fn solve(w: &[u64], c: u64, d: Vec<u32>, memo: &mut HashMap<Vec<u32>, u64>) -> u64 {
    let Some(first) = d.iter().position(|&x| x > 0) else {
        return 0;
    };
    if let Some(&v) = memo.get(&d) {
        return v;
    }
    let mut best = u64::MAX;
    let mut bin = vec![0u32; d.len()];
    bin[first] = 1;
    fill(w, c - w[first], &d, first, &mut bin, &mut |b| {
        let rest: Vec<u32> = d.iter().zip(b).map(|(&x, &y)| x - y).collect();
        best = best.min(1 + solve(w, c, rest, memo));
    });
    memo.insert(d, best);
    best
}

/// Calls `visit` with every maximal-or-not extension of `bin` using items
/// from `start` on, bounded by `d` and the remaining room.
fn fill(w: &[u64], room: u64, d: &[u32], start: usize, bin: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
    if start == w.len() {
        visit(bin);
        return;
    }
    let base = bin[start];
    let mut k = 0;
    loop {
        let used = u64::from(k) * w[start];
        if base + k > d[start] || used > room {
            break;
        }
        bin[start] = base + k;
        fill(w, room - used, d, start + 1, bin, visit);
        k += 1;
    }
    bin[start] = base;
}

/// Every pattern with at most `bounds[i]` copies of item `i` that fits.
pub fn enumerate_patterns(weights: &[u64], capacity: u64, bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut bin = vec![0u32; weights.len()];
    fill(weights, capacity, bounds, 0, &mut bin, &mut |b| {
        if b.iter().any(|&x| x > 0) {
            out.push(b.to_vec());
        }
    });
    out
}

/// LP relaxation over all patterns, solved by an independent simplex.
pub fn pattern_lp(inst: &Instance) -> f64 {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let pats = enumerate_patterns(&inst.weights(), inst.capacity(), &inst.demands());
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = pats.iter().map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for (i, it) in inst.items().iter().enumerate() {
        let row: Vec<_> = pats
            .iter()
            .zip(&vars)
            .filter(|(p, _)| p[i] > 0)
            .map(|(p, &v)| (v, f64::from(p[i])))
            .collect();
        lp.add_constraint(&row, ComparisonOp::Eq, f64::from(it.demand));
    }
    lp.solve().expect("singletons make the LP feasible").objective()
}
