//! Constructive upper bounds and combinatorial lower bounds.

use crate::instance::{Instance, Pattern, Solution};
use crate::knapsack::solve_subset_sum;

/// Combinatorial lower bound and best heuristic packing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPair {
    pub lb: u64,
    pub ub: u64,
    pub ub_solution: Solution,
}

struct OpenBin {
    residual: u64,
    counts: Vec<u32>,
}

fn into_solution(bins: Vec<OpenBin>) -> Solution {
    let mut sol = Solution::new();
    for b in bins {
        sol.push(Pattern::new(b.counts), 1);
    }
    sol
}

/// Item units in canonical (decreasing weight) order, as item indices.
fn units(inst: &Instance) -> impl Iterator<Item = usize> + '_ {
    inst.items()
        .iter()
        .enumerate()
        .flat_map(|(i, it)| std::iter::repeat_n(i, it.demand as usize))
}

/// Best Fit Decreasing: each unit goes to the feasible bin with the least
/// residual capacity (earliest on ties), or a new bin.
pub fn best_fit_decreasing(inst: &Instance) -> Solution {
    let n = inst.len();
    let c = inst.capacity();
    let mut bins: Vec<OpenBin> = Vec::new();
    for i in units(inst) {
        let w = inst.items()[i].weight;
        let target = bins
            .iter()
            .enumerate()
            .filter(|(_, b)| b.residual >= w)
            .min_by_key(|(k, b)| (b.residual, *k))
            .map(|(k, _)| k);
        let k = target.unwrap_or_else(|| {
            bins.push(OpenBin {
                residual: c,
                counts: vec![0; n],
            });
            bins.len() - 1
        });
        bins[k].residual -= w;
        bins[k].counts[i] += 1;
    }
    into_solution(bins)
}

/// `⌈c/2⌉`: items at least this heavy never share a bin with each other
/// (except two halves of an even capacity) and are pre-allocated.
fn large_threshold(c: u64) -> u64 {
    c.div_ceil(2)
}

fn seeded_bins(inst: &Instance) -> (Vec<OpenBin>, Vec<u32>) {
    let n = inst.len();
    let c = inst.capacity();
    let threshold = large_threshold(c);
    let mut bins = Vec::new();
    let mut remaining = inst.demands();
    for (i, it) in inst.items().iter().enumerate() {
        if it.weight >= threshold {
            for _ in 0..it.demand {
                let mut counts = vec![0; n];
                counts[i] = 1;
                bins.push(OpenBin {
                    residual: c - it.weight,
                    counts,
                });
            }
            remaining[i] = 0;
        }
    }
    (bins, remaining)
}

/// First fit with the large items pre-allocated one per bin.
pub fn first_fit_n(inst: &Instance) -> Solution {
    let n = inst.len();
    let c = inst.capacity();
    let (mut bins, remaining) = seeded_bins(inst);
    for (i, &d) in remaining.iter().enumerate() {
        let w = inst.items()[i].weight;
        for _ in 0..d {
            let k = match bins.iter().position(|b| b.residual >= w) {
                Some(k) => k,
                None => {
                    bins.push(OpenBin {
                        residual: c,
                        counts: vec![0; n],
                    });
                    bins.len() - 1
                }
            };
            bins[k].residual -= w;
            bins[k].counts[i] += 1;
        }
    }
    into_solution(bins)
}

/// Large items pre-allocated one per bin; the seeded bins' residual
/// capacities are then filled by subset-sum (largest residual first), and
/// the remaining units are packed into fresh bins, each filled by subset-sum.
pub fn subset_sum_n_heuristic(inst: &Instance) -> Solution {
    let n = inst.len();
    let c = inst.capacity();
    let weights = inst.weights();
    let (mut bins, mut remaining) = seeded_bins(inst);

    let mut order: Vec<usize> = (0..bins.len()).collect();
    order.sort_by(|&a, &b| bins[b].residual.cmp(&bins[a].residual).then(a.cmp(&b)));
    for k in order {
        if remaining.iter().all(|&d| d == 0) {
            break;
        }
        let fill = solve_subset_sum(&weights, &remaining, bins[k].residual);
        for (i, &x) in fill.counts().iter().enumerate() {
            remaining[i] -= x;
            bins[k].counts[i] += x;
        }
        bins[k].residual -= fill.total_weight(&weights);
    }
    while remaining.iter().any(|&d| d > 0) {
        let fill = solve_subset_sum(&weights, &remaining, c);
        debug_assert!(!fill.is_zero(), "every remaining item fits an empty bin");
        if fill.is_zero() {
            break;
        }
        for (i, &x) in fill.counts().iter().enumerate() {
            remaining[i] -= x;
        }
        bins.push(OpenBin {
            residual: c - fill.total_weight(&weights),
            counts: fill.counts().to_vec(),
        });
    }
    debug_assert!(bins.iter().all(|b| b.counts.len() == n));
    into_solution(bins)
}

/// `⌈Σ w_i d_i / c⌉`.
pub fn l1_bound(inst: &Instance) -> u64 {
    inst.total_weight().div_ceil(inst.capacity())
}

/// Martello–Toth L2, maximized over every distinct weight `≤ c/2` (and 0)
/// as the threshold.
pub fn l2_bound(inst: &Instance) -> u64 {
    let c = inst.capacity();
    let mut thresholds: Vec<u64> = inst
        .items()
        .iter()
        .map(|it| it.weight)
        .filter(|&w| 2 * w <= c)
        .collect();
    thresholds.push(0);
    thresholds
        .into_iter()
        .map(|alpha| {
            let (mut big, mut mid, mut mid_weight, mut small_weight) = (0u64, 0u64, 0u64, 0u64);
            for it in inst.items() {
                let d = u64::from(it.demand);
                if it.weight > c - alpha {
                    big += d;
                } else if 2 * it.weight > c {
                    mid += d;
                    mid_weight += d * it.weight;
                } else if it.weight >= alpha {
                    small_weight += d * it.weight;
                }
            }
            let free = mid * c - mid_weight;
            let extra = small_weight.saturating_sub(free).div_ceil(c);
            big + mid + extra
        })
        .max()
        .unwrap_or(0)
}

/// `max(L1, L2)`.
pub fn lower_bound(inst: &Instance) -> u64 {
    l1_bound(inst).max(l2_bound(inst))
}

/// Lower bound plus the best of the three constructive heuristics.
pub fn bound_pair(inst: &Instance) -> BoundPair {
    let candidates = [
        subset_sum_n_heuristic(inst),
        best_fit_decreasing(inst),
        first_fit_n(inst),
    ];
    let ub_solution = candidates
        .into_iter()
        .min_by_key(|s| s.objective())
        .expect("three candidates");
    BoundPair {
        lb: lower_bound(inst),
        ub: ub_solution.objective(),
        ub_solution,
    }
}
