//! The pricing sub-problems on a small dual vector: bounded, single-copy,
//! subset-sum, the profit-capped variant that steps below a forbidden
//! optimum, and the exact search that skips a set of patterns.

use std::collections::HashSet;

use binpack::knapsack::{
    solve_2d_decrement, solve_binary, solve_bounded, solve_bounded_excluding, solve_subset_sum, PricingProblem,
};
use binpack::Pattern;

fn main() {
    let weights = vec![45, 30, 20];
    let duals = vec![0.5, 1.0 / 3.0, 0.2];
    let problem = PricingProblem::new(duals, weights.clone(), 100, vec![2, 3, 5]);

    let best = solve_bounded(&problem);
    println!("bounded:     {} profit {:.4} reduced cost {:+.4}", best.counts, best.profit, best.reduced_cost);

    let single = solve_binary(&problem);
    println!("one copy:    {} profit {:.4}", single.counts, single.profit);

    // Everything strictly below the optimum's reduced cost minus a small decrement.
    let delta = 1e-5;
    let capped = problem.clone().with_cap(best.reduced_cost - delta);
    let second = solve_2d_decrement(&capped);
    println!("below it:    {} profit {:.4}", second.counts, second.profit);

    let forbidden: HashSet<Pattern> = [best.counts.clone(), second.counts.clone()].into_iter().collect();
    let third = solve_bounded_excluding(&problem, &forbidden);
    println!("excluding 2: {} profit {:.4}", third.counts, third.profit);

    let fill = solve_subset_sum(&weights, &[2, 3, 5], 95);
    println!("subset-sum into 95: {} fills {}", fill, fill.total_weight(&weights));
}
