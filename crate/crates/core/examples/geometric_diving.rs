//! Lehmer means of a bin's weights and how each criterion ranks the bins of
//! a fractional LP solution.

use binpack::canonicalize;
use binpack::diving::{lehmer_mean, ls_integral, score_bins, DivingCriterion};
use binpack::Pattern;

fn main() {
    let bin = [54.0, 34.0];
    for p in [0.0, 0.5, 1.0, 1.5, 2.0] {
        println!("L_{p:<3} of {bin:?} = {:.4}", lehmer_mean(&bin, p).unwrap());
    }
    println!("integral of p·L_p over [0,2] = {:.4}", ls_integral(&bin).unwrap());

    // A fractional root solution: every item is covered exactly once.
    let inst = canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap();
    let pool: Vec<Pattern> = [
        [1, 0, 0, 0, 1, 0],
        [0, 1, 1, 0, 0, 0],
        [0, 0, 1, 1, 0, 1],
        [0, 1, 0, 1, 0, 0],
        [0, 1, 0, 0, 1, 1],
        [1, 0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|c| Pattern::new(c.to_vec()))
    .collect();
    let values = [0.8, 0.4, 0.6, 0.4, 0.2, 0.2];
    for criterion in DivingCriterion::ALL {
        let ranked = score_bins(&pool, &values, &inst.weights(), criterion);
        let order: Vec<String> = ranked
            .iter()
            .map(|b| format!("B{}({:.2})", b.column + 1, b.score))
            .collect();
        println!("{criterion:>3}: {}", order.join(" "));
    }
}
