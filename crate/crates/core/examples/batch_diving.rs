//! Selecting a batch of compatible bins from a fractional LP solution under
//! equality or inequality demand constraints.

use binpack::canonicalize;
use binpack::diving::{batch_dive, score_bins, BatchMode, BatchSense, DivingCriterion};
use binpack::Pattern;

fn main() {
    let inst = canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap();
    let weights = inst.weights();
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
    let ranked = score_bins(&pool, &[0.8, 0.4, 0.6, 0.4, 0.2, 0.2], &weights, DivingCriterion::L2);
    let demand = inst.demands();

    for mode in [BatchMode::Equality, BatchMode::Inequality] {
        for sense in [BatchSense::Maximize, BatchSense::Minimize] {
            let sel = batch_dive(&ranked, &demand, mode, sense);
            let bins: Vec<String> = sel.chosen.iter().map(|&k| ranked[k].pattern.to_string()).collect();
            println!(
                "{mode:?}/{sense:?}: score {:.2}, fell back {}, bins {}",
                sel.score,
                sel.fell_back,
                bins.join(" ")
            );
        }
    }
}
