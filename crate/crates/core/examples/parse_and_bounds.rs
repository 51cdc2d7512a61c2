//! Parses an instance (a file path argument, or a built-in one) and prints
//! the combinatorial lower bounds next to the three constructive packings.
//!
//!     cargo run --example parse_and_bounds -- tests/data/u120_00.txt

use binpack::format::{parse_instance, to_csp_string, Format};
use binpack::heuristics::{best_fit_decreasing, first_fit_n, l1_bound, l2_bound, subset_sum_n_heuristic};
use binpack::instance::verify_solution;

const BUILT_IN: &str = "6\n100\n72\n54\n34\n33\n19\n18\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => BUILT_IN.as_bytes().to_vec(),
    };
    let inst = parse_instance(&bytes, Format::Auto)?;
    println!(
        "capacity {}, {} distinct weights, {} items",
        inst.capacity(),
        inst.len(),
        inst.total_units()
    );
    println!("as cutting stock:\n{}", to_csp_string(&inst));
    println!("L1 = {}, L2 = {}", l1_bound(&inst), l2_bound(&inst));

    let weights = inst.weights();
    for (name, sol) in [
        ("best fit decreasing", best_fit_decreasing(&inst)),
        ("first fit, large items first", first_fit_n(&inst)),
        ("subset-sum fill", subset_sum_n_heuristic(&inst)),
    ] {
        assert!(verify_solution(&inst, &sol).is_valid());
        println!("{name}: {} bins", sol.objective());
        for bin in sol.bins.iter().take(8) {
            let load = bin.counts.total_weight(&weights);
            println!("  {} x {}  (load {load})", bin.load, bin.counts);
        }
    }
    Ok(())
}
