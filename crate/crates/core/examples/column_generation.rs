//! Solves the LP relaxation of an instance by column generation and prints
//! the bound, the support of the LP solution and the loop statistics.
//!
//!     cargo run --release --example column_generation -- tests/data/t60_00.txt

use std::collections::HashSet;

use binpack::colgen::{generate_columns, initialize_pool, ColGenConfig};
use binpack::format::{parse_instance, Format};
use binpack::canonicalize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = match std::env::args().nth(1) {
        Some(path) => parse_instance(&std::fs::read(path)?, Format::Auto)?,
        None => canonicalize(100, &[72, 54, 34, 33, 19, 18])?,
    };
    let mut master = initialize_pool(&inst);
    println!("initial pool: {} columns", master.len());

    for sectional in [true, false] {
        let mut m = master.clone();
        let cfg = ColGenConfig {
            sectional,
            ..ColGenConfig::default()
        };
        let out = generate_columns(&mut m, &HashSet::new(), &cfg);
        println!(
            "sectional {:<5}: z_lp = {:.6}, bound {}, proven {}, {} rounds, {} columns, {} exact calls, pricing {:.2?}",
            sectional,
            out.z_lp,
            out.lower_bound,
            out.proven_optimal,
            out.stats.rounds,
            out.stats.columns_generated,
            out.stats.exact_pricing_calls,
            out.stats.pricing_time,
        );
    }

    let out = generate_columns(&mut master, &HashSet::new(), &ColGenConfig::default());
    println!("LP support:");
    for (pattern, value) in out.support(&master).take(12) {
        println!("  {value:.4} x {pattern}");
    }
    Ok(())
}
