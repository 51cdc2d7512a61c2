//! Full solve with every diving criterion, reporting the proof status and
//! the search counters.
//!
//!     cargo run --release --example branch_and_price -- tests/data/t120_00.txt

use std::time::Duration;

use binpack::format::{parse_instance, Format};
use binpack::{canonicalize, solve, verify_solution, DivingCriterion, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = match std::env::args().nth(1) {
        Some(path) => parse_instance(&std::fs::read(path)?, Format::Auto)?,
        // Optimum 6 although the LP bound rounds up to 5.
        None => canonicalize(28, &[16, 16, 16, 14, 14, 14, 9, 9, 9, 6, 6, 6])?,
    };
    for criterion in DivingCriterion::ALL {
        let cfg = SolverConfig {
            criterion,
            time_limit: Duration::from_secs(60),
            ..SolverConfig::default()
        };
        let r = solve(&inst, &cfg);
        assert!(verify_solution(&inst, &r.solution).is_valid());
        println!(
            "{criterion:>3}: {} bins ({}), root LP {:.4}, gap {:?}, nodes {}, polluted {}, {:.2?}",
            r.optimum,
            if r.proved_optimal { "proved" } else { "not proved" },
            r.root_lp,
            r.root_gap,
            r.counters.n_total_node,
            r.counters.n_poll_node,
            r.wall_time,
        );
    }
    Ok(())
}
