//! Runs the solver over a directory of instance files and writes CSV and
//! JSON reports, as the `binpack-bench` binary does.
//!
//!     cargo run --release --example benchmark_report -- tests/data /tmp/report

use std::path::PathBuf;

use binpack::bench::{filter_trivial, run_benchmark, BenchOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let input = PathBuf::from(args.next().unwrap_or_else(|| "tests/data".into()));
    let out = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().join("binpack-report").display().to_string()));

    let report = run_benchmark(&[input], &BenchOptions::default())?;
    report.write(&out)?;
    for r in &report.records {
        match (r.optimum, &r.error) {
            (Some(opt), _) => println!(
                "{:<20} {:>4} bins proved={} nodes={} time={:.3}s",
                r.instance, opt, r.proved, r.n_total_node, r.time_s
            ),
            (None, err) => println!("{:<20} failed: {}", r.instance, err.as_deref().unwrap_or("no solution")),
        }
    }
    for c in &report.classes {
        println!(
            "class {}: {}/{} proved, avg {:.3}s, avg root columns {:.1}",
            c.class, c.proved, c.instances, c.avg_time_s, c.avg_n_col_root
        );
    }
    println!("{} non-trivial instances", filter_trivial(&report.records).len());
    println!("reports written to {}", out.display());
    Ok(())
}
