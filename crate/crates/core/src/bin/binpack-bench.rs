use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use binpack::bench::{run_benchmark, BenchOptions};
use binpack::bnp::SolverConfig;
use binpack::diving::{BatchMode, DivingCriterion};
use binpack::format::Format;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Solve bin packing instances exactly and write per-instance and
/// per-class reports.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Instance files or directories (searched recursively).
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Input format: bpp (one weight per line), csp (weight demand pairs) or auto.
    #[arg(long, default_value = "auto")]
    format: Format,
    /// Diving and branching criterion: hv, l0, l2 or ls.
    #[arg(long, default_value = "l2")]
    criterion: DivingCriterion,
    /// Time limit per instance in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Initial decrement below a forbidden bin's profit.
    #[arg(long, default_value_t = 1e-5)]
    delta0: f64,
    /// Batch diving at the root and every this many depths; 0 disables it.
    #[arg(long, default_value_t = 3)]
    batch_stride: usize,
    /// Batch demand constraints: eq or ineq.
    #[arg(long, default_value = "ineq")]
    batch_mode: BatchMode,
    /// Price over single-copy patterns before the full knapsack.
    #[arg(long, value_enum, default_value = "on")]
    sectional: Switch,
    /// Worker threads, one instance each.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report directory.
    #[arg(long, default_value = "report")]
    out: PathBuf,
    /// Skip instances whose lower bound equals the BFD bin count.
    #[arg(long)]
    exclude_trivial: bool,
    /// Class label for every instance instead of the directory name.
    #[arg(long)]
    class: Option<String>,
    /// Exit with status 2 if any instance is left unproved.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if !(args.time_limit >= 0.0 && args.time_limit.is_finite()) {
        eprintln!("error: --time-limit must be a non-negative number of seconds");
        return ExitCode::FAILURE;
    }
    if !(args.delta0 > 0.0) {
        eprintln!("error: --delta0 must be positive");
        return ExitCode::FAILURE;
    }
    let options = BenchOptions {
        solver: SolverConfig {
            criterion: args.criterion,
            delta0: args.delta0,
            time_limit: Duration::from_secs_f64(args.time_limit),
            batch_stride: (args.batch_stride > 0).then_some(args.batch_stride),
            batch_mode: args.batch_mode,
            sectional: matches!(args.sectional, Switch::On),
            ..SolverConfig::default()
        },
        format: args.format,
        jobs: args.jobs,
        exclude_trivial: args.exclude_trivial,
        class: args.class,
        record_time: true,
    };
    let report = match run_benchmark(&args.paths, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = report.write(&args.out) {
        eprintln!("error: writing reports to {}: {e}", args.out.display());
        return ExitCode::FAILURE;
    }
    for r in &report.records {
        match (&r.error, r.optimum) {
            (Some(e), _) => println!("{:<32} failed: {e}", r.instance),
            (None, Some(opt)) => println!(
                "{:<32} {:>6} bins  {:<8} {:>8.3}s  nodes {}",
                r.instance,
                opt,
                if r.proved { "proved" } else { "open" },
                r.time_s,
                r.n_total_node
            ),
            (None, None) => {}
        }
    }
    if args.strict && !report.all_proved() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
