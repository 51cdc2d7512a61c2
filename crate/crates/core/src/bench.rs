//! Batch runs over instance files with CSV and JSON reports.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::bnp::{solve, SolverConfig};
use crate::format::{parse_instance, Format};
use crate::heuristics::{best_fit_decreasing, lower_bound};
use crate::instance::{verify_solution, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub solver: SolverConfig,
    pub format: Format,
    /// Worker threads; values below 2 run sequentially.
    pub jobs: usize,
    /// Skip instances whose lower bound equals the BFD bin count.
    pub exclude_trivial: bool,
    /// Class label for every instance instead of the parent directory name.
    pub class: Option<String>,
    /// With `false`, times are written as zero so reruns are byte-identical.
    pub record_time: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            solver: SolverConfig::default(),
            format: Format::Auto,
            jobs: 1,
            exclude_trivial: false,
            class: None,
            record_time: true,
        }
    }
}

/// One row per instance file. Failed files carry `error` and zero counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub class: String,
    pub n_col_root: usize,
    pub n_exact_root: usize,
    pub n_total_node: usize,
    pub n_poll_node: usize,
    pub time_s: f64,
    pub proved: bool,
    pub optimum: Option<u64>,
    pub lower_bound: Option<u64>,
    pub bfd: Option<u64>,
    pub trivial: bool,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    pub instances: usize,
    pub failures: usize,
    pub proved: usize,
    /// Averages over successfully parsed instances.
    pub avg_time_s: f64,
    pub avg_n_col_root: f64,
    pub avg_n_exact_root: f64,
    pub avg_n_total_node: f64,
    pub avg_n_poll_node: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<RunRecord>,
    pub classes: Vec<ClassSummary>,
}

impl BenchReport {
    pub fn all_proved(&self) -> bool {
        self.records.iter().all(|r| r.proved)
    }

    /// Writes `runs.csv`, `classes.csv` and `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        write_csv(&dir.join("runs.csv"), &self.records)?;
        write_csv(&dir.join("classes.csv"), &self.classes)?;
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("report.json"), json + "\n")
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// True when the combinatorial lower bound already matches BFD.
pub fn is_trivial(inst: &Instance) -> bool {
    lower_bound(inst) == best_fit_decreasing(inst).objective()
}

/// Records of non-trivial instances.
pub fn filter_trivial(records: &[RunRecord]) -> Vec<RunRecord> {
    records.iter().filter(|r| !r.trivial).cloned().collect()
}

/// Expands directories (recursively) into their files, sorted by path.
pub fn collect_files(paths: &[PathBuf]) -> io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)?.map(|e| e.map(|e| e.path())).collect::<io::Result<_>>()?;
            entries.sort();
            out.extend(collect_files(&entries)?);
        } else {
            out.push(p.clone());
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn class_of(path: &Path) -> String {
    path.parent()
        .and_then(|d| d.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn run_one(path: &Path, options: &BenchOptions) -> Option<RunRecord> {
    let mut record = RunRecord {
        instance: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        class: options.class.clone().unwrap_or_else(|| class_of(path)),
        n_col_root: 0,
        n_exact_root: 0,
        n_total_node: 0,
        n_poll_node: 0,
        time_s: 0.0,
        proved: false,
        optimum: None,
        lower_bound: None,
        bfd: None,
        trivial: false,
        error: None,
    };
    let parsed = fs::read(path)
        .map_err(|e| e.to_string())
        .and_then(|bytes| parse_instance(&bytes, options.format).map_err(|e| e.to_string()));
    let inst = match parsed {
        Ok(inst) => inst,
        Err(e) => {
            record.error = Some(e);
            return Some(record);
        }
    };
    let lb = lower_bound(&inst);
    let bfd = best_fit_decreasing(&inst).objective();
    record.trivial = lb == bfd;
    if options.exclude_trivial && record.trivial {
        return None;
    }
    let report = solve(&inst, &options.solver);
    debug_assert!(verify_solution(&inst, &report.solution).is_valid());
    record.n_col_root = report.counters.n_col_root;
    record.n_exact_root = report.counters.n_exact_root;
    record.n_total_node = report.counters.n_total_node;
    record.n_poll_node = report.counters.n_poll_node;
    record.time_s = if options.record_time { report.wall_time.as_secs_f64() } else { 0.0 };
    record.proved = report.proved_optimal;
    record.optimum = Some(report.optimum);
    record.lower_bound = Some(report.lower_bound);
    record.bfd = Some(bfd);
    Some(record)
}

/// Solves every file under `paths`. Unreadable or malformed files become
/// failure rows; the run continues.
pub fn run_benchmark(paths: &[PathBuf], options: &BenchOptions) -> io::Result<BenchReport> {
    let files = collect_files(paths)?;
    let slots: Vec<Mutex<Option<RunRecord>>> = files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let k = next.fetch_add(1, Ordering::Relaxed);
        let Some(path) = files.get(k) else {
            break;
        };
        *slots[k].lock().expect("slot lock") = run_one(path, options);
    };
    let jobs = options.jobs.max(1).min(files.len().max(1));
    if jobs == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..jobs {
                s.spawn(work);
            }
        });
    }
    let records: Vec<RunRecord> = slots
        .into_iter()
        .filter_map(|m| m.into_inner().expect("slot lock"))
        .collect();
    let classes = summarize(&records);
    Ok(BenchReport { records, classes })
}

/// Per-class aggregates, sorted by class label.
pub fn summarize(records: &[RunRecord]) -> Vec<ClassSummary> {
    let mut groups: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(&r.class).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(class, rows)| {
            let ok: Vec<&&RunRecord> = rows.iter().filter(|r| !r.failed()).collect();
            let avg = |f: &dyn Fn(&RunRecord) -> f64| {
                if ok.is_empty() {
                    0.0
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            ClassSummary {
                class: class.to_string(),
                instances: rows.len(),
                failures: rows.len() - ok.len(),
                proved: ok.iter().filter(|r| r.proved).count(),
                avg_time_s: avg(&|r| r.time_s),
                avg_n_col_root: avg(&|r| r.n_col_root as f64),
                avg_n_exact_root: avg(&|r| r.n_exact_root as f64),
                avg_n_total_node: avg(&|r| r.n_total_node as f64),
                avg_n_poll_node: avg(&|r| r.n_poll_node as f64),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::canonicalize;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn corrupt_file_becomes_failure_row() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("demo");
        fs::create_dir(&dir).unwrap();
        write(&dir, "a.txt", "6\n100\n72\n54\n34\n33\n19\n18\n");
        write(&dir, "b.txt", "3\n10\n6\n5\n4\n");
        write(&dir, "c.txt", "2\n10\n7 1\n3 2\n");
        write(&dir, "d.txt", "4\n10\nx\n");
        let report = run_benchmark(std::slice::from_ref(&dir), &BenchOptions::default()).unwrap();
        assert_eq!(report.records.len(), 4);
        assert_eq!(report.records.iter().filter(|r| r.failed()).count(), 1);
        let a = &report.records[0];
        assert_eq!(a.instance, "a.txt");
        assert_eq!(a.class, "demo");
        assert_eq!(a.optimum, Some(3));
        assert!(a.proved);
        let c = &report.classes[0];
        assert_eq!((c.instances, c.failures, c.proved), (4, 1, 3));
    }

    #[test]
    fn empty_directory_gives_empty_report() {
        let tmp = tempfile::tempdir().unwrap();
        let report = run_benchmark(&[tmp.path().to_path_buf()], &BenchOptions::default()).unwrap();
        assert!(report.records.is_empty());
        assert!(report.classes.is_empty());
        report.write(&tmp.path().join("out")).unwrap();
        assert!(tmp.path().join("out/runs.csv").exists());
    }

    #[test]
    fn parallel_run_matches_sequential() {
        let tmp = tempfile::tempdir().unwrap();
        for (k, text) in ["3\n10\n6\n5\n4\n", "4\n20\n11\n10\n9\n9\n", "2\n5\n5\n5\n"].iter().enumerate() {
            write(tmp.path(), &format!("i{k}.txt"), text);
        }
        let base = BenchOptions {
            record_time: false,
            ..BenchOptions::default()
        };
        let seq = run_benchmark(&[tmp.path().to_path_buf()], &base).unwrap();
        let par = run_benchmark(
            &[tmp.path().to_path_buf()],
            &BenchOptions { jobs: 3, ..base },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn triviality() {
        let example = canonicalize(100, &[72, 54, 34, 33, 19, 18]).unwrap();
        assert!(is_trivial(&example));
        let single = canonicalize(10, &[3, 3, 3, 3, 3]).unwrap();
        assert!(is_trivial(&single));
        // BFD: {6,4} {6,4} {6,3,...}: here BFD opens an extra bin.
        let wasteful = canonicalize(20, &[9, 7, 7, 6, 6, 5]).unwrap();
        assert_eq!(lower_bound(&wasteful), 2);
        assert_eq!(best_fit_decreasing(&wasteful).objective(), 3);
        assert!(!is_trivial(&wasteful));
    }

    #[test]
    fn aggregates_recompute_from_rows() {
        let row = |class: &str, t: f64, proved: bool| RunRecord {
            instance: "x".into(),
            class: class.into(),
            n_col_root: 4,
            n_exact_root: 1,
            n_total_node: 2,
            n_poll_node: 0,
            time_s: t,
            proved,
            optimum: Some(1),
            lower_bound: Some(1),
            bfd: Some(1),
            trivial: true,
            error: None,
        };
        let rows = vec![row("a", 1.0, true), row("a", 3.0, false), row("b", 2.0, true)];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].avg_time_s, 2.0);
        assert_eq!(s[0].proved, 1);
        assert_eq!(filter_trivial(&rows).len(), 0);
    }
}
