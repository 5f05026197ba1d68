//! End-to-end symmetry breaking and the original-vs-augmented benchmark.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::automorphism::{detect_symmetries, GeneratorSet};
use crate::formula::{Formula, Variant};
use crate::graph::{EncodeMode, GraphError};
use crate::sbp::{generate_sbps, Augmented};
use crate::solver::{solve_bnb, Budget, OptResult, Status};

#[derive(Clone, Copy, Debug, Default)]
pub struct SbpOptions {
    pub mode: EncodeMode,
    /// Use only the first `n` generators.
    pub max_generators: Option<usize>,
}

/// Detects symmetries of `f` and appends their predicates.
pub fn break_symmetries(
    f: &Formula,
    opts: &SbpOptions,
) -> Result<(GeneratorSet, Augmented), GraphError> {
    let mut gs = detect_symmetries(f, opts.mode)?;
    if let Some(n) = opts.max_generators {
        gs.truncate(n);
    }
    let aug = generate_sbps(f, &gs.generators);
    Ok((gs, aug))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub name: String,
    pub variant: Variant,
    pub cls_sbp: usize,
    /// Seconds to solve the original instance.
    pub orig_time: f64,
    /// Seconds for detection, predicate generation and solving.
    pub sbp_time: f64,
    pub orig_nodes: u64,
    pub sbp_nodes: u64,
    pub orig_cost: Option<u64>,
    pub sbp_cost: Option<u64>,
    pub orig_timeout: bool,
    pub sbp_timeout: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub time_limit: Duration,
    pub sbp: SbpOptions,
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            time_limit: Duration::from_secs(1000),
            sbp: SbpOptions::default(),
            workers: 1,
        }
    }
}

fn timed_solve(f: &Formula, limit: Duration) -> (OptResult, f64, bool) {
    let t = Instant::now();
    let r = solve_bnb(
        f,
        Budget {
            max_nodes: None,
            time_limit: Some(limit),
        },
    );
    let timeout = r.status == Status::Incomplete;
    let secs = if timeout {
        limit.as_secs_f64()
    } else {
        t.elapsed().as_secs_f64()
    };
    (r, secs, timeout)
}

/// Solves `f` as is and with symmetry-breaking predicates.
///
/// Aborted solves report the time limit as their time.
pub fn bench_instance(name: &str, f: &Formula, cfg: &BenchConfig) -> Result<BenchRecord, String> {
    let (orig, orig_time, orig_timeout) = timed_solve(f, cfg.time_limit);

    let t = Instant::now();
    let (_, aug) = break_symmetries(f, &cfg.sbp).map_err(|e| e.to_string())?;
    let remaining = cfg.time_limit.saturating_sub(t.elapsed());
    let (sbp, _, solve_timeout) = timed_solve(&aug.formula, remaining);
    let sbp_timeout = solve_timeout || remaining.is_zero();
    let sbp_time = if sbp_timeout {
        cfg.time_limit.as_secs_f64()
    } else {
        t.elapsed().as_secs_f64()
    };

    Ok(BenchRecord {
        name: name.to_string(),
        variant: f.variant(),
        cls_sbp: aug.cls_sbp(),
        orig_time,
        sbp_time,
        orig_nodes: orig.nodes,
        sbp_nodes: sbp.nodes,
        orig_cost: orig.cost,
        sbp_cost: sbp.cost,
        orig_timeout,
        sbp_timeout,
    })
}

pub type BenchRow = Result<BenchRecord, (String, String)>;

/// Benchmarks every instance; rows come back in input order regardless of
/// the number of workers. Load failures are passed through as errors.
pub fn run_bench(items: &[(String, Result<Formula, String>)], cfg: &BenchConfig) -> Vec<BenchRow> {
    let rows: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; items.len()]);
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::SeqCst);
        let Some((name, f)) = items.get(i) else { break };
        let row = match f {
            Ok(f) => bench_instance(name, f, cfg).map_err(|e| (name.clone(), e)),
            Err(e) => Err((name.clone(), e.clone())),
        };
        rows.lock().unwrap()[i] = Some(row);
    };
    std::thread::scope(|s| {
        for _ in 0..cfg.workers.max(1) {
            s.spawn(work);
        }
    });
    rows.into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every row filled"))
        .collect()
}

pub const CSV_HEADER: &str = "name,variant,cls_sbp,orig_time,sbp_time,orig_nodes,sbp_nodes";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{},{}",
            r.name, r.variant, r.cls_sbp, r.orig_time, r.sbp_time, r.orig_nodes, r.sbp_nodes
        );
    }
    out
}

/// Right-aligned text table with the same columns as the CSV.
pub fn to_table(records: &[BenchRecord]) -> String {
    let header: Vec<String> = CSV_HEADER.split(',').map(str::to_string).collect();
    let mut rows = vec![header];
    for r in records {
        rows.push(vec![
            r.name.clone(),
            r.variant.to_string(),
            r.cls_sbp.to_string(),
            format!("{:.3}", r.orig_time),
            format!("{:.3}", r.sbp_time),
            r.orig_nodes.to_string(),
            r.sbp_nodes.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}
