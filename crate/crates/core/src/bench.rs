//! Benchmark workloads, CSV output and log-log scaling fits.
//!
//! Every size runs in a fresh engine, so each row reports the table
//! footprint of exactly one query.

use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copier::{HashFlavor, SharingMode};
use crate::programs;
use crate::tabling::{Engine, EngineError, LoadError};
use crate::terms::Cell;

pub const BENCHMARKS: [&str; 6] =
    ["is_list_repeat", "is_list_random", "edit_repeat", "edit_random", "create_list", "path_cyclic"];

pub const DEFAULT_SEED: u64 = 2012;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown benchmark '{0}' (expected one of: {list})", list = BENCHMARKS.join(", "))]
    Unknown(String),
    #[error("size must be at least 1")]
    ZeroSize,
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("scaling fit needs at least 4 positive points, got {0}")]
    TooFewPoints(usize),
    #[error("no metric named '{0}'")]
    UnknownMetric(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub benchmark: String,
    pub n: usize,
    pub mode: String,
    pub hash: String,
    pub seconds: f64,
    pub cells: u64,
    pub subgoals: u64,
    pub answers: u64,
    pub hash_combines: u64,
    pub traversal_steps: u64,
    pub hits: u64,
    pub misses: u64,
    pub comparisons: u64,
}

impl BenchRow {
    /// Numeric column by CSV name. `work` is `hash_combines + traversal_steps`.
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "seconds" => self.seconds,
            "cells" => self.cells as f64,
            "subgoals" => self.subgoals as f64,
            "answers" => self.answers as f64,
            "hash_combines" => self.hash_combines as f64,
            "traversal_steps" => self.traversal_steps as f64,
            "work" => (self.hash_combines + self.traversal_steps) as f64,
            "hits" => self.hits as f64,
            "misses" => self.misses as f64,
            "comparisons" => self.comparisons as f64,
            _ => return None,
        })
    }
}

pub fn default_sizes(name: &str) -> Vec<usize> {
    match name {
        "edit_repeat" | "edit_random" => vec![30, 60, 90, 120],
        "create_list" => vec![200, 400, 800, 1600],
        "path_cyclic" => vec![50, 100, 200, 400],
        _ => (1..=8).map(|k| k * 500).collect(),
    }
}

pub fn gen_repeated_list(n: usize) -> Vec<i64> {
    vec![1; n]
}

/// `n` integers in `[0, 2^30)` drawn from ChaCha8 seeded with `seed`.
pub fn gen_random_list(n: usize, seed: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.next_u64() >> 34) as i64).collect()
}

/// A ring `i -> i+1 (mod n)` plus `n / 4` random chords.
pub fn gen_ring_with_chords(n: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for _ in 0..n / 4 {
        let a = (rng.next_u64() % n as u64) as usize;
        let b = (rng.next_u64() % n as u64) as usize;
        edges.push((a, b));
    }
    edges
}

/// Runs benchmark `name` once per size.
pub fn run_benchmark(
    name: &str,
    sizes: &[usize],
    mode: SharingMode,
    hash: HashFlavor,
    seed: u64,
) -> Result<Vec<BenchRow>, BenchError> {
    if !BENCHMARKS.contains(&name) {
        return Err(BenchError::Unknown(name.to_string()));
    }
    sizes.iter().map(|&n| run_one(name, n, mode, hash, seed)).collect()
}

pub fn run_one(name: &str, n: usize, mode: SharingMode, hash: HashFlavor, seed: u64) -> Result<BenchRow, BenchError> {
    if n == 0 {
        return Err(BenchError::ZeroSize);
    }
    let mut engine = match name {
        "is_list_repeat" | "is_list_random" => Engine::from_source(programs::IS_LIST, mode, hash)?,
        "edit_repeat" | "edit_random" => Engine::from_source(programs::EDIT, mode, hash)?,
        "create_list" => Engine::from_source(programs::CREATE_LIST, mode, hash)?,
        "path_cyclic" => Engine::from_source(&programs::path_program(&gen_ring_with_chords(n, seed)), mode, hash)?,
        _ => return Err(BenchError::Unknown(name.to_string())),
    };
    let lists: Vec<Vec<i64>> = match name {
        "is_list_repeat" => vec![gen_repeated_list(n)],
        "is_list_random" => vec![gen_random_list(n, seed)],
        "edit_repeat" => vec![gen_repeated_list(n), gen_repeated_list(n)],
        "edit_random" => vec![gen_random_list(n, seed), gen_random_list(n, seed.wrapping_add(1))],
        _ => Vec::new(),
    };
    let solutions = engine.query_with(|store| {
        let mut args: Vec<Cell> = lists.iter().map(|l| store.make_int_list(l).expect("generated values fit")).collect();
        let (functor, arity) = match name {
            "is_list_repeat" | "is_list_random" => ("is_list", 1),
            "edit_repeat" | "edit_random" => ("edit", 3),
            "create_list" => {
                args.push(Cell::int(n as i64).expect("size fits"));
                ("create_list", 2)
            }
            _ => {
                args.push(store.make_atom("n0"));
                ("path", 2)
            }
        };
        while args.len() < arity {
            args.push(store.new_var());
        }
        let sym = store.symbols.intern(functor, arity);
        (vec![store.make_struct(sym, &args).expect("arity matches")], Vec::new())
    });
    solutions.count()?;
    let st = engine.statistics();
    Ok(BenchRow {
        benchmark: name.to_string(),
        n,
        mode: mode.name().to_string(),
        hash: hash.name().to_string(),
        seconds: st.elapsed.as_secs_f64(),
        cells: st.used_cells as u64,
        subgoals: st.subgoals as u64,
        answers: st.answers as u64,
        hash_combines: st.copy.hash_combines,
        traversal_steps: st.copy.traversal_steps,
        hits: st.terms.hits,
        misses: st.terms.misses,
        comparisons: st.comparisons(),
    })
}

pub fn write_csv(rows: &[BenchRow], path: &Path) -> Result<(), BenchError> {
    let err = |source| BenchError::Csv { path: path.display().to_string(), source };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    write_rows(&mut w, rows).map_err(err)?;
    w.flush().map_err(|e| err(e.into()))
}

/// CSV text for `rows`, header first.
pub fn to_csv_string(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_rows(&mut w, rows).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn write_rows<W: std::io::Write>(w: &mut csv::Writer<W>, rows: &[BenchRow]) -> Result<(), csv::Error> {
    if rows.is_empty() {
        // serde writes the header with the first record only.
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(())
}

pub const CSV_HEADER: [&str; 13] = [
    "benchmark",
    "n",
    "mode",
    "hash",
    "seconds",
    "cells",
    "subgoals",
    "answers",
    "hash_combines",
    "traversal_steps",
    "hits",
    "misses",
    "comparisons",
];

pub fn read_csv(path: &Path) -> Result<Vec<BenchRow>, BenchError> {
    let err = |source| BenchError::Csv { path: path.display().to_string(), source };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().collect::<Result<_, _>>().map_err(err)
}

/// Least-squares slope of `ln y` against `ln x`. Points with a
/// non-positive coordinate are dropped.
pub fn fit_scaling(points: impl IntoIterator<Item = (f64, f64)>) -> Result<f64, BenchError> {
    let pts: Vec<(f64, f64)> =
        points.into_iter().filter(|&(x, y)| x > 0.0 && y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 4 {
        return Err(BenchError::TooFewPoints(pts.len()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingVerdict {
    pub metric: String,
    pub slope: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl std::fmt::Display for ScalingVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: slope {:.3} in [{}, {}]: {}",
            self.metric,
            self.slope,
            self.lo,
            self.hi,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

/// Fits `metric` over `rows` against `n` and checks the slope bounds.
pub fn scaling_verdict(rows: &[BenchRow], metric: &str, lo: f64, hi: f64) -> Result<ScalingVerdict, BenchError> {
    let pts = rows
        .iter()
        .map(|r| r.metric(metric).map(|y| (r.n as f64, y)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| BenchError::UnknownMetric(metric.to_string()))?;
    let slope = fit_scaling(pts)?;
    Ok(ScalingVerdict { metric: metric.to_string(), slope, lo, hi, pass: lo <= slope && slope <= hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn generators() {
        assert_eq!(gen_repeated_list(3), [1, 1, 1]);
        assert_eq!(gen_random_list(50, 7), gen_random_list(50, 7));
        assert_ne!(gen_random_list(50, 7), gen_random_list(50, 8));
        let l = gen_random_list(1000, 1);
        assert!(l.iter().all(|&v| (0..1 << 30).contains(&v)));
        let mut d = l.clone();
        d.sort();
        d.dedup();
        assert!(d.len() > 995);
    }

    #[test]
    fn exact_power_laws() {
        let lin = fit_scaling((1..=5).map(|n| (n as f64, 3.0 * n as f64))).unwrap();
        let quad = fit_scaling((1..=5).map(|n| (n as f64, (n * n) as f64))).unwrap();
        assert!((lin - 1.0).abs() < 1e-12);
        assert!((quad - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_points_are_dropped() {
        let pts = [(1.0, 0.0), (2.0, 4.0), (3.0, 9.0), (4.0, 16.0), (5.0, -1.0)];
        assert!(matches!(fit_scaling(pts), Err(BenchError::TooFewPoints(3))));
    }

    #[test]
    fn unknown_benchmark() {
        let r = run_benchmark("nope", &[1], SharingMode::None, HashFlavor::Full, 0);
        assert!(matches!(r, Err(BenchError::Unknown(_))));
    }

    #[test]
    fn rows_are_deterministic_except_time() {
        let run = || {
            let mut rows = run_benchmark("edit_random", &[5, 10], SharingMode::Enhanced, HashFlavor::Full, 3).unwrap();
            rows.iter_mut().for_each(|r| r.seconds = 0.0);
            rows
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn every_benchmark_runs() {
        for name in BENCHMARKS {
            let rows = run_benchmark(name, &[4, 8], SharingMode::HashCons, HashFlavor::Full, 1).unwrap();
            assert_eq!(rows.len(), 2);
            assert!(rows[0].cells <= rows[1].cells, "{name}");
            assert!(rows.iter().all(|r| r.answers > 0), "{name}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), CSV_HEADER.join(",") + "\n");
        let rows = run_benchmark("is_list_random", &[10, 20, 30], SharingMode::None, HashFlavor::Full, 9).unwrap();
        write_csv(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(read_csv(&path).unwrap(), rows);
    }

    proptest! {
        #[test]
        fn slope_recovers_exponent(k in 0.5f64..3.0, c in 0.1f64..100.0) {
            let s = fit_scaling((1..=6).map(|n| (n as f64 * 100.0, c * (n as f64 * 100.0).powf(k)))).unwrap();
            prop_assert!((s - k).abs() < 1e-9);
        }
    }
}
