//! Query workloads, oracle verification and benchmark records.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dijkstra::brute_force_isochrone;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
use crate::weight::Weight;

/// Reproducible list of `(source, tau in seconds)` queries.
///
/// Sources come from SplitMix64 (increment `0x9E37_79B9_7F4A_7C15`, output
/// mix multipliers `0xBF58_476D_1CE4_E5B9` and `0x94D0_49BB_1331_11EB`)
/// seeded with `seed`, drawn uniformly without modulo bias. Every source is
/// crossed with every limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryWorkload {
    pub seed: u64,
    pub queries: Vec<(u32, u32)>,
}

pub fn gen_workload(num_vertices: usize, count: usize, seed: u64, taus_s: &[u32]) -> Result<QueryWorkload> {
    if count == 0 {
        return Err(Error::Config("workload needs at least one source".into()));
    }
    if num_vertices == 0 {
        return Err(Error::validation("graph has no vertices"));
    }
    if taus_s.is_empty() {
        return Err(Error::Config("workload needs at least one time limit".into()));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let sources: Vec<u32> = (0..count).map(|_| rng.random_range(0..num_vertices as u32)).collect();
    let queries = sources
        .iter()
        .flat_map(|&s| taus_s.iter().map(move |&t| (s, t)))
        .collect();
    Ok(QueryWorkload { seed, queries })
}

/// Minutes to seconds, rejecting overflow.
pub fn minutes_to_seconds(minutes: &[u32]) -> Result<Vec<u32>> {
    minutes
        .iter()
        .map(|&m| {
            m.checked_mul(60)
                .ok_or_else(|| Error::Config(format!("time limit of {m} minutes overflows")))
        })
        .collect()
}

/// First disagreement between an algorithm and the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub algo: String,
    pub source: u32,
    pub tau_s: u32,
    /// Oracle edges the algorithm did not report.
    pub missing: Vec<(usize, Direction)>,
    /// Reported edges the oracle does not contain.
    pub extra: Vec<(usize, Direction)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub mismatch: Option<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

fn diff(expect: &IsochroneEdgeSet, got: &IsochroneEdgeSet) -> (Vec<(usize, Direction)>, Vec<(usize, Direction)>) {
    let missing = expect.iter().filter(|&(e, d)| got.direction(e) != Some(d)).collect();
    let extra = got.iter().filter(|&(e, d)| expect.direction(e) != Some(d)).collect();
    (missing, extra)
}

/// Runs every algorithm and the oracle on each query; stops at the first
/// mismatch.
pub fn verify<W: Weight>(
    graph: &Graph<W>,
    algos: &[&dyn IsochroneAlgorithm<W>],
    workload: &QueryWorkload,
    threads: usize,
) -> VerifyReport {
    let mut report = VerifyReport::default();
    for &(s, tau) in &workload.queries {
        let tau_w = W::from(tau).unwrap_or(W::INF);
        let expect = brute_force_isochrone(graph, s as usize, tau_w);
        for algo in algos {
            let got = algo.query_with_stats(s as usize, tau_w, threads).0;
            report.checked += 1;
            if got != expect {
                let (missing, extra) = diff(&expect, &got);
                report.mismatch = Some(Mismatch {
                    algo: algo.name().to_string(),
                    source: s,
                    tau_s: tau,
                    missing,
                    extra,
                });
                return report;
            }
        }
    }
    report
}

/// One benchmark row: medians over the sources of one `(algo, tau)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub algo: String,
    pub tau_s: u32,
    pub threads: usize,
    pub settled: u64,
    pub active_cells: u64,
    pub t_upward_ms: f64,
    pub t_scan_ms: f64,
    pub t_total_ms: f64,
    /// Combined hash of the result sets in workload order.
    pub result_hash: u64,
}

pub const CSV_HEADER: &str = "algo,tau_s,threads,settled,active_cells,t_upward_ms,t_scan_ms,t_total_ms,result_hash";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3},{:.3},{:.3},{:016x}",
            self.algo,
            self.tau_s,
            self.threads,
            self.settled,
            self.active_cells,
            self.t_upward_ms,
            self.t_scan_ms,
            self.t_total_ms,
            self.result_hash
        )
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn median<T: Copy + PartialOrd>(mut v: Vec<T>) -> T {
    v.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    v[v.len() / 2]
}

/// Times every algorithm on the workload, grouped by limit in order of
/// first appearance. Build time is not included.
pub fn bench<W: Weight>(
    algos: &[&dyn IsochroneAlgorithm<W>],
    workload: &QueryWorkload,
    threads: usize,
) -> Vec<BenchRecord> {
    let mut taus: Vec<u32> = Vec::new();
    for &(_, t) in &workload.queries {
        if !taus.contains(&t) {
            taus.push(t);
        }
    }
    let mut out = Vec::new();
    for algo in algos {
        for &tau in &taus {
            let mut runs: Vec<(QueryStats, Duration)> = Vec::new();
            let mut hash = crate::isochrone::Fnv1a::new();
            for &(s, t) in workload.queries.iter().filter(|q| q.1 == tau) {
                let start = std::time::Instant::now();
                let (set, stats) = algo.query_with_stats(s as usize, W::from(t).unwrap_or(W::INF), threads);
                let total = start.elapsed();
                hash.write(&set.hash64().to_le_bytes());
                runs.push((stats, total));
            }
            out.push(BenchRecord {
                algo: algo.name().to_string(),
                tau_s: tau,
                threads,
                settled: median(runs.iter().map(|r| r.0.settled).collect()),
                active_cells: median(runs.iter().map(|r| r.0.active_cells).collect()),
                t_upward_ms: median(runs.iter().map(|r| ms(r.0.upward)).collect()),
                t_scan_ms: median(runs.iter().map(|r| ms(r.0.scan)).collect()),
                t_total_ms: median(runs.iter().map(|r| ms(r.1)).collect()),
                result_hash: hash.finish(),
            });
        }
    }
    out
}
