//! Deterministic benchmark harness: seeded instance sweeps, per-row solver
//! results with oracle comparison where the instance is small enough, and
//! CSV/JSON reports that are byte-identical across reruns (timings are
//! deliberately excluded).

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use serde::Serialize;

use ftb_core::connectivity::is_k_connected;
use ftb_core::solve::{
    solve_kmcds, Caps, DsSolverKind, FallbackRung, ProblemSpec, DEFAULT_ORACLE_NODE_CAP,
};
use ftb_core::steiner::{derive_edge_weights, SkcsSolverKind};
use ftb_core::udg::{random_instance, UnitDiskGraph};

/// SplitMix64: the standard 64-bit mixer, used to derive per-row seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Square side for `n` points so the expected average degree suits the
/// requested connectivity (denser for larger k, so rejection sampling
/// converges quickly).
pub fn side_for(n: usize, k: u32) -> f64 {
    let target_degree = match k {
        0 | 1 => 4.0,
        2 => 4.8,
        _ => 5.6,
    };
    (n as f64 * std::f64::consts::PI / target_degree).sqrt().max(1.2)
}

/// Draws attempted at each density step before shrinking the square.
const SAMPLE_BATCH: usize = 100;
/// Side shrink factor between batches.
const SAMPLE_SHRINK: f64 = 0.88;
/// At this side every pair is within unit distance (0.7·√2 < 1), so the
/// draw is complete and (n−1)-connected: the escalation always terminates.
const COMPLETE_SIDE: f64 = 0.70;

/// Deterministically sample a k-connected instance: walk the SplitMix64
/// sequence from `seed` until a draw is k-connected, shrinking the square
/// between batches so sparse (n, k) combinations still converge. Returns
/// the graph and the seed that produced it.
pub fn sample_k_connected(
    n: usize,
    k: u32,
    seed: u64,
    w_lo: f64,
    w_hi: f64,
) -> Result<(UnitDiskGraph, u64)> {
    if n <= k as usize {
        bail!("a {k}-connected graph needs at least {} nodes, got {n}", k + 1);
    }
    let mut x = seed;
    let mut side = side_for(n, k);
    loop {
        for _ in 0..SAMPLE_BATCH {
            x = splitmix64(x);
            let g = random_instance(n, side, w_lo, w_hi, x)?;
            if is_k_connected(&g, k) {
                return Ok((g, x));
            }
        }
        if side <= COMPLETE_SIDE {
            bail!("no {k}-connected instance with n = {n} found near seed {seed}");
        }
        side = (side * SAMPLE_SHRINK).max(COMPLETE_SIDE);
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchConfig {
    pub count: usize,
    pub seed: u64,
    pub n_lo: usize,
    pub n_hi: usize,
    pub ds: DsSolverKind,
    pub skcs: SkcsSolverKind,
    pub oracle_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            count: 24,
            seed: 1,
            n_lo: 8,
            n_hi: 14,
            ds: DsSolverKind::Greedy,
            skcs: SkcsSolverKind::Augment,
            oracle_cap: DEFAULT_ORACLE_NODE_CAP,
        }
    }
}

/// Ks cycled through the sweep.
pub const BENCH_KS: [u32; 3] = [1, 2, 3];

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchRow {
    pub row: usize,
    pub seed: u64,
    pub n: usize,
    pub edges: usize,
    pub k: u32,
    pub m: u32,
    pub weight: f64,
    pub ds_weight: f64,
    pub connect_weight: f64,
    pub oracle_weight: Option<f64>,
    pub ratio: Option<f64>,
    /// (2/k)·w(E(F)) − c(V(F) \ D) under phase-two weights; present when
    /// block extraction succeeded, and never negative then.
    pub cost_bound_slack: Option<f64>,
    pub fallback: FallbackRung,
    pub feasible: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Aggregate {
    pub k: u32,
    pub m: u32,
    pub rows: usize,
    pub feasible: usize,
    pub ratio_max: Option<f64>,
    pub ratio_mean: Option<f64>,
    pub slack_min: Option<f64>,
    pub fallback_primary: usize,
    pub fallback_union: usize,
    pub fallback_full: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<Aggregate>,
}

/// Run the sweep: row i uses n cycling over [n_lo, n_hi], k cycling over
/// {1,2,3}, and m alternating between k and k+1; instances resample until
/// k-connected. Everything is a pure function of the config.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.n_lo < 4 || cfg.n_hi < cfg.n_lo {
        bail!("need 4 <= n_lo <= n_hi, got [{}, {}]", cfg.n_lo, cfg.n_hi);
    }
    let mut rows = Vec::with_capacity(cfg.count);
    for row in 0..cfg.count {
        let k = BENCH_KS[row % BENCH_KS.len()];
        let m = k + (row / BENCH_KS.len()) as u32 % 2;
        let span = cfg.n_hi - cfg.n_lo + 1;
        let row_seed = splitmix64(cfg.seed ^ (row as u64).wrapping_mul(0xA24BAED4963EE407));
        let n = cfg.n_lo + (row_seed % span as u64) as usize;
        let (g, seed_used) = sample_k_connected(n, k, row_seed, 0.5, 2.0)?;
        rows.push(bench_row(row, seed_used, &g, k, m, cfg)?);
    }
    let aggregates = aggregate(&rows);
    Ok(BenchReport { config: *cfg, rows, aggregates })
}

fn bench_row(
    row: usize,
    seed: u64,
    g: &UnitDiskGraph,
    k: u32,
    m: u32,
    cfg: &BenchConfig,
) -> Result<BenchRow> {
    let spec = ProblemSpec {
        k,
        m,
        ds: cfg.ds,
        skcs: cfg.skcs,
        allow_m_lt_k: false,
        with_oracle: g.n() <= cfg.oracle_cap,
        caps: Caps { oracle_nodes: cfg.oracle_cap, ..Caps::default() },
    };
    let report = solve_kmcds(g, &spec)?;
    let cost_bound_slack = if report.phase_connect.extraction_ok {
        let mut costs: Vec<f64> = g.nodes().iter().map(|p| p.weight).collect();
        for &d in &report.phase_ds.set {
            costs[d as usize] = 0.0;
        }
        let weights = derive_edge_weights(g, &costs)?;
        let w_f: f64 = report
            .phase_connect
            .edges
            .iter()
            .map(|&e| weights[e as usize])
            .sum();
        Some((2.0 / k as f64) * w_f - report.phase_connect.weight)
    } else {
        None
    };
    Ok(BenchRow {
        row,
        seed,
        n: g.n(),
        edges: g.edges().len(),
        k,
        m,
        weight: report.weight,
        ds_weight: report.phase_ds.weight,
        connect_weight: report.phase_connect.weight,
        oracle_weight: report.oracle_weight,
        ratio: report.empirical_ratio,
        cost_bound_slack,
        fallback: report.meta.fallback,
        feasible: report.feasible,
    })
}

fn aggregate(rows: &[BenchRow]) -> Vec<Aggregate> {
    let mut by_km: BTreeMap<(u32, u32), Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by_km.entry((r.k, r.m)).or_default().push(r);
    }
    by_km
        .into_iter()
        .map(|((k, m), group)| {
            let ratios: Vec<f64> = group.iter().filter_map(|r| r.ratio).collect();
            let slacks: Vec<f64> = group.iter().filter_map(|r| r.cost_bound_slack).collect();
            Aggregate {
                k,
                m,
                rows: group.len(),
                feasible: group.iter().filter(|r| r.feasible).count(),
                ratio_max: ratios.iter().copied().reduce(f64::max),
                ratio_mean: if ratios.is_empty() {
                    None
                } else {
                    Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
                },
                slack_min: slacks.iter().copied().reduce(f64::min),
                fallback_primary: count_rung(&group, FallbackRung::Primary),
                fallback_union: count_rung(&group, FallbackRung::ChosenSetUnion),
                fallback_full: count_rung(&group, FallbackRung::FullVertexSet),
            }
        })
        .collect()
}

fn count_rung(group: &[&BenchRow], rung: FallbackRung) -> usize {
    group.iter().filter(|r| r.fallback == rung).count()
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV rows (header + one line per instance). Optional fields are empty,
/// never zero, when the oracle did not run or extraction failed.
pub fn to_csv(report: &BenchReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "row", "seed", "n", "edges", "k", "m", "weight", "ds_weight", "connect_weight",
        "oracle_weight", "ratio", "cost_bound_slack", "fallback", "feasible",
    ])?;
    for r in &report.rows {
        w.write_record([
            r.row.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.edges.to_string(),
            r.k.to_string(),
            r.m.to_string(),
            r.weight.to_string(),
            r.ds_weight.to_string(),
            r.connect_weight.to_string(),
            opt_field(r.oracle_weight),
            opt_field(r.ratio),
            opt_field(r.cost_bound_slack),
            format!("{:?}", r.fallback),
            r.feasible.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn to_json(report: &BenchReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}
