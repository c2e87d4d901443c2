//! `ftb` — fault-tolerant backbone toolkit for unit disk graphs.
//!
//! Exit codes: 0 success (and feasible where a verdict applies),
//! 2 infeasible (no backbone exists, or the checked set fails),
//! 3 validation or IO error.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ftb::bench::{run_bench, to_csv, to_json, BenchConfig};
use ftb::clock::SystemClock;
use ftb::io::{instance_to_json, load_instance, parse_node_list, save_instance};
use ftb_core::connectivity::k_block_tree;
use ftb_core::domset::{exact_mfold_ds, greedy_mfold_ds, DEFAULT_DS_NODE_CAP};
use ftb_core::mss::{
    check_mss_properties, degree_six_reduction, exact_k_mss, local_improve,
    reduce_to_minimal, DEFAULT_MSS_EDGE_CAP,
};
use ftb_core::solve::{
    exact_kmcds, solve_kmcds_with_clock, verify_kmcds, Caps, DsSolverKind, ProblemSpec,
    SolveError, DEFAULT_ORACLE_NODE_CAP,
};
use ftb_core::steiner::{solve_mnwkcsn, SkcsSolverKind, DEFAULT_SKCS_EDGE_CAP};
use ftb_core::udg::{fixtures, random_instance, EdgeSubgraph};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

#[derive(Parser)]
#[command(name = "ftb", version, about = "fault-tolerant backbone solver for unit disk graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DsArg {
    Greedy,
    Exact,
}

impl From<DsArg> for DsSolverKind {
    fn from(a: DsArg) -> Self {
        match a {
            DsArg::Greedy => DsSolverKind::Greedy,
            DsArg::Exact => DsSolverKind::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SkcsArg {
    Exact,
    Augment,
}

impl From<SkcsArg> for SkcsSolverKind {
    fn from(a: SkcsArg) -> Self {
        match a {
            SkcsArg::Exact => SkcsSolverKind::Exact,
            SkcsArg::Augment => SkcsSolverKind::Augment,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureArg {
    Sq4,
    Path3,
    Pent5,
    Hex7,
}

#[derive(Clone, Copy, ValueEnum)]
enum MssMethod {
    /// Exhaustive branch-and-bound optimum.
    Exact,
    /// Minimalisation plus angle-based local improvement.
    Minimal,
}

#[derive(Args)]
struct InstanceArg {
    /// Instance file: a JSON array of {id, x, y, w} node records.
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance (random or canonical fixture) as JSON.
    Gen {
        /// Node count for random generation.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Square side; defaults to a density suited to --k-connected.
        #[arg(long)]
        side: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        w_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        w_hi: f64,
        /// Resample until the instance is k-connected.
        #[arg(long)]
        k_connected: Option<u32>,
        /// Emit a canonical fixture instead of a random instance.
        #[arg(long, value_enum)]
        fixture: Option<FixtureArg>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-phase backbone solve: m-fold domination, then k-connection.
    Solve {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        m: u32,
        #[arg(long, value_enum, default_value = "greedy")]
        ds: DsArg,
        #[arg(long, value_enum, default_value = "augment")]
        skcs: SkcsArg,
        /// Solve even when m < k (the ratio guarantee is void).
        #[arg(long)]
        allow_m_lt_k: bool,
        /// Compare against the exhaustive solver when n fits the cap.
        #[arg(long)]
        with_oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_NODE_CAP)]
        oracle_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Check a node set for m-fold domination and induced k-connectivity.
    Verify {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        m: u32,
        /// Comma-separated node ids, e.g. 0,2,5.
        #[arg(long)]
        nodes: String,
        /// Also print the k-block tree of the induced subgraph.
        #[arg(long)]
        dump_blocks: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive minimum-weight backbone (small instances only).
    Oracle {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        k: u32,
        #[arg(short)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_ORACLE_NODE_CAP)]
        oracle_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Minimum node-weighted k-connected Steiner network over terminals.
    Steiner {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        k: u32,
        /// Comma-separated terminal ids.
        #[arg(long)]
        terminals: String,
        #[arg(long, value_enum, default_value = "augment")]
        skcs: SkcsArg,
        #[arg(long, default_value_t = DEFAULT_SKCS_EDGE_CAP)]
        edge_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// m-fold dominating set (greedy or exact).
    Domset {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        m: u32,
        #[arg(long, value_enum, default_value = "greedy")]
        ds: DsArg,
        #[arg(long, default_value_t = DEFAULT_DS_NODE_CAP)]
        node_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Minimum-length k-connected spanning subgraph (plus property report).
    Mss {
        #[command(flatten)]
        inst: InstanceArg,
        #[arg(short)]
        k: u32,
        #[arg(long, value_enum, default_value = "exact")]
        method: MssMethod,
        /// Apply the degree-six reduction afterwards (k = 2 only).
        #[arg(long)]
        reduce_degree: bool,
        #[arg(long, default_value_t = DEFAULT_MSS_EDGE_CAP)]
        edge_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Seeded sweep with CSV/JSON reports (byte-identical across reruns).
    Bench {
        #[arg(long, default_value_t = 24)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n_lo: usize,
        #[arg(long, default_value_t = 14)]
        n_hi: usize,
        #[arg(long, value_enum, default_value = "greedy")]
        ds: DsArg,
        #[arg(long, value_enum, default_value = "augment")]
        skcs: SkcsArg,
        #[arg(long, default_value_t = DEFAULT_ORACLE_NODE_CAP)]
        oracle_cap: usize,
        /// Write the CSV report here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Restore the default SIGPIPE disposition so piping into a consumer
    // that exits early (e.g. `ftb mss ... | head`) ends quietly instead of
    // panicking on a closed stdout.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

/// Exit code for a solver error: missing connectivity is an infeasible
/// instance, everything else is a validation failure.
fn solve_exit(err: SolveError) -> Result<u8> {
    match err {
        SolveError::NotKConnected { k } => {
            eprintln!("infeasible: input graph is not {k}-connected");
            Ok(EXIT_INFEASIBLE)
        }
        other => bail!(other),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Gen { n, side, seed, w_lo, w_hi, k_connected, fixture, out } => {
            let g = match fixture {
                Some(FixtureArg::Sq4) => fixtures::sq4(),
                Some(FixtureArg::Path3) => fixtures::path3(),
                Some(FixtureArg::Pent5) => fixtures::pent5(),
                Some(FixtureArg::Hex7) => fixtures::hex7(),
                None => match k_connected {
                    Some(k) => ftb::bench::sample_k_connected(n, k, seed, w_lo, w_hi)?.0,
                    None => {
                        let side = side.unwrap_or_else(|| ftb::bench::side_for(n, 1));
                        random_instance(n, side, w_lo, w_hi, seed)
                            .map_err(|e| anyhow::anyhow!("generation failed: {e}"))?
                    }
                },
            };
            match out {
                Some(path) => save_instance(&g, &path)?,
                None => println!("{}", instance_to_json(&g)),
            }
            Ok(0)
        }

        Cmd::Solve {
            inst,
            k,
            m,
            ds,
            skcs,
            allow_m_lt_k,
            with_oracle,
            oracle_cap,
            json,
        } => {
            let g = load_instance(&inst.instance)?;
            let spec = ProblemSpec {
                k,
                m,
                ds: ds.into(),
                skcs: skcs.into(),
                allow_m_lt_k,
                with_oracle,
                caps: Caps { oracle_nodes: oracle_cap, ..Caps::default() },
            };
            let clock = SystemClock::new();
            let report = match solve_kmcds_with_clock(&g, &spec, &clock) {
                Ok(r) => r,
                Err(e) => return solve_exit(e),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("solution  {}", fmt_ids(&report.solution));
                println!("weight    {}", report.weight);
                println!("phase1    {} (weight {})", fmt_ids(&report.phase_ds.set), report.phase_ds.weight);
                println!(
                    "phase2    added {} (weight {}, extraction_ok {})",
                    fmt_ids(&report.phase_connect.added),
                    report.phase_connect.weight,
                    report.phase_connect.extraction_ok
                );
                println!("fallback  {:?}", report.meta.fallback);
                println!("feasible  {}", report.feasible);
                if let Some(ow) = report.oracle_weight {
                    println!("oracle    {ow}");
                }
                if let Some(r) = report.empirical_ratio {
                    println!("ratio     {r}");
                }
            }
            Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE })
        }

        Cmd::Verify { inst, k, m, nodes, dump_blocks, json } => {
            let g = load_instance(&inst.instance)?;
            let d = parse_node_list(&nodes)?;
            let verdict = verify_kmcds(&g, &d, k, m).map_err(|e| anyhow::anyhow!(e))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&verdict)?);
            } else {
                println!(
                    "dominating {} | connectivity {} | feasible {}",
                    verdict.dominating, verdict.connectivity_ok, verdict.feasible
                );
            }
            if dump_blocks {
                let tree = k_block_tree(&g, k).map_err(|e| anyhow::anyhow!(e))?;
                println!("{}", serde_json::to_string_pretty(&tree)?);
            }
            Ok(if verdict.feasible { 0 } else { EXIT_INFEASIBLE })
        }

        Cmd::Oracle { inst, k, m, oracle_cap, json } => {
            let g = load_instance(&inst.instance)?;
            let (set, weight) = match exact_kmcds(&g, k, m, oracle_cap) {
                Ok(r) => r,
                Err(e) => return solve_exit(e),
            };
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "set": set, "weight": weight })
                );
            } else {
                println!("optimum {} (weight {weight})", fmt_ids(&set));
            }
            Ok(0)
        }

        Cmd::Steiner { inst, k, terminals, skcs, edge_cap, json } => {
            let g = load_instance(&inst.instance)?;
            let t = parse_node_list(&terminals)?;
            if t.is_empty() {
                bail!("at least one terminal is required");
            }
            let costs: Vec<f64> = g.nodes().iter().map(|p| p.weight).collect();
            let sol = solve_mnwkcsn(&g, &costs, &t, k, skcs.into(), edge_cap)
                .map_err(|e| anyhow::anyhow!(e))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&sol)?);
            } else {
                println!("steiner nodes {}", fmt_ids(&sol.steiner_nodes));
                println!("node cost     {}", sol.node_cost);
                println!("edge weight   {}", sol.edge_weight);
                println!("edges         {:?}", sol.f.endpoint_pairs());
                println!("extraction_ok {}", sol.extraction_ok);
            }
            Ok(if sol.extraction_ok { 0 } else { EXIT_INFEASIBLE })
        }

        Cmd::Domset { inst, m, ds, node_cap, json } => {
            let g = load_instance(&inst.instance)?;
            let set = match ds {
                DsArg::Greedy => greedy_mfold_ds(&g, m),
                DsArg::Exact => exact_mfold_ds(&g, m, node_cap).map_err(|e| anyhow::anyhow!(e))?,
            };
            let weight = g.weight_sum(set.iter().copied());
            if json {
                println!("{}", serde_json::json!({ "set": set, "weight": weight }));
            } else {
                println!("dominating set {} (weight {weight})", fmt_ids(&set));
            }
            Ok(0)
        }

        Cmd::Mss { inst, k, method, reduce_degree, edge_cap, json } => {
            let g = load_instance(&inst.instance)?;
            let report = match method {
                MssMethod::Exact => {
                    exact_k_mss(&g, k, edge_cap).map_err(|e| anyhow::anyhow!(e))?
                }
                MssMethod::Minimal => {
                    let full = EdgeSubgraph::full(&g);
                    let minimal =
                        reduce_to_minimal(&full, k).map_err(|e| anyhow::anyhow!(e))?;
                    let improved =
                        local_improve(&minimal, k).map_err(|e| anyhow::anyhow!(e))?;
                    check_mss_properties(&improved, k)
                }
            };
            let report = if reduce_degree {
                let reduced = degree_six_reduction(&report.subgraph)
                    .map_err(|e| anyhow::anyhow!(e))?;
                check_mss_properties(&reduced, k)
            } else {
                report
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("edges       {:?}", report.subgraph.endpoint_pairs());
                println!("length      {}", report.total_length);
                println!("max degree  {}", report.max_degree);
                if let Some(a) = report.min_adjacent_edge_angle {
                    println!("min angle   {a}");
                }
                println!("violations  {}", report.lemma_violations.len());
            }
            Ok(if report.lemma_violations.is_empty() { 0 } else { EXIT_INFEASIBLE })
        }

        Cmd::Bench { count, seed, n_lo, n_hi, ds, skcs, oracle_cap, csv, json_out } => {
            let cfg = BenchConfig {
                count,
                seed,
                n_lo,
                n_hi,
                ds: ds.into(),
                skcs: skcs.into(),
                oracle_cap,
            };
            let report = run_bench(&cfg)?;
            let csv_text = to_csv(&report)?;
            match &csv {
                Some(path) => std::fs::write(path, &csv_text)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{csv_text}"),
            }
            if let Some(path) = &json_out {
                std::fs::write(path, to_json(&report)?)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            let feasible = report.rows.iter().filter(|r| r.feasible).count();
            eprintln!(
                "bench: {} rows, {} feasible, {} aggregates",
                report.rows.len(),
                feasible,
                report.aggregates.len()
            );
            Ok(if feasible == report.rows.len() { 0 } else { EXIT_INFEASIBLE })
        }
    }
}

fn fmt_ids(set: &BTreeSet<u32>) -> String {
    let parts: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}
