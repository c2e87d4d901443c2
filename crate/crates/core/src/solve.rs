//! The two-phase backbone solver: phase one picks an m-fold dominating
//! set, phase two connects it into a k-connected node set via the Steiner
//! machinery with the chosen nodes made free. A verified fallback ladder
//! guarantees the reported solution is never silently infeasible, an
//! exhaustive oracle provides ground truth at small sizes, and an
//! independent verifier checks domination and induced k-connectivity.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::connectivity::{is_k_connected_adj, AdjGraph};
use crate::domset::{
    exact_mfold_ds, greedy_mfold_ds, is_mfold_ds, DomError, NodeSet,
    WeightOrderedSubsets, DEFAULT_DS_NODE_CAP,
};
use crate::steiner::{
    solve_mnwkcsn, SkcsSolverKind, SteinerError, DEFAULT_SKCS_EDGE_CAP,
};
use crate::udg::{NodeId, UnitDiskGraph};
use crate::PhaseClock;

/// Default cap on node count for the exhaustive solver.
pub const DEFAULT_ORACLE_NODE_CAP: usize = 14;
/// Weight-tie tolerance shared with the exact dominating-set solver.
const WEIGHT_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    KMustBePositive,
    /// m < k voids the performance guarantee; an explicit override is
    /// required to proceed anyway.
    MLessThanK { k: u32, m: u32 },
    NotKConnected { k: u32 },
    UnknownNode(NodeId),
    NodeCapExceeded { cap: usize, have: usize },
    Dom(DomError),
    Steiner(SteinerError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::KMustBePositive => write!(f, "k must be at least 1"),
            SolveError::MLessThanK { k, m } => write!(
                f,
                "m = {m} is below k = {k}; pass the override to solve without the ratio guarantee"
            ),
            SolveError::NotKConnected { k } => {
                write!(f, "input graph is not {k}-connected; no solution exists")
            }
            SolveError::UnknownNode(u) => write!(f, "node {u} is not in the graph"),
            SolveError::NodeCapExceeded { cap, have } => {
                write!(f, "exhaustive solver capped at {cap} nodes, instance has {have}")
            }
            SolveError::Dom(e) => write!(f, "dominating-set phase: {e}"),
            SolveError::Steiner(e) => write!(f, "connection phase: {e}"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<DomError> for SolveError {
    fn from(e: DomError) -> Self {
        SolveError::Dom(e)
    }
}

impl From<SteinerError> for SolveError {
    fn from(e: SteinerError) -> Self {
        SolveError::Steiner(e)
    }
}

/// Which dominating-set solver phase one uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DsSolverKind {
    Greedy,
    Exact,
}

/// Which rung of the fallback ladder produced the reported solution:
/// the extracted network, the raw solver output united with the phase-one
/// set, or the full vertex set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FallbackRung {
    Primary,
    ChosenSetUnion,
    FullVertexSet,
}

/// Size caps for the exhaustive components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub ds_nodes: usize,
    pub skcs_edges: usize,
    pub oracle_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ds_nodes: DEFAULT_DS_NODE_CAP,
            skcs_edges: DEFAULT_SKCS_EDGE_CAP,
            oracle_nodes: DEFAULT_ORACLE_NODE_CAP,
        }
    }
}

/// Full problem configuration for one solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub k: u32,
    pub m: u32,
    pub ds: DsSolverKind,
    pub skcs: SkcsSolverKind,
    /// Permit m < k (the approximation guarantee is void there).
    pub allow_m_lt_k: bool,
    /// Compare against the exhaustive solver when the instance fits the
    /// oracle cap; larger instances simply leave the oracle fields empty.
    pub with_oracle: bool,
    pub caps: Caps,
}

impl ProblemSpec {
    pub fn new(k: u32, m: u32) -> Self {
        ProblemSpec {
            k,
            m,
            ds: DsSolverKind::Greedy,
            skcs: SkcsSolverKind::Augment,
            allow_m_lt_k: false,
            with_oracle: false,
            caps: Caps::default(),
        }
    }
}

/// Independent feasibility verdict: m-fold domination and k-connectivity
/// of the induced subgraph, checked from first principles. A set smaller
/// than k + 1 nodes is never accepted as k-connected for k ≥ 1, and the
/// full vertex set dominates vacuously.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub dominating: bool,
    pub connectivity_ok: bool,
    pub feasible: bool,
}

pub fn verify_kmcds(
    g: &UnitDiskGraph,
    d: &NodeSet,
    k: u32,
    m: u32,
) -> Result<VerifyReport, SolveError> {
    for &u in d {
        if !g.contains_node(u) {
            return Err(SolveError::UnknownNode(u));
        }
    }
    let dominating = is_mfold_ds(g, d, m)?;
    let connectivity_ok = k == 0 || is_k_connected_adj(&AdjGraph::induced(g, d), k);
    Ok(VerifyReport { dominating, connectivity_ok, feasible: dominating && connectivity_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDs {
    pub set: NodeSet,
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseConnect {
    /// Nodes added on top of the phase-one set.
    pub added: NodeSet,
    pub weight: f64,
    /// Host edge ids of the connecting network.
    pub edges: BTreeSet<u32>,
    pub extraction_ok: bool,
}

/// Wall-clock phase durations. Excluded from serialized reports so that
/// identical runs produce identical bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub ds_ms: f64,
    pub connect_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolverMetadata {
    pub ds: DsSolverKind,
    pub skcs: SkcsSolverKind,
    pub fallback: FallbackRung,
    /// Shape of the guarantee in terms of the phase ratios (the
    /// dominating-set ratio and the Steiner ratio); absent when m < k.
    pub ratio_form: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    /// The reported backbone.
    pub solution: NodeSet,
    /// Total original node weight of the backbone.
    pub weight: f64,
    pub phase_ds: PhaseDs,
    pub phase_connect: PhaseConnect,
    /// Verdict of the independent verifier on `solution`.
    pub feasible: bool,
    pub oracle_weight: Option<f64>,
    pub empirical_ratio: Option<f64>,
    #[serde(skip)]
    pub timings: Timings,
    pub meta: SolverMetadata,
}

/// Two-phase solve with the unit clock (all timings zero).
pub fn solve_kmcds(g: &UnitDiskGraph, spec: &ProblemSpec) -> Result<SolveReport, SolveError> {
    solve_kmcds_with_clock(g, spec, &())
}

pub fn solve_kmcds_with_clock<C: PhaseClock>(
    g: &UnitDiskGraph,
    spec: &ProblemSpec,
    clock: &C,
) -> Result<SolveReport, SolveError> {
    if spec.k == 0 {
        return Err(SolveError::KMustBePositive);
    }
    if spec.m < spec.k && !spec.allow_m_lt_k {
        return Err(SolveError::MLessThanK { k: spec.k, m: spec.m });
    }
    if !is_k_connected_adj(&AdjGraph::from_udg(g), spec.k) {
        return Err(SolveError::NotKConnected { k: spec.k });
    }

    let t0 = clock.now_millis();
    let d = match spec.ds {
        DsSolverKind::Greedy => greedy_mfold_ds(g, spec.m),
        DsSolverKind::Exact => exact_mfold_ds(g, spec.m, spec.caps.ds_nodes)?,
    };
    let t1 = clock.now_millis();

    let costs: Vec<f64> = g.nodes().iter().map(|p| p.weight).collect();
    let steiner = solve_mnwkcsn(g, &costs, &d, spec.k, spec.skcs, spec.caps.skcs_edges)?;
    let t2 = clock.now_millis();

    // Fallback ladder: the extracted network, then the raw solver output
    // united with the phase-one set, then the full vertex set. Every rung
    // is vetted by the independent verifier; the first accepted one wins.
    let primary: NodeSet = steiner.f.node_span().into_iter().chain(d.iter().copied()).collect();
    let union_rung: NodeSet =
        steiner.f0.node_span().into_iter().chain(d.iter().copied()).collect();
    let full: NodeSet = g.node_ids().collect();
    let ladder = [
        (primary, FallbackRung::Primary),
        (union_rung, FallbackRung::ChosenSetUnion),
        (full, FallbackRung::FullVertexSet),
    ];
    let mut chosen: Option<(NodeSet, FallbackRung, VerifyReport)> = None;
    for (set, rung) in ladder {
        let verdict = verify_kmcds(g, &set, spec.k, spec.m)?;
        if verdict.feasible {
            chosen = Some((set, rung, verdict));
            break;
        }
        if chosen.is_none() && rung == FallbackRung::FullVertexSet {
            // Nothing verified; report the full set with its honest verdict.
            chosen = Some((set, rung, verdict));
        }
    }
    let (solution, fallback, verdict) = chosen.expect("ladder always yields a candidate");
    let t3 = clock.now_millis();

    let weight = g.weight_sum(solution.iter().copied());
    let ds_weight = g.weight_sum(d.iter().copied());
    let added: NodeSet = solution.difference(&d).copied().collect();
    let added_weight = g.weight_sum(added.iter().copied());

    let (oracle_weight, empirical_ratio) = if spec.with_oracle && g.n() <= spec.caps.oracle_nodes
    {
        let (_, ow) = exact_kmcds(g, spec.k, spec.m, spec.caps.oracle_nodes)?;
        let ratio = if ow > WEIGHT_EPS {
            Some(weight / ow)
        } else if weight <= WEIGHT_EPS {
            Some(1.0)
        } else {
            None
        };
        (Some(ow), ratio)
    } else {
        (None, None)
    };

    let ratio_form = if spec.m < spec.k {
        None
    } else if spec.k == 2 {
        Some("alpha + 2.5 * rho")
    } else {
        Some("alpha + 5 * rho")
    };

    Ok(SolveReport {
        solution,
        weight,
        phase_ds: PhaseDs { set: d, weight: ds_weight },
        phase_connect: PhaseConnect {
            added,
            weight: added_weight,
            edges: steiner.f.edge_ids().clone(),
            extraction_ok: steiner.extraction_ok,
        },
        feasible: verdict.feasible,
        oracle_weight,
        empirical_ratio,
        timings: Timings {
            ds_ms: t1 - t0,
            connect_ms: t2 - t1,
            verify_ms: t3 - t2,
            total_ms: t3 - t0,
        },
        meta: SolverMetadata { ds: spec.ds, skcs: spec.skcs, fallback, ratio_form },
    })
}

/// Exhaustive minimum-weight backbone: enumerate node sets in increasing
/// total weight (nodes with degree below m are forced in) and return the
/// first one the verifier accepts; among equal-weight optima the
/// lexicographically smallest node set wins.
pub fn exact_kmcds(
    g: &UnitDiskGraph,
    k: u32,
    m: u32,
    node_cap: usize,
) -> Result<(NodeSet, f64), SolveError> {
    if g.n() > node_cap {
        return Err(SolveError::NodeCapExceeded { cap: node_cap, have: g.n() });
    }
    if k >= 1 && !is_k_connected_adj(&AdjGraph::from_udg(g), k) {
        return Err(SolveError::NotKConnected { k });
    }
    let forced: NodeSet = g.node_ids().filter(|&v| (g.degree(v) as u32) < m).collect();
    let forced_weight = g.weight_sum(forced.iter().copied());
    let free: Vec<(f64, NodeId)> = g
        .node_ids()
        .filter(|v| !forced.contains(v))
        .map(|v| (g.weight_of(v), v))
        .collect();

    let mut subsets = WeightOrderedSubsets::new(free);
    let mut best: Option<(f64, NodeSet)> = None;
    while let Some((extra, ids)) = subsets.next_subset() {
        let weight = forced_weight + extra;
        if let Some((bw, _)) = &best {
            if weight > bw + WEIGHT_EPS {
                break;
            }
        }
        let mut candidate = forced.clone();
        candidate.extend(ids.iter().copied());
        if verify_kmcds(g, &candidate, k, m)?.feasible {
            match &best {
                Some((_, bs)) if *bs <= candidate => {}
                _ => best = Some((weight, candidate)),
            }
        }
    }
    // The full vertex set is feasible whenever g is k-connected, so the
    // enumeration always finds something.
    let (w, set) = best.expect("full vertex set is feasible");
    Ok((set, w))
}
