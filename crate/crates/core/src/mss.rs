//! Minimum-length k-connected spanning subgraph (k-MSS) machinery: an exact
//! branch-and-bound oracle, single-pass minimality reduction, angle-based
//! local improvement, the k = 2 degree-six reduction, and checkers for the
//! structural laws of minimum subgraphs (degree bound 5k; for k = 2: the
//! π/3 angle bound, neighbor independence at degree ≥ 3, and the
//! equilateral equal-length property).

use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::connectivity::{is_k_connected_adj, AdjGraph};
use crate::udg::{angle_at, EdgeSubgraph, NodeId, UnitDiskGraph};

/// Tolerance for angle comparisons (radians), including "exactly π/3"
/// detection.
pub const MSS_ANGLE_TOL: f64 = 1e-9;
/// Absolute tolerance for edge-length equality.
pub const MSS_LENGTH_TOL: f64 = 1e-9;
/// Default cap on host edge count for the exhaustive k-MSS search.
pub const DEFAULT_MSS_EDGE_CAP: usize = 22;

const PI: f64 = core::f64::consts::PI;
/// Strict-improvement threshold for length comparisons in searches.
const LEN_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum MssError {
    /// Some host node has no incident edge in the candidate (k ≥ 1).
    NotSpanning { node: NodeId },
    NotKConnected { k: u32 },
    EdgeCapExceeded { cap: usize, have: usize },
    /// An angle-exchange closing edge is not a host edge, contradicting the
    /// geometric guarantee that it is shorter than a unit edge.
    ExchangeEdgeMissing { a: NodeId, b: NodeId },
    /// Degree-six reduction found no legal replacement at this node.
    NoLegalReplacement { node: NodeId },
    /// Degree-six reduction requires all adjacent-edge angles ≥ π/3.
    AngleTooSmall { at: NodeId, a: NodeId, b: NodeId, angle: f64 },
    /// Degree-six reduction requires maximum degree ≤ 6.
    DegreeTooHigh { node: NodeId, degree: u32 },
}

impl fmt::Display for MssError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MssError::NotSpanning { node } => {
                write!(f, "subgraph does not span its host: node {node} is isolated")
            }
            MssError::NotKConnected { k } => write!(f, "subgraph is not {k}-connected"),
            MssError::EdgeCapExceeded { cap, have } => {
                write!(f, "exhaustive search capped at {cap} edges, instance has {have}")
            }
            MssError::ExchangeEdgeMissing { a, b } => {
                write!(f, "exchange closing edge ({a}, {b}) is not a host edge")
            }
            MssError::NoLegalReplacement { node } => {
                write!(f, "no legal replacement edge at degree-six node {node}")
            }
            MssError::AngleTooSmall { at, a, b, angle } => write!(
                f,
                "adjacent edges ({at}, {a}) and ({at}, {b}) meet at {angle} < pi/3"
            ),
            MssError::DegreeTooHigh { node, degree } => {
                write!(f, "node {node} has degree {degree} > 6")
            }
        }
    }
}

impl core::error::Error for MssError {}

/// A structured finding from the k-MSS property checker.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MssViolation {
    NotSpanning { node: NodeId },
    NotKConnected { k: u32 },
    /// Degree exceeds the 5k bound for minimum subgraphs.
    DegreeAboveBound { node: NodeId, degree: u32, bound: u32 },
    /// Adjacent edges meet at an angle below π/3 (k = 2 law).
    AngleBelowMin { at: NodeId, a: NodeId, b: NodeId, angle: f64 },
    /// Two neighbors of a degree-≥3 node are themselves adjacent in the
    /// subgraph (k = 2 law).
    AdjacentNeighbors { at: NodeId, a: NodeId, b: NodeId },
    /// An exactly-π/3 angle whose two edges differ in length (k = 2 law:
    /// such a configuration must be equilateral).
    EquilateralLengthMismatch { at: NodeId, a: NodeId, b: NodeId, len_a: f64, len_b: f64 },
}

/// Audit of a spanning-subgraph candidate. Degrees and angles are
/// recomputed from the subgraph itself, never trusted from the producer.
#[derive(Clone, Debug, Serialize)]
pub struct MssReport<'g> {
    pub subgraph: EdgeSubgraph<'g>,
    pub total_length: f64,
    pub max_degree: u32,
    /// Minimum angle over all pairs of adjacent edges; `None` when no node
    /// has two incident edges.
    pub min_adjacent_edge_angle: Option<f64>,
    pub lemma_violations: Vec<MssViolation>,
}

fn spanning_adj(f: &EdgeSubgraph<'_>) -> AdjGraph {
    AdjGraph::from_subgraph_on_host(f)
}

fn validate_spanning_k(f: &EdgeSubgraph<'_>, k: u32) -> Result<(), MssError> {
    if k >= 1 {
        for u in f.host().node_ids() {
            if f.degree_of(u) == 0 {
                return Err(MssError::NotSpanning { node: u });
            }
        }
    }
    if !is_k_connected_adj(&spanning_adj(f), k) {
        return Err(MssError::NotKConnected { k });
    }
    Ok(())
}

/// Removes edges longest-first (ties by edge id ascending) as long as the
/// subgraph stays a k-connected spanning subgraph. One pass suffices:
/// removing other edges never makes a kept edge removable again.
pub fn reduce_to_minimal<'g>(
    f: &EdgeSubgraph<'g>,
    k: u32,
) -> Result<EdgeSubgraph<'g>, MssError> {
    validate_spanning_k(f, k)?;
    let host = f.host();
    let mut order: Vec<u32> = f.edge_ids().iter().copied().collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (host.edge(a).length, host.edge(b).length);
        lb.partial_cmp(&la).expect("finite lengths").then(a.cmp(&b))
    });
    let mut current = f.clone();
    for e in order {
        current.remove_edge(e);
        if !is_k_connected_adj(&spanning_adj(&current), k) {
            current.insert_edge(e);
        }
    }
    Ok(current)
}

/// Repeatedly applies the angle exchange: when edges (u, a) and (u, b) meet
/// at an angle below π/3, replace the longer of the two by the closing edge
/// (a, b), provided the closing edge is a host edge, the swap keeps the
/// subgraph k-connected spanning, and the total length strictly decreases.
pub fn local_improve<'g>(
    f: &EdgeSubgraph<'g>,
    k: u32,
) -> Result<EdgeSubgraph<'g>, MssError> {
    validate_spanning_k(f, k)?;
    let host = f.host();
    let mut current = f.clone();
    'scan: loop {
        for u in host.node_ids() {
            let nbrs = current.neighbors_of(u);
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    let Some(angle) = angle_at(host.node(u), host.node(a), host.node(b))
                    else {
                        continue; // degenerate zero-length ray
                    };
                    if angle >= PI / 3.0 - MSS_ANGLE_TOL {
                        continue;
                    }
                    let ea = host.edge_id(u, a).expect("subgraph edge");
                    let eb = host.edge_id(u, b).expect("subgraph edge");
                    // Drop the longer incident edge, ties by edge id.
                    let (la, lb) = (host.edge(ea).length, host.edge(eb).length);
                    let drop = if (lb, eb) > (la, ea) { eb } else { ea };
                    let Some(closing) = host.edge_id(a, b) else {
                        return Err(MssError::ExchangeEdgeMissing { a, b });
                    };
                    let gain = host.edge(drop).length - host.edge(closing).length;
                    let already_closed = current.contains_edge(closing);
                    let strict_gain = if already_closed {
                        host.edge(drop).length // pure removal
                    } else {
                        gain
                    };
                    if strict_gain <= LEN_EPS {
                        continue;
                    }
                    let mut next = current.clone();
                    next.remove_edge(drop);
                    next.insert_edge(closing);
                    if is_k_connected_adj(&spanning_adj(&next), k) {
                        current = next;
                        continue 'scan;
                    }
                }
            }
        }
        break;
    }
    Ok(current)
}

/// Globally minimum-length k-connected spanning subgraph by exhaustive
/// branch-and-bound over edge subsets (edges ascending by length, ties by
/// id; include-first). Among equal-length optima the lexicographically
/// smallest edge-id set wins.
pub fn exact_k_mss(
    g: &UnitDiskGraph,
    k: u32,
    edge_cap: usize,
) -> Result<MssReport<'_>, MssError> {
    if g.edges().len() > edge_cap {
        return Err(MssError::EdgeCapExceeded { cap: edge_cap, have: g.edges().len() });
    }
    if !is_k_connected_adj(&AdjGraph::from_udg(g), k) {
        return Err(MssError::NotKConnected { k });
    }
    // Seed the incumbent with a reduced, locally improved solution.
    let seed = local_improve(&reduce_to_minimal(&EdgeSubgraph::full(g), k)?, k)?;
    let mut search = MssSearch::new(g, k, &seed);
    search.run();
    let best = EdgeSubgraph::from_edge_ids(g, search.best.iter().copied());
    Ok(check_mss_properties(&best, k))
}

struct MssSearch<'g> {
    g: &'g UnitDiskGraph,
    k: u32,
    /// Edge ids ascending by (length, id).
    order: Vec<u32>,
    /// prefix[i] = total length of order[..i].
    prefix: Vec<f64>,
    best: Vec<u32>,
    best_len: f64,
    degree: Vec<u32>,
    rem_inc: Vec<u32>,
    included: Vec<u32>,
    total_deficiency: u32,
    deficient_nodes: u32,
}

impl<'g> MssSearch<'g> {
    fn new(g: &'g UnitDiskGraph, k: u32, seed: &EdgeSubgraph<'g>) -> Self {
        let mut order: Vec<u32> = (0..g.edges().len() as u32).collect();
        order.sort_by(|&a, &b| {
            let (la, lb) = (g.edge(a).length, g.edge(b).length);
            la.partial_cmp(&lb).expect("finite lengths").then(a.cmp(&b))
        });
        let mut prefix = Vec::with_capacity(order.len() + 1);
        prefix.push(0.0);
        for &e in &order {
            prefix.push(prefix[prefix.len() - 1] + g.edge(e).length);
        }
        let mut rem_inc = alloc::vec![0u32; g.n()];
        for e in g.edges() {
            rem_inc[e.u as usize] += 1;
            rem_inc[e.v as usize] += 1;
        }
        let mut best: Vec<u32> = seed.edge_ids().iter().copied().collect();
        best.sort_unstable();
        MssSearch {
            g,
            k,
            order,
            prefix,
            best_len: seed.total_length(),
            best,
            degree: alloc::vec![0; g.n()],
            rem_inc,
            included: Vec::new(),
            total_deficiency: k * g.n() as u32,
            deficient_nodes: if k == 0 { 0 } else { g.n() as u32 },
        }
    }

    fn run(&mut self) {
        self.dfs(0, 0.0);
    }

    fn current_is_solution(&self) -> bool {
        let mut adj = AdjGraph::new();
        for u in self.g.node_ids() {
            adj.insert_node(u);
        }
        for &e in &self.included {
            let edge = self.g.edge(e);
            adj.insert_edge(edge.u, edge.v, false);
        }
        is_k_connected_adj(&adj, self.k)
    }

    fn union_can_work(&self, pos: usize) -> bool {
        let mut adj = AdjGraph::new();
        for u in self.g.node_ids() {
            adj.insert_node(u);
        }
        for &e in self.included.iter().chain(&self.order[pos..]) {
            let edge = self.g.edge(e);
            adj.insert_edge(edge.u, edge.v, false);
        }
        is_k_connected_adj(&adj, self.k)
    }

    fn offer(&mut self, acc: f64) {
        let mut ids = self.included.clone();
        ids.sort_unstable();
        if acc < self.best_len - LEN_EPS
            || (acc <= self.best_len + LEN_EPS && ids < self.best)
        {
            self.best_len = acc;
            self.best = ids;
        }
    }

    fn bump_degree(&mut self, node: NodeId, delta: i32) {
        let d = &mut self.degree[node as usize];
        let before = *d;
        *d = (*d as i32 + delta) as u32;
        if before < self.k && *d >= self.k {
            self.deficient_nodes -= 1;
        } else if before >= self.k && *d < self.k {
            self.deficient_nodes += 1;
        }
        let def_before = self.k.saturating_sub(before);
        let def_after = self.k.saturating_sub(*d);
        self.total_deficiency = self.total_deficiency + def_after - def_before;
    }

    fn dfs(&mut self, pos: usize, acc: f64) {
        if acc > self.best_len + LEN_EPS {
            return;
        }
        if self.deficient_nodes == 0 && self.current_is_solution() {
            // Supersets are never shorter and never lexicographically
            // smaller (prefix order), so this subtree is done.
            self.offer(acc);
            return;
        }
        if pos == self.order.len() {
            return;
        }
        // Lower bound: every missing degree unit costs at least the
        // cheapest remaining edges, two units per edge.
        let need = (self.total_deficiency as usize).div_ceil(2);
        if pos + need > self.order.len() {
            return;
        }
        if acc + (self.prefix[pos + need] - self.prefix[pos]) > self.best_len + LEN_EPS {
            return;
        }

        let e = self.order[pos];
        let (u, v) = {
            let edge = self.g.edge(e);
            (edge.u, edge.v)
        };
        self.rem_inc[u as usize] -= 1;
        self.rem_inc[v as usize] -= 1;

        // Include branch.
        let len = self.g.edge(e).length;
        if acc + len <= self.best_len + LEN_EPS {
            self.bump_degree(u, 1);
            self.bump_degree(v, 1);
            self.included.push(e);
            self.dfs(pos + 1, acc + len);
            self.included.pop();
            self.bump_degree(u, -1);
            self.bump_degree(v, -1);
        }

        // Exclude branch: both endpoints must still be able to reach degree
        // k, and the union of chosen plus remaining edges must still admit a
        // k-connected spanning subgraph.
        let feasible = self.degree[u as usize] + self.rem_inc[u as usize] >= self.k
            && self.degree[v as usize] + self.rem_inc[v as usize] >= self.k
            && self.union_can_work(pos + 1);
        if feasible {
            self.dfs(pos + 1, acc);
        }

        self.rem_inc[u as usize] += 1;
        self.rem_inc[v as usize] += 1;
    }
}

/// Clockwise ordering of the subgraph-neighbors of `u`, starting from the
/// positive x-axis; ties broken by node id.
fn clockwise_neighbors(g: &UnitDiskGraph, f: &EdgeSubgraph<'_>, u: NodeId) -> Vec<NodeId> {
    let at = g.node(u);
    let mut nbrs = f.neighbors_of(u);
    nbrs.sort_by(|&a, &b| {
        let key = |p: NodeId| {
            let q = g.node(p);
            let theta = libm::atan2(q.y - at.y, q.x - at.x);
            let mut cw = -theta;
            if cw < 0.0 {
                cw += 2.0 * PI;
            }
            cw
        };
        key(a).partial_cmp(&key(b)).expect("finite angle").then(a.cmp(&b))
    });
    nbrs
}

/// For k = 2 only: while some node has degree six (its incident angles are
/// then forced to be exactly π/3), replace one of its edges u·u_i by the
/// equilateral closing edge u_i·u_{i−1}, where the neighbors u_0..u_5 are in
/// clockwise order from the positive x-axis and i is the first index whose
/// replacement is legal: the closing edge exists in the host, is not already
/// chosen, its receiving endpoint has degree ≤ 4, the lengths agree within
/// tolerance, and the swap keeps the subgraph 2-connected spanning. The
/// total length is unchanged and the output has maximum degree ≤ 5.
pub fn degree_six_reduction<'g>(
    f: &EdgeSubgraph<'g>,
) -> Result<EdgeSubgraph<'g>, MssError> {
    let k = 2;
    validate_spanning_k(f, k)?;
    let host = f.host();
    // Precondition: a minimum candidate has all adjacent-edge angles ≥ π/3
    // at apexes of degree ≥ 3 (seven rays cannot all be π/3 apart, so this
    // also caps degrees at six). Degree-2 apexes may hold narrow angles.
    for u in host.node_ids() {
        let deg = f.degree_of(u);
        if deg > 6 {
            return Err(MssError::DegreeTooHigh { node: u, degree: deg as u32 });
        }
        if deg < 3 {
            continue;
        }
        let nbrs = f.neighbors_of(u);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if let Some(angle) = angle_at(host.node(u), host.node(a), host.node(b)) {
                    if angle < PI / 3.0 - MSS_ANGLE_TOL {
                        return Err(MssError::AngleTooSmall { at: u, a, b, angle });
                    }
                }
            }
        }
    }
    let mut current = f.clone();
    loop {
        let Some(u) = host.node_ids().find(|&u| current.degree_of(u) == 6) else {
            break;
        };
        let ring = clockwise_neighbors(host, &current, u);
        debug_assert_eq!(ring.len(), 6);
        let mut applied = false;
        for i in 0..6 {
            let ui = ring[i];
            let prev = ring[(i + 5) % 6];
            let Some(closing) = host.edge_id(prev, ui) else {
                continue;
            };
            if current.contains_edge(closing) || current.degree_of(prev) > 4 {
                continue;
            }
            let dropped = host.edge_id(u, ui).expect("subgraph edge");
            if libm::fabs(host.edge(dropped).length - host.edge(closing).length)
                > MSS_LENGTH_TOL
            {
                continue;
            }
            let mut next = current.clone();
            next.remove_edge(dropped);
            next.insert_edge(closing);
            if is_k_connected_adj(&spanning_adj(&next), k) {
                current = next;
                applied = true;
                break;
            }
        }
        if !applied {
            return Err(MssError::NoLegalReplacement { node: u });
        }
    }
    Ok(current)
}

/// Pure checker: recomputes degrees and angles of `f` and lists every
/// violated structural law. For all k the degree bound is 5k; the angle,
/// neighbor-independence, and equilateral laws apply to k = 2 at apexes of
/// degree >= 3 (where the improving exchanges behind them are available).
/// `min_adjacent_edge_angle` is still the global minimum over all apexes.
pub fn check_mss_properties<'g>(f: &EdgeSubgraph<'g>, k: u32) -> MssReport<'g> {
    let host = f.host();
    let mut violations = Vec::new();
    if k >= 1 {
        for u in host.node_ids() {
            if f.degree_of(u) == 0 {
                violations.push(MssViolation::NotSpanning { node: u });
            }
        }
    }
    if !is_k_connected_adj(&spanning_adj(f), k) {
        violations.push(MssViolation::NotKConnected { k });
    }
    let mut max_degree = 0u32;
    let mut min_angle: Option<f64> = None;
    let bound = 5 * k;
    for u in host.node_ids() {
        let deg = f.degree_of(u) as u32;
        max_degree = max_degree.max(deg);
        if k >= 1 && deg > bound {
            violations.push(MssViolation::DegreeAboveBound { node: u, degree: deg, bound });
        }
        let nbrs = f.neighbors_of(u);
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                let Some(angle) = angle_at(host.node(u), host.node(a), host.node(b)) else {
                    continue;
                };
                min_angle = Some(min_angle.map_or(angle, |m: f64| m.min(angle)));
                // The angle, equilateral-length, and neighbor-independence
                // laws hold at apexes of degree >= 3: the improving exchange
                // that proves them removes one edge at u, so u must retain
                // degree >= 2 afterwards. A degree-2 apex can legitimately
                // hold a narrow angle (both its edges may be forced).
                if k == 2 && deg >= 3 {
                    if angle < PI / 3.0 - MSS_ANGLE_TOL {
                        violations.push(MssViolation::AngleBelowMin { at: u, a, b, angle });
                    } else if libm::fabs(angle - PI / 3.0) <= MSS_ANGLE_TOL {
                        let la = host.edge(host.edge_id(u, a).expect("edge")).length;
                        let lb = host.edge(host.edge_id(u, b).expect("edge")).length;
                        if libm::fabs(la - lb) > MSS_LENGTH_TOL {
                            violations.push(MssViolation::EquilateralLengthMismatch {
                                at: u,
                                a,
                                b,
                                len_a: la,
                                len_b: lb,
                            });
                        }
                    }
                    let closing = host.edge_id(a, b);
                    if closing.is_some_and(|c| f.contains_edge(c)) {
                        violations.push(MssViolation::AdjacentNeighbors { at: u, a, b });
                    }
                }
            }
        }
    }
    MssReport {
        total_length: f.total_length(),
        max_degree,
        min_adjacent_edge_angle: min_angle,
        lemma_violations: violations,
        subgraph: f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{k_block_tree_adj, vertex_connectivity_adj};
    use crate::udg::{build_udg, fixtures, PointNode};
    use alloc::collections::BTreeSet;

    fn edge_set(f: &EdgeSubgraph<'_>) -> BTreeSet<u32> {
        f.edge_ids().clone()
    }

    fn close(a: f64, b: f64) -> bool {
        libm::fabs(a - b) <= 1e-9
    }

    #[test]
    fn sq4_reduction_and_exact_oracle() {
        let g = fixtures::sq4();
        // Edge ids lex: (0,1)=0 (0,2)=1 (0,3)=2 (1,2)=3 (1,3)=4 (2,3)=5;
        // sides are 0, 1, 4, 5, diagonals 2 and 3.
        let reduced = reduce_to_minimal(&EdgeSubgraph::full(&g), 2).unwrap();
        assert_eq!(edge_set(&reduced), BTreeSet::from([0, 1, 4, 5]));

        let report = exact_k_mss(&g, 2, DEFAULT_MSS_EDGE_CAP).unwrap();
        assert_eq!(edge_set(&report.subgraph), BTreeSet::from([0, 1, 4, 5]));
        assert!(close(report.total_length, 2.4));
        assert_eq!(report.max_degree, 2);
        assert!(close(report.min_adjacent_edge_angle.unwrap(), PI / 2.0));
        assert!(report.lemma_violations.is_empty());

        // k = 3 on four nodes forces the complete graph.
        let k4 = exact_k_mss(&g, 3, DEFAULT_MSS_EDGE_CAP).unwrap();
        assert_eq!(edge_set(&k4.subgraph).len(), 6);
        assert!(close(k4.total_length, 2.4 + 1.2 * libm::sqrt(2.0)));
        let reduced3 = reduce_to_minimal(&EdgeSubgraph::full(&g), 3).unwrap();
        assert_eq!(edge_set(&reduced3).len(), 6);
    }

    #[test]
    fn pent5_and_path3_oracles() {
        let g = fixtures::pent5();
        let report = exact_k_mss(&g, 2, DEFAULT_MSS_EDGE_CAP).unwrap();
        assert_eq!(edge_set(&report.subgraph).len(), 5);
        assert!(close(report.total_length, 4.5));
        assert!(report.lemma_violations.is_empty());
        let reduced = reduce_to_minimal(&report.subgraph, 2).unwrap();
        assert_eq!(edge_set(&reduced), edge_set(&report.subgraph));

        let p = fixtures::path3();
        let tree = exact_k_mss(&p, 1, DEFAULT_MSS_EDGE_CAP).unwrap();
        assert_eq!(edge_set(&tree.subgraph), BTreeSet::from([0, 1]));
        assert!(close(tree.total_length, 1.8));
    }

    #[test]
    fn hex7_exact_two_mss_is_lex_smallest_hamiltonian_cycle() {
        let g = fixtures::hex7();
        let report = exact_k_mss(&g, 2, DEFAULT_MSS_EDGE_CAP).unwrap();
        // All twelve edges have equal length 0.95, so the optima are the six
        // Hamiltonian cycles of the wheel; the lexicographically smallest
        // drops ring edge (4,5) and uses both its spokes.
        assert_eq!(edge_set(&report.subgraph), BTreeSet::from([0, 1, 3, 5, 7, 10, 11]));
        assert!(close(report.total_length, 6.65));
        assert_eq!(report.max_degree, 2);
        // The spokes meet at the center at exactly π/3 with equal lengths:
        // the equilateral law holds, so no violations.
        assert!(close(report.min_adjacent_edge_angle.unwrap(), PI / 3.0));
        assert!(report.lemma_violations.is_empty());
    }

    #[test]
    fn exact_oracle_validates_input() {
        let g = fixtures::path3();
        assert_eq!(
            exact_k_mss(&g, 2, DEFAULT_MSS_EDGE_CAP).unwrap_err(),
            MssError::NotKConnected { k: 2 }
        );
        assert_eq!(
            exact_k_mss(&g, 1, 1).unwrap_err(),
            MssError::EdgeCapExceeded { cap: 1, have: 2 }
        );
    }

    #[test]
    fn local_improve_swaps_a_sharp_tree_angle() {
        // u at origin with two rays 21.8 degrees apart; swapping the longer
        // ray for the closing edge yields the minimum spanning tree.
        let g = build_udg(alloc::vec![
            PointNode { id: 0, x: 0.0, y: 0.0, weight: 1.0 },
            PointNode { id: 1, x: 0.9, y: 0.0, weight: 1.0 },
            PointNode { id: 2, x: 0.75, y: 0.3, weight: 1.0 },
        ])
        .unwrap();
        // Edge ids lex: (0,1)=0, (0,2)=1, (1,2)=2.
        let f = EdgeSubgraph::from_edge_ids(&g, [0, 1]);
        let improved = local_improve(&f, 1).unwrap();
        assert_eq!(edge_set(&improved), BTreeSet::from([1, 2]));
        let exact = exact_k_mss(&g, 1, DEFAULT_MSS_EDGE_CAP).unwrap();
        assert_eq!(edge_set(&exact.subgraph), BTreeSet::from([1, 2]));
    }

    #[test]
    fn local_improve_swaps_diagonal_for_side() {
        let g = fixtures::sq4();
        // Three sides plus a diagonal, k = 1: the first sharp pair found at
        // node 1 swaps the diagonal (1,2) for the missing side (0,2),
        // reaching the boundary ring.
        let f = EdgeSubgraph::from_edge_ids(&g, [0, 3, 4, 5]);
        let improved = local_improve(&f, 1).unwrap();
        assert_eq!(edge_set(&improved), BTreeSet::from([0, 1, 4, 5]));
        assert!(close(improved.total_length(), 2.4));
    }

    #[test]
    fn local_improve_degenerates_to_removal_when_closing_edge_is_chosen() {
        // A full thin triangle at k = 1: the sharp apex angle wants to drop
        // the longest edge and add the closing edge, which is already
        // chosen, so the exchange is a pure removal down to the minimum
        // spanning tree.
        let g = build_udg(alloc::vec![
            PointNode { id: 0, x: 0.0, y: 0.0, weight: 1.0 },
            PointNode { id: 1, x: 0.9, y: 0.0, weight: 1.0 },
            PointNode { id: 2, x: 0.75, y: 0.3, weight: 1.0 },
        ])
        .unwrap();
        let improved = local_improve(&EdgeSubgraph::full(&g), 1).unwrap();
        assert_eq!(edge_set(&improved), BTreeSet::from([1, 2]));
    }

    #[test]
    fn local_improve_leaves_optimum_and_blocked_cycles_alone() {
        let g = fixtures::sq4();
        let sides = EdgeSubgraph::from_edge_ids(&g, [0, 2, 3, 5]);
        assert_eq!(edge_set(&local_improve(&sides, 2).unwrap()), edge_set(&sides));
        // The anti-cycle 0-2-1-3 uses both diagonals; every single exchange
        // would disconnect a node, so no legal improvement exists and the
        // input is returned unchanged.
        let anti = EdgeSubgraph::from_edge_ids(&g, [1, 2, 3, 4]);
        assert_eq!(edge_set(&local_improve(&anti, 2).unwrap()), edge_set(&anti));
    }

    /// Hexagon of circumradius 0.9 plus its center: ring edges and spokes
    /// all have length 0.9, second neighbors are out of range, so the host
    /// is exactly the wheel.
    fn wheel7() -> UnitDiskGraph {
        let mut nodes = Vec::new();
        for i in 0..6u32 {
            let theta = PI / 3.0 * i as f64;
            nodes.push(PointNode {
                id: i,
                x: 0.9 * libm::cos(theta),
                y: 0.9 * libm::sin(theta),
                weight: 1.0,
            });
        }
        nodes.push(PointNode { id: 6, x: 0.0, y: 0.0, weight: 1.0 });
        build_udg(nodes).unwrap()
    }

    #[test]
    fn degree_six_reduction_rewires_one_spoke() {
        let g = wheel7();
        assert_eq!(g.edges().len(), 12);
        // Edge ids lex: (0,1)=0 (0,5)=1 (0,6)=2 (1,2)=3 (1,6)=4 (2,3)=5
        // (2,6)=6 (3,4)=7 (3,6)=8 (4,5)=9 (4,6)=10 (5,6)=11.
        // All six spokes plus five ring edges: center has degree six.
        let f = EdgeSubgraph::from_edge_ids(&g, [0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]);
        let before = f.total_length();
        let reduced = degree_six_reduction(&f).unwrap();
        // Clockwise neighbors of the center from +x: 0,5,4,3,2,1. At i = 0
        // the closing edge (0,1) is already chosen; i = 1 replaces spoke
        // (5,6) with ring edge (0,5).
        assert_eq!(
            edge_set(&reduced),
            BTreeSet::from([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
        );
        assert!(close(reduced.total_length(), before));
        assert!(close(before, 9.9));
        let audit = check_mss_properties(&reduced, 2);
        assert_eq!(audit.max_degree, 5);
        assert!(!audit
            .lemma_violations
            .iter()
            .any(|v| matches!(v, MssViolation::NotKConnected { .. })));
    }

    #[test]
    fn degree_six_reduction_reports_dead_ends() {
        let g = wheel7();
        // The full wheel: every closing ring edge is already present, so no
        // replacement is legal at the center.
        let full = EdgeSubgraph::full(&g);
        assert_eq!(
            degree_six_reduction(&full).unwrap_err(),
            MssError::NoLegalReplacement { node: 6 }
        );
        // A subgraph with max degree ≤ 5 passes through unchanged.
        let g2 = fixtures::pent5();
        let ring = EdgeSubgraph::full(&g2);
        assert_eq!(edge_set(&degree_six_reduction(&ring).unwrap()), edge_set(&ring));
        // Sharp angles at a degree->=3 apex are rejected up front: in the
        // complete square, each corner sees a side and a diagonal 45 degrees
        // apart.
        let sq = fixtures::sq4();
        assert!(matches!(
            degree_six_reduction(&EdgeSubgraph::full(&sq)).unwrap_err(),
            MssError::AngleTooSmall { .. }
        ));
        // The same 45-degree pairs at degree-2 apexes are legitimate (both
        // edges can be forced), so the crossed 4-cycle passes through.
        let anti = EdgeSubgraph::from_edge_ids(&sq, [1, 2, 3, 4]);
        assert_eq!(edge_set(&degree_six_reduction(&anti).unwrap()), edge_set(&anti));
    }

    #[test]
    fn checker_flags_planted_violations() {
        let g = fixtures::sq4();
        // Narrow angles at degree-2 apexes are reported in the minimum
        // angle but are not violations; the crossed 4-cycle has one
        // 45-degree pair at each corner.
        let anti = EdgeSubgraph::from_edge_ids(&g, [1, 2, 3, 4]);
        let report = check_mss_properties(&anti, 2);
        assert!(!report
            .lemma_violations
            .iter()
            .any(|v| matches!(v, MssViolation::AngleBelowMin { .. })));
        assert!(close(report.min_adjacent_edge_angle.unwrap(), PI / 4.0));

        // In the complete square every corner has degree 3 with two
        // side-diagonal pairs at 45 degrees: eight angle violations.
        let full = EdgeSubgraph::full(&g);
        let report = check_mss_properties(&full, 2);
        let angle_hits = report
            .lemma_violations
            .iter()
            .filter(|v| matches!(v, MssViolation::AngleBelowMin { .. }))
            .count();
        assert_eq!(angle_hits, 8);
        assert!(report
            .lemma_violations
            .iter()
            .any(|v| matches!(v, MssViolation::AdjacentNeighbors { .. })));

        let broken = EdgeSubgraph::from_edge_ids(&g, [0, 3]);
        let report = check_mss_properties(&broken, 2);
        assert!(report
            .lemma_violations
            .iter()
            .any(|v| matches!(v, MssViolation::NotSpanning { node: 3 })));
        assert!(report
            .lemma_violations
            .iter()
            .any(|v| matches!(v, MssViolation::NotKConnected { k: 2 })));
    }

    #[test]
    fn minimal_outputs_have_the_one_less_connectivity_structure() {
        // For every edge uv of a minimal subgraph, removing uv drops the
        // connectivity to exactly k - 1, and for k = 2 the resulting
        // 1-block tree is a path with u and v in its two leaf blocks.
        let g = fixtures::pent5();
        let f = exact_k_mss(&g, 2, DEFAULT_MSS_EDGE_CAP).unwrap().subgraph;
        for &e in f.edge_ids().clone().iter() {
            let mut cut = f.clone();
            cut.remove_edge(e);
            let adj = spanning_adj(&cut);
            assert_eq!(vertex_connectivity_adj(&adj).unwrap(), 1);
            let tree = k_block_tree_adj(&adj, 1).unwrap();
            // Path shape: every block or separator touches at most two
            // incidences.
            for b in 0..tree.blocks.len() as u32 {
                assert!(tree.incidence.iter().filter(|&&(x, _)| x == b).count() <= 2);
            }
            for s in 0..tree.separators.len() as u32 {
                assert!(tree.incidence.iter().filter(|&&(_, y)| y == s).count() <= 2);
            }
            let leaves = tree.leaf_blocks();
            assert_eq!(leaves.len(), 2);
            let edge = g.edge(e);
            let in_leaf = |node: u32| {
                leaves
                    .iter()
                    .any(|&b| tree.blocks[b as usize].binary_search(&node).is_ok())
            };
            assert!(in_leaf(edge.u));
            assert!(in_leaf(edge.v));
        }
    }
}
