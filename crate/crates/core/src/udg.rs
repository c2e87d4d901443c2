//! Unit disk graphs over weighted points in the plane.
//!
//! Two nodes are adjacent exactly when their squared Euclidean distance is
//! at most `1.0` (closed disk; the predicate never takes a square root and
//! applies no epsilon). Node ids are contiguous from 0, edges are stored with
//! `u < v` in lexicographic order, and adjacency lists are sorted, so every
//! traversal of a graph is deterministic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Node identifier; ids within one graph are contiguous from 0.
pub type NodeId = u32;

/// How close to unit distance a generated point pair may sit. Generation
/// re-draws points that land within this band so that adjacency never hinges
/// on the last few bits of a coordinate.
pub const UNIT_DISTANCE_GUARD: f64 = 1e-9;

/// A weighted point in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointNode {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

/// An undirected edge of a unit disk graph, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    /// Euclidean distance between the endpoints.
    pub length: f64,
}

/// Errors from graph construction and instance generation.
#[derive(Clone, Debug, PartialEq)]
pub enum UdgError {
    EmptyNodeList,
    DuplicateId(NodeId),
    NonContiguousId { expected: NodeId, found: NodeId },
    NonFiniteCoordinate { id: NodeId },
    NonFiniteWeight { id: NodeId },
    NegativeWeight { id: NodeId },
    BadNodeCount(usize),
    BadSide(f64),
    BadWeightRange { lo: f64, hi: f64 },
    PlacementFailed,
}

impl fmt::Display for UdgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UdgError::EmptyNodeList => write!(f, "instance has no nodes"),
            UdgError::DuplicateId(id) => write!(f, "duplicate node id {id}"),
            UdgError::NonContiguousId { expected, found } => {
                write!(f, "node ids must be contiguous from 0: expected {expected}, found {found}")
            }
            UdgError::NonFiniteCoordinate { id } => {
                write!(f, "node {id} has a non-finite coordinate")
            }
            UdgError::NonFiniteWeight { id } => write!(f, "node {id} has a non-finite weight"),
            UdgError::NegativeWeight { id } => write!(f, "node {id} has a negative weight"),
            UdgError::BadNodeCount(n) => write!(f, "cannot generate an instance with {n} nodes"),
            UdgError::BadSide(s) => write!(f, "square side must be positive and finite, got {s}"),
            UdgError::BadWeightRange { lo, hi } => {
                write!(f, "weight range [{lo}, {hi}] must satisfy 0 <= lo <= hi and be finite")
            }
            UdgError::PlacementFailed => {
                write!(f, "could not place points away from unit-distance boundaries")
            }
        }
    }
}

impl core::error::Error for UdgError {}

/// Squared Euclidean distance between two points.
#[inline]
pub fn dist2(a: &PointNode, b: &PointNode) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

/// Euclidean distance between two points.
#[inline]
pub fn dist(a: &PointNode, b: &PointNode) -> f64 {
    libm::sqrt(dist2(a, b))
}

/// Angle at `at` between the rays towards `p` and `q`, in radians within
/// `[0, pi]`. `None` when either ray is degenerate (coincident points).
pub fn angle_at(at: &PointNode, p: &PointNode, q: &PointNode) -> Option<f64> {
    let (ax, ay) = (p.x - at.x, p.y - at.y);
    let (bx, by) = (q.x - at.x, q.y - at.y);
    if (ax == 0.0 && ay == 0.0) || (bx == 0.0 && by == 0.0) {
        return None;
    }
    let dot = ax * bx + ay * by;
    let cross = ax * by - ay * bx;
    Some(libm::atan2(libm::fabs(cross), dot))
}

/// A unit disk graph: weighted points plus the derived adjacency structure.
///
/// Edges are never stored in instance files; they are re-derived from
/// coordinates on construction.
#[derive(Clone, Debug, Serialize)]
pub struct UnitDiskGraph {
    nodes: Vec<PointNode>,
    edges: Vec<Edge>,
    #[serde(skip)]
    adj: Vec<Vec<NodeId>>,
    #[serde(skip)]
    edge_index: BTreeMap<(NodeId, NodeId), u32>,
}

/// Builds a unit disk graph from a node list.
///
/// The list may arrive in any order; it is sorted by id. Ids must be distinct
/// and contiguous from 0, coordinates and weights finite, weights
/// non-negative. Adjacency: `dist2(u, v) <= 1.0`.
pub fn build_udg(mut nodes: Vec<PointNode>) -> Result<UnitDiskGraph, UdgError> {
    if nodes.is_empty() {
        return Err(UdgError::EmptyNodeList);
    }
    nodes.sort_by_key(|p| p.id);
    for (i, p) in nodes.iter().enumerate() {
        let expected = i as NodeId;
        if p.id != expected {
            if i > 0 && nodes[i - 1].id == p.id {
                return Err(UdgError::DuplicateId(p.id));
            }
            return Err(UdgError::NonContiguousId { expected, found: p.id });
        }
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(UdgError::NonFiniteCoordinate { id: p.id });
        }
        if !p.weight.is_finite() {
            return Err(UdgError::NonFiniteWeight { id: p.id });
        }
        if p.weight < 0.0 {
            return Err(UdgError::NegativeWeight { id: p.id });
        }
    }
    let n = nodes.len();
    let mut edges = Vec::new();
    let mut adj = alloc::vec![Vec::new(); n];
    for u in 0..n {
        for v in (u + 1)..n {
            if dist2(&nodes[u], &nodes[v]) <= 1.0 {
                edges.push(Edge {
                    u: u as NodeId,
                    v: v as NodeId,
                    length: dist(&nodes[u], &nodes[v]),
                });
                adj[u].push(v as NodeId);
                adj[v].push(u as NodeId);
            }
        }
    }
    let edge_index = edges
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.u, e.v), i as u32))
        .collect();
    Ok(UnitDiskGraph { nodes, edges, adj, edge_index })
}

impl UnitDiskGraph {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[PointNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &PointNode {
        &self.nodes[id as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, edge_id: u32) -> &Edge {
        &self.edges[edge_id as usize]
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn are_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.edge_id(u, v).is_some()
    }

    /// Edge id for the pair `{u, v}`, if adjacent.
    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<u32> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge_index.get(&key).copied()
    }

    pub fn weight_of(&self, u: NodeId) -> f64 {
        self.nodes[u as usize].weight
    }

    /// Sum of node weights over `ids`.
    pub fn weight_sum<I: IntoIterator<Item = NodeId>>(&self, ids: I) -> f64 {
        ids.into_iter().map(|u| self.weight_of(u)).sum()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(|i| i as NodeId)
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        (u as usize) < self.nodes.len()
    }
}

/// A subgraph of a host unit disk graph given by a set of host edges, plus
/// explicitly kept isolated nodes. The node span is the union of the chosen
/// edges' endpoints and the isolated set.
#[derive(Clone, Debug)]
pub struct EdgeSubgraph<'g> {
    host: &'g UnitDiskGraph,
    edge_ids: BTreeSet<u32>,
    isolated: BTreeSet<NodeId>,
}

impl<'g> EdgeSubgraph<'g> {
    pub fn empty(host: &'g UnitDiskGraph) -> Self {
        EdgeSubgraph { host, edge_ids: BTreeSet::new(), isolated: BTreeSet::new() }
    }

    /// Subgraph containing every edge of the host.
    pub fn full(host: &'g UnitDiskGraph) -> Self {
        let edge_ids = (0..host.edges().len() as u32).collect();
        EdgeSubgraph { host, edge_ids, isolated: BTreeSet::new() }
    }

    pub fn from_edge_ids<I: IntoIterator<Item = u32>>(host: &'g UnitDiskGraph, ids: I) -> Self {
        let edge_ids: BTreeSet<u32> = ids.into_iter().collect();
        debug_assert!(edge_ids.iter().all(|&e| (e as usize) < host.edges().len()));
        EdgeSubgraph { host, edge_ids, isolated: BTreeSet::new() }
    }

    /// Subgraph from endpoint pairs; every pair must be a host edge.
    pub fn from_endpoints(
        host: &'g UnitDiskGraph,
        pairs: &[(NodeId, NodeId)],
    ) -> Option<Self> {
        let mut edge_ids = BTreeSet::new();
        for &(u, v) in pairs {
            edge_ids.insert(host.edge_id(u, v)?);
        }
        Some(EdgeSubgraph { host, edge_ids, isolated: BTreeSet::new() })
    }

    pub fn host(&self) -> &'g UnitDiskGraph {
        self.host
    }

    pub fn edge_ids(&self) -> &BTreeSet<u32> {
        &self.edge_ids
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn contains_edge(&self, edge_id: u32) -> bool {
        self.edge_ids.contains(&edge_id)
    }

    pub fn insert_edge(&mut self, edge_id: u32) -> bool {
        debug_assert!((edge_id as usize) < self.host.edges().len());
        self.edge_ids.insert(edge_id)
    }

    pub fn remove_edge(&mut self, edge_id: u32) -> bool {
        self.edge_ids.remove(&edge_id)
    }

    /// Keeps `u` in the node span even without incident chosen edges.
    pub fn insert_isolated(&mut self, u: NodeId) {
        self.isolated.insert(u);
    }

    pub fn isolated_nodes(&self) -> &BTreeSet<NodeId> {
        &self.isolated
    }

    /// Endpoints of chosen edges plus isolated nodes, sorted.
    pub fn node_span(&self) -> BTreeSet<NodeId> {
        let mut span = self.isolated.clone();
        for &e in &self.edge_ids {
            let edge = self.host.edge(e);
            span.insert(edge.u);
            span.insert(edge.v);
        }
        span
    }

    pub fn spans_host(&self) -> bool {
        self.node_span().len() == self.host.n()
    }

    /// Degree of `u` counting chosen edges only.
    pub fn degree_of(&self, u: NodeId) -> usize {
        self.edge_ids
            .iter()
            .filter(|&&e| {
                let edge = self.host.edge(e);
                edge.u == u || edge.v == u
            })
            .count()
    }

    /// Chosen neighbors of `u`, sorted.
    pub fn neighbors_of(&self, u: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edge_ids
            .iter()
            .filter_map(|&e| {
                let edge = self.host.edge(e);
                if edge.u == u {
                    Some(edge.v)
                } else if edge.v == u {
                    Some(edge.u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Edge list as endpoint pairs, sorted lexicographically.
    pub fn endpoint_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.edge_ids
            .iter()
            .map(|&e| {
                let edge = self.host.edge(e);
                (edge.u, edge.v)
            })
            .collect()
    }

    /// Total Euclidean length of the chosen edges (recomputed on each call).
    pub fn total_length(&self) -> f64 {
        subgraph_length(self)
    }
}

impl Serialize for EdgeSubgraph<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EdgeSubgraph", 2)?;
        s.serialize_field("edges", &self.endpoint_pairs())?;
        s.serialize_field("isolated_nodes", &self.isolated)?;
        s.end()
    }
}

/// Sum of edge lengths of a subgraph.
pub fn subgraph_length(f: &EdgeSubgraph<'_>) -> f64 {
    f.edge_ids.iter().map(|&e| f.host.edge(e).length).sum()
}

/// Deterministic random instance: `n` points uniform in `[0, side]^2` with
/// weights uniform in `[w_lo, w_hi]`, seeded. A point landing within
/// [`UNIT_DISTANCE_GUARD`] of unit distance to an earlier point is re-drawn,
/// so adjacency never depends on coordinate round-off.
pub fn random_instance(
    n: usize,
    side: f64,
    w_lo: f64,
    w_hi: f64,
    seed: u64,
) -> Result<UnitDiskGraph, UdgError> {
    if n == 0 {
        return Err(UdgError::BadNodeCount(n));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(UdgError::BadSide(side));
    }
    if !(w_lo.is_finite() && w_hi.is_finite() && 0.0 <= w_lo && w_lo <= w_hi) {
        return Err(UdgError::BadWeightRange { lo: w_lo, hi: w_hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coord = Uniform::new_inclusive(0.0, side);
    let weight = Uniform::new_inclusive(w_lo, w_hi);
    let mut nodes: Vec<PointNode> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    for id in 0..n {
        loop {
            attempts += 1;
            if attempts > 1_000_000 {
                return Err(UdgError::PlacementFailed);
            }
            let x = coord.sample(&mut rng);
            let y = coord.sample(&mut rng);
            let candidate = PointNode { id: id as NodeId, x, y, weight: 0.0 };
            let near_unit = nodes
                .iter()
                .any(|p| libm::fabs(dist(p, &candidate) - 1.0) < UNIT_DISTANCE_GUARD);
            if !near_unit {
                let w = weight.sample(&mut rng);
                nodes.push(PointNode { weight: w, ..candidate });
                break;
            }
        }
    }
    build_udg(nodes)
}

/// Canonical fixtures. All weights are 1 unless noted.
pub mod fixtures {
    use super::*;

    fn unit_points(coords: &[(f64, f64)]) -> UnitDiskGraph {
        let nodes = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| PointNode { id: i as NodeId, x, y, weight: 1.0 })
            .collect();
        build_udg(nodes).expect("fixture coordinates are valid")
    }

    /// Axis-aligned square of side 0.6; both diagonals fit in the unit disk,
    /// so the graph is K4.
    pub fn sq4() -> UnitDiskGraph {
        unit_points(&[(0.0, 0.0), (0.6, 0.0), (0.0, 0.6), (0.6, 0.6)])
    }

    /// Three collinear points 0.9 apart; a path.
    pub fn path3() -> UnitDiskGraph {
        unit_points(&[(0.0, 0.0), (0.9, 0.0), (1.8, 0.0)])
    }

    /// Regular pentagon of side 0.9; diagonals exceed 1, so only the
    /// five ring edges exist.
    pub fn pent5() -> UnitDiskGraph {
        let r = 0.9 / (2.0 * libm::sin(core::f64::consts::PI / 5.0));
        let coords: Vec<(f64, f64)> = (0..5)
            .map(|i| {
                let theta = core::f64::consts::FRAC_PI_2
                    + 2.0 * core::f64::consts::PI * (i as f64) / 5.0;
                (r * libm::cos(theta), r * libm::sin(theta))
            })
            .collect();
        unit_points(&coords)
    }

    /// Regular hexagon of circumradius 0.95 (ids 0..5) around a center node
    /// (id 6); ring edges, spokes, and nothing else — a wheel.
    pub fn hex7() -> UnitDiskGraph {
        let r = 0.95;
        let mut coords: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let theta = 2.0 * core::f64::consts::PI * (i as f64) / 6.0;
                (r * libm::cos(theta), r * libm::sin(theta))
            })
            .collect();
        coords.push((0.0, 0.0));
        unit_points(&coords)
    }
}
