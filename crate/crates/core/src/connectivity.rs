//! Vertex connectivity machinery: internally disjoint paths (max-flow on a
//! node-split digraph), vertex connectivity, minimum separators, marked
//! components, and the k-block tree decomposition.
//!
//! Everything operates on [`AdjGraph`], a plain adjacency structure over the
//! original node ids; unit disk graphs, edge subgraphs, and induced
//! subgraphs all convert into it. Marked components carry *virtual* edges
//! (the clique added on a separator); virtual edges are tagged, never
//! weighted, and never leak into block node sets.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::udg::{EdgeSubgraph, NodeId, UnitDiskGraph};

/// Errors from connectivity queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnError {
    GraphTooSmall,
    UnknownNode(NodeId),
    SameEndpoints(NodeId),
    NotKConnected { k: u32 },
    Internal(&'static str),
}

impl fmt::Display for ConnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnError::GraphTooSmall => write!(f, "graph needs at least two nodes"),
            ConnError::UnknownNode(u) => write!(f, "node {u} is not in the graph"),
            ConnError::SameEndpoints(u) => write!(f, "endpoints must differ, got {u} twice"),
            ConnError::NotKConnected { k } => write!(f, "graph is not {k}-connected"),
            ConnError::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for ConnError {}

/// Plain undirected graph on original node ids, with virtual-edge tags.
#[derive(Clone, Debug, Default)]
pub struct AdjGraph {
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
    virtual_edges: BTreeSet<(NodeId, NodeId)>,
}

impl AdjGraph {
    pub fn new() -> Self {
        AdjGraph::default()
    }

    pub fn from_udg(g: &UnitDiskGraph) -> Self {
        let mut out = AdjGraph::new();
        for u in g.node_ids() {
            out.insert_node(u);
            for &v in g.neighbors(u) {
                out.insert_edge(u, v, false);
            }
        }
        out
    }

    /// Subgraph of `g` induced by `nodes`.
    pub fn induced(g: &UnitDiskGraph, nodes: &BTreeSet<NodeId>) -> Self {
        let mut out = AdjGraph::new();
        for &u in nodes {
            out.insert_node(u);
            for &v in g.neighbors(u) {
                if nodes.contains(&v) {
                    out.insert_edge(u, v, false);
                }
            }
        }
        out
    }

    /// Graph on the node span of `f` with its chosen edges.
    pub fn from_subgraph(f: &EdgeSubgraph<'_>) -> Self {
        let mut out = AdjGraph::new();
        for u in f.node_span() {
            out.insert_node(u);
        }
        for &e in f.edge_ids() {
            let edge = f.host().edge(e);
            out.insert_edge(edge.u, edge.v, false);
        }
        out
    }

    /// Graph on *all* host nodes with the chosen edges of `f`; nodes outside
    /// the span appear isolated. This is the right view for spanning
    /// connectivity checks.
    pub fn from_subgraph_on_host(f: &EdgeSubgraph<'_>) -> Self {
        let mut out = AdjGraph::new();
        for u in f.host().node_ids() {
            out.insert_node(u);
        }
        for &e in f.edge_ids() {
            let edge = f.host().edge(e);
            out.insert_edge(edge.u, edge.v, false);
        }
        out
    }

    pub fn insert_node(&mut self, u: NodeId) {
        self.adj.entry(u).or_default();
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, is_virtual: bool) {
        debug_assert_ne!(u, v);
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        if is_virtual {
            self.virtual_edges.insert(ordered(u, v));
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        self.adj.contains_key(&u)
    }

    /// Sorted node ids.
    pub fn node_ids(&self) -> Vec<NodeId> {
        self.adj.keys().copied().collect()
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.get(&u).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj.get(&u).map_or(0, |s| s.len())
    }

    pub fn are_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn is_virtual(&self, u: NodeId, v: NodeId) -> bool {
        self.virtual_edges.contains(&ordered(u, v))
    }

    /// Edges as `(u, v, is_virtual)` with `u < v`, sorted.
    pub fn edge_list(&self) -> Vec<(NodeId, NodeId, bool)> {
        let mut out = Vec::new();
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u < v {
                    out.push((u, v, self.is_virtual(u, v)));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.adj.values().all(|s| s.len() == n - 1)
    }

    /// Connected components avoiding `excluded`, ordered by smallest member,
    /// each sorted.
    pub fn components_without(&self, excluded: &BTreeSet<NodeId>) -> Vec<Vec<NodeId>> {
        let mut seen: BTreeSet<NodeId> = excluded.clone();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::new();
            queue.push_back(start);
            seen.insert(start);
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for v in self.neighbors(u) {
                    if !seen.contains(&v) {
                        seen.insert(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        !self.adj.is_empty() && self.components_without(&BTreeSet::new()).len() == 1
    }
}

#[inline]
fn ordered(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A vertex separator: the removed nodes and the components they induce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separator {
    /// Removed nodes, sorted.
    pub nodes: Vec<NodeId>,
    /// Components of the graph minus `nodes`, ordered by smallest member.
    pub components: Vec<Vec<NodeId>>,
}

/// Bipartite incidence of k-blocks and the separators used to split them
/// off. `incidence` holds `(block_index, separator_index)` pairs; the
/// structure forms a tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockTree {
    pub k: u32,
    /// Node sets of the k-blocks, each sorted; list sorted lexicographically.
    pub blocks: Vec<Vec<NodeId>>,
    /// Node sets of the separators, each sorted; list sorted.
    pub separators: Vec<Vec<NodeId>>,
    pub incidence: Vec<(u32, u32)>,
}

impl BlockTree {
    /// Indices of blocks incident to at most one separator.
    pub fn leaf_blocks(&self) -> Vec<u32> {
        (0..self.blocks.len() as u32)
            .filter(|&b| self.incidence.iter().filter(|&&(x, _)| x == b).count() <= 1)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Unit-capacity max flow on the node-split digraph.
// ---------------------------------------------------------------------------

struct FlowNet {
    to: Vec<u32>,
    cap: Vec<i32>,
    init: Vec<i32>,
    out: Vec<Vec<u32>>,
}

impl FlowNet {
    fn new(vertices: usize) -> Self {
        FlowNet {
            to: Vec::new(),
            cap: Vec::new(),
            init: Vec::new(),
            out: alloc::vec![Vec::new(); vertices],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i32) {
        let id = self.to.len() as u32;
        self.to.push(to as u32);
        self.cap.push(cap);
        self.init.push(cap);
        self.out[from].push(id);
        self.to.push(from as u32);
        self.cap.push(0);
        self.init.push(0);
        self.out[to].push(id + 1);
    }

    /// One BFS augmentation of a single unit; true on success.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut parent: Vec<Option<u32>> = alloc::vec![None; self.out.len()];
        let mut seen = alloc::vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        'search: while let Some(u) = queue.pop_front() {
            for &a in &self.out[u] {
                let v = self.to[a as usize] as usize;
                if self.cap[a as usize] > 0 && !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(a);
                    if v == t {
                        break 'search;
                    }
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let a = parent[v].expect("path arc") as usize;
            self.cap[a] -= 1;
            self.cap[a ^ 1] += 1;
            v = self.to[a ^ 1] as usize;
        }
        true
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit && self.augment(s, t) {
            flow += 1;
        }
        flow
    }

    fn flow_on(&self, arc: usize) -> i32 {
        self.init[arc] - self.cap[arc]
    }
}

/// Node-split flow network for internally disjoint `s`–`t` paths. Vertex `i`
/// maps to `in = 2i`, `out = 2i + 1`; internal nodes get a unit in→out arc,
/// while `s` and `t` are not split (source is `out(s)`, sink is `in(t)`).
struct SplitNet {
    net: FlowNet,
    ids: Vec<NodeId>,
    source: usize,
    sink: usize,
}

fn split_net(g: &AdjGraph, s: NodeId, t: NodeId) -> SplitNet {
    let ids = g.node_ids();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut net = FlowNet::new(2 * ids.len());
    for (&u, &i) in &index {
        if u != s && u != t {
            net.add_arc(2 * i, 2 * i + 1, 1);
        }
    }
    for (&u, &i) in &index {
        for v in g.neighbors(u) {
            let j = index[&v];
            net.add_arc(2 * i + 1, 2 * j, 1);
        }
    }
    SplitNet { net, source: 2 * index[&s] + 1, sink: 2 * index[&t], ids }
}

fn check_pair(g: &AdjGraph, u: NodeId, v: NodeId) -> Result<(), ConnError> {
    if !g.contains_node(u) {
        return Err(ConnError::UnknownNode(u));
    }
    if !g.contains_node(v) {
        return Err(ConnError::UnknownNode(v));
    }
    if u == v {
        return Err(ConnError::SameEndpoints(u));
    }
    Ok(())
}

/// Maximum number of internally disjoint `u`–`v` paths in `g`, Menger-style,
/// capped at `limit`.
pub fn disjoint_path_count_adj(
    g: &AdjGraph,
    u: NodeId,
    v: NodeId,
    limit: usize,
) -> Result<usize, ConnError> {
    check_pair(g, u, v)?;
    let mut sn = split_net(g, u, v);
    Ok(sn.net.max_flow(sn.source, sn.sink, limit))
}

/// A maximum family of internally disjoint paths between two nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisjointPaths {
    pub count: usize,
    /// Witness paths as node sequences from `u` to `v`; pairwise disjoint in
    /// their internal nodes.
    pub paths: Vec<Vec<NodeId>>,
}

/// Computes a maximum family of internally disjoint `u`–`v` paths with
/// witnesses.
pub fn max_disjoint_paths(
    g: &UnitDiskGraph,
    u: NodeId,
    v: NodeId,
) -> Result<DisjointPaths, ConnError> {
    max_disjoint_paths_adj(&AdjGraph::from_udg(g), u, v)
}

pub fn max_disjoint_paths_adj(
    g: &AdjGraph,
    u: NodeId,
    v: NodeId,
) -> Result<DisjointPaths, ConnError> {
    check_pair(g, u, v)?;
    let mut sn = split_net(g, u, v);
    let count = sn.net.max_flow(sn.source, sn.sink, usize::MAX);
    // Decompose the flow into paths by walking saturated arcs from the
    // source; arc order is fixed, so the witnesses are deterministic.
    let mut paths = Vec::with_capacity(count);
    for _ in 0..count {
        let mut path = alloc::vec![u];
        let mut at = sn.source;
        while at != sn.sink {
            let arc = sn
                .net
                .out[at]
                .iter()
                .copied()
                .find(|&a| a % 2 == 0 && sn.net.flow_on(a as usize) > 0)
                .expect("flow decomposes into paths");
            sn.net.cap[arc as usize] += 1; // consume this unit
            at = sn.net.to[arc as usize] as usize;
            if at % 2 == 0 {
                let node = sn.ids[at / 2];
                // Loop-erasure: integral flows may carry cycles; truncating
                // at a revisit leaves a simple path and discards the cycle.
                match path.iter().position(|&p| p == node) {
                    Some(pos) => path.truncate(pos + 1),
                    None => path.push(node),
                }
            }
        }
        paths.push(path);
    }
    Ok(DisjointPaths { count, paths })
}

/// Exact vertex connectivity. Complete graphs give `n - 1`; otherwise the
/// minimum over a separating pair family: for small graphs all non-adjacent
/// pairs, else a minimum-degree anchor against its non-neighbors plus all
/// non-adjacent pairs inside its neighborhood.
pub fn vertex_connectivity(g: &UnitDiskGraph) -> Result<usize, ConnError> {
    vertex_connectivity_adj(&AdjGraph::from_udg(g))
}

pub fn vertex_connectivity_adj(g: &AdjGraph) -> Result<usize, ConnError> {
    let n = g.n();
    if n < 2 {
        return Err(ConnError::GraphTooSmall);
    }
    if g.is_complete() {
        return Ok(n - 1);
    }
    let ids = g.node_ids();
    let mut best = n - 1;
    if n <= 12 {
        for (i, &u) in ids.iter().enumerate() {
            for &v in &ids[i + 1..] {
                if !g.are_adjacent(u, v) {
                    best = best.min(disjoint_path_count_adj(g, u, v, best)?);
                }
            }
        }
    } else {
        let &anchor = ids
            .iter()
            .min_by_key(|&&u| (g.degree(u), u))
            .expect("nonempty graph");
        let nbrs: Vec<NodeId> = g.neighbors(anchor).collect();
        for &v in &ids {
            if v != anchor && !g.are_adjacent(anchor, v) {
                best = best.min(disjoint_path_count_adj(g, anchor, v, best)?);
            }
        }
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                if !g.are_adjacent(x, y) {
                    best = best.min(disjoint_path_count_adj(g, x, y, best)?);
                }
            }
        }
    }
    Ok(best)
}

/// Fast yes/no k-connectivity. For small `k` this enumerates candidate
/// separators of size `< k` (cheaper than flows); larger `k` falls back to
/// exact connectivity.
pub fn is_k_connected_adj(g: &AdjGraph, k: u32) -> bool {
    let n = g.n();
    if k == 0 {
        return n > 0;
    }
    if n < k as usize + 1 {
        return false;
    }
    if k <= 3 {
        if !g.is_connected() {
            return false;
        }
        let ids = g.node_ids();
        for size in 1..k as usize {
            let mut found_split = false;
            for_each_combination(&ids, size, &mut |combo| {
                let removed: BTreeSet<NodeId> = combo.iter().copied().collect();
                if g.components_without(&removed).len() >= 2 {
                    found_split = true;
                    false
                } else {
                    true
                }
            });
            if found_split {
                return false;
            }
        }
        true
    } else {
        matches!(vertex_connectivity_adj(g), Ok(c) if c >= k as usize)
    }
}

pub fn is_k_connected(g: &UnitDiskGraph, k: u32) -> bool {
    is_k_connected_adj(&AdjGraph::from_udg(g), k)
}

/// Calls `visit` with every `size`-combination of `items` in lexicographic
/// order until `visit` returns false.
fn for_each_combination<T: Copy>(
    items: &[T],
    size: usize,
    visit: &mut dyn FnMut(&[T]) -> bool,
) {
    if size > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut combo: Vec<T> = Vec::with_capacity(size);
    loop {
        combo.clear();
        combo.extend(idx.iter().map(|&i| items[i]));
        if !visit(&combo) {
            return;
        }
        // advance
        let mut pos = size;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] + 1 <= items.len() - (size - pos) {
                idx[pos] += 1;
                for j in pos + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if size == 0 {
            return; // single empty combination
        }
    }
}

/// Smallest separator of size at most `max_size`, ties broken
/// lexicographically; `None` when no such separator exists.
pub fn find_separator(g: &UnitDiskGraph, max_size: usize) -> Option<Separator> {
    find_separator_adj(&AdjGraph::from_udg(g), max_size)
}

pub fn find_separator_adj(g: &AdjGraph, max_size: usize) -> Option<Separator> {
    let n = g.n();
    let ids = g.node_ids();
    let cap = max_size.min(n.saturating_sub(2));
    for size in 0..=cap {
        let mut found: Option<Separator> = None;
        for_each_combination(&ids, size, &mut |combo| {
            let removed: BTreeSet<NodeId> = combo.iter().copied().collect();
            let comps = g.components_without(&removed);
            if comps.len() >= 2 {
                found = Some(Separator { nodes: combo.to_vec(), components: comps });
                false
            } else {
                true
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Marked S-components: for each component `C` of `g - S`, the subgraph
/// induced by `C ∪ S` plus a virtual clique on `S` (skipping pairs already
/// adjacent; inherited virtual tags are preserved). Components are ordered
/// by smallest member.
pub fn marked_components(g: &UnitDiskGraph, sep: &[NodeId]) -> Result<Vec<AdjGraph>, ConnError> {
    marked_components_adj(&AdjGraph::from_udg(g), sep)
}

pub fn marked_components_adj(g: &AdjGraph, sep: &[NodeId]) -> Result<Vec<AdjGraph>, ConnError> {
    for &s in sep {
        if !g.contains_node(s) {
            return Err(ConnError::UnknownNode(s));
        }
    }
    let removed: BTreeSet<NodeId> = sep.iter().copied().collect();
    let comps = g.components_without(&removed);
    let mut out = Vec::with_capacity(comps.len());
    for comp in comps {
        let mut keep: BTreeSet<NodeId> = comp.iter().copied().collect();
        keep.extend(removed.iter().copied());
        let mut marked = AdjGraph::new();
        for &u in &keep {
            marked.insert_node(u);
            for v in g.neighbors(u) {
                if keep.contains(&v) {
                    marked.insert_edge(u, v, g.is_virtual(u, v));
                }
            }
        }
        for (i, &a) in sep.iter().enumerate() {
            for &b in &sep[i + 1..] {
                if !marked.are_adjacent(a, b) {
                    marked.insert_edge(a, b, true);
                }
            }
        }
        out.push(marked);
    }
    Ok(out)
}

/// Builds the k-block tree of a k-connected graph: repeatedly split marked
/// components on k-separators until none remains; terminal components are
/// the k-blocks. A block and a separator are incident when the separator's
/// node set lies inside the block's.
pub fn k_block_tree(g: &UnitDiskGraph, k: u32) -> Result<BlockTree, ConnError> {
    k_block_tree_adj(&AdjGraph::from_udg(g), k)
}

pub fn k_block_tree_adj(g: &AdjGraph, k: u32) -> Result<BlockTree, ConnError> {
    if !is_k_connected_adj(g, k) {
        return Err(ConnError::NotKConnected { k });
    }
    let mut blocks: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    let mut separators: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    let mut work: VecDeque<AdjGraph> = VecDeque::new();
    work.push_back(g.clone());
    while let Some(h) = work.pop_front() {
        match find_separator_adj(&h, k as usize) {
            Some(sep) => {
                if sep.nodes.len() < k as usize {
                    // A marked component of a k-connected graph stays
                    // k-connected; a smaller separator contradicts that.
                    return Err(ConnError::Internal("marked component lost k-connectivity"));
                }
                separators.insert(sep.nodes.clone());
                for piece in marked_components_adj(&h, &sep.nodes)? {
                    work.push_back(piece);
                }
            }
            None => {
                blocks.insert(h.node_ids());
            }
        }
    }
    let blocks: Vec<Vec<NodeId>> = blocks.into_iter().collect();
    let separators: Vec<Vec<NodeId>> = separators.into_iter().collect();
    let mut incidence = Vec::new();
    for (si, sep) in separators.iter().enumerate() {
        for (bi, block) in blocks.iter().enumerate() {
            if sep.iter().all(|s| block.binary_search(s).is_ok()) {
                incidence.push((bi as u32, si as u32));
            }
        }
    }
    incidence.sort_unstable();
    let tree = BlockTree { k, blocks, separators, incidence };
    if !incidence_is_tree(&tree) {
        return Err(ConnError::Internal("block incidence is not a tree"));
    }
    Ok(tree)
}

fn incidence_is_tree(t: &BlockTree) -> bool {
    let b = t.blocks.len();
    let s = t.separators.len();
    let vertices = b + s;
    if t.incidence.len() + 1 != vertices {
        return false;
    }
    // Connectivity over the bipartite incidence graph.
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); vertices];
    for &(bi, si) in &t.incidence {
        let x = bi as usize;
        let y = b + si as usize;
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut seen = alloc::vec![false; vertices];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    reached == vertices
}

/// Do all pairs of `subset` have at least `k` internally disjoint paths in
/// `g`? Subsets of size < 2 count as connected by convention.
pub fn is_subset_k_connected(
    g: &UnitDiskGraph,
    subset: &BTreeSet<NodeId>,
    k: u32,
) -> Result<bool, ConnError> {
    is_subset_k_connected_adj(&AdjGraph::from_udg(g), subset, k)
}

pub fn is_subset_k_connected_adj(
    g: &AdjGraph,
    subset: &BTreeSet<NodeId>,
    k: u32,
) -> Result<bool, ConnError> {
    for &u in subset {
        if !g.contains_node(u) {
            return Err(ConnError::UnknownNode(u));
        }
    }
    if subset.len() < 2 || k == 0 {
        return Ok(true);
    }
    let ids: Vec<NodeId> = subset.iter().copied().collect();
    for (i, &u) in ids.iter().enumerate() {
        for &v in &ids[i + 1..] {
            if disjoint_path_count_adj(g, u, v, k as usize)? < k as usize {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
