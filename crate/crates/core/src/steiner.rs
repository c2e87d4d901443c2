//! Minimum node-weighted k-connected Steiner network machinery: edge-weight
//! derivation from node costs, two pluggable subset-k-connected subgraph
//! (SkCS) solvers (an exhaustive branch-and-bound and a successive shortest
//! path augmentation heuristic), k-block extraction around the terminals,
//! and the min-degree cost bound checker.

use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;

use crate::connectivity::{
    find_separator_adj, is_k_connected_adj, is_subset_k_connected_adj, AdjGraph,
};
use crate::domset::NodeSet;
use crate::udg::{EdgeSubgraph, NodeId, UnitDiskGraph};

/// Default cap on host edge count for the exhaustive SkCS search.
pub const DEFAULT_SKCS_EDGE_CAP: usize = 22;
/// Strict-improvement threshold for weight comparisons in searches.
const WEIGHT_EPS: f64 = 1e-12;
/// Tolerance for the node-cost versus edge-weight bound.
const COST_BOUND_TOL: f64 = 1e-9;
/// Strict-improvement threshold in shortest-path label correction.
const PATH_EPS: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub enum SteinerError {
    CostLengthMismatch { expected: usize, got: usize },
    NonFiniteCost { node: NodeId },
    NegativeCost { node: NodeId },
    UnknownTerminal(NodeId),
    KMustBePositive,
    NotKConnected { k: u32 },
    /// The host graph itself does not give the terminals k disjoint paths.
    Infeasible,
    EdgeCapExceeded { cap: usize, have: usize },
    /// An internal guarantee failed; `lhs ≤ rhs` was expected.
    InvariantViolated { what: &'static str, lhs: f64, rhs: f64 },
}

impl fmt::Display for SteinerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SteinerError::CostLengthMismatch { expected, got } => {
                write!(f, "expected {expected} node costs, got {got}")
            }
            SteinerError::NonFiniteCost { node } => {
                write!(f, "node {node} has a non-finite cost")
            }
            SteinerError::NegativeCost { node } => {
                write!(f, "node {node} has a negative cost")
            }
            SteinerError::UnknownTerminal(t) => {
                write!(f, "terminal {t} is not in the graph")
            }
            SteinerError::KMustBePositive => write!(f, "k must be at least 1"),
            SteinerError::NotKConnected { k } => {
                write!(f, "host graph is not {k}-connected")
            }
            SteinerError::Infeasible => {
                write!(f, "host graph cannot k-connect the terminals")
            }
            SteinerError::EdgeCapExceeded { cap, have } => {
                write!(f, "exhaustive search capped at {cap} edges, instance has {have}")
            }
            SteinerError::InvariantViolated { what, lhs, rhs } => {
                write!(f, "{what}: expected {lhs} <= {rhs}")
            }
        }
    }
}

impl core::error::Error for SteinerError {}

/// Which SkCS solver produced a solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SkcsSolverKind {
    Exact,
    Augment,
}

/// w(uv) = (c(u) + c(v)) / 2 for every host edge, in edge-id order.
pub fn derive_edge_weights(
    g: &UnitDiskGraph,
    node_costs: &[f64],
) -> Result<Vec<f64>, SteinerError> {
    if node_costs.len() != g.n() {
        return Err(SteinerError::CostLengthMismatch {
            expected: g.n(),
            got: node_costs.len(),
        });
    }
    for (i, &c) in node_costs.iter().enumerate() {
        if !c.is_finite() {
            return Err(SteinerError::NonFiniteCost { node: i as NodeId });
        }
        if c < 0.0 {
            return Err(SteinerError::NegativeCost { node: i as NodeId });
        }
    }
    Ok(g.edges()
        .iter()
        .map(|e| (node_costs[e.u as usize] + node_costs[e.v as usize]) / 2.0)
        .collect())
}

/// A subset-k-connected subgraph problem: find a minimum edge-weight set
/// whose subgraph gives every terminal pair k internally disjoint paths.
/// Terminal node costs are zeroed on construction (terminals come for
/// free), and edge weights are derived from the adjusted costs.
#[derive(Clone, Debug)]
pub struct SkcsInstance<'g> {
    pub g: &'g UnitDiskGraph,
    pub terminals: NodeSet,
    pub k: u32,
    /// Per-node costs with terminal entries zeroed.
    pub node_costs: Vec<f64>,
    /// Per-edge weights, aligned with host edge ids.
    pub edge_weights: Vec<f64>,
}

impl<'g> SkcsInstance<'g> {
    pub fn new(
        g: &'g UnitDiskGraph,
        terminals: NodeSet,
        k: u32,
        node_costs: &[f64],
    ) -> Result<Self, SteinerError> {
        if k == 0 {
            return Err(SteinerError::KMustBePositive);
        }
        // Validate raw costs before adjusting.
        derive_edge_weights(g, node_costs)?;
        for &t in &terminals {
            if !g.contains_node(t) {
                return Err(SteinerError::UnknownTerminal(t));
            }
        }
        let mut adjusted = node_costs.to_vec();
        for &t in &terminals {
            adjusted[t as usize] = 0.0;
        }
        let edge_weights = derive_edge_weights(g, &adjusted)?;
        Ok(SkcsInstance { g, terminals, k, node_costs: adjusted, edge_weights })
    }

    /// Total cost of the nodes spanned by `f`, terminals free.
    pub fn span_cost(&self, f: &EdgeSubgraph<'_>) -> f64 {
        f.node_span().iter().map(|&v| self.node_costs[v as usize]).sum()
    }

    pub fn subgraph_weight(&self, f: &EdgeSubgraph<'_>) -> f64 {
        f.edge_ids().iter().map(|&e| self.edge_weights[e as usize]).sum()
    }
}

/// Graph view of an edge set with the terminals always present as nodes
/// (possibly isolated), so subset-connectivity queries never see unknown
/// ids.
fn graph_with_terminals(f: &EdgeSubgraph<'_>, terminals: &NodeSet) -> AdjGraph {
    let mut adj = AdjGraph::from_subgraph(f);
    for &t in terminals {
        adj.insert_node(t);
    }
    adj
}

/// Exhaustive SkCS: minimum total-weight edge set making the terminals
/// pairwise k-connected. Deterministic: edges explored ascending by
/// (weight, id), include-first; the first optimum found in that order is
/// returned (ties are not re-broken, which keeps zero-weight strata cheap).
pub fn skcs_exact<'g>(
    inst: &SkcsInstance<'g>,
    edge_cap: usize,
) -> Result<EdgeSubgraph<'g>, SteinerError> {
    let g = inst.g;
    if g.edges().len() > edge_cap {
        return Err(SteinerError::EdgeCapExceeded { cap: edge_cap, have: g.edges().len() });
    }
    let full = EdgeSubgraph::full(g);
    if !is_subset_k_connected_adj(&graph_with_terminals(&full, &inst.terminals), &inst.terminals, inst.k)
        .expect("terminals validated")
    {
        return Err(SteinerError::Infeasible);
    }
    let mut search = SkcsSearch::new(inst);
    search.run();
    Ok(EdgeSubgraph::from_edge_ids(g, search.best.expect("full set is feasible")))
}

struct SkcsSearch<'a, 'g> {
    inst: &'a SkcsInstance<'g>,
    /// Edge ids ascending by (weight, id).
    order: Vec<u32>,
    prefix: Vec<f64>,
    best: Option<Vec<u32>>,
    best_weight: f64,
    included: Vec<u32>,
    /// Degree of each terminal in the included set (only terminals need a
    /// degree of at least k when there are two or more of them).
    term_degree: Vec<u32>,
    rem_inc: Vec<u32>,
    is_terminal: Vec<bool>,
    term_deficiency: u64,
}

impl<'a, 'g> SkcsSearch<'a, 'g> {
    fn new(inst: &'a SkcsInstance<'g>) -> Self {
        let g = inst.g;
        let mut order: Vec<u32> = (0..g.edges().len() as u32).collect();
        order.sort_by(|&a, &b| {
            let (wa, wb) = (inst.edge_weights[a as usize], inst.edge_weights[b as usize]);
            wa.total_cmp(&wb).then(a.cmp(&b))
        });
        let mut prefix = Vec::with_capacity(order.len() + 1);
        prefix.push(0.0);
        for &e in &order {
            prefix.push(prefix[prefix.len() - 1] + inst.edge_weights[e as usize]);
        }
        let mut rem_inc = alloc::vec![0u32; g.n()];
        for e in g.edges() {
            rem_inc[e.u as usize] += 1;
            rem_inc[e.v as usize] += 1;
        }
        let mut is_terminal = alloc::vec![false; g.n()];
        for &t in &inst.terminals {
            is_terminal[t as usize] = true;
        }
        let demand_per_terminal =
            if inst.terminals.len() >= 2 { u64::from(inst.k) } else { 0 };
        SkcsSearch {
            inst,
            order,
            prefix,
            best: None,
            best_weight: f64::INFINITY,
            included: Vec::new(),
            term_degree: alloc::vec![0; g.n()],
            rem_inc,
            is_terminal,
            term_deficiency: demand_per_terminal * inst.terminals.len() as u64,
        }
    }

    fn run(&mut self) {
        self.dfs(0, 0.0);
    }

    fn current_is_feasible(&self) -> bool {
        let g = self.inst.g;
        let mut adj = AdjGraph::new();
        for &t in &self.inst.terminals {
            adj.insert_node(t);
        }
        for &e in &self.included {
            let edge = g.edge(e);
            adj.insert_edge(edge.u, edge.v, false);
        }
        is_subset_k_connected_adj(&adj, &self.inst.terminals, self.inst.k)
            .expect("terminal ids validated")
    }

    fn union_is_feasible(&self, pos: usize) -> bool {
        let g = self.inst.g;
        let mut adj = AdjGraph::new();
        for &t in &self.inst.terminals {
            adj.insert_node(t);
        }
        for &e in self.included.iter().chain(&self.order[pos..]) {
            let edge = g.edge(e);
            adj.insert_edge(edge.u, edge.v, false);
        }
        is_subset_k_connected_adj(&adj, &self.inst.terminals, self.inst.k)
            .expect("terminal ids validated")
    }

    fn bump_terminal(&mut self, node: NodeId, delta: i32) {
        if !self.is_terminal[node as usize] || self.inst.terminals.len() < 2 {
            return;
        }
        let d = &mut self.term_degree[node as usize];
        let before = *d;
        *d = (*d as i32 + delta) as u32;
        let k = self.inst.k;
        let def_before = u64::from(k.saturating_sub(before));
        let def_after = u64::from(k.saturating_sub(*d));
        self.term_deficiency = self.term_deficiency + def_after - def_before;
    }

    fn dfs(&mut self, pos: usize, acc: f64) {
        // First-found rule: anything at or above the incumbent is pruned,
        // so equal-weight optima never replace the earlier one.
        if acc >= self.best_weight - WEIGHT_EPS {
            return;
        }
        if self.term_deficiency == 0 && self.current_is_feasible() {
            self.best_weight = acc;
            let mut ids = self.included.clone();
            ids.sort_unstable();
            self.best = Some(ids);
            return;
        }
        if pos == self.order.len() {
            return;
        }
        let need = (self.term_deficiency as usize).div_ceil(2);
        if pos + need > self.order.len() {
            return;
        }
        if acc + (self.prefix[pos + need] - self.prefix[pos])
            >= self.best_weight - WEIGHT_EPS
        {
            return;
        }

        let e = self.order[pos];
        let (u, v) = {
            let edge = self.inst.g.edge(e);
            (edge.u, edge.v)
        };
        self.rem_inc[u as usize] -= 1;
        self.rem_inc[v as usize] -= 1;

        let w = self.inst.edge_weights[e as usize];
        if acc + w < self.best_weight - WEIGHT_EPS {
            self.bump_terminal(u, 1);
            self.bump_terminal(v, 1);
            self.included.push(e);
            self.dfs(pos + 1, acc + w);
            self.included.pop();
            self.bump_terminal(u, -1);
            self.bump_terminal(v, -1);
        }

        let terminals_still_ok = |s: &Self, node: NodeId| {
            !s.is_terminal[node as usize]
                || s.inst.terminals.len() < 2
                || s.term_degree[node as usize] + s.rem_inc[node as usize] >= s.inst.k
        };
        if terminals_still_ok(self, u)
            && terminals_still_ok(self, v)
            && self.union_is_feasible(pos + 1)
        {
            self.dfs(pos + 1, acc);
        }

        self.rem_inc[u as usize] += 1;
        self.rem_inc[v as usize] += 1;
    }
}

// ---------------------------------------------------------------------------
// Successive shortest-path augmentation.
// ---------------------------------------------------------------------------

struct CostNet {
    to: Vec<u32>,
    cap: Vec<i32>,
    cost: Vec<f64>,
    /// True for arcs free to use in the zero-cost phase: chosen edges,
    /// internal node arcs, and all reverse arcs.
    free: Vec<bool>,
    edge_of: Vec<Option<u32>>,
    out: Vec<Vec<u32>>,
}

impl CostNet {
    fn new(vertices: usize) -> Self {
        CostNet {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            free: Vec::new(),
            edge_of: Vec::new(),
            out: alloc::vec![Vec::new(); vertices],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cost: f64, free: bool, edge: Option<u32>) {
        let id = self.to.len() as u32;
        self.to.push(to as u32);
        self.cap.push(1);
        self.cost.push(cost);
        self.free.push(free);
        self.edge_of.push(edge);
        self.out[from].push(id);
        self.to.push(from as u32);
        self.cap.push(0);
        self.cost.push(-cost);
        self.free.push(true); // reverse arcs only exist once flow was paid for
        self.edge_of.push(edge);
        self.out[to].push(id + 1);
    }

    /// Unit-capacity max flow restricted to free arcs.
    fn free_max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        'outer: while flow < limit {
            let n = self.out.len();
            let mut parent: Vec<Option<u32>> = alloc::vec![None; n];
            let mut seen = alloc::vec![false; n];
            seen[s] = true;
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &a in &self.out[u] {
                    let v = self.to[a as usize] as usize;
                    if self.free[a as usize] && self.cap[a as usize] > 0 && !seen[v] {
                        seen[v] = true;
                        parent[v] = Some(a);
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                break 'outer;
            }
            let mut v = t;
            while v != s {
                let a = parent[v].expect("path arc") as usize;
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                v = self.to[a ^ 1] as usize;
            }
            flow += 1;
        }
        flow
    }

    /// Minimum-cost residual path by iterated label correction over all
    /// arcs in a fixed order (deterministic; only strict improvements are
    /// taken). Costs are nonnegative here: flow rests on zero-cost arcs
    /// only, so reverse arcs cost zero. Returns the arcs of the path.
    fn cheapest_residual_path(&self, s: usize, t: usize) -> Option<Vec<u32>> {
        let n = self.out.len();
        let mut dist = alloc::vec![f64::INFINITY; n];
        let mut parent: Vec<Option<u32>> = alloc::vec![None; n];
        dist[s] = 0.0;
        let arc_count = self.to.len();
        loop {
            let mut changed = false;
            for a in 0..arc_count {
                if self.cap[a] <= 0 {
                    continue;
                }
                let from = self.to[a ^ 1] as usize;
                let to = self.to[a] as usize;
                if dist[from].is_finite() && dist[from] + self.cost[a] < dist[to] - PATH_EPS
                {
                    dist[to] = dist[from] + self.cost[a];
                    parent[to] = Some(a as u32);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !dist[t].is_finite() {
            return None;
        }
        let mut arcs = Vec::new();
        let mut v = t;
        while v != s {
            let a = parent[v].expect("path arc");
            arcs.push(a);
            v = self.to[a as usize ^ 1] as usize;
        }
        arcs.reverse();
        Some(arcs)
    }
}

/// Node-split cost network for one terminal pair: chosen edges are free,
/// others cost their weight; internal nodes have unit capacity.
fn pair_net(
    g: &UnitDiskGraph,
    chosen: &alloc::collections::BTreeSet<u32>,
    weights: &[f64],
    s: NodeId,
    t: NodeId,
) -> (CostNet, usize, usize) {
    let n = g.n();
    let mut net = CostNet::new(2 * n);
    for v in g.node_ids() {
        if v != s && v != t {
            let i = v as usize;
            net.add_arc(2 * i, 2 * i + 1, 0.0, true, None);
        }
    }
    for (eid, e) in g.edges().iter().enumerate() {
        let (u, v) = (e.u as usize, e.v as usize);
        let in_f0 = chosen.contains(&(eid as u32));
        let cost = if in_f0 { 0.0 } else { weights[eid] };
        net.add_arc(2 * u + 1, 2 * v, cost, in_f0, Some(eid as u32));
        net.add_arc(2 * v + 1, 2 * u, cost, in_f0, Some(eid as u32));
    }
    (net, 2 * s as usize + 1, 2 * t as usize)
}

/// Successive shortest-path SkCS heuristic: for each connectivity level
/// ℓ = 1..k and each terminal pair in lexicographic order, augment with
/// minimum-cost paths until the pair has ℓ disjoint paths inside the chosen
/// set; newly used edges join the chosen set (and become free).
pub fn skcs_augment<'g>(inst: &SkcsInstance<'g>) -> Result<EdgeSubgraph<'g>, SteinerError> {
    let g = inst.g;
    if !is_k_connected_adj(&AdjGraph::from_udg(g), inst.k) {
        return Err(SteinerError::NotKConnected { k: inst.k });
    }
    let terms: Vec<NodeId> = inst.terminals.iter().copied().collect();
    let mut chosen: alloc::collections::BTreeSet<u32> = alloc::collections::BTreeSet::new();
    for ell in 1..=inst.k as usize {
        for (i, &s) in terms.iter().enumerate() {
            for &t in &terms[i + 1..] {
                loop {
                    let (mut net, src, dst) = pair_net(g, &chosen, &inst.edge_weights, s, t);
                    let have = net.free_max_flow(src, dst, ell);
                    if have >= ell {
                        break;
                    }
                    let Some(path) = net.cheapest_residual_path(src, dst) else {
                        // The host is k-connected, so an augmenting path
                        // always exists; reaching this is a bug.
                        return Err(SteinerError::InvariantViolated {
                            what: "augmenting path must exist in a k-connected host",
                            lhs: have as f64,
                            rhs: ell as f64,
                        });
                    };
                    for a in path {
                        if let Some(e) = net.edge_of[a as usize] {
                            chosen.insert(e);
                        }
                    }
                }
            }
        }
    }
    let f0 = EdgeSubgraph::from_edge_ids(g, chosen);
    let ok = is_subset_k_connected_adj(
        &graph_with_terminals(&f0, &inst.terminals),
        &inst.terminals,
        inst.k,
    )
    .expect("terminal ids validated");
    if !ok {
        return Err(SteinerError::InvariantViolated {
            what: "augmented set must k-connect the terminals",
            lhs: 0.0,
            rhs: 1.0,
        });
    }
    Ok(f0)
}

/// Separator descent toward a k-block containing the terminals: start from
/// the component of the chosen set holding the terminals; while it is not
/// k-connected, remove a sub-k separator and keep the side holding the
/// terminals. Only real edges survive. The boolean records whether the
/// result verifies (k-connected, contains all terminals, terminals still
/// pairwise k-connected); on failure the terminals' original component is
/// returned instead, never a silently wrong block.
pub fn extract_k_block<'g>(
    f0: &EdgeSubgraph<'g>,
    terminals: &NodeSet,
    k: u32,
) -> (EdgeSubgraph<'g>, bool) {
    let host = f0.host();
    let fallback = |nodes: &NodeSet| -> EdgeSubgraph<'g> {
        let mut out = EdgeSubgraph::empty(host);
        for &e in f0.edge_ids() {
            let edge = host.edge(e);
            if nodes.contains(&edge.u) && nodes.contains(&edge.v) {
                out.insert_edge(e);
            }
        }
        for &t in terminals {
            if out.degree_of(t) == 0 {
                out.insert_isolated(t);
            }
        }
        out
    };
    let Some(&anchor) = terminals.iter().next() else {
        return (f0.clone(), false);
    };
    let full = graph_with_terminals(f0, terminals);
    let component: NodeSet = full
        .components_without(&alloc::collections::BTreeSet::new())
        .into_iter()
        .find(|c| c.binary_search(&anchor).is_ok())
        .expect("anchor node exists")
        .into_iter()
        .collect();
    let initial = fallback(&component);

    let mut current: NodeSet = component.clone();
    let ok = loop {
        let sub = induced_real(&full, &current);
        if is_k_connected_adj(&sub, k) {
            break true;
        }
        let Some(sep) = find_separator_adj(&sub, k.saturating_sub(1) as usize) else {
            break false; // too small or complete: no k-block here
        };
        let sep_set: NodeSet = sep.nodes.iter().copied().collect();
        let outside: Vec<&Vec<NodeId>> = sep
            .components
            .iter()
            .filter(|c| terminals.iter().any(|t| !sep_set.contains(t) && c.binary_search(t).is_ok()))
            .collect();
        let keep: &Vec<NodeId> = match outside.len() {
            0 => &sep.components[0], // all terminals inside the separator
            1 => outside[0],
            _ => break false, // terminals split across components
        };
        let mut next: NodeSet = keep.iter().copied().collect();
        next.extend(sep.nodes.iter().copied());
        debug_assert!(next.len() < current.len(), "descent must shrink");
        current = next;
    };
    if !ok {
        return (initial, false);
    }
    let block = fallback(&current);
    let verified = terminals.iter().all(|t| current.contains(t))
        && is_k_connected_adj(&induced_real(&full, &current), k)
        && is_subset_k_connected_adj(&graph_with_terminals(&block, terminals), terminals, k)
            .unwrap_or(false);
    if verified {
        (block, true)
    } else {
        (initial, false)
    }
}

fn induced_real(g: &AdjGraph, nodes: &NodeSet) -> AdjGraph {
    let mut out = AdjGraph::new();
    for &u in nodes {
        out.insert_node(u);
        for v in g.neighbors(u) {
            if nodes.contains(&v) {
                out.insert_edge(u, v, false);
            }
        }
    }
    out
}

/// A solved Steiner network instance.
#[derive(Clone, Debug, Serialize)]
pub struct SteinerSolution<'g> {
    /// The final network (the extracted block on success).
    pub f: EdgeSubgraph<'g>,
    /// The raw solver output before block extraction.
    pub f0: EdgeSubgraph<'g>,
    /// V(F) minus the terminals.
    pub steiner_nodes: NodeSet,
    /// Σ c(v) over V(F) under the instance costs (terminals are free).
    pub node_cost: f64,
    /// Σ w(e) over E(F).
    pub edge_weight: f64,
    pub solver: SkcsSolverKind,
    pub extraction_ok: bool,
}

/// End-to-end minimum node-weighted k-connected Steiner network: derive
/// edge weights, solve SkCS with the chosen solver, extract the terminal
/// block, and enforce the min-degree cost bound
/// c(V(F)) ≤ (2/k)·w(E(F)) + tol, which holds for every k-connected F
/// because each spanned node has degree ≥ k (handshake identity).
pub fn solve_mnwkcsn<'g>(
    g: &'g UnitDiskGraph,
    node_costs: &[f64],
    terminals: &NodeSet,
    k: u32,
    solver: SkcsSolverKind,
    edge_cap: usize,
) -> Result<SteinerSolution<'g>, SteinerError> {
    let inst = SkcsInstance::new(g, terminals.clone(), k, node_costs)?;
    if !is_k_connected_adj(&AdjGraph::from_udg(g), k) {
        return Err(SteinerError::NotKConnected { k });
    }
    // One terminal at k = 1 degenerates: the cheapest incident edge is the
    // whole network (SkCS sees no pairs and would return nothing).
    if terminals.len() == 1 && k == 1 {
        let t = *terminals.iter().next().expect("one terminal");
        let best = g
            .neighbors(t)
            .iter()
            .min_by(|&&a, &&b| {
                inst.node_costs[a as usize]
                    .total_cmp(&inst.node_costs[b as usize])
                    .then(a.cmp(&b))
            })
            .copied()
            .ok_or(SteinerError::Infeasible)?;
        let e = g.edge_id(t, best).expect("neighbor edge");
        let f = EdgeSubgraph::from_edge_ids(g, [e]);
        return finish_solution(&inst, f.clone(), f, solver, true);
    }
    let f0 = match solver {
        SkcsSolverKind::Exact => skcs_exact(&inst, edge_cap)?,
        SkcsSolverKind::Augment => skcs_augment(&inst)?,
    };
    let (f, extraction_ok) = extract_k_block(&f0, terminals, k);
    finish_solution(&inst, f, f0, solver, extraction_ok)
}

fn finish_solution<'g>(
    inst: &SkcsInstance<'g>,
    f: EdgeSubgraph<'g>,
    f0: EdgeSubgraph<'g>,
    solver: SkcsSolverKind,
    extraction_ok: bool,
) -> Result<SteinerSolution<'g>, SteinerError> {
    let node_cost = inst.span_cost(&f);
    let edge_weight = inst.subgraph_weight(&f);
    if extraction_ok {
        let bound = (2.0 / inst.k as f64) * edge_weight + COST_BOUND_TOL;
        if node_cost > bound {
            return Err(SteinerError::InvariantViolated {
                what: "node cost must be at most (2/k) of the edge weight",
                lhs: node_cost,
                rhs: bound,
            });
        }
    }
    let steiner_nodes: NodeSet = f
        .node_span()
        .into_iter()
        .filter(|v| !inst.terminals.contains(v))
        .collect();
    Ok(SteinerSolution { f, f0, steiner_nodes, node_cost, edge_weight, solver, extraction_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udg::{build_udg, fixtures, PointNode};
    use alloc::collections::BTreeSet;

    fn terms(ids: &[NodeId]) -> NodeSet {
        ids.iter().copied().collect()
    }

    fn close(a: f64, b: f64) -> bool {
        libm::fabs(a - b) <= 1e-9
    }

    #[test]
    fn edge_weights_average_endpoint_costs() {
        let g = build_udg(alloc::vec![
            PointNode { id: 0, x: 0.0, y: 0.0, weight: 1.0 },
            PointNode { id: 1, x: 0.8, y: 0.0, weight: 1.0 },
        ])
        .unwrap();
        let w = derive_edge_weights(&g, &[2.0, 4.0]).unwrap();
        assert_eq!(w, alloc::vec![3.0]);
        assert!(matches!(
            derive_edge_weights(&g, &[1.0]).unwrap_err(),
            SteinerError::CostLengthMismatch { expected: 2, got: 1 }
        ));

        // Handshake: on the pentagon with unit costs every node has degree
        // two, so the weights sum to the total node cost.
        let pent = fixtures::pent5();
        let w = derive_edge_weights(&pent, &[1.0; 5]).unwrap();
        assert!(close(w.iter().sum::<f64>(), 5.0));

        // Terminal zeroing makes terminal-terminal edges free.
        let inst = SkcsInstance::new(&pent, terms(&[0, 1]), 2, &[1.0; 5]).unwrap();
        let e01 = pent.edge_id(0, 1).unwrap();
        assert_eq!(inst.edge_weights[e01 as usize], 0.0);
    }

    #[test]
    fn exact_skcs_on_pentagon_terminal_prefix() {
        let g = fixtures::pent5();
        let inst = SkcsInstance::new(&g, terms(&[0, 1, 2]), 2, &[1.0; 5]).unwrap();
        let f0 = skcs_exact(&inst, DEFAULT_SKCS_EDGE_CAP).unwrap();
        // The cycle is the only subset-2-connected option; its weight is
        // carried by the edges touching the two non-terminals.
        assert_eq!(f0.edge_count(), 5);
        assert!(close(inst.subgraph_weight(&f0), 2.0));
        let aug = skcs_augment(&inst).unwrap();
        assert_eq!(aug.edge_ids(), f0.edge_ids());
    }

    #[test]
    fn exact_skcs_trivial_and_deep_paths() {
        let g = fixtures::sq4();
        // k = 1 between adjacent terminals: the direct edge, free.
        let inst = SkcsInstance::new(&g, terms(&[0, 1]), 1, &[1.0; 4]).unwrap();
        let f0 = skcs_exact(&inst, DEFAULT_SKCS_EDGE_CAP).unwrap();
        assert_eq!(f0.edge_ids(), &BTreeSet::from([0]));
        assert!(close(inst.subgraph_weight(&f0), 0.0));

        // k = 3 between two terminals of K4 needs the direct edge and both
        // two-hop detours: five edges, weight 2.
        let inst = SkcsInstance::new(&g, terms(&[0, 1]), 3, &[1.0; 4]).unwrap();
        let f0 = skcs_exact(&inst, DEFAULT_SKCS_EDGE_CAP).unwrap();
        assert_eq!(f0.edge_count(), 5);
        assert!(close(inst.subgraph_weight(&f0), 2.0));
        assert!(!f0.contains_edge(g.edge_id(2, 3).unwrap()));
    }

    #[test]
    fn augment_matches_exact_on_sq4_pair() {
        let g = fixtures::sq4();
        let inst = SkcsInstance::new(&g, terms(&[0, 1]), 2, &[1.0; 4]).unwrap();
        let f0 = skcs_augment(&inst).unwrap();
        // Direct edge plus one two-hop detour; the fixed arc order picks
        // the detour through node 2.
        assert_eq!(f0.edge_ids(), &BTreeSet::from([0, 1, 3]));
        assert!(close(inst.subgraph_weight(&f0), 1.0));
        let exact = skcs_exact(&inst, DEFAULT_SKCS_EDGE_CAP).unwrap();
        assert!(inst.subgraph_weight(&exact) <= inst.subgraph_weight(&f0) + 1e-9);
    }

    #[test]
    fn skcs_validates_inputs() {
        let g = fixtures::path3();
        let inst = SkcsInstance::new(&g, terms(&[0, 2]), 2, &[1.0; 3]).unwrap();
        assert_eq!(
            skcs_exact(&inst, DEFAULT_SKCS_EDGE_CAP).unwrap_err(),
            SteinerError::Infeasible
        );
        assert_eq!(
            skcs_augment(&inst).unwrap_err(),
            SteinerError::NotKConnected { k: 2 }
        );
        assert_eq!(
            SkcsInstance::new(&g, terms(&[9]), 1, &[1.0; 3]).unwrap_err(),
            SteinerError::UnknownTerminal(9)
        );
        assert_eq!(
            SkcsInstance::new(&g, terms(&[0]), 0, &[1.0; 3]).unwrap_err(),
            SteinerError::KMustBePositive
        );
    }

    #[test]
    fn extraction_prunes_a_pendant() {
        // Pentagon with a pendant node hanging off node 0.
        let r = 0.9 / (2.0 * libm::sin(core::f64::consts::PI / 5.0));
        let mut nodes: Vec<PointNode> = (0..5)
            .map(|i| {
                let theta = core::f64::consts::FRAC_PI_2
                    + 2.0 * core::f64::consts::PI * (i as f64) / 5.0;
                PointNode {
                    id: i as NodeId,
                    x: r * libm::cos(theta),
                    y: r * libm::sin(theta),
                    weight: 1.0,
                }
            })
            .collect();
        nodes.push(PointNode { id: 5, x: 0.0, y: r + 0.95, weight: 1.0 });
        let g = build_udg(nodes).unwrap();
        assert_eq!(g.edges().len(), 6);

        let f0 = EdgeSubgraph::full(&g);
        let (f, ok) = extract_k_block(&f0, &terms(&[0, 1, 2, 3, 4]), 2);
        assert!(ok);
        assert_eq!(f.edge_count(), 5);
        assert!(!f.contains_edge(g.edge_id(0, 5).unwrap()));
    }

    #[test]
    fn extraction_drops_hex_spoke() {
        let g = fixtures::hex7();
        let ring: Vec<u32> = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]
            .iter()
            .map(|&(a, b)| g.edge_id(a, b).unwrap())
            .collect();
        let mut ids = ring.clone();
        ids.push(g.edge_id(0, 6).unwrap());
        let f0 = EdgeSubgraph::from_edge_ids(&g, ids);
        let (f, ok) = extract_k_block(&f0, &terms(&[0, 3]), 2);
        assert!(ok);
        assert_eq!(f.edge_ids(), &ring.into_iter().collect::<BTreeSet<u32>>());
    }

    #[test]
    fn extraction_reports_failure_honestly() {
        // Terminals in different components of the chosen set.
        let g = fixtures::sq4();
        let f0 = EdgeSubgraph::from_edge_ids(&g, [0]); // edge (0,1) only
        let (_, ok) = extract_k_block(&f0, &terms(&[2, 3]), 1);
        assert!(!ok);
        // A complete block smaller than k + 1 nodes cannot verify.
        let (_, ok) = extract_k_block(&f0, &terms(&[0, 1]), 2);
        assert!(!ok);
    }

    #[test]
    fn full_solver_on_pentagon() {
        let g = fixtures::pent5();
        let sol = solve_mnwkcsn(
            &g,
            &[1.0; 5],
            &terms(&[0, 1, 2]),
            2,
            SkcsSolverKind::Exact,
            DEFAULT_SKCS_EDGE_CAP,
        )
        .unwrap();
        assert!(sol.extraction_ok);
        assert_eq!(sol.steiner_nodes, terms(&[3, 4]));
        assert!(close(sol.node_cost, 2.0));
        assert!(close(sol.edge_weight, 2.0)); // equality: the cycle is 2-regular
        let aug = solve_mnwkcsn(
            &g,
            &[1.0; 5],
            &terms(&[0, 1, 2]),
            2,
            SkcsSolverKind::Augment,
            DEFAULT_SKCS_EDGE_CAP,
        )
        .unwrap();
        assert_eq!(aug.f.edge_ids(), sol.f.edge_ids());
    }

    #[test]
    fn full_solver_single_terminal_special_case() {
        let g = fixtures::sq4();
        // Node 3 is the cheapest neighbor of terminal 0 by (cost, id).
        let costs = alloc::vec![5.0, 3.0, 2.0, 1.0];
        let sol = solve_mnwkcsn(
            &g,
            &costs,
            &terms(&[0]),
            1,
            SkcsSolverKind::Exact,
            DEFAULT_SKCS_EDGE_CAP,
        )
        .unwrap();
        assert!(sol.extraction_ok);
        assert_eq!(sol.steiner_nodes, terms(&[3]));
        assert!(close(sol.node_cost, 1.0));
        // Cost bound is met with equality: one edge, two nodes, k = 1.
        assert!(close(sol.edge_weight, 0.5));
    }

    #[test]
    fn spanning_terminals_make_free_solutions() {
        let g = fixtures::sq4();
        let all = terms(&[0, 1, 2, 3]);
        for solver in [SkcsSolverKind::Exact, SkcsSolverKind::Augment] {
            let sol =
                solve_mnwkcsn(&g, &[1.0; 4], &all, 2, solver, DEFAULT_SKCS_EDGE_CAP).unwrap();
            assert!(sol.extraction_ok, "{solver:?}");
            assert!(sol.steiner_nodes.is_empty());
            assert!(close(sol.node_cost, 0.0));
        }
    }
}
