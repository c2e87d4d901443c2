//! m-fold dominating set solvers: a weighted greedy (the pluggable
//! first-phase solver of the two-phase pipeline), an exact subset-enumeration
//! oracle, and the feasibility verifier. A set D is an m-fold dominating set
//! when every node outside D has at least m neighbors inside D.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;

use crate::udg::{NodeId, UnitDiskGraph};

/// A set of node ids; ordered, deterministic iteration.
pub type NodeSet = BTreeSet<NodeId>;

/// Weight floor in greedy ratios, and the tolerance for weight ties in the
/// exact enumeration.
pub const WEIGHT_EPS: f64 = 1e-12;
/// Default cap on node count for the exhaustive dominating-set search.
pub const DEFAULT_DS_NODE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomError {
    UnknownNode(NodeId),
    NodeCapExceeded { cap: usize, have: usize },
}

impl fmt::Display for DomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomError::UnknownNode(u) => write!(f, "node {u} is not in the graph"),
            DomError::NodeCapExceeded { cap, have } => {
                write!(f, "exhaustive search capped at {cap} nodes, instance has {have}")
            }
        }
    }
}

impl core::error::Error for DomError {}

/// Running state of a domination construction: the chosen set, the residual
/// demand of every node (zero for members), and the total deficiency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationState {
    pub chosen: NodeSet,
    /// Indexed by node id: `max(0, m - |N(v) ∩ D|)` outside D, zero inside.
    pub residual_demand: Vec<u32>,
    pub total_deficiency: u64,
}

impl DominationState {
    pub fn new(g: &UnitDiskGraph, chosen: &NodeSet, m: u32) -> Result<Self, DomError> {
        for &v in chosen {
            if !g.contains_node(v) {
                return Err(DomError::UnknownNode(v));
            }
        }
        let mut residual_demand = alloc::vec![0u32; g.n()];
        let mut total = 0u64;
        for v in g.node_ids() {
            if chosen.contains(&v) {
                continue;
            }
            let dominators = g.neighbors(v).iter().filter(|u| chosen.contains(u)).count();
            let demand = m.saturating_sub(dominators as u32);
            residual_demand[v as usize] = demand;
            total += u64::from(demand);
        }
        Ok(DominationState { chosen: chosen.clone(), residual_demand, total_deficiency: total })
    }

    pub fn is_satisfied(&self) -> bool {
        self.total_deficiency == 0
    }

    /// Deficiency removed by adding `v`: its own residual demand plus one
    /// unit for every unmet neighbor outside the chosen set.
    pub fn gain(&self, g: &UnitDiskGraph, v: NodeId) -> u64 {
        if self.chosen.contains(&v) {
            return 0;
        }
        let own = u64::from(self.residual_demand[v as usize]);
        let nbrs = g
            .neighbors(v)
            .iter()
            .filter(|&&u| !self.chosen.contains(&u) && self.residual_demand[u as usize] > 0)
            .count() as u64;
        own + nbrs
    }

    pub fn add(&mut self, g: &UnitDiskGraph, v: NodeId) {
        if !self.chosen.insert(v) {
            return;
        }
        self.total_deficiency -= u64::from(self.residual_demand[v as usize]);
        self.residual_demand[v as usize] = 0;
        for &u in g.neighbors(v) {
            if !self.chosen.contains(&u) && self.residual_demand[u as usize] > 0 {
                self.residual_demand[u as usize] -= 1;
                self.total_deficiency -= 1;
            }
        }
    }
}

/// True iff every node outside `d` has at least `m` neighbors inside `d`.
pub fn is_mfold_ds(g: &UnitDiskGraph, d: &NodeSet, m: u32) -> Result<bool, DomError> {
    Ok(DominationState::new(g, d, m)?.is_satisfied())
}

/// Weighted greedy m-fold dominating set: every node of degree < m is a
/// forced member; afterwards, repeatedly add the node maximizing removed
/// deficiency per unit weight (weight floored at 1e-12), smallest id on
/// ties. The result always satisfies `is_mfold_ds`.
pub fn greedy_mfold_ds(g: &UnitDiskGraph, m: u32) -> NodeSet {
    let forced: NodeSet = g.node_ids().filter(|&v| (g.degree(v) as u32) < m).collect();
    let mut state = DominationState::new(g, &forced, m).expect("ids from the graph");
    while !state.is_satisfied() {
        let before = state.total_deficiency;
        let mut best: Option<(f64, NodeId)> = None;
        for v in g.node_ids() {
            if state.chosen.contains(&v) {
                continue;
            }
            let gain = state.gain(g, v);
            if gain == 0 {
                continue;
            }
            let ratio = gain as f64 / g.weight_of(v).max(WEIGHT_EPS);
            let better = match best {
                None => true,
                Some((r, _)) => ratio > r,
            };
            if better {
                best = Some((ratio, v));
            }
        }
        let (_, pick) = best.expect("unmet demand implies a positive-gain node");
        state.add(g, pick);
        debug_assert!(state.total_deficiency < before, "greedy must make progress");
    }
    state.chosen
}

/// Enumerates subsets of a weighted universe in nondecreasing total-weight
/// order (ties by lexicographic index list). Each subset appears exactly
/// once: a subset's successors either append the next index or slide the
/// last index forward.
pub(crate) struct WeightOrderedSubsets {
    /// (weight, id), ascending by weight then id.
    order: Vec<(f64, NodeId)>,
    heap: BinaryHeap<Reverse<SubsetEntry>>,
}

struct SubsetEntry {
    weight: f64,
    idxs: Vec<usize>,
}

impl PartialEq for SubsetEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SubsetEntry {}
impl PartialOrd for SubsetEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SubsetEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.total_cmp(&other.weight).then_with(|| self.idxs.cmp(&other.idxs))
    }
}

impl WeightOrderedSubsets {
    pub(crate) fn new(mut items: Vec<(f64, NodeId)>) -> Self {
        items.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut heap = BinaryHeap::new();
        heap.push(Reverse(SubsetEntry { weight: 0.0, idxs: Vec::new() }));
        WeightOrderedSubsets { order: items, heap }
    }

    /// Next subset as (total weight, sorted node ids).
    pub(crate) fn next_subset(&mut self) -> Option<(f64, Vec<NodeId>)> {
        let Reverse(entry) = self.heap.pop()?;
        let successor_start = entry.idxs.last().map_or(0, |&last| last + 1);
        if successor_start < self.order.len() {
            // Append the next index.
            let mut appended = entry.idxs.clone();
            appended.push(successor_start);
            let w = entry.weight + self.order[successor_start].0;
            self.heap.push(Reverse(SubsetEntry { weight: w, idxs: appended }));
            // Slide the last index forward.
            if let Some(&last) = entry.idxs.last() {
                let mut slid = entry.idxs.clone();
                *slid.last_mut().expect("nonempty") = last + 1;
                let w = entry.weight - self.order[last].0 + self.order[last + 1].0;
                self.heap.push(Reverse(SubsetEntry { weight: w, idxs: slid }));
            }
        }
        let mut ids: Vec<NodeId> =
            entry.idxs.iter().map(|&i| self.order[i].1).collect();
        ids.sort_unstable();
        Some((entry.weight, ids))
    }
}

/// Minimum-weight m-fold dominating set by enumeration in increasing weight
/// order, with degree-< m nodes preplaced as forced members. Among
/// minimum-weight solutions the lexicographically smallest node set wins.
pub fn exact_mfold_ds(
    g: &UnitDiskGraph,
    m: u32,
    node_cap: usize,
) -> Result<NodeSet, DomError> {
    if g.n() > node_cap {
        return Err(DomError::NodeCapExceeded { cap: node_cap, have: g.n() });
    }
    let forced: NodeSet = g.node_ids().filter(|&v| (g.degree(v) as u32) < m).collect();
    let free: Vec<(f64, NodeId)> = g
        .node_ids()
        .filter(|v| !forced.contains(v))
        .map(|v| (g.weight_of(v), v))
        .collect();
    let mut subsets = WeightOrderedSubsets::new(free);
    let mut best: Option<(f64, NodeSet)> = None;
    while let Some((w, ids)) = subsets.next_subset() {
        if let Some((best_w, _)) = best {
            if w > best_w + WEIGHT_EPS {
                break; // heavier than the optimum: the tie stratum is done
            }
        }
        let mut candidate = forced.clone();
        candidate.extend(ids);
        if is_mfold_ds(g, &candidate, m)? {
            let replace = match &best {
                None => true,
                Some((_, set)) => candidate < *set,
            };
            if replace {
                best = Some((w, candidate));
            }
        }
    }
    Ok(best.expect("the full node set is always feasible").1)
}
