//! Core algorithms for fault-tolerant backbone construction in unit disk
//! graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`udg`] — geometric node/graph model: unit disk graphs over weighted
//!   points, edge subgraphs, deterministic random instances, and the small
//!   canonical fixtures used throughout the tests.
//! * [`connectivity`] — vertex connectivity via internally disjoint paths,
//!   separators, marked components, and the k-block tree decomposition.
//! * [`mss`] — minimum-length k-connected spanning subgraphs: minimalisation,
//!   an exact branch-and-bound solver, angle-based local improvement, and the
//!   degree-six reduction for the 2-connected case.
//! * [`domset`] — m-fold dominating sets: feasibility checking, a weighted
//!   greedy, and an exact enumerator.
//! * [`steiner`] — minimum node-weighted k-connected Steiner subgraphs via
//!   derived edge weights, an exact solver, an augmentation heuristic, and
//!   k-block extraction.
//! * [`solve`] — the two-phase backbone solver (domination, then
//!   k-connection), an exhaustive oracle, and the independent verifier.
//!
//! The crate is `no_std` + `alloc`; all floating-point math goes through
//! `libm`. Everything is deterministic: collections iterate in sorted order,
//! ties break lexicographically, and random generation is seeded.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod connectivity;
pub mod domset;
pub mod mss;
pub mod solve;
pub mod steiner;
pub mod udg;

/// Clock abstraction so the solver can report phase timings without tying
/// the core to `std`. The unit implementation reports zero elapsed time.
pub trait PhaseClock {
    /// Milliseconds since an arbitrary fixed origin.
    fn now_millis(&self) -> f64;
}

impl PhaseClock for () {
    fn now_millis(&self) -> f64 {
        0.0
    }
}
