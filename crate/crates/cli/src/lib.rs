//! IO, timing, and benchmarking companion to `ftb-core`: JSON instance
//! files, a wall-clock phase timer, and the deterministic benchmark
//! harness behind the `ftb bench` subcommand.

pub mod bench;
pub mod clock;
pub mod io;
