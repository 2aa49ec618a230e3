//! Fault localization for quantum circuit programs.
//!
//! The pipeline parses a circuit ([`frontend`]), executes it exactly
//! ([`simulator`]), generates first-order mutants ([`mutate`]), runs a test
//! suite over the original and every mutant ([`runner`]) and ranks
//! statements by mutation-based or spectrum-based suspiciousness
//! ([`localize`]). [`bench`] builds fault-injection benchmarks and compares
//! methods statistically.

pub mod frontend;
pub mod gate;
pub mod simulator;
pub mod mutate;
pub mod runner;
pub mod localize;
pub mod bench;
