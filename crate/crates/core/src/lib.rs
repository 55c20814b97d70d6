//! Hybrid quantum-classical ant colony optimization for the travelling
//! salesman problem.
//!
//! Every probabilistic choice an ant makes (its start node and each next hop)
//! is drawn by simulating a parameterized state-preparation circuit whose
//! measurement statistics equal the ant's transition distribution, then taking
//! the majority over a handful of shots.

pub mod aco;
pub mod cli;
pub mod error;
pub mod graph_io;
pub mod oracle;
pub mod selector;
pub mod solver;
pub mod statevec;

pub use error::{Error, Result};
