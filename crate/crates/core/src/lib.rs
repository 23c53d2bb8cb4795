//! Distributed particle-filter target tracking in wireless sensor networks.
//!
//! The crate simulates a static sensor network tracking one moving target
//! with a sample-importance-resampling particle filter whose global
//! likelihood is obtained by belief consensus: standard (SBC), randomized
//! gossip (RG), broadcast gossip (BG), Metropolis (MBC) and belief
//! propagation (BP) consensus. Centralized and flooding baselines, a
//! closed-form communication-cost model and an integer overcounting analysis
//! for BP consensus on loopy graphs are included.
//!
//! Module map:
//!
//! - [`topology`]: network graphs, generators, metrics, text import/export
//! - [`dynamics`]: target motion, range observations, local likelihoods
//! - [`filter`]: particle set and the centralized SIR step
//! - [`consensus`]: the belief-consensus algorithms and max-consensus
//! - [`tracker`]: per-slot DPF, NCPF and exact trackers
//! - [`costmodel`]: packet counts for DPF and NCPF
//! - [`analysis`]: BP-consensus overcounting exponents
//! - [`harness`]: scenario configuration, Monte-Carlo runs and sweeps
//! - [`cli`]: the `bcdpf` command-line interface

pub mod analysis;
pub mod cli;
pub mod consensus;
pub mod costmodel;
pub mod dynamics;
pub mod error;
pub mod filter;
pub mod harness;
pub mod numerics;
pub mod topology;
pub mod tracker;

pub use error::{Error, Result};
