//! Decentralized sampling and transmission over multi-hop wireless
//! collision networks.
//!
//! Each node observes an independent Gauss–Markov source, keeps a cache of
//! the freshest packet it holds from every other node, and decides every
//! slot whether to transmit, what to transmit, and to whom. The crate
//! provides:
//!
//! - [`topology`]: graph generators, Topology Zoo ingestion, graphons.
//! - [`estimation`]: sources, caches, ages, MMSE estimates and rewards.
//! - [`mac`]: the collision channel and the per-slot simulator.
//! - [`policy`]: the decentralized policy interface and baselines.
//! - [`grnn`]: graph filters, recurrent graph networks, the bilinear
//!   softmax action distribution and the weight file format.
//! - [`transfer`]: discretized graphon operators and empirical checks of
//!   the GRNN and action-distribution transferability bounds.
//! - [`harness`]: episodes, evaluation, transfer sweeps, metrics output,
//!   and the line-delimited JSON environment server.

pub mod error;
pub mod estimation;
pub mod grnn;
pub mod harness;
pub mod mac;
mod parallel;
pub mod policy;
pub mod rng;
pub mod topology;
pub mod transfer;

pub use error::{Error, Result};
