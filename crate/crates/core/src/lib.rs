//! Layered hierarchical networks and information spreading on top of them.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! parts:
//!
//! * [`netgen`] builds the layered skeleton and adds the homophily shortcuts,
//! * [`graphstats`] measures clustering, path lengths and degree histograms,
//! * [`sir`] runs one realization of the contact (rumor) process,
//! * [`ensemble`] accumulates mergeable `N_R` histograms over many realizations,
//! * [`analysis`] holds the homogeneous-limit solver and the histogram fits.
//!
//! File formats, parallel drivers and the command line live in the `hiernet`
//! companion crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod config;
pub mod ensemble;
pub mod graph;
pub mod graphstats;
pub mod netgen;
pub mod rng;
pub mod sir;

pub use analysis::{FitKind, FitResult, ModeSplit};
pub use config::{Branching, ConfigError, CrossLayerRule, HierarchyConfig, Mode};
pub use ensemble::{LayerFraction, LayerSweepResult, NrHistogram, Seeding};
pub use graph::{Graph, NodeId};
pub use graphstats::{GraphStatistics, PathMetrics};
pub use netgen::{Network, Skeleton};
pub use sir::{NodeState, SirOutcome, SirState, TrajectoryPoint};

use thiserror::Error;

/// Errors raised by the algorithmic operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("layer {layer} is out of range 1..={n_layers}")]
    LayerOutOfRange { layer: usize, n_layers: usize },
    #[error("layer {0} has no members")]
    EmptyLayer(usize),
    #[error("insufficient data: need at least {needed} points, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
