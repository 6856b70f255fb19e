//! File formats, parallel drivers and the experiment runner built on
//! [`hiernet_core`].
//!
//! * [`config_file`]: flat `key = value` generator configs,
//! * [`edgelist`]: network text files,
//! * [`tables`]: CSV outputs,
//! * [`summary`]: key-value summaries and manifests,
//! * [`parallel`]: rayon versions of the ensemble, BFS and scaling drivers,
//! * [`commands`] and [`reproduce`]: what the `hiernet` binary runs.

pub mod commands;
pub mod config_file;
pub mod edgelist;
pub mod error;
pub mod parallel;
pub mod reproduce;
pub mod summary;
pub mod tables;

pub use commands::{execute, replay, Command, ExperimentSpec, FitChoice, RunReport};
pub use error::{Error, Result};
pub use reproduce::ReproducePlan;
