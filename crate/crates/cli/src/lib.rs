//! Desk-scale harness around the `mixforge-core` mixing engine: dataset
//! ingestion (CIFAR binaries, image folders, synthetic data), PPM/PGM IO, a
//! tiny trainable classifier with an SGD loop on the mixed-label objective,
//! a benchmark runner, and the `mixforge` CLI.

pub mod bench;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod model;
pub mod pnm;
pub mod sidecar;
pub mod train;

pub use error::{DeskError, Result};
