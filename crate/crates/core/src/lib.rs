//! Constructive tools for finite sequences in the unit disk: pseudohyperbolic
//! divided differences, weak separation, the disk covering construction and
//! Blaschke-chain interpolation.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example <name>`.

pub mod blaschke;
pub mod cli;
pub mod covering;
pub mod divdiff;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod interpolator;
pub mod json;
pub mod majorant;
pub mod pipeline;
pub mod separation;
pub mod sequence;

pub use error::{Error, Result};
pub use geometry::{blaschke_factor, harnack_interval, pseudo_disk_gap, rho, DiskPoint, PseudoDisk};
pub use majorant::HarmonicMajorant;
pub use sequence::LabeledSequence;
