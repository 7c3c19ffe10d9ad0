//! Constructive Lipschitz analysis on finite samples of metric spaces.
//!
//! Envelope extensions with global or pointwise constants, Lipschitz
//! partitions of unity for countable covers, locally Lipschitz
//! decompositions and extensions, and selections between semicontinuous
//! bounds. Every construction comes with a sample certificate from
//! [`certify`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cli;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod local_lipschitz;
pub mod metric_space;
pub mod partition_of_unity;
pub mod scalar_field;
pub mod selection;

pub use error::{LipError, Result};
pub use metric_space::{MetricSpace, Subset};
pub use scalar_field::{Field, Interval, Transport};
