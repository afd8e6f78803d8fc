//! Exact computation of the rational homotopy Bousfield–Kan spectral
//! sequence for the cosimplicial model of the space of long knots.

pub mod cache;
pub mod chi;
pub mod chords;
pub mod cli;
pub mod conf;
pub mod cosimplicial;
pub mod error;
pub mod free_lie;
pub mod linalg;
pub mod pipeline;
pub mod quillen;
pub mod report;

pub use error::{Error, Result};
