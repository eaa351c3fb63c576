//! Techno-economic model of hydrogen production by U.S. state.
//!
//! Compares three electrolysis technologies (Alkaline, PEM, SOEC) with
//! steam-methane reforming with and without 90% carbon capture, on levelized
//! cost and life-cycle carbon intensity, and projects both forward under
//! learning-curve, electricity-price and grid-decarbonization scenarios.

pub mod analysis;
pub mod cli;
pub mod electrolysis;
pub mod error;
pub mod finance;
pub mod ingest;
pub mod model;
pub mod scenario;
pub mod smr;

pub use error::{Error, ErrorKind, Result};
