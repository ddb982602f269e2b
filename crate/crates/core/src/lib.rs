//! hLEPOR machine translation evaluation with automatic parameter
//! customisation.
//!
//! * [`metric`] scores a hypothesis against one reference and exposes every
//!   factor.
//! * [`params`] holds the six-parameter type and the published presets.
//! * [`corpus`] ingests datasets, scores them, and measures agreement with
//!   gold scores.
//! * [`optimizer`] tunes the parameters towards a gold column with a
//!   Tree-structured Parzen Estimator or random search.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod corpus;
pub mod error;
mod kvfile;
pub mod metric;
pub mod optimizer;
pub mod params;

pub use error::{Error, Result};
pub use metric::{hlepor, FactorBreakdown, Tokenizer};
pub use params::{preset, Flavor, HLeporParams};
