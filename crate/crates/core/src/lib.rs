//! Labor-market concentration measurement, commuting-zone delineation,
//! fixed-effects/IV panel estimation, minimum-wage elasticity analysis, and
//! a closed-form Cournot oligopsony model.
//!
//! The crate is organized around a batch pipeline: snapshot records are
//! aggregated into market and establishment panels ([`data_model`]),
//! concentration indices summarize markets ([`concentration`]), districts
//! merge into commuting zones ([`delineation`]), panel regressions with
//! absorbed fixed effects and clustered inference estimate concentration
//! and minimum-wage effects ([`econometrics`], [`minwage`]), and the
//! oligopsony model ([`oligopsony`], [`synth`]) supplies comparative
//! statics and synthetic data with known ground truth.

pub mod concentration;
pub mod data_model;
pub mod delineation;
pub mod econometrics;
pub mod error;
pub mod minwage;
pub mod oligopsony;
pub mod synth;

pub use error::{Error, Result};
