//! Consistency analysis for software size measurement methods.
//!
//! Given repeated measurements of the same projects by different raters,
//! decide whether one measurement method is more consistent than another
//! (inter-rater reliability) and whether two methods agree with each other
//! (inter-method reliability).
//!
//! The crate is organised bottom-up:
//!
//! - [`dataset`]: CSV ingestion and the project × method × rater design.
//! - [`distributions`]: normal, t, F, chi-square and exact rank distributions.
//! - [`hypothesis`]: the individual tests, each returning a [`hypothesis::TestOutcome`].
//! - [`consistency`]: the CA2 statistic and the inter-rater decision procedure.
//! - [`intermethod`]: rater-averaged method differences, equality test and calibration line.
//! - [`simulate`]: the measurement model `M = X + ε` and Monte Carlo calibration.
//! - [`report`]: whole-dataset analysis and report rendering.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consistency;
pub mod dataset;
pub mod distributions;
mod float_serde;
pub mod hypothesis;
pub mod intermethod;
pub mod report;
pub mod simulate;
