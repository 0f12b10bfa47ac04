//! Recursive feature machines (RFM) with a Laplace kernel, and a harness that
//! sweeps the feature width `d` at fixed sample size to trace test-error
//! curves for RFM against plain kernel ridge regression.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernel`]: Mahalanobis distances, the Laplace kernel, ridge solves,
//!   predictions and predictor gradients.
//! - [`rfm`]: the alternating KRR / AGOP training loop with validation-based
//!   iterate selection.
//! - [`data`]: Gaussian designs, targets, label noise and splits.
//! - [`sweep`]: parallel, seed-deterministic sweeps, summaries and inflection
//!   detection.
//! - [`presets`]: the named experiment families with their overrides.
//! - [`report`]: CSV and SVG artifacts; [`cli`] wires it all to a command line.
//! - [`verify`]: the shape, robustness and property checks shared by the
//!   `verify` command and the acceptance tests.

pub mod cli;
pub mod data;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod presets;
pub mod report;
pub mod rfm;
pub mod seed;
pub mod sweep;
pub mod verify;

pub use error::{Result, RfmError};
