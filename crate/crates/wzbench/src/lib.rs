//! Wyner-Ziv distributed video coding workbench.
//!
//! The crate splits a sequence into key and Wyner-Ziv frames, builds decoder
//! side information by metric-driven motion interpolation, transforms and
//! quantizes WZ frames, codes bitplanes with a rate-adaptive turbo coder, and
//! reports entropy and rate-distortion figures for several block metrics.

pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod motion;
pub mod pipeline;
pub mod transform;
pub mod turbo;
pub mod video;

pub use error::{Error, Result};
