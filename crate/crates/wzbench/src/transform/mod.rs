//! Block transform, band quantization and bitplane plumbing.

pub mod bitplane;
pub mod dct;
pub mod quant;

pub use bitplane::{from_bitplanes, to_bitplanes, Bitplanes};
pub use dct::{dct_forward, dct_inverse, Dct8, DctBlockSet, BLOCK, ZIGZAG};
pub use quant::{hvs_band_plan, quantize_bands, BandPlan, QuantizedBands};
