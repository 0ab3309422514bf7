use std::path::PathBuf;
use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("region {width}x{height} too small: {needed}")]
    RegionTooSmall {
        width: usize,
        height: usize,
        needed: String,
    },

    #[error(
        "{path}: size {actual} bytes is not a whole number of {frame_bytes}-byte frames \
         ({width}x{height}, {layout}); nearest multiples are {lower} and {upper}"
    )]
    TruncatedFile {
        path: PathBuf,
        actual: u64,
        frame_bytes: u64,
        width: usize,
        height: usize,
        layout: &'static str,
        lower: u64,
        upper: u64,
    },

    #[error("{path}: file contains zero frames")]
    EmptyFile { path: PathBuf },

    #[error("sequence has {actual} frames, need at least {needed}")]
    TooFewFrames { needed: usize, actual: usize },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("unknown quality knob {0}; valid knobs are 1..=8")]
    UnknownQualityKnob(u32),

    #[error("quantization index {index} out of range for {levels}-level band")]
    InvalidQuantIndex { index: u32, levels: u32 },

    #[error("value {value} does not fit in {bits} bitplanes")]
    ValueOutOfRange { value: u32, bits: u8 },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported stream version {0}")]
    UnsupportedVersion(u16),

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
