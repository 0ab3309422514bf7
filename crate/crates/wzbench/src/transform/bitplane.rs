//! MSB-first bitplane decomposition of index arrays and whole frames.

use crate::error::{Error, Result};
use crate::video::Frame;

/// Ordered bit matrices, most significant plane first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitplanes {
    plane_count: u8,
    len: usize,
    planes: Vec<Vec<u8>>,
}

impl Bitplanes {
    pub fn plane_count(&self) -> u8 {
        self.plane_count
    }

    /// Number of positions per plane.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Plane k, MSB first; entries are 0 or 1.
    pub fn plane(&self, k: usize) -> &[u8] {
        &self.planes[k]
    }

    /// Overwrites plane k, e.g. with a decoded version.
    pub fn set_plane(&mut self, k: usize, bits: Vec<u8>) {
        assert_eq!(bits.len(), self.len);
        debug_assert!(bits.iter().all(|&b| b <= 1));
        self.planes[k] = bits;
    }
}

/// Splits values into `plane_count` bitplanes, MSB first.
pub fn to_bitplanes(values: &[u32], plane_count: u8) -> Result<Bitplanes> {
    assert!((1..=32).contains(&plane_count));
    let limit = 1u64 << plane_count;
    if let Some(&v) = values.iter().find(|&&v| (v as u64) >= limit) {
        return Err(Error::ValueOutOfRange {
            value: v,
            bits: plane_count,
        });
    }
    let planes = (0..plane_count)
        .map(|k| {
            let shift = plane_count - 1 - k;
            values.iter().map(|&v| ((v >> shift) & 1) as u8).collect()
        })
        .collect();
    Ok(Bitplanes {
        plane_count,
        len: values.len(),
        planes,
    })
}

/// Reassembles the integer values exactly.
pub fn from_bitplanes(planes: &Bitplanes) -> Vec<u32> {
    let mut values = vec![0u32; planes.len];
    for plane in &planes.planes {
        for (v, &bit) in values.iter_mut().zip(plane) {
            *v = (*v << 1) | bit as u32;
        }
    }
    values
}

/// Pixel-domain mode: a frame always yields exactly 8 planes.
pub fn frame_to_bitplanes(frame: &Frame) -> Bitplanes {
    let values: Vec<u32> = frame.data().iter().map(|&p| p as u32).collect();
    to_bitplanes(&values, 8).unwrap()
}

pub fn frame_from_bitplanes(planes: &Bitplanes, width: usize, height: usize) -> Result<Frame> {
    let values = from_bitplanes(planes);
    if values.len() != width * height || planes.plane_count != 8 {
        return Err(Error::DimensionMismatch(format!(
            "{} values in {} planes cannot form a {width}x{height} frame",
            values.len(),
            planes.plane_count
        )));
    }
    Frame::new(width, height, values.iter().map(|&v| v as u8).collect())
}
