//! Raw video frames and sequence I/O.
//!
//! Frames are 8-bit luma planes. Files on disk are headerless raw video in
//! either 4:2:0 planar form (chroma present but ignored by the codec) or
//! luma-only form. Frame geometry always comes from the caller since raw
//! files carry no metadata.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Chroma arrangement of a raw video file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChromaLayout {
    /// Y plane followed by quarter-size U and V planes per frame.
    Planar420,
    /// Y plane only.
    LumaOnly,
}

impl ChromaLayout {
    /// Bytes per frame for the given geometry.
    pub fn frame_bytes(self, width: usize, height: usize) -> usize {
        let luma = width * height;
        match self {
            ChromaLayout::Planar420 => luma + luma / 2,
            ChromaLayout::LumaOnly => luma,
        }
    }

    fn label(self) -> &'static str {
        match self {
            ChromaLayout::Planar420 => "4:2:0 planar",
            ChromaLayout::LumaOnly => "luma only",
        }
    }
}

impl std::str::FromStr for ChromaLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "planar420" | "yuv420" | "420" => Ok(ChromaLayout::Planar420),
            "luma-only" | "luma" | "y" => Ok(ChromaLayout::LumaOnly),
            other => Err(Error::Config(format!("unknown chroma layout {other:?}"))),
        }
    }
}

/// A single 8-bit luma frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Frame {
    /// Minimum edge length; one block of the motion grid must fit.
    pub const MIN_EDGE: usize = 16;

    /// Wraps a luma plane, validating geometry.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width < Self::MIN_EDGE || height < Self::MIN_EDGE {
            return Err(Error::InvalidFrame(format!(
                "{width}x{height} is below the {0}x{0} minimum",
                Self::MIN_EDGE
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "luma plane has {} bytes, geometry {width}x{height} needs {}",
                data.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// All-zero frame of the given geometry.
    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major luma samples.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Sample at (x, y); panics out of bounds like slice indexing.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    /// One image row.
    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Sample with coordinates clamped to the frame border.
    #[inline]
    pub fn at_clamped(&self, x: isize, y: isize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    /// Copies an axis-aligned region into a contiguous buffer.
    ///
    /// The region must lie fully inside the frame.
    pub fn copy_block(&self, x: usize, y: usize, w: usize, h: usize, out: &mut Vec<u8>) {
        assert!(x + w <= self.width && y + h <= self.height, "block escapes frame");
        out.clear();
        out.reserve(w * h);
        for row in y..y + h {
            out.extend_from_slice(&self.data[row * self.width + x..row * self.width + x + w]);
        }
    }

    /// Same region copy, clamping coordinates at the border instead of
    /// requiring containment. `x`/`y` may be negative or past the edge.
    pub fn copy_block_clamped(&self, x: isize, y: isize, w: usize, h: usize, out: &mut Vec<u8>) {
        out.clear();
        out.reserve(w * h);
        for dy in 0..h as isize {
            for dx in 0..w as isize {
                out.push(self.at_clamped(x + dx, y + dy));
            }
        }
    }
}

/// An ordered run of equally sized frames.
#[derive(Debug, Clone)]
pub struct VideoSequence {
    width: usize,
    height: usize,
    frames: Vec<Frame>,
}

impl VideoSequence {
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        let first = frames.first().ok_or(Error::TooFewFrames {
            needed: 1,
            actual: 0,
        })?;
        let (width, height) = (first.width(), first.height());
        for (i, f) in frames.iter().enumerate() {
            if f.width() != width || f.height() != height {
                return Err(Error::DimensionMismatch(format!(
                    "frame {i} is {}x{}, sequence is {width}x{height}",
                    f.width(),
                    f.height()
                )));
            }
        }
        Ok(Self {
            width,
            height,
            frames,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, i: usize) -> &Frame {
        &self.frames[i]
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Keeps only the first `n` frames.
    pub fn truncate(&mut self, n: usize) {
        self.frames.truncate(n);
    }
}

/// Reads a headerless raw video file.
///
/// `max_frames` bounds how many frames are decoded; `None` reads the whole
/// file. A file whose size is not a whole number of frames is rejected, with
/// the two nearest valid sizes named in the error.
pub fn load_raw_sequence(
    path: &Path,
    width: usize,
    height: usize,
    layout: ChromaLayout,
    max_frames: Option<usize>,
) -> Result<VideoSequence> {
    let frame_bytes = layout.frame_bytes(width, height) as u64;
    let meta = std::fs::metadata(path)?;
    let size = meta.len();
    if size % frame_bytes != 0 {
        let lower = size / frame_bytes * frame_bytes;
        return Err(Error::TruncatedFile {
            path: path.to_path_buf(),
            actual: size,
            frame_bytes,
            width,
            height,
            layout: layout.label(),
            lower,
            upper: lower + frame_bytes,
        });
    }
    let total = (size / frame_bytes) as usize;
    if total == 0 {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let n = max_frames.map_or(total, |m| m.min(total));

    let mut reader = BufReader::new(File::open(path)?);
    let luma_bytes = width * height;
    let chroma_bytes = frame_bytes as usize - luma_bytes;
    let mut frames = Vec::with_capacity(n);
    let mut chroma_skip = vec![0u8; chroma_bytes];
    for _ in 0..n {
        let mut luma = vec![0u8; luma_bytes];
        reader.read_exact(&mut luma)?;
        if chroma_bytes > 0 {
            reader.read_exact(&mut chroma_skip)?;
        }
        frames.push(Frame::new(width, height, luma)?);
    }
    VideoSequence::new(frames)
}

/// Writes a sequence back out as raw video.
///
/// With `Planar420` the chroma planes are filled with the neutral value 128
/// so standard players show a grayscale clip.
pub fn write_raw_sequence(path: &Path, seq: &VideoSequence, layout: ChromaLayout) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path)?);
    let chroma_bytes = layout.frame_bytes(seq.width(), seq.height()) - seq.width() * seq.height();
    let chroma_fill = vec![128u8; chroma_bytes];
    for frame in seq.frames() {
        writer.write_all(frame.data())?;
        if chroma_bytes > 0 {
            writer.write_all(&chroma_fill)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Frame roles after GOP-2 splitting.
///
/// Even indices (0-based) are key frames, odd indices are Wyner-Ziv frames.
/// Every WZ frame needs both neighbouring keys, so a trailing WZ frame with
/// no following key is dropped and recorded here.
#[derive(Debug, Clone)]
pub struct GopSplit {
    /// Indices of key frames in the source sequence.
    pub key_indices: Vec<usize>,
    /// Per WZ frame: (wz_index, previous_key_index, next_key_index).
    pub wz_triples: Vec<(usize, usize, usize)>,
    /// Index of a trailing WZ frame that was dropped, if any.
    pub dropped_trailing: Option<usize>,
}

/// Splits a sequence into GOP-2 key / Wyner-Ziv roles.
pub fn split_gop(n_frames: usize) -> Result<GopSplit> {
    if n_frames < 3 {
        return Err(Error::TooFewFrames {
            needed: 3,
            actual: n_frames,
        });
    }
    let key_indices: Vec<usize> = (0..n_frames).step_by(2).collect();
    let mut wz_triples = Vec::new();
    let mut dropped_trailing = None;
    for wz in (1..n_frames).step_by(2) {
        if wz + 1 < n_frames {
            wz_triples.push((wz, wz - 1, wz + 1));
        } else {
            dropped_trailing = Some(wz);
        }
    }
    Ok(GopSplit {
        key_indices,
        wz_triples,
        dropped_trailing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_frame(width: usize, height: usize, offset: u8) -> Frame {
        let data = (0..width * height)
            .map(|i| (i as u8).wrapping_add(offset))
            .collect();
        Frame::new(width, height, data).unwrap()
    }

    #[test]
    fn frame_rejects_bad_geometry() {
        assert!(Frame::new(8, 16, vec![0; 128]).is_err());
        assert!(Frame::new(16, 16, vec![0; 100]).is_err());
        assert!(Frame::new(16, 16, vec![0; 256]).is_ok());
    }

    #[test]
    fn clamped_access_replicates_border() {
        let f = ramp_frame(16, 16, 0);
        assert_eq!(f.at_clamped(-3, -5), f.at(0, 0));
        assert_eq!(f.at_clamped(99, 4), f.at(15, 4));
        assert_eq!(f.at_clamped(7, 200), f.at(7, 15));
    }

    #[test]
    fn copy_block_matches_manual_gather() {
        let f = ramp_frame(32, 16, 0);
        let mut buf = Vec::new();
        f.copy_block(5, 3, 4, 2, &mut buf);
        let expect: Vec<u8> = vec![
            f.at(5, 3),
            f.at(6, 3),
            f.at(7, 3),
            f.at(8, 3),
            f.at(5, 4),
            f.at(6, 4),
            f.at(7, 4),
            f.at(8, 4),
        ];
        assert_eq!(buf, expect);
    }

    #[test]
    fn sequence_requires_uniform_geometry() {
        let a = ramp_frame(16, 16, 0);
        let b = ramp_frame(32, 16, 0);
        assert!(VideoSequence::new(vec![a.clone(), b]).is_err());
        assert!(VideoSequence::new(vec![a.clone(), a]).is_ok());
    }

    #[test]
    fn split_gop_five_frames() {
        let g = split_gop(5).unwrap();
        assert_eq!(g.key_indices, vec![0, 2, 4]);
        assert_eq!(g.wz_triples, vec![(1, 0, 2), (3, 2, 4)]);
        assert_eq!(g.dropped_trailing, None);
    }

    #[test]
    fn split_gop_drops_trailing_wz() {
        let g = split_gop(4).unwrap();
        assert_eq!(g.key_indices, vec![0, 2]);
        assert_eq!(g.wz_triples, vec![(1, 0, 2)]);
        assert_eq!(g.dropped_trailing, Some(3));
    }

    #[test]
    fn split_gop_needs_three_frames() {
        assert!(split_gop(2).is_err());
    }

    #[test]
    fn raw_roundtrip_planar420() {
        let dir = std::env::temp_dir().join("wzbench_video_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.yuv");

        let seq = VideoSequence::new(vec![
            ramp_frame(16, 16, 0),
            ramp_frame(16, 16, 40),
            ramp_frame(16, 16, 90),
        ])
        .unwrap();
        write_raw_sequence(&path, &seq, ChromaLayout::Planar420).unwrap();

        let bytes = std::fs::metadata(&path).unwrap().len();
        assert_eq!(bytes, 3 * (256 + 128));

        let back = load_raw_sequence(&path, 16, 16, ChromaLayout::Planar420, None).unwrap();
        assert_eq!(back.len(), 3);
        for i in 0..3 {
            assert_eq!(back.frame(i).data(), seq.frame(i).data());
        }

        let limited = load_raw_sequence(&path, 16, 16, ChromaLayout::Planar420, Some(2)).unwrap();
        assert_eq!(limited.len(), 2);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn partial_frame_is_rejected_with_sizes() {
        let dir = std::env::temp_dir().join("wzbench_video_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("truncated.yuv");
        std::fs::write(&path, vec![0u8; 300]).unwrap();

        let err = load_raw_sequence(&path, 16, 16, ChromaLayout::LumaOnly, None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("300"), "{msg}");
        assert!(msg.contains("256"), "{msg}");
        assert!(msg.contains("512"), "{msg}");
        std::fs::remove_file(&path).unwrap();
    }
}
