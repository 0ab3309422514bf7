//! Versioned binary containers for parity, transmissions, and requests.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::turbo::crc::{pack_bits, unpack_bits, CRC_BITS};
use crate::turbo::feedback::EncodedBlock;

pub const PARITY_MAGIC: [u8; 4] = *b"WZPS";
pub const TRANSMISSION_MAGIC: [u8; 4] = *b"WZTX";
pub const REQUEST_MAGIC: [u8; 4] = *b"WZRQ";
pub const STREAM_VERSION: u16 = 1;

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    Ok(u16::from_le_bytes(take(r)?))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(take(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(take(r)?))
}

fn write_header<W: Write>(w: &mut W, magic: [u8; 4]) -> Result<()> {
    w.write_all(&magic)?;
    w.write_all(&STREAM_VERSION.to_le_bytes())?;
    Ok(())
}

fn check_header<R: Read>(r: &mut R, expected: [u8; 4]) -> Result<()> {
    let found: [u8; 4] = take(r)?;
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    let version = read_u16(r)?;
    if version != STREAM_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    Ok(())
}

/// Full parity memory of the encoder, enough to serve any request sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityStore {
    pub block_len: u32,
    pub interleaver_seed: u64,
    pub blocks: Vec<EncodedBlock>,
}

impl ParityStore {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, PARITY_MAGIC)?;
        w.write_all(&self.block_len.to_le_bytes())?;
        w.write_all(&self.interleaver_seed.to_le_bytes())?;
        w.write_all(&(self.blocks.len() as u32).to_le_bytes())?;
        for b in &self.blocks {
            if b.parity1.len() != self.block_len as usize || b.parity2.len() != self.block_len as usize {
                return Err(Error::Config(format!(
                    "block parity length {} does not match store block length {}",
                    b.parity1.len(),
                    self.block_len
                )));
            }
            w.write_all(&(b.payload_len as u32).to_le_bytes())?;
            w.write_all(&b.crc.to_le_bytes())?;
            w.write_all(&pack_bits(&b.parity1))?;
            w.write_all(&pack_bits(&b.parity2))?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        check_header(r, PARITY_MAGIC)?;
        let block_len = read_u32(r)?;
        if block_len == 0 {
            return Err(Error::CorruptStream("zero block length".into()));
        }
        let interleaver_seed = read_u64(r)?;
        let n_blocks = read_u32(r)? as usize;
        let packed = (block_len as usize).div_ceil(8);
        let mut blocks = Vec::with_capacity(n_blocks);
        for _ in 0..n_blocks {
            let payload_len = read_u32(r)? as usize;
            if payload_len == 0 || payload_len > block_len as usize {
                return Err(Error::CorruptStream(format!(
                    "payload length {payload_len} outside 1..={block_len}"
                )));
            }
            let crc = read_u16(r)?;
            let mut buf = vec![0u8; packed];
            r.read_exact(&mut buf)?;
            let parity1 = unpack_bits(&buf, block_len as usize);
            r.read_exact(&mut buf)?;
            let parity2 = unpack_bits(&buf, block_len as usize);
            blocks.push(EncodedBlock {
                payload_len,
                crc,
                parity1,
                parity2,
            });
        }
        Ok(Self {
            block_len,
            interleaver_seed,
            blocks,
        })
    }
}

/// One burst actually sent over the forward channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionRecord {
    pub block_id: u32,
    pub chunk_id: u8,
    /// Present on the first chunk of each block, which carries the checksum.
    pub crc: Option<u16>,
    pub bits: Vec<u8>,
}

/// Everything sent, in order; the rate accounting recounts from here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransmissionLog {
    pub records: Vec<TransmissionRecord>,
}

impl TransmissionLog {
    pub fn push(&mut self, record: TransmissionRecord) {
        self.records.push(record);
    }

    /// Spent bits counted from the log itself, checksum overhead included.
    pub fn total_bits(&self) -> usize {
        self.records
            .iter()
            .map(|r| r.bits.len() + if r.crc.is_some() { CRC_BITS } else { 0 })
            .sum()
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, TRANSMISSION_MAGIC)?;
        w.write_all(&(self.records.len() as u32).to_le_bytes())?;
        for rec in &self.records {
            if rec.bits.len() > u16::MAX as usize {
                return Err(Error::Config(format!("burst of {} bits too long", rec.bits.len())));
            }
            w.write_all(&rec.block_id.to_le_bytes())?;
            w.write_all(&[rec.chunk_id, rec.crc.is_some() as u8])?;
            if let Some(crc) = rec.crc {
                w.write_all(&crc.to_le_bytes())?;
            }
            w.write_all(&(rec.bits.len() as u16).to_le_bytes())?;
            w.write_all(&pack_bits(&rec.bits))?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        check_header(r, TRANSMISSION_MAGIC)?;
        let n = read_u32(r)? as usize;
        let mut records = Vec::with_capacity(n);
        for _ in 0..n {
            let block_id = read_u32(r)?;
            let [chunk_id, has_crc] = take(r)?;
            if has_crc > 1 {
                return Err(Error::CorruptStream(format!("checksum flag {has_crc}")));
            }
            let crc = if has_crc == 1 { Some(read_u16(r)?) } else { None };
            let n_bits = read_u16(r)? as usize;
            let mut buf = vec![0u8; n_bits.div_ceil(8)];
            r.read_exact(&mut buf)?;
            records.push(TransmissionRecord {
                block_id,
                chunk_id,
                crc,
                bits: unpack_bits(&buf, n_bits),
            });
        }
        Ok(Self { records })
    }
}

/// One feedback-channel request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RequestRecord {
    pub block_id: u32,
    pub chunk_id: u8,
}

/// Decoder request history, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RequestLog {
    pub records: Vec<RequestRecord>,
}

impl RequestLog {
    pub fn push(&mut self, block_id: u32, chunk_id: u8) {
        self.records.push(RequestRecord { block_id, chunk_id });
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_header(w, REQUEST_MAGIC)?;
        w.write_all(&(self.records.len() as u32).to_le_bytes())?;
        for rec in &self.records {
            w.write_all(&rec.block_id.to_le_bytes())?;
            w.write_all(&[rec.chunk_id])?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        check_header(r, REQUEST_MAGIC)?;
        let n = read_u32(r)? as usize;
        let mut records = Vec::with_capacity(n);
        for _ in 0..n {
            let block_id = read_u32(r)?;
            let [chunk_id] = take(r)?;
            records.push(RequestRecord { block_id, chunk_id });
        }
        Ok(Self { records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turbo::feedback::TurboEncoder;
    use crate::turbo::interleaver::{Interleaver, BLOCK_LEN};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn sample_store() -> ParityStore {
        let enc = TurboEncoder::new(Interleaver::new(BLOCK_LEN, 9));
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let full: Vec<u8> = (0..BLOCK_LEN).map(|_| rng.gen_range(0..2)).collect();
        let short: Vec<u8> = (0..500).map(|_| rng.gen_range(0..2)).collect();
        ParityStore {
            block_len: BLOCK_LEN as u32,
            interleaver_seed: 9,
            blocks: vec![
                enc.encode_block(&full).unwrap(),
                enc.encode_block(&short).unwrap(),
            ],
        }
    }

    #[test]
    fn parity_store_round_trips() {
        let store = sample_store();
        let mut buf = Vec::new();
        store.write_to(&mut buf).unwrap();
        let back = ParityStore::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, store);
    }

    #[test]
    fn transmission_log_round_trips_and_recounts() {
        let mut log = TransmissionLog::default();
        log.push(TransmissionRecord {
            block_id: 0,
            chunk_id: 0,
            crc: Some(0xBEEF),
            bits: vec![1, 0, 1, 1, 0],
        });
        log.push(TransmissionRecord {
            block_id: 0,
            chunk_id: 1,
            crc: None,
            bits: vec![0; 256],
        });
        assert_eq!(log.total_bits(), 5 + 16 + 256);
        let mut buf = Vec::new();
        log.write_to(&mut buf).unwrap();
        let back = TransmissionLog::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, log);
        assert_eq!(back.total_bits(), log.total_bits());
    }

    #[test]
    fn request_log_round_trips() {
        let mut log = RequestLog::default();
        for (b, c) in [(0, 0), (0, 1), (1, 0), (2, 0), (2, 1)] {
            log.push(b, c);
        }
        let mut buf = Vec::new();
        log.write_to(&mut buf).unwrap();
        let back = RequestLog::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let store = sample_store();
        let mut buf = Vec::new();
        store.write_to(&mut buf).unwrap();
        let err = TransmissionLog::read_from(&mut buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::BadMagic { .. }));
    }

    #[test]
    fn future_version_is_rejected() {
        let mut buf = Vec::new();
        RequestLog::default().write_to(&mut buf).unwrap();
        buf[4] = 99;
        let err = RequestLog::read_from(&mut buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedVersion(99)));
    }

    #[test]
    fn truncation_is_detected() {
        let store = sample_store();
        let mut buf = Vec::new();
        store.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 10);
        assert!(ParityStore::read_from(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn corrupt_payload_length_is_rejected() {
        let store = sample_store();
        let mut buf = Vec::new();
        store.write_to(&mut buf).unwrap();
        // Header is 4 + 2 + 4 + 8 + 4 bytes; the first block record starts
        // with its payload length.
        buf[22..26].copy_from_slice(&u32::MAX.to_le_bytes());
        let err = ParityStore::read_from(&mut buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::CorruptStream(_)));
    }
}
