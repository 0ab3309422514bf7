//! Rate-adaptive decoding over the simulated feedback channel.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::turbo::crc::{crc16_bits, CRC_BITS};
use crate::turbo::interleaver::Interleaver;
use crate::turbo::puncture::{chunk_len, chunk_positions, NUM_CHUNKS};
use crate::turbo::rsc;

/// LLR magnitude for parity bits: the forward channel is error-free, so they
/// are near-certain, kept finite for the log-domain recursions.
const PARITY_LLR: f64 = 20.0;
/// LLR magnitude pinning padding bits, which both ends know are zero.
const KNOWN_BIT_LLR: f64 = 40.0;

/// Everything the encoder retains for one 1024-bit block, awaiting requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBlock {
    pub payload_len: usize,
    pub crc: u16,
    pub parity1: Vec<u8>,
    pub parity2: Vec<u8>,
}

/// Slepian-Wolf encoder: parity and a checksum, no systematic bits.
#[derive(Debug)]
pub struct TurboEncoder {
    interleaver: Interleaver,
}

impl TurboEncoder {
    pub fn new(interleaver: Interleaver) -> Self {
        Self { interleaver }
    }

    pub fn interleaver(&self) -> &Interleaver {
        &self.interleaver
    }

    pub fn block_len(&self) -> usize {
        self.interleaver.len()
    }

    /// Encodes one payload of at most the block length; the tail is
    /// zero-padded and the checksum covers the padded block.
    pub fn encode_block(&self, payload: &[u8]) -> Result<EncodedBlock> {
        let n = self.block_len();
        if payload.is_empty() || payload.len() > n {
            return Err(Error::Config(format!(
                "payload of {} bits does not fit a {n}-bit block",
                payload.len()
            )));
        }
        let mut bits = payload.to_vec();
        bits.resize(n, 0);
        let parity1 = rsc::encode(&bits);
        let parity2 = rsc::encode(&self.interleaver.permute(&bits));
        Ok(EncodedBlock {
            payload_len: payload.len(),
            crc: crc16_bits(&bits),
            parity1,
            parity2,
        })
    }
}

/// Decoder effort bounds.
#[derive(Debug, Clone, Copy)]
pub struct DecodeLimits {
    /// APP iterations per parity increment.
    pub max_iter: usize,
    /// Parity chunks the decoder may request.
    pub max_requests: usize,
}

impl Default for DecodeLimits {
    fn default() -> Self {
        Self {
            max_iter: 15,
            max_requests: NUM_CHUNKS,
        }
    }
}

/// Outcome of decoding one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecodeResult {
    /// Recovered payload bits; exact when `verified`.
    pub bits: Vec<u8>,
    /// Checksum matched; never silently wrong otherwise.
    pub verified: bool,
    /// Parity chunks requested.
    pub requests: usize,
    /// Parity bits consumed.
    pub parity_bits: usize,
    /// Parity plus the checksum sent with the first chunk.
    pub total_bits: usize,
    /// APP iterations run across all attempts.
    pub iterations: usize,
}

impl BlockDecodeResult {
    /// Spent bits per payload bit, the Slepian-Wolf rate.
    pub fn rate(&self) -> f64 {
        self.total_bits as f64 / self.bits.len() as f64
    }
}

/// Iterative APP decoding with incremental parity requests.
///
/// The side-information bits stand in for the untransmitted systematic
/// stream at LLR magnitude ln((1-p)/p). Each attempt runs up to
/// `limits.max_iter` extrinsic-exchange iterations with a checksum test per
/// iteration; on failure the next parity chunk is requested and the attempt
/// restarts with the richer parity set.
pub fn decode_with_feedback(
    si_bits: &[u8],
    enc: &EncodedBlock,
    p_hat: f64,
    interleaver: &Interleaver,
    limits: DecodeLimits,
) -> Result<BlockDecodeResult> {
    let n = interleaver.len();
    if si_bits.len() != enc.payload_len {
        return Err(Error::DimensionMismatch(format!(
            "side information has {} bits, block payload {}",
            si_bits.len(),
            enc.payload_len
        )));
    }
    if !(0.0..0.5).contains(&p_hat) || p_hat <= 0.0 {
        return Err(Error::Config(format!("crossover estimate {p_hat} outside (0, 0.5)")));
    }
    let max_requests = limits.max_requests.min(NUM_CHUNKS);

    let mag = ((1.0 - p_hat) / p_hat).ln();
    let mut l_sys = vec![KNOWN_BIT_LLR; n];
    for (i, &b) in si_bits.iter().enumerate() {
        l_sys[i] = if b == 0 { mag } else { -mag };
    }
    let l_sys_int = interleaver.permute(&l_sys);

    let mut l_p1 = vec![0.0f64; n];
    let mut l_p2 = vec![0.0f64; n];
    let mut hard = vec![0u8; n];
    let mut best: Option<Vec<u8>> = None;
    let mut iterations = 0usize;
    let mut requests = 0usize;
    let mut verified = false;

    'attempts: while requests < max_requests {
        for (stream, t) in chunk_positions(n, requests) {
            let (bit, slot) = match stream {
                0 => (enc.parity1[t], &mut l_p1[t]),
                _ => (enc.parity2[t], &mut l_p2[t]),
            };
            *slot = if bit == 0 { PARITY_LLR } else { -PARITY_LLR };
        }
        requests += 1;

        let mut le1 = vec![0.0f64; n];
        let mut le2_orig = vec![0.0f64; n];
        for _ in 0..limits.max_iter {
            iterations += 1;
            let l_in1: Vec<f64> = (0..n).map(|i| l_sys[i] + le2_orig[i]).collect();
            let post1 = rsc::bcjr(&l_in1, &l_p1);
            for i in 0..n {
                le1[i] = post1[i] - l_in1[i];
            }
            let le1_int = interleaver.permute(&le1);
            let l_in2: Vec<f64> = (0..n).map(|i| l_sys_int[i] + le1_int[i]).collect();
            let post2 = rsc::bcjr(&l_in2, &l_p2);
            let le2: Vec<f64> = (0..n).map(|i| post2[i] - l_in2[i]).collect();
            le2_orig = interleaver.unpermute(&le2);

            for i in 0..n {
                let total = l_sys[i] + le1[i] + le2_orig[i];
                hard[i] = (total < 0.0) as u8;
            }
            // Padding is known either way.
            for b in hard.iter_mut().skip(enc.payload_len) {
                *b = 0;
            }
            if crc16_bits(&hard) == enc.crc {
                verified = true;
                break 'attempts;
            }
        }
        best = Some(hard.clone());
    }

    let final_bits = if verified { &hard } else { best.as_ref().unwrap_or(&hard) };
    let parity_bits = requests * chunk_len(n);
    Ok(BlockDecodeResult {
        bits: final_bits[..enc.payload_len].to_vec(),
        verified,
        requests,
        parity_bits,
        total_bits: parity_bits + CRC_BITS,
        iterations,
    })
}

/// Clamp bounds for the crossover estimate; never zero, never a coin flip.
pub const CROSSOVER_MIN: f64 = 1e-3;
pub const CROSSOVER_MAX: f64 = 0.499;

/// Virtual-channel statistics keyed by (band, plane), fed by previously
/// decoded frames.
#[derive(Debug, Clone)]
pub struct CrossoverEstimator {
    prior: f64,
    rates: HashMap<(u16, u16), f64>,
}

impl CrossoverEstimator {
    /// `prior` is used until a position has history.
    pub fn new(prior: f64) -> Self {
        Self {
            prior,
            rates: HashMap::new(),
        }
    }

    /// Records the observed flip count for one (band, plane) position.
    pub fn observe(&mut self, key: (u16, u16), mismatches: usize, total: usize) {
        if total > 0 {
            self.rates.insert(key, mismatches as f64 / total as f64);
        }
    }

    /// Latest flip rate for the position, clamped into (0, 0.5).
    pub fn estimate(&self, key: (u16, u16)) -> f64 {
        self.rates
            .get(&key)
            .copied()
            .unwrap_or(self.prior)
            .clamp(CROSSOVER_MIN, CROSSOVER_MAX)
    }
}

impl Default for CrossoverEstimator {
    fn default() -> Self {
        Self::new(0.15)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turbo::interleaver::BLOCK_LEN;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_bits(n: usize, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(0..2u8)).collect()
    }

    fn flip(bits: &[u8], p: f64, seed: u64) -> Vec<u8> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        bits.iter()
            .map(|&b| if rng.gen_bool(p) { b ^ 1 } else { b })
            .collect()
    }

    fn codec() -> (TurboEncoder, Interleaver) {
        let il = Interleaver::new(BLOCK_LEN, 77);
        (TurboEncoder::new(il.clone()), il)
    }

    #[test]
    fn clean_side_information_needs_one_chunk() {
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 1);
        let block = enc.encode_block(&bits).unwrap();
        let r = decode_with_feedback(&bits, &block, 0.01, &il, DecodeLimits::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.requests, 1);
        assert_eq!(r.total_bits, 256 + 16);
        assert_eq!(r.bits, bits);
    }

    #[test]
    fn five_percent_flips_recover_exactly() {
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 2);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.05, 3);
        let r = decode_with_feedback(&si, &block, 0.05, &il, DecodeLimits::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.bits, bits);
        // Eq. 1 direction: the spent rate cannot beat the conditional entropy.
        let h = -(0.05f64.log2() * 0.05 + 0.95f64.log2() * 0.95);
        assert!(r.rate() >= h, "rate {} below h2(0.05) {h}", r.rate());
    }

    #[test]
    fn shortened_payload_round_trips() {
        let (enc, il) = codec();
        let bits = random_bits(396, 4);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.05, 5);
        let r = decode_with_feedback(&si, &block, 0.05, &il, DecodeLimits::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.bits.len(), 396);
        assert_eq!(r.bits, bits);
    }

    #[test]
    fn useless_side_information_tops_out_unverified() {
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 6);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.5, 7);
        let limits = DecodeLimits {
            max_iter: 15,
            max_requests: 4,
        };
        let r = decode_with_feedback(&si, &block, 0.499, &il, limits).unwrap();
        assert!(!r.verified);
        assert_eq!(r.requests, 4);
        assert_eq!(r.total_bits, 4 * 256 + 16);
        assert_eq!(r.bits.len(), BLOCK_LEN);
    }

    #[test]
    fn full_parity_inverts_even_useless_side_information() {
        // With every parity bit released the branch parities pin the whole
        // trellis path, so recovery no longer depends on the SI at all.
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 8);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.5, 9);
        let r = decode_with_feedback(&si, &block, 0.499, &il, DecodeLimits::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.bits, bits);
    }

    #[test]
    fn decode_is_deterministic() {
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 10);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.08, 11);
        let a = decode_with_feedback(&si, &block, 0.08, &il, DecodeLimits::default()).unwrap();
        let b = decode_with_feedback(&si, &block, 0.08, &il, DecodeLimits::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reencoding_recovered_bits_reproduces_parity() {
        let (enc, il) = codec();
        let bits = random_bits(BLOCK_LEN, 12);
        let block = enc.encode_block(&bits).unwrap();
        let si = flip(&bits, 0.03, 13);
        let r = decode_with_feedback(&si, &block, 0.03, &il, DecodeLimits::default()).unwrap();
        assert!(r.verified);
        assert_eq!(enc.encode_block(&r.bits).unwrap(), block);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (enc, il) = codec();
        assert!(enc.encode_block(&[]).is_err());
        assert!(enc.encode_block(&vec![0u8; BLOCK_LEN + 1]).is_err());
        let block = enc.encode_block(&vec![1u8; 64]).unwrap();
        let si = vec![1u8; 63];
        assert!(decode_with_feedback(&si, &block, 0.1, &il, DecodeLimits::default()).is_err());
        let si = vec![1u8; 64];
        assert!(decode_with_feedback(&si, &block, 0.0, &il, DecodeLimits::default()).is_err());
        assert!(decode_with_feedback(&si, &block, 0.5, &il, DecodeLimits::default()).is_err());
    }

    #[test]
    fn crossover_estimates_follow_history() {
        let mut est = CrossoverEstimator::default();
        assert_eq!(est.estimate((3, 0)), 0.15);
        est.observe((3, 0), 30, 1000);
        assert!((est.estimate((3, 0)) - 0.03).abs() < 1e-12);
        est.observe((3, 0), 0, 1000);
        assert_eq!(est.estimate((3, 0)), CROSSOVER_MIN);
        est.observe((5, 1), 999, 1000);
        assert_eq!(est.estimate((5, 1)), CROSSOVER_MAX);
    }
}
