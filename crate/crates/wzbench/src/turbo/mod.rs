//! Turbo-coded Slepian-Wolf layer with a simulated feedback channel.

pub mod crc;
pub mod feedback;
pub mod interleaver;
pub mod puncture;
pub mod rsc;
pub mod stream;

pub use crc::{crc16, crc16_bits, pack_bits, unpack_bits, CRC_BITS};
pub use feedback::{
    decode_with_feedback, BlockDecodeResult, CrossoverEstimator, DecodeLimits, EncodedBlock,
    TurboEncoder,
};
pub use interleaver::{Interleaver, BLOCK_LEN};
pub use puncture::{chunk_len, chunk_positions, NUM_CHUNKS};
pub use stream::{ParityStore, RequestLog, RequestRecord, TransmissionLog, TransmissionRecord};
