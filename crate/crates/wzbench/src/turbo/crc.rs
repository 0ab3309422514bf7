//! CRC-16/CCITT-FALSE over bit blocks, the decoder's success check.

/// Width of the checksum in bits, counted against the rate budget.
pub const CRC_BITS: usize = 16;

/// CRC-16/CCITT-FALSE: polynomial 0x1021, init 0xFFFF, no reflection.
pub fn crc16(bytes: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in bytes {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 {
                (crc << 1) ^ 0x1021
            } else {
                crc << 1
            };
        }
    }
    crc
}

/// Packs bits (one per byte, values 0/1) MSB-first into bytes; the tail of a
/// partial byte is zero-filled.
pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        debug_assert!(b <= 1);
        out[i / 8] |= b << (7 - i % 8);
    }
    out
}

/// Inverse of `pack_bits` for a known bit count.
pub fn unpack_bits(bytes: &[u8], n_bits: usize) -> Vec<u8> {
    assert!(n_bits <= bytes.len() * 8);
    (0..n_bits)
        .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
        .collect()
}

/// Checksum of a bit block.
pub fn crc16_bits(bits: &[u8]) -> u16 {
    crc16(&pack_bits(bits))
}
