//! Incremental parity release schedule shared by encoder and decoder.

/// Requests available before the schedule tops out at full parity.
pub const NUM_CHUNKS: usize = 8;

/// Phase released per chunk, bit-reversed so every prefix of the schedule
/// samples each trellis at uniform spacing.
const PHASE_ORDER: [usize; NUM_CHUNKS] = [0, 4, 2, 6, 1, 5, 3, 7];

/// Parity bits per chunk.
pub fn chunk_len(block_len: usize) -> usize {
    assert_eq!(block_len % 8, 0, "block length must be a multiple of 8");
    block_len / 4
}

/// Positions `(stream, t)` released by `chunk`, one period-8 phase class from
/// each of the two parity streams.
pub fn chunk_positions(block_len: usize, chunk: usize) -> impl Iterator<Item = (usize, usize)> {
    assert_eq!(block_len % 8, 0, "block length must be a multiple of 8");
    assert!(chunk < NUM_CHUNKS, "chunk {chunk} out of schedule");
    let phase = PHASE_ORDER[chunk];
    (phase..block_len)
        .step_by(8)
        .flat_map(|t| [(0usize, t), (1usize, t)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn chunks_are_disjoint_and_cover_all_parity() {
        let n = 1024;
        let mut seen = BTreeSet::new();
        for chunk in 0..NUM_CHUNKS {
            let mut count = 0;
            for pos in chunk_positions(n, chunk) {
                assert!(seen.insert(pos), "{pos:?} released twice");
                count += 1;
            }
            assert_eq!(count, chunk_len(n));
        }
        assert_eq!(seen.len(), 2 * n);
    }

    #[test]
    fn every_chunk_feeds_both_decoders_equally() {
        let n = 1024;
        for chunk in 0..NUM_CHUNKS {
            let from_first = chunk_positions(n, chunk).filter(|&(s, _)| s == 0).count();
            assert_eq!(from_first, chunk_len(n) / 2);
        }
    }

    #[test]
    fn prefixes_sample_each_stream_uniformly() {
        let n = 1024;
        // After 1, 2, and 4 chunks the released phases form strides 8, 4, 2.
        for (chunks, stride) in [(1usize, 8usize), (2, 4), (4, 2), (8, 1)] {
            let mut phases: BTreeSet<usize> = (0..chunks)
                .flat_map(|c| chunk_positions(n, c))
                .filter(|&(s, _)| s == 0)
                .map(|(_, t)| t % 8)
                .collect();
            let expected: BTreeSet<usize> = (0..8).step_by(stride).collect();
            assert_eq!(phases, expected, "after {chunks} chunks");
            phases.clear();
        }
    }

    #[test]
    fn first_chunk_is_the_zero_phase() {
        let positions: Vec<_> = chunk_positions(64, 0).collect();
        assert_eq!(positions[0], (0, 0));
        assert_eq!(positions[1], (1, 0));
        assert!(positions.iter().all(|&(_, t)| t % 8 == 0));
    }
}
