//! Fixed pseudo-random interleaver shared by encoder and decoder.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Block length both constituent encoders work on.
pub const BLOCK_LEN: usize = 1024;

/// A seeded permutation of block positions and its inverse.
#[derive(Debug, Clone)]
pub struct Interleaver {
    seed: u64,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Interleaver {
    /// Fisher-Yates shuffle of 0..len from the recorded seed.
    pub fn new(len: usize, seed: u64) -> Self {
        let mut forward: Vec<u32> = (0..len as u32).collect();
        forward.shuffle(&mut ChaCha12Rng::seed_from_u64(seed));
        let mut inverse = vec![0u32; len];
        for (i, &p) in forward.iter().enumerate() {
            inverse[p as usize] = i as u32;
        }
        Self {
            seed,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Position in the original block feeding interleaved position `i`.
    pub fn source(&self, i: usize) -> usize {
        self.forward[i] as usize
    }

    /// out[i] = input[pi(i)], the stream the second encoder sees.
    pub fn permute<T: Copy>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.forward.len());
        self.forward.iter().map(|&p| input[p as usize]).collect()
    }

    /// Inverse mapping: out[pi(i)] = input[i].
    pub fn unpermute<T: Copy>(&self, input: &[T]) -> Vec<T> {
        assert_eq!(input.len(), self.inverse.len());
        self.inverse.iter().map(|&p| input[p as usize]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_a_bijection() {
        let il = Interleaver::new(BLOCK_LEN, 42);
        let mut seen = vec![false; BLOCK_LEN];
        for i in 0..BLOCK_LEN {
            assert!(!seen[il.source(i)]);
            seen[il.source(i)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn permute_then_unpermute_is_identity() {
        let il = Interleaver::new(257, 7);
        let data: Vec<u32> = (0..257).collect();
        assert_eq!(il.unpermute(&il.permute(&data)), data);
        assert_eq!(il.permute(&il.unpermute(&data)), data);
    }

    #[test]
    fn seed_determines_the_permutation() {
        let a = Interleaver::new(BLOCK_LEN, 9);
        let b = Interleaver::new(BLOCK_LEN, 9);
        let c = Interleaver::new(BLOCK_LEN, 10);
        assert_eq!(a.forward, b.forward);
        assert_ne!(a.forward, c.forward);
    }

    #[test]
    fn actually_scrambles() {
        let il = Interleaver::new(BLOCK_LEN, 1);
        let fixed = (0..BLOCK_LEN).filter(|&i| il.source(i) == i).count();
        // A uniform permutation has about one fixed point.
        assert!(fixed < 10, "{fixed} fixed points");
    }
}
