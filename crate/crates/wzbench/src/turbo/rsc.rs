//! The recursive systematic convolutional constituent code and its
//! log-domain APP decoder.
//!
//! Feedback polynomial 1 + D^2 + D^3, parity generator 1 + D + D^2 + D^3
//! (octal 15/17), memory 3. The shift register holds the last three feedback
//! bits w, newest in bit 2 of the state.

/// Encoder memory; the trellis has 2^MEMORY states.
pub const MEMORY: usize = 3;
pub const NUM_STATES: usize = 8;

/// One trellis step from `state` on `input`: (next state, parity bit).
#[inline]
pub fn step(state: usize, input: u8) -> (usize, u8) {
    let w = (input as usize) ^ (((state >> 1) ^ state) & 1);
    let parity = (w ^ (state >> 2) ^ (state >> 1) ^ state) & 1;
    ((w << 2) | (state >> 1), parity as u8)
}

/// Rate-1 parity stream from the zero state; systematic bits are implicit.
pub fn encode(bits: &[u8]) -> Vec<u8> {
    let mut state = 0usize;
    bits.iter()
        .map(|&b| {
            let (next, p) = step(state, b);
            state = next;
            p
        })
        .collect()
}

/// max*(a, b) = ln(e^a + e^b), the exact two-term jacobian logarithm.
#[inline]
fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Maps a bit to its BPSK sign: 0 -> +1, 1 -> -1.
#[inline]
fn sign(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Log-MAP BCJR over one constituent trellis.
///
/// `l_in` is the combined systematic-plus-prior LLR per position (positive
/// favours bit 0), `l_parity` the parity-channel LLR (zero where punctured).
/// The trellis starts in state 0 and is unterminated: the backward recursion
/// starts uniform. Returns the full posterior LLR per position; callers
/// subtract `l_in` to get the extrinsic part.
pub fn bcjr(l_in: &[f64], l_parity: &[f64]) -> Vec<f64> {
    assert_eq!(l_in.len(), l_parity.len());
    let n = l_in.len();
    // Transition table: [state][input] -> (next, parity sign).
    let mut next = [[0usize; 2]; NUM_STATES];
    let mut psign = [[0.0f64; 2]; NUM_STATES];
    for s in 0..NUM_STATES {
        for u in 0..2 {
            let (ns, p) = step(s, u as u8);
            next[s][u] = ns;
            psign[s][u] = sign(p);
        }
    }

    let gamma = |t: usize, s: usize, u: usize| -> f64 {
        0.5 * sign(u as u8) * l_in[t] + 0.5 * psign[s][u] * l_parity[t]
    };

    let mut alpha = vec![[f64::NEG_INFINITY; NUM_STATES]; n + 1];
    alpha[0][0] = 0.0;
    for t in 0..n {
        let mut row = [f64::NEG_INFINITY; NUM_STATES];
        for s in 0..NUM_STATES {
            let a = alpha[t][s];
            if a == f64::NEG_INFINITY {
                continue;
            }
            for u in 0..2 {
                let ns = next[s][u];
                row[ns] = max_star(row[ns], a + gamma(t, s, u));
            }
        }
        // Recentre so metrics stay bounded over long blocks.
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in &mut row {
            *v -= m;
        }
        alpha[t + 1] = row;
    }

    let mut beta = vec![[0.0f64; NUM_STATES]; n + 1];
    for t in (0..n).rev() {
        let mut row = [f64::NEG_INFINITY; NUM_STATES];
        for s in 0..NUM_STATES {
            for u in 0..2 {
                let v = beta[t + 1][next[s][u]] + gamma(t, s, u);
                row[s] = max_star(row[s], v);
            }
        }
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for v in &mut row {
            *v -= m;
        }
        beta[t] = row;
    }

    (0..n)
        .map(|t| {
            let mut m0 = f64::NEG_INFINITY;
            let mut m1 = f64::NEG_INFINITY;
            for s in 0..NUM_STATES {
                let a = alpha[t][s];
                if a == f64::NEG_INFINITY {
                    continue;
                }
                m0 = max_star(m0, a + gamma(t, s, 0) + beta[t + 1][next[s][0]]);
                m1 = max_star(m1, a + gamma(t, s, 1) + beta[t + 1][next[s][1]]);
            }
            m0 - m1
        })
        .collect()
}
