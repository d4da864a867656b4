//! Minimum Hamming distance trellis decoding of zero-terminated
//! transmissions.

use crate::convcode::EncoderFsm;
use crate::error::{Error, Result};
use crate::galois::Elem;

/// Decoder output: the information blocks and the Hamming distance between
/// the received word and the chosen codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: Vec<Vec<Elem>>,
    pub distance: usize,
}

/// Decodes a flushed transmission whose last `fsm.max_memory()` input blocks
/// are zero.
pub fn viterbi_decode(fsm: &EncoderFsm, received: &[Vec<Elem>]) -> Result<Decoded> {
    viterbi_decode_with_tail(fsm, received, fsm.max_memory())
}

/// Like [`viterbi_decode`] but with an explicit number of trailing zero
/// input blocks, which must be at least `fsm.max_memory()` so the path ends
/// in the zero state. The returned message omits the tail.
///
/// Ties at a merge go to the lowest predecessor state, then the lowest
/// input block index.
pub fn viterbi_decode_with_tail(
    fsm: &EncoderFsm,
    received: &[Vec<Elem>],
    tail: usize,
) -> Result<Decoded> {
    let c = fsm.block_out();
    if let Some(bad) = received.iter().find(|b| b.len() != c) {
        return Err(Error::BlockSizeMismatch {
            expected: c,
            got: bad.len(),
        });
    }
    let tail = tail.max(fsm.max_memory());
    let len = received.len();
    let free = len.saturating_sub(tail);
    let states = fsm.num_states();
    let inputs = fsm.num_input_blocks();

    let mut metric = vec![usize::MAX; states];
    metric[0] = 0;
    let mut next_metric = vec![usize::MAX; states];
    // survivor[t * states + s] = (previous state, input) into s at depth t + 1
    let mut survivor = vec![(u32::MAX, u32::MAX); len * states];

    for (t, block) in received.iter().enumerate() {
        next_metric.iter_mut().for_each(|m| *m = usize::MAX);
        let allowed = if t < free { inputs } else { 1 };
        for s in 0..states {
            let m = metric[s];
            if m == usize::MAX {
                continue;
            }
            for u in 0..allowed {
                let ns = fsm.next_state(s, u);
                let out = fsm.output(s, u);
                let cost = out.iter().zip(block).filter(|(a, b)| a != b).count();
                let cand = m + cost;
                if cand < next_metric[ns] {
                    next_metric[ns] = cand;
                    survivor[t * states + ns] = (s as u32, u as u32);
                }
            }
        }
        std::mem::swap(&mut metric, &mut next_metric);
    }

    let distance = metric[0];
    debug_assert!(distance != usize::MAX, "zero-input tail always reaches state 0");
    let mut inputs_rev = Vec::with_capacity(len);
    let mut s = 0usize;
    for t in (0..len).rev() {
        let (prev, u) = survivor[t * states + s];
        inputs_rev.push(u as usize);
        s = prev as usize;
    }
    let message = inputs_rev
        .into_iter()
        .rev()
        .take(free)
        .map(|u| fsm.input_block(u))
        .collect();
    Ok(Decoded { message, distance })
}

/// Sliding-window minimum-distance decoding with a fixed decision depth.
///
/// Starting from the zero state, each step looks at the next `depth`
/// received blocks (fewer near the end, where the path must return to the
/// zero state), finds the closest path from the current state over that
/// window, and commits only its first input block. With `depth` equal to
/// `T_dfree` of the code, every error sequence whose weight within any
/// `depth` consecutive segments is at most `(dfree - 1) / 2` is corrected.
/// Whole-sequence decoding as in [`viterbi_decode`] does not have this
/// property: a long detour can collect errors from two separate windows.
pub fn window_decode(
    fsm: &EncoderFsm,
    received: &[Vec<Elem>],
    tail: usize,
    depth: usize,
) -> Result<Vec<Vec<Elem>>> {
    let c = fsm.block_out();
    if let Some(bad) = received.iter().find(|b| b.len() != c) {
        return Err(Error::BlockSizeMismatch {
            expected: c,
            got: bad.len(),
        });
    }
    let depth = depth.max(1);
    let tail = tail.max(fsm.max_memory());
    let len = received.len();
    let free = len.saturating_sub(tail);
    let states = fsm.num_states();
    let inputs = fsm.num_input_blocks();
    let cost = |s: usize, u: usize, t: usize| {
        fsm.output(s, u)
            .iter()
            .zip(&received[t])
            .filter(|(a, b)| a != b)
            .count()
    };

    // metric and first input of the best path into each state
    let mut metric = vec![usize::MAX; states];
    let mut first = vec![usize::MAX; states];
    let mut next_metric = vec![usize::MAX; states];
    let mut next_first = vec![usize::MAX; states];
    let mut state = 0usize;
    let mut message = Vec::with_capacity(free);
    for t in 0..free {
        let end = (t + depth).min(len);
        metric.iter_mut().for_each(|m| *m = usize::MAX);
        for u in 0..inputs {
            let ns = fsm.next_state(state, u);
            let m = cost(state, u, t);
            if m < metric[ns] {
                metric[ns] = m;
                first[ns] = u;
            }
        }
        for j in t + 1..end {
            next_metric.iter_mut().for_each(|m| *m = usize::MAX);
            let allowed = if j < free { inputs } else { 1 };
            for s in 0..states {
                if metric[s] == usize::MAX {
                    continue;
                }
                for u in 0..allowed {
                    let ns = fsm.next_state(s, u);
                    let m = metric[s] + cost(s, u, j);
                    if m < next_metric[ns] || (m == next_metric[ns] && first[s] < next_first[ns]) {
                        next_metric[ns] = m;
                        next_first[ns] = first[s];
                    }
                }
            }
            std::mem::swap(&mut metric, &mut next_metric);
            std::mem::swap(&mut first, &mut next_first);
        }
        let best = if end == len {
            0
        } else {
            (0..states)
                .filter(|&s| metric[s] != usize::MAX)
                .min_by_key(|&s| (metric[s], first[s]))
                .expect("some state is reachable")
        };
        let u = first[best];
        message.push(fsm.input_block(u));
        state = fsm.next_state(state, u);
    }
    Ok(message)
}
