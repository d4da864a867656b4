//! Convolutional encoders in controller canonical form and the code metrics
//! derived from their trellis: free distance, catastrophicity and `T_dfree`.
//!
//! State layout: one shift register of length `nu_i` per input row, the
//! register of input 1 occupying the lowest base-q digits and the newest
//! symbol of each register sitting in its lowest digit. Input blocks are
//! indexed the same way, input 1 in the lowest digit.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::polymat::{Poly, PolyMatrix, ScalarMatrix};

pub const DEFAULT_STATE_CAP: u64 = 1 << 20;
const TRANSITION_CAP: u64 = 1 << 24;

/// Finite-state realization of a polynomial generator matrix with a
/// precomputed transition table.
#[derive(Debug, Clone)]
pub struct EncoderFsm {
    generator: PolyMatrix,
    row_degrees: Vec<usize>,
    delta: usize,
    num_states: usize,
    num_inputs: usize,
    next: Vec<u32>,
    outputs: Vec<Elem>,
    weights: Vec<u32>,
}

impl EncoderFsm {
    pub fn build(generator: &PolyMatrix) -> Result<EncoderFsm> {
        Self::build_with_cap(generator, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(generator: &PolyMatrix, state_cap: u64) -> Result<EncoderFsm> {
        let (b, c) = (generator.rows(), generator.cols());
        if b == 0 || c == 0 || generator.is_zero() {
            return Err(Error::ZeroGenerator);
        }
        if b >= c {
            return Err(Error::BadRate { k: b, n: c });
        }
        let degs = generator.row_degrees();
        if degs.iter().any(Option::is_none) {
            return Err(Error::ZeroGenerator);
        }
        let row_degrees: Vec<usize> = degs.into_iter().map(Option::unwrap).collect();
        let delta: usize = row_degrees.iter().sum();
        let field = generator.field();
        let q = field.order() as u64;

        let too_many = |states: u64| Error::TooManyStates {
            states,
            cap: state_cap,
        };
        let num_states = q.checked_pow(delta as u32).filter(|&s| s <= state_cap);
        let num_states = num_states.ok_or_else(|| too_many(q.saturating_pow(delta as u32)))?;
        let num_inputs = q.pow(b as u32);
        if num_states.saturating_mul(num_inputs) > TRANSITION_CAP {
            return Err(too_many(num_states));
        }
        let (num_states, num_inputs) = (num_states as usize, num_inputs as usize);

        let mut offsets = Vec::with_capacity(b);
        let mut acc = 0;
        for &nu in &row_degrees {
            offsets.push(acc);
            acc += nu;
        }

        let qs = q as usize;
        let mut next = vec![0u32; num_states * num_inputs];
        let mut outputs = vec![0 as Elem; num_states * num_inputs * c];
        let mut weights = vec![0u32; num_states * num_inputs];
        let mut state_digits = vec![0 as Elem; delta];
        let mut input_digits = vec![0 as Elem; b];
        let mut out = vec![0 as Elem; c];
        for s in 0..num_states {
            unpack(s, qs, &mut state_digits);
            for u in 0..num_inputs {
                unpack(u, qs, &mut input_digits);
                out.iter_mut().for_each(|o| *o = 0);
                let mut ns = 0usize;
                let mut place = 1usize;
                for i in 0..b {
                    let nu = row_degrees[i];
                    let reg = &state_digits[offsets[i]..offsets[i] + nu];
                    // delayed input u_i(t - l) is reg[l - 1]
                    for (j, o) in out.iter_mut().enumerate() {
                        let g = generator.get(i, j);
                        let mut v = field.mul(g.coeff(0), input_digits[i]);
                        for l in 1..=nu {
                            v = field.add(v, field.mul(g.coeff(l), reg[l - 1]));
                        }
                        *o = field.add(*o, v);
                    }
                    // shift: new register is [u_i, reg[0..nu-1]]
                    for l in 0..nu {
                        let d = if l == 0 { input_digits[i] } else { reg[l - 1] };
                        ns += d as usize * place;
                        place *= qs;
                    }
                }
                let t = s * num_inputs + u;
                next[t] = ns as u32;
                weights[t] = Field::weight(&out) as u32;
                outputs[t * c..(t + 1) * c].copy_from_slice(&out);
            }
        }
        Ok(EncoderFsm {
            generator: generator.clone(),
            row_degrees,
            delta,
            num_states,
            num_inputs,
            next,
            outputs,
            weights,
        })
    }

    pub fn generator(&self) -> &PolyMatrix {
        &self.generator
    }

    pub fn field(&self) -> &Field {
        self.generator.field()
    }

    /// Input block length `b`.
    pub fn block_in(&self) -> usize {
        self.generator.rows()
    }

    /// Output block length `c`.
    pub fn block_out(&self) -> usize {
        self.generator.cols()
    }

    pub fn row_degrees(&self) -> &[usize] {
        &self.row_degrees
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn max_memory(&self) -> usize {
        self.row_degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Number of distinct input blocks, `q^b`.
    pub fn num_input_blocks(&self) -> usize {
        self.num_inputs
    }

    #[inline]
    pub fn next_state(&self, state: usize, input: usize) -> usize {
        self.next[state * self.num_inputs + input] as usize
    }

    #[inline]
    pub fn output(&self, state: usize, input: usize) -> &[Elem] {
        let c = self.block_out();
        let t = state * self.num_inputs + input;
        &self.outputs[t * c..(t + 1) * c]
    }

    #[inline]
    pub fn output_weight(&self, state: usize, input: usize) -> usize {
        self.weights[state * self.num_inputs + input] as usize
    }

    pub fn input_index(&self, block: &[Elem]) -> Result<usize> {
        if block.len() != self.block_in() {
            return Err(Error::BlockSizeMismatch {
                expected: self.block_in(),
                got: block.len(),
            });
        }
        let f = self.field();
        let q = f.order() as usize;
        block
            .iter()
            .rev()
            .try_fold(0usize, |acc, &x| Ok(acc * q + f.check(x)? as usize))
    }

    pub fn input_block(&self, index: usize) -> Vec<Elem> {
        let mut d = vec![0; self.block_in()];
        unpack(index, self.field().order() as usize, &mut d);
        d
    }

    /// Encodes `u` from the zero state. With `flush`, `nu_max` zero blocks
    /// are appended so the encoder ends in the zero state.
    pub fn encode(&self, u: &[Vec<Elem>], flush: bool) -> Result<Vec<Vec<Elem>>> {
        let mut state = 0;
        let tail = if flush { self.max_memory() } else { 0 };
        let mut out = Vec::with_capacity(u.len() + tail);
        let zero = vec![0; self.block_in()];
        for block in u.iter().chain(std::iter::repeat(&zero).take(tail)) {
            let i = self.input_index(block)?;
            out.push(self.output(state, i).to_vec());
            state = self.next_state(state, i);
        }
        Ok(out)
    }

    /// True when some nonzero input sequence can cycle forever while
    /// emitting only zeros: a cycle of zero-weight transitions other than the
    /// zero-input self-loop at the zero state.
    pub fn is_catastrophic(&self) -> bool {
        let n = self.num_states;
        // iterative three-colour DFS over zero-weight edges
        let mut colour = vec![0u8; n];
        for root in 0..n {
            if colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            colour[root] = 1;
            while let Some(&mut (s, ref mut next_input)) = stack.last_mut() {
                if *next_input == self.num_inputs {
                    colour[s] = 2;
                    stack.pop();
                    continue;
                }
                let u = *next_input;
                *next_input += 1;
                if self.output_weight(s, u) != 0 || (s == 0 && u == 0) {
                    continue;
                }
                let t = self.next_state(s, u);
                match colour[t] {
                    1 => return true,
                    0 => {
                        colour[t] = 1;
                        stack.push((t, 0));
                    }
                    _ => {}
                }
            }
        }
        false
    }

    /// Minimum Hamming weight of a nonzero code sequence: cheapest path that
    /// leaves the zero state on a nonzero input and returns to it.
    pub fn free_distance(&self) -> Result<usize> {
        if self.is_catastrophic() {
            return Err(Error::Catastrophic);
        }
        let mut dist = vec![usize::MAX; self.num_states];
        let mut heap = BinaryHeap::new();
        let mut best_direct = usize::MAX;
        for u in 1..self.num_inputs {
            let (t, w) = (self.next_state(0, u), self.output_weight(0, u));
            if t == 0 {
                best_direct = best_direct.min(w);
            } else if w < dist[t] {
                dist[t] = w;
                heap.push(Reverse((w, t)));
            }
        }
        let mut best = best_direct;
        while let Some(Reverse((w, s))) = heap.pop() {
            if w >= best {
                break;
            }
            if w > dist[s] {
                continue;
            }
            for u in 0..self.num_inputs {
                let t = self.next_state(s, u);
                let nw = w + self.output_weight(s, u);
                if t == 0 {
                    best = best.min(nw);
                } else if nw < dist[t] {
                    dist[t] = nw;
                    heap.push(Reverse((nw, t)));
                }
            }
        }
        // a non-catastrophic encoder always returns to zero under zero input
        debug_assert!(best != usize::MAX);
        Ok(best)
    }

    /// `T_dfree`: one more than the longest truncated code sequence of
    /// weight below `dfree` that starts in the zero state and never visits
    /// it again. Longest paths are computed by dynamic programming on the
    /// layered graph of (state, accumulated weight), which is acyclic for
    /// non-catastrophic encoders. Results above `depth_cap` are an error.
    pub fn t_dfree(&self, dfree: usize, depth_cap: usize) -> Result<usize> {
        if self.is_catastrophic() {
            return Err(Error::Catastrophic);
        }
        if dfree == 0 {
            return Ok(1);
        }
        let idx = |s: usize, w: usize| s * dfree + w;
        let starts: Vec<(usize, usize)> = (1..self.num_inputs)
            .map(|u| (self.next_state(0, u), self.output_weight(0, u)))
            .filter(|&(t, w)| t != 0 && w < dfree)
            .collect();

        let mut reached = vec![false; self.num_states * dfree];
        let mut stack = Vec::new();
        for &(t, w) in &starts {
            if !reached[idx(t, w)] {
                reached[idx(t, w)] = true;
                stack.push((t, w));
            }
        }
        while let Some((s, w)) = stack.pop() {
            for u in 0..self.num_inputs {
                let t = self.next_state(s, u);
                let nw = w + self.output_weight(s, u);
                if t != 0 && nw < dfree && !reached[idx(t, nw)] {
                    reached[idx(t, nw)] = true;
                    stack.push((t, nw));
                }
            }
        }

        let mut longest = vec![0usize; self.num_states * dfree];
        for (s, w) in self.post_order(dfree, &reached)? {
            let mut best = 0;
            for u in 0..self.num_inputs {
                let t = self.next_state(s, u);
                let nw = w + self.output_weight(s, u);
                if t != 0 && nw < dfree {
                    best = best.max(longest[idx(t, nw)] + 1);
                }
            }
            longest[idx(s, w)] = best;
        }
        let j_max = starts
            .iter()
            .map(|&(t, w)| 1 + longest[idx(t, w)])
            .max()
            .unwrap_or(0);
        let tdfree = j_max + 1;
        if tdfree > depth_cap {
            return Err(Error::DepthCapExceeded { cap: depth_cap });
        }
        Ok(tdfree)
    }

    // Children-first order of the reached nodes of the layered graph. Weight
    // never decreases along an edge, so layers go from heaviest to lightest
    // and each layer is sorted topologically along its zero-weight edges.
    fn post_order(&self, dfree: usize, reached: &[bool]) -> Result<Vec<(usize, usize)>> {
        let mut order = Vec::new();
        let mut outdeg = vec![0usize; self.num_states];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.num_states];
        for w in (0..dfree).rev() {
            let nodes: Vec<usize> = (0..self.num_states)
                .filter(|&s| reached[s * dfree + w])
                .collect();
            for &s in &nodes {
                outdeg[s] = 0;
                preds[s].clear();
            }
            for &s in &nodes {
                for u in 0..self.num_inputs {
                    let t = self.next_state(s, u);
                    if t != 0 && self.output_weight(s, u) == 0 {
                        outdeg[s] += 1;
                        preds[t].push(s);
                    }
                }
            }
            let mut ready: Vec<usize> = nodes.iter().copied().filter(|&s| outdeg[s] == 0).collect();
            let mut emitted = 0;
            while let Some(s) = ready.pop() {
                order.push((s, w));
                emitted += 1;
                for &p in &preds[s] {
                    outdeg[p] -= 1;
                    if outdeg[p] == 0 {
                        ready.push(p);
                    }
                }
            }
            if emitted != nodes.len() {
                return Err(Error::Catastrophic);
            }
        }
        Ok(order)
    }

    /// Every truncated code sequence counted by `T_dfree`, as lists of
    /// output blocks. Fails once more than `limit` sequences exist.
    pub fn s_dfree_members(&self, dfree: usize, limit: usize) -> Result<Vec<Vec<Vec<Elem>>>> {
        let mut found = Vec::new();
        let mut path: Vec<Vec<Elem>> = Vec::new();
        self.collect_members(0, 0, true, dfree, limit, &mut path, &mut found)?;
        Ok(found)
    }

    #[allow(clippy::too_many_arguments)]
    fn collect_members(
        &self,
        state: usize,
        weight: usize,
        at_start: bool,
        dfree: usize,
        limit: usize,
        path: &mut Vec<Vec<Elem>>,
        found: &mut Vec<Vec<Vec<Elem>>>,
    ) -> Result<()> {
        let first = usize::from(at_start);
        for u in first..self.num_inputs {
            let t = self.next_state(state, u);
            let nw = weight + self.output_weight(state, u);
            if t == 0 || nw >= dfree {
                continue;
            }
            path.push(self.output(state, u).to_vec());
            if found.len() >= limit {
                return Err(Error::EnumerationTooLarge {
                    size: found.len() as u128 + 1,
                    cap: limit as u128,
                });
            }
            found.push(path.clone());
            self.collect_members(t, nw, false, dfree, limit, path, found)?;
            path.pop();
        }
        Ok(())
    }
}

fn unpack(mut v: usize, q: usize, digits: &mut [Elem]) {
    for d in digits.iter_mut() {
        *d = (v % q) as Elem;
        v /= q;
    }
}

/// For a single-row generator: the entries share no nonconstant factor, so
/// the matrix is basic and, having one row, minimal. Multi-row matrices are
/// never certified.
pub fn certify_minimal(g: &PolyMatrix) -> bool {
    if g.rows() != 1 {
        return false;
    }
    let gcd = g
        .row(0)
        .iter()
        .fold(Poly::zero(g.field()), |acc, p| acc.gcd(p));
    gcd.degree() == Some(0)
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, Copy)]
pub struct AnalysisConfig {
    pub state_cap: u64,
    /// Cap on `T_dfree` for generators that cannot be certified minimal;
    /// `None` means `10 * dfree * (delta + 1)`.
    pub depth_cap: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            state_cap: DEFAULT_STATE_CAP,
            depth_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeMetrics {
    pub dfree: usize,
    pub tdfree: usize,
    pub degree: usize,
    pub row_degrees: Vec<usize>,
    /// Basic and minimal verified, so `T_dfree` is a property of the code.
    pub minimal: bool,
    pub warnings: Vec<String>,
}

/// Free distance, `T_dfree` and degree data for a generator's encoder.
pub fn analyze_fsm(fsm: &EncoderFsm, config: &AnalysisConfig) -> Result<CodeMetrics> {
    let dfree = fsm.free_distance()?;
    let minimal = certify_minimal(fsm.generator());
    let delta = fsm.delta();
    let mut warnings = Vec::new();
    let cap = if minimal {
        (dfree.saturating_sub(1)) * delta + 1
    } else {
        warnings.push(
            "generator not certified minimal; T_dfree is computed for this encoder only".to_string(),
        );
        config.depth_cap.unwrap_or(10 * dfree * (delta + 1))
    };
    let tdfree = fsm.t_dfree(dfree, cap)?;
    Ok(CodeMetrics {
        dfree,
        tdfree,
        degree: delta,
        row_degrees: fsm.row_degrees().to_vec(),
        minimal,
        warnings,
    })
}

pub fn analyze(g: &PolyMatrix, config: &AnalysisConfig) -> Result<CodeMetrics> {
    let fsm = EncoderFsm::build_with_cap(g, config.state_cap)?;
    analyze_fsm(&fsm, config)
}

/// Generator seen by a sink: `G_I(z) M_T`.
pub fn output_code(input: &PolyMatrix, m_t: &ScalarMatrix) -> Result<PolyMatrix> {
    input.times_scalar(m_t)
}
