//! Network-error correction: error-pattern sets, the code construction,
//! per-sink decoding plans and decoders.

pub mod bounds;
pub mod viterbi;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::convcode::{analyze, analyze_fsm, certify_minimal, output_code, AnalysisConfig};
use crate::convcode::{CodeMetrics, EncoderFsm};
use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::network::{build_transfer, NetworkSpec, TransferSet};
use crate::polymat::{PolyMatrix, ScalarMatrix};

pub use bounds::{bnecc_field_bound, bound_field_size, bound_singleton, bound_tdfree, TdfreeBounds};
pub use viterbi::{viterbi_decode, viterbi_decode_with_tail, window_decode, Decoded};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
pub const DEFAULT_CANDIDATE_CAP: u128 = 1 << 22;

/// A collection of edge subsets that may be in error during one network use.
/// Edges are zero-based here; file formats use one-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorPatternSet {
    num_edges: usize,
    patterns: BTreeSet<BTreeSet<usize>>,
}

impl ErrorPatternSet {
    pub fn new(num_edges: usize, patterns: Vec<Vec<usize>>) -> Result<ErrorPatternSet> {
        let mut set = BTreeSet::new();
        for rho in patterns {
            if rho.is_empty() {
                return Err(Error::InvalidPattern("empty edge set".into()));
            }
            if let Some(&e) = rho.iter().find(|&&e| e >= num_edges) {
                return Err(Error::InvalidPattern(format!(
                    "edge {} out of range for {num_edges} edges",
                    e + 1
                )));
            }
            set.insert(rho.into_iter().collect());
        }
        Ok(ErrorPatternSet {
            num_edges,
            patterns: set,
        })
    }

    /// Every nonempty edge subset of size at most `k`.
    pub fn up_to_k_edges(num_edges: usize, k: usize) -> ErrorPatternSet {
        fn extend(
            start: usize,
            n: usize,
            left: usize,
            cur: &mut Vec<usize>,
            out: &mut BTreeSet<BTreeSet<usize>>,
        ) {
            for e in start..n {
                cur.push(e);
                out.insert(cur.iter().copied().collect());
                if left > 1 {
                    extend(e + 1, n, left - 1, cur, out);
                }
                cur.pop();
            }
        }
        let mut patterns = BTreeSet::new();
        if k > 0 {
            extend(0, num_edges, k, &mut Vec::new(), &mut patterns);
        }
        ErrorPatternSet {
            num_edges,
            patterns,
        }
    }

    pub fn single_edges(num_edges: usize) -> ErrorPatternSet {
        Self::up_to_k_edges(num_edges, 1)
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.patterns.iter()
    }

    /// True when the support of `w` lies inside some pattern. The zero vector
    /// matches any nonempty set.
    pub fn matches(&self, w: &[Elem]) -> bool {
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] != 0).collect();
        self.patterns
            .iter()
            .any(|rho| support.iter().all(|e| rho.contains(e)))
    }
}

fn pow_saturating(q: u128, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(q))
}

/// All error vectors supported on some pattern of `phi`, zero included.
pub fn enumerate_error_vectors(
    phi: &ErrorPatternSet,
    field: &Field,
    cap: u128,
) -> Result<BTreeSet<Vec<Elem>>> {
    let q = field.order();
    let size = phi
        .iter()
        .fold(0u128, |acc, rho| acc.saturating_add(pow_saturating(q as u128, rho.len())));
    if size > cap {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let mut out = BTreeSet::new();
    for rho in phi.iter() {
        let edges: Vec<usize> = rho.iter().copied().collect();
        let count = pow_saturating(q as u128, edges.len()) as u64;
        for mut idx in 0..count {
            let mut w = vec![0; phi.num_edges()];
            for &e in &edges {
                w[e] = (idx % q as u64) as Elem;
                idx /= q as u64;
            }
            out.insert(w);
        }
    }
    Ok(out)
}

/// `{ w F_T : w in W_phi }`.
pub fn sink_error_images(
    w_phi: &BTreeSet<Vec<Elem>>,
    f_t: &ScalarMatrix,
) -> Result<BTreeSet<Vec<Elem>>> {
    w_phi.iter().map(|w| f_t.left_mul(w)).collect()
}

/// Union over sinks of `{ w_T M_T^-1 : w_T in W_T }`.
pub fn source_error_set<'a, I>(per_sink: I) -> Result<BTreeSet<Vec<Elem>>>
where
    I: IntoIterator<Item = (&'a BTreeSet<Vec<Elem>>, &'a ScalarMatrix)>,
{
    let mut out = BTreeSet::new();
    for (w_t, m_t_inv) in per_sink {
        for w in w_t {
            out.insert(m_t_inv.left_mul(w)?);
        }
    }
    Ok(out)
}

pub fn max_weight<'a>(set: impl IntoIterator<Item = &'a Vec<Elem>>) -> Option<usize> {
    set.into_iter().map(|w| Field::weight(w)).max()
}

/// Largest Hamming weight in `W_s`.
pub fn compute_ts(w_s: &BTreeSet<Vec<Elem>>) -> Result<usize> {
    max_weight(w_s).ok_or(Error::EmptySet)
}

#[derive(Debug, Clone, Copy)]
pub struct ConstructParams {
    /// Largest generator degree tried by the code search.
    pub max_degree: usize,
    /// Cap on `sum over patterns of q^|rho|` when enumerating error vectors.
    pub enumeration_cap: u128,
    /// Cap on the number of generators examined at one degree.
    pub candidate_cap: u128,
    pub analysis: AnalysisConfig,
}

impl Default for ConstructParams {
    fn default() -> Self {
        ConstructParams {
            max_degree: 4,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            analysis: AnalysisConfig::default(),
        }
    }
}

/// Exhaustive search over `1 x n` generators.
///
/// Degrees are tried in increasing order. Within a degree the candidates run
/// through the coefficient tuple (entry 1: `c_0..c_delta`, entry 2: ...) in
/// lexicographic order, and the one with the smallest `T_dfree` among those
/// reaching `2 t_s + 1` wins, earliest first on ties. Generators whose
/// entries share a nonconstant factor are skipped.
pub fn select_code(
    field: &Field,
    n: usize,
    k: usize,
    t_s: usize,
    params: &ConstructParams,
) -> Result<(PolyMatrix, CodeMetrics)> {
    if k == 0 || k >= n {
        return Err(Error::BadRate { k, n });
    }
    if k != 1 {
        return Err(Error::UnsupportedRank(k));
    }
    let required = 2 * t_s + 1;
    let q = field.order() as u64;
    for delta in 0..=params.max_degree {
        let width = n * (delta + 1);
        let count = pow_saturating(q as u128, width);
        if count > params.candidate_cap {
            return Err(Error::EnumerationTooLarge {
                size: count,
                cap: params.candidate_cap,
            });
        }
        let candidate = |idx: u64| -> PolyMatrix {
            let mut digits = vec![0; width];
            let mut x = idx;
            for d in digits.iter_mut().rev() {
                *d = (x % q) as Elem;
                x /= q;
            }
            let row: Vec<Vec<Elem>> = digits.chunks(delta + 1).map(|c| c.to_vec()).collect();
            PolyMatrix::from_coeffs(field, &[row]).expect("digits are field elements")
        };
        let best = (0..count as u64)
            .into_par_iter()
            .filter_map(|idx| {
                let g = candidate(idx);
                if g.row_degrees()[0] != Some(delta) || !certify_minimal(&g) {
                    return None;
                }
                let m = analyze(&g, &params.analysis).ok()?;
                (m.dfree >= required).then_some((m.tdfree, idx, m))
            })
            .min_by_key(|(t, idx, _)| (*t, *idx));
        if let Some((_, idx, metrics)) = best {
            return Ok((candidate(idx), metrics));
        }
    }
    Err(Error::NoCodeFound {
        max_degree: params.max_degree,
    })
}

/// Checks a user-supplied generator against the construction requirements.
pub fn validate_code(
    code: &PolyMatrix,
    field: &Field,
    n: usize,
    t_s: usize,
    analysis: &AnalysisConfig,
) -> Result<CodeMetrics> {
    if code.field() != field {
        return Err(Error::FieldMismatch);
    }
    if code.cols() != n {
        return Err(Error::dims(format!(
            "code has {} columns but the network has {n} inputs",
            code.cols()
        )));
    }
    if code.rows() >= n {
        return Err(Error::BadRate {
            k: code.rows(),
            n,
        });
    }
    let fsm = EncoderFsm::build_with_cap(code, analysis.state_cap)?;
    if fsm.is_catastrophic() {
        return Err(Error::Catastrophic);
    }
    let metrics = analyze_fsm(&fsm, analysis)?;
    let required = 2 * t_s + 1;
    if metrics.dfree < required {
        return Err(Error::InsufficientFreeDistance {
            dfree: metrics.dfree,
            required,
        });
    }
    Ok(metrics)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecodeMode {
    /// Decode the received sequence directly on the output-code trellis.
    CaseA,
    /// Multiply received blocks by `M_T^-1` and decode on the input-code trellis.
    CaseB,
}

impl std::fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecodeMode::CaseA => "Output trellis",
            DecodeMode::CaseB => "Input trellis",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SinkPlan {
    pub sink: String,
    pub mode: DecodeMode,
    pub output_code: PolyMatrix,
    pub output_metrics: CodeMetrics,
    /// Largest weight of an error image at this sink.
    pub max_error_weight: usize,
    /// `M_T^-1`, present in Case B only.
    pub processing: Option<ScalarMatrix>,
    /// Generator whose trellis the decoder runs on.
    pub decoding_generator: PolyMatrix,
    /// Minimum difference between the network-use indices of consecutive
    /// errors for which decoding is guaranteed.
    pub spacing: usize,
    /// Decision depth of the windowed decoder: `T_dfree` of the decoding code.
    pub decision_depth: usize,
    /// Zero input blocks appended to every message.
    pub flush_len: usize,
}

/// Chooses Case A or Case B for every sink.
pub fn plan_decoding(
    code: &PolyMatrix,
    code_metrics: &CodeMetrics,
    transfer: &TransferSet,
    sink_errors: &[BTreeSet<Vec<Elem>>],
    analysis: &AnalysisConfig,
) -> Result<Vec<SinkPlan>> {
    if sink_errors.len() != transfer.sinks.len() {
        return Err(Error::dims("one error-image set per sink"));
    }
    let flush_len = code.row_degrees().iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0);
    transfer
        .sinks
        .par_iter()
        .zip(sink_errors.par_iter())
        .map(|(sink, w_t)| {
            let out = output_code(code, &sink.m_t)?;
            let metrics = analyze(&out, analysis)?;
            let max_w = max_weight(w_t).unwrap_or(0);
            let case_a = metrics.dfree > 2 * max_w && code_metrics.tdfree >= metrics.tdfree;
            let plan = if case_a {
                SinkPlan {
                    sink: sink.name.clone(),
                    mode: DecodeMode::CaseA,
                    output_code: out.clone(),
                    spacing: metrics.tdfree,
                    decision_depth: metrics.tdfree,
                    output_metrics: metrics,
                    max_error_weight: max_w,
                    processing: None,
                    decoding_generator: out,
                    flush_len,
                }
            } else {
                SinkPlan {
                    sink: sink.name.clone(),
                    mode: DecodeMode::CaseB,
                    output_code: out,
                    output_metrics: metrics,
                    max_error_weight: max_w,
                    processing: Some(sink.m_t_inv.clone()),
                    decoding_generator: code.clone(),
                    spacing: code_metrics.tdfree,
                    decision_depth: code_metrics.tdfree,
                    flush_len,
                }
            };
            Ok(plan)
        })
        .collect()
}

/// Decoder for one sink, with its trellis built once.
#[derive(Debug, Clone)]
pub struct SinkDecoder {
    fsm: EncoderFsm,
    processing: Option<ScalarMatrix>,
    flush_len: usize,
    depth: usize,
}

impl SinkDecoder {
    pub fn new(plan: &SinkPlan, state_cap: u64) -> Result<SinkDecoder> {
        Ok(SinkDecoder {
            fsm: EncoderFsm::build_with_cap(&plan.decoding_generator, state_cap)?,
            processing: plan.processing.clone(),
            flush_len: plan.flush_len,
            depth: plan.decision_depth,
        })
    }

    /// Recovers the information blocks from the blocks received over a
    /// flushed transmission, using the windowed decoder.
    pub fn decode(&self, y: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
        window_decode(&self.fsm, &self.prepare(y)?, self.flush_len, self.depth)
    }

    /// Whole-sequence minimum-distance decoding of the same trellis.
    pub fn decode_ml(&self, y: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
        Ok(viterbi_decode_with_tail(&self.fsm, &self.prepare(y)?, self.flush_len)?.message)
    }

    fn prepare(&self, y: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
        match &self.processing {
            Some(m) => y.iter().map(|b| m.left_mul(b)).collect(),
            None => Ok(y.to_vec()),
        }
    }
}

pub fn decode_sink(plan: &SinkPlan, y: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>> {
    SinkDecoder::new(plan, crate::convcode::DEFAULT_STATE_CAP)?.decode(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CodeSource {
    Supplied,
    Search,
}

#[derive(Debug, Clone, Serialize)]
pub struct SinkErrors {
    pub sink: String,
    pub vectors: BTreeSet<Vec<Elem>>,
    pub max_weight: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub field: String,
    pub num_edges: usize,
    pub num_inputs: usize,
    pub rate_k: usize,
    pub w_phi_size: usize,
    pub w_t: Vec<SinkErrors>,
    pub w_s: BTreeSet<Vec<Elem>>,
    pub t_s: usize,
    pub required_dfree: usize,
    pub code: PolyMatrix,
    pub code_metrics: CodeMetrics,
    pub code_source: CodeSource,
    pub plans: Vec<SinkPlan>,
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub transfer: TransferSet,
    pub report: ConstructionReport,
}

/// Runs the whole construction: transfer matrices, error images, `t_s`,
/// code selection or validation, and per-sink plans.
pub fn construct(
    spec: &NetworkSpec,
    phi: &ErrorPatternSet,
    code: Option<&PolyMatrix>,
    params: &ConstructParams,
) -> Result<Construction> {
    if phi.num_edges() != spec.num_edges() {
        return Err(Error::dims(format!(
            "pattern set is over {} edges, network has {}",
            phi.num_edges(),
            spec.num_edges()
        )));
    }
    let transfer = build_transfer(spec)?;
    let field = &transfer.field;
    let n = transfer.num_inputs();
    let w_phi = enumerate_error_vectors(phi, field, params.enumeration_cap)?;
    let images: Vec<BTreeSet<Vec<Elem>>> = transfer
        .sinks
        .iter()
        .map(|s| sink_error_images(&w_phi, &s.f_t))
        .collect::<Result<_>>()?;
    let w_s = source_error_set(
        images
            .iter()
            .zip(&transfer.sinks)
            .map(|(w, s)| (w, &s.m_t_inv)),
    )?;
    let t_s = compute_ts(&w_s)?;
    let (code, metrics, source) = match code {
        Some(g) => {
            let m = validate_code(g, field, n, t_s, &params.analysis)?;
            (g.clone(), m, CodeSource::Supplied)
        }
        None => {
            let (g, m) = select_code(field, n, 1, t_s, params)?;
            (g, m, CodeSource::Search)
        }
    };
    let plans = plan_decoding(&code, &metrics, &transfer, &images, &params.analysis)?;
    let w_t = transfer
        .sinks
        .iter()
        .zip(images)
        .map(|(s, vectors)| SinkErrors {
            sink: s.name.clone(),
            max_weight: max_weight(&vectors).unwrap_or(0),
            vectors,
        })
        .collect();
    let report = ConstructionReport {
        field: field.to_string(),
        num_edges: transfer.num_edges(),
        num_inputs: n,
        rate_k: code.rows(),
        w_phi_size: w_phi.len(),
        w_t,
        w_s,
        t_s,
        required_dfree: 2 * t_s + 1,
        code,
        code_metrics: metrics,
        code_source: source,
        plans,
    };
    Ok(Construction { transfer, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use proptest::prelude::*;

    fn set(v: &[&[Elem]]) -> BTreeSet<Vec<Elem>> {
        v.iter().map(|x| x.to_vec()).collect()
    }

    fn modes(c: &Construction) -> Vec<(String, DecodeMode)> {
        c.report
            .plans
            .iter()
            .map(|p| (p.sink.clone(), p.mode))
            .collect()
    }

    #[test]
    fn pattern_set_validation() {
        assert!(ErrorPatternSet::new(3, vec![vec![]]).is_err());
        assert!(ErrorPatternSet::new(3, vec![vec![3]]).is_err());
        let p = ErrorPatternSet::new(3, vec![vec![0, 1], vec![1, 0], vec![2]]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.matches(&[1, 1, 0]));
        assert!(!p.matches(&[1, 0, 1]));
        assert!(p.matches(&[0, 0, 0]));
        assert_eq!(ErrorPatternSet::up_to_k_edges(5, 2).len(), 15);
        assert_eq!(ErrorPatternSet::up_to_k_edges(5, 0).len(), 0);
    }

    #[test]
    fn error_vector_counts() {
        let f2 = Field::new(2, 1).unwrap();
        let f3 = Field::new(3, 1).unwrap();
        let phi = ErrorPatternSet::single_edges(9);
        let w2 = enumerate_error_vectors(&phi, &f2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(w2.len(), 10);
        assert!(w2.contains(&vec![0; 9]));
        assert_eq!(
            enumerate_error_vectors(&phi, &f3, DEFAULT_ENUMERATION_CAP).unwrap().len(),
            19
        );
        let empty = ErrorPatternSet::new(9, vec![]).unwrap();
        assert!(enumerate_error_vectors(&empty, &f2, 10).unwrap().is_empty());
        assert_eq!(
            enumerate_error_vectors(&ErrorPatternSet::up_to_k_edges(9, 2), &f2, 10),
            Err(Error::EnumerationTooLarge { size: 18 + 36 * 4, cap: 10 })
        );
    }

    #[test]
    fn error_images_and_ts() {
        let f2 = Field::new(2, 1).unwrap();
        let t = build_transfer(&reference::butterfly(2)).unwrap();
        let w_phi =
            enumerate_error_vectors(&ErrorPatternSet::single_edges(9), &f2, 1000).unwrap();
        let all = set(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let images: Vec<_> = t
            .sinks
            .iter()
            .map(|s| sink_error_images(&w_phi, &s.f_t).unwrap())
            .collect();
        assert_eq!(images, vec![all.clone(), all.clone()]);
        let w_s =
            source_error_set(images.iter().zip(&t.sinks).map(|(w, s)| (w, &s.m_t_inv))).unwrap();
        assert_eq!(w_s, all);
        assert_eq!(compute_ts(&w_s).unwrap(), 2);
        assert_eq!(compute_ts(&set(&[&[0, 0]])).unwrap(), 0);
        assert_eq!(compute_ts(&BTreeSet::new()), Err(Error::EmptySet));
        let zero = set(&[&[0; 9]]);
        assert_eq!(sink_error_images(&zero, &t.sinks[0].f_t).unwrap(), set(&[&[0, 0]]));
    }

    #[test]
    fn butterfly_binary_construction() {
        let f2 = Field::new(2, 1).unwrap();
        let c = construct(
            &reference::butterfly(2),
            &ErrorPatternSet::single_edges(9),
            Some(&reference::input_code(&f2)),
            &ConstructParams::default(),
        )
        .unwrap();
        let r = &c.report;
        assert_eq!(r.w_phi_size, 10);
        assert_eq!((r.t_s, r.required_dfree), (2, 5));
        assert_eq!((r.code_metrics.dfree, r.code_metrics.tdfree), (5, 6));
        assert_eq!(
            modes(&c),
            vec![("T1".into(), DecodeMode::CaseB), ("T2".into(), DecodeMode::CaseB)]
        );
        let outs: Vec<String> = r.plans.iter().map(|p| p.output_code.to_string()).collect();
        assert_eq!(outs, ["[1+z^2, z]", "[z, 1+z+z^2]"]);
        assert!(r.plans.iter().all(|p| p.spacing == 6 && p.flush_len == 2));
    }

    #[test]
    fn butterfly_ternary_construction() {
        let f3 = Field::new(3, 1).unwrap();
        let spec = reference::butterfly(3);
        let phi = ErrorPatternSet::single_edges(9);
        let params = ConstructParams::default();
        let c = construct(&spec, &phi, Some(&reference::input_code(&f3)), &params).unwrap();
        assert_eq!(
            c.report.w_s,
            set(&[&[0, 0], &[0, 1], &[1, 0], &[1, 2], &[0, 2], &[2, 1], &[2, 0]])
        );
        assert_eq!(c.report.w_phi_size, 19);
        let table: Vec<_> = c
            .report
            .plans
            .iter()
            .map(|p| (p.output_metrics.dfree, p.output_metrics.tdfree, p.mode))
            .collect();
        assert_eq!(table, vec![(5, 6, DecodeMode::CaseA), (6, 6, DecodeMode::CaseA)]);

        let c = construct(&spec, &phi, Some(&reference::input_code_prime()), &params).unwrap();
        let table: Vec<_> = c
            .report
            .plans
            .iter()
            .map(|p| (p.output_metrics.dfree, p.output_metrics.tdfree, p.mode))
            .collect();
        assert_eq!(table, vec![(4, 3, DecodeMode::CaseB), (5, 5, DecodeMode::CaseA)]);
    }

    #[test]
    fn combination_construction() {
        let f3 = Field::new(3, 1).unwrap();
        let c = construct(
            &reference::combination_4c2(),
            &ErrorPatternSet::up_to_k_edges(16, 2),
            Some(&reference::input_code(&f3)),
            &ConstructParams::default(),
        )
        .unwrap();
        let r = &c.report;
        assert_eq!(r.t_s, 2);
        let full: BTreeSet<Vec<Elem>> =
            (0..9).map(|i| vec![i % 3, i / 3]).collect();
        assert!(r.w_t.iter().all(|s| s.vectors == full));
        use DecodeMode::*;
        let got: Vec<_> = modes(&c).into_iter().map(|(_, m)| m).collect();
        assert_eq!(got, [CaseA, CaseA, CaseB, CaseA, CaseB, CaseB]);
        let metrics: Vec<_> = r
            .plans
            .iter()
            .map(|p| (p.output_metrics.dfree, p.output_metrics.tdfree))
            .collect();
        assert_eq!(metrics, [(5, 6), (5, 6), (3, 4), (6, 6), (4, 5), (4, 5)]);
        for p in &r.plans {
            let ok_a = p.output_metrics.dfree >= 2 * p.max_error_weight + 1
                && r.code_metrics.tdfree >= p.output_metrics.tdfree;
            assert_eq!(ok_a, p.mode == CaseA);
        }
        // the report is serializable
        let json = serde_json::to_string(r).unwrap();
        assert!(json.contains("\"CaseB\""));
    }

    #[test]
    fn supplied_code_rejections() {
        let f2 = Field::new(2, 1).unwrap();
        let spec = reference::butterfly(2);
        let phi = ErrorPatternSet::single_edges(9);
        let params = ConstructParams::default();
        let weak = PolyMatrix::from_coeffs(&f2, &[vec![vec![1, 1], vec![0, 1]]]).unwrap();
        assert_eq!(
            construct(&spec, &phi, Some(&weak), &params).unwrap_err(),
            Error::InsufficientFreeDistance { dfree: 3, required: 5 }
        );
        let cat = PolyMatrix::from_coeffs(&f2, &[vec![vec![1, 1], vec![1, 0, 1]]]).unwrap();
        assert_eq!(
            construct(&spec, &phi, Some(&cat), &params).unwrap_err(),
            Error::Catastrophic
        );
        let wide = PolyMatrix::from_coeffs(&f2, &[vec![vec![1], vec![1], vec![1]]]).unwrap();
        assert!(matches!(
            construct(&spec, &phi, Some(&wide), &params),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn search_finds_input_code() {
        let f2 = Field::new(2, 1).unwrap();
        let params = ConstructParams {
            max_degree: 2,
            ..Default::default()
        };
        let (g, m) = select_code(&f2, 2, 1, 2, &params).unwrap();
        assert_eq!(g, reference::input_code(&f2));
        assert_eq!((m.dfree, m.tdfree), (5, 6));

        let f3 = Field::new(3, 1).unwrap();
        let (g, m) = select_code(&f3, 2, 1, 2, &params).unwrap();
        assert_eq!(g.degree(), 2);
        assert!(m.dfree >= 5 && m.tdfree <= 6);

        let (g, m) = select_code(&f2, 2, 1, 0, &params).unwrap();
        assert_eq!((g.degree(), m.dfree), (0, 1));
        let ones = PolyMatrix::from_coeffs(&f2, &[vec![vec![1], vec![1]]]).unwrap();
        assert!(validate_code(&ones, &f2, 2, 0, &params.analysis).is_ok());
    }

    #[test]
    fn search_errors() {
        let f2 = Field::new(2, 1).unwrap();
        let params = ConstructParams {
            max_degree: 1,
            ..Default::default()
        };
        assert_eq!(
            select_code(&f2, 2, 1, 2, &params).unwrap_err(),
            Error::NoCodeFound { max_degree: 1 }
        );
        assert_eq!(select_code(&f2, 3, 2, 1, &params).unwrap_err(), Error::UnsupportedRank(2));
        assert!(matches!(select_code(&f2, 2, 2, 1, &params), Err(Error::BadRate { .. })));
        let tiny = ConstructParams {
            candidate_cap: 3,
            ..params
        };
        assert!(matches!(
            select_code(&f2, 2, 1, 2, &tiny),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn case_b_preprocessing_identity() {
        let f2 = Field::new(2, 1).unwrap();
        let g = reference::input_code(&f2);
        let fsm = EncoderFsm::build(&g).unwrap();
        let t = build_transfer(&reference::butterfly(2)).unwrap();
        let u: Vec<Vec<Elem>> = [1, 0, 1, 1, 1, 0].iter().map(|&x| vec![x]).collect();
        let v = fsm.encode(&u, true).unwrap();
        for s in &t.sinks {
            let y: Vec<Vec<Elem>> = v.iter().map(|b| s.m_t.left_mul(b).unwrap()).collect();
            let back: Vec<Vec<Elem>> = y.iter().map(|b| s.m_t_inv.left_mul(b).unwrap()).collect();
            assert_eq!(back, v);
        }
    }

    #[test]
    fn error_free_decoding_at_every_sink() {
        let f3 = Field::new(3, 1).unwrap();
        let c = construct(
            &reference::combination_4c2(),
            &ErrorPatternSet::up_to_k_edges(16, 2),
            Some(&reference::input_code(&f3)),
            &ConstructParams::default(),
        )
        .unwrap();
        let fsm = EncoderFsm::build(&c.report.code).unwrap();
        let u: Vec<Vec<Elem>> = [2, 0, 1, 1, 2].iter().map(|&x| vec![x]).collect();
        let v = fsm.encode(&u, true).unwrap();
        let zero = vec![0; 16];
        let received: Vec<Vec<Vec<Elem>>> =
            v.iter().map(|b| c.transfer.propagate(b, &zero).unwrap()).collect();
        for (i, plan) in c.report.plans.iter().enumerate() {
            let y: Vec<Vec<Elem>> = received.iter().map(|r| r[i].clone()).collect();
            assert_eq!(decode_sink(plan, &y).unwrap(), u, "sink {}", plan.sink);
        }
    }

    #[test]
    fn edge_errors_six_uses_apart_at_case_b_sink() {
        // An error on the edge into T1 from node a maps to (1, 1) after M_T1^-1.
        let f2 = Field::new(2, 1).unwrap();
        let c = construct(
            &reference::butterfly(2),
            &ErrorPatternSet::single_edges(9),
            Some(&reference::input_code(&f2)),
            &ConstructParams::default(),
        )
        .unwrap();
        let fsm = EncoderFsm::build(&c.report.code).unwrap();
        let u: Vec<Vec<Elem>> = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1].iter().map(|&x| vec![x]).collect();
        let v = fsm.encode(&u, true).unwrap();
        let mut w = vec![0; 9];
        w[2] = 1;
        let y: Vec<Vec<Elem>> = v
            .iter()
            .enumerate()
            .map(|(t, b)| {
                let e = if t == 1 || t == 7 { &w } else { &vec![0; 9] };
                c.transfer.propagate(b, e).unwrap()[0].clone()
            })
            .collect();
        let dec = SinkDecoder::new(&c.report.plans[0], 1 << 20).unwrap();
        assert_eq!(dec.decode(&y).unwrap(), u);
        assert_ne!(dec.decode_ml(&y).unwrap(), u);
    }

    #[test]
    fn decoder_rejects_bad_blocks() {
        let f2 = Field::new(2, 1).unwrap();
        let c = construct(
            &reference::butterfly(2),
            &ErrorPatternSet::single_edges(9),
            Some(&reference::input_code(&f2)),
            &ConstructParams::default(),
        )
        .unwrap();
        assert!(decode_sink(&c.report.plans[0], &[vec![1, 0, 1]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        /// Bursts of weight at most 2, each confined to one segment, with
        /// indices at least 6 apart are corrected by the windowed decoder.
        #[test]
        fn separated_bursts_are_corrected(bits in prop::collection::vec(0u32..2, 4..24),
                                          gaps in prop::collection::vec((0usize..6, 1u32..4), 0..4),
                                          first in 0usize..4) {
            let f2 = Field::new(2, 1).unwrap();
            let fsm = EncoderFsm::build(&reference::input_code(&f2)).unwrap();
            let u: Vec<Vec<Elem>> = bits.iter().map(|&b| vec![b]).collect();
            let mut v = fsm.encode(&u, true).unwrap();
            let mut seg = first;
            for (extra, burst) in gaps {
                if seg >= v.len() {
                    break;
                }
                v[seg][0] ^= burst & 1;
                v[seg][1] ^= burst >> 1;
                seg += 6 + extra;
            }
            prop_assert_eq!(window_decode(&fsm, &v, 2, 6).unwrap(), u);
        }
    }
}
