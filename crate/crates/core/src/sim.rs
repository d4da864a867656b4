//! Error injection: encode messages, push every code block through the
//! network with scheduled edge errors, decode at every sink and compare.

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convcode::{EncoderFsm, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::galois::{Elem, Field};
use crate::nec::{enumerate_error_vectors, Construction, ErrorPatternSet, SinkDecoder};

pub const DEFAULT_TRIAL_CAP: u128 = 10_000_000;

/// Edge errors indexed by network use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorSchedule {
    /// `(network use, error vector)` in increasing use order.
    pub entries: Vec<(usize, Vec<Elem>)>,
    /// Declared minimum difference between consecutive use indices.
    pub spacing: usize,
}

impl ErrorSchedule {
    pub fn empty(spacing: usize) -> ErrorSchedule {
        ErrorSchedule {
            entries: Vec::new(),
            spacing,
        }
    }

    pub fn error_at(&self, t: usize) -> Option<&[Elem]> {
        self.entries
            .binary_search_by_key(&t, |(u, _)| *u)
            .ok()
            .map(|i| self.entries[i].1.as_slice())
    }

    /// Checks ordering, spacing, vector lengths and that every error fits a
    /// pattern of `phi`.
    pub fn validate(&self, phi: &ErrorPatternSet, num_uses: usize) -> Result<()> {
        for (i, (t, w)) in self.entries.iter().enumerate() {
            if *t >= num_uses {
                return Err(Error::InvalidPattern(format!(
                    "error at network use {t}, transmission has {num_uses} uses"
                )));
            }
            if w.len() != phi.num_edges() {
                return Err(Error::dims(format!(
                    "error vector of length {} for {} edges",
                    w.len(),
                    phi.num_edges()
                )));
            }
            if !phi.matches(w) {
                return Err(Error::InvalidPattern(format!(
                    "error at network use {t} fits no pattern"
                )));
            }
            if i > 0 && t - self.entries[i - 1].0 < self.spacing.max(1) {
                return Err(Error::InvalidPattern(format!(
                    "errors at uses {} and {t} are closer than {}",
                    self.entries[i - 1].0, self.spacing
                )));
            }
        }
        Ok(())
    }
}

/// Random schedule: each entry picks a uniform pattern and uniform nonzero
/// values on it; consecutive entries are `spacing + extra` uses apart with
/// `extra` uniform in `0..=spacing`.
pub fn make_schedule(
    phi: &ErrorPatternSet,
    field: &Field,
    num_uses: usize,
    spacing: usize,
    seed: u64,
) -> ErrorSchedule {
    let spacing = spacing.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut schedule = ErrorSchedule::empty(spacing);
    if phi.is_empty() {
        return schedule;
    }
    let q = field.order();
    let mut t = rng.gen_range(0..spacing);
    while t < num_uses {
        let rho = phi.iter().choose(&mut rng).expect("nonempty");
        let mut w = vec![0; phi.num_edges()];
        for &e in rho {
            w[e] = rng.gen_range(1..q);
        }
        schedule.entries.push((t, w));
        t += spacing + rng.gen_range(0..=spacing);
    }
    schedule
}

/// Uniformly random message of `len` blocks of `k` symbols.
pub fn random_message(field: &Field, k: usize, len: usize, rng: &mut impl Rng) -> Vec<Vec<Elem>> {
    let q = field.order();
    (0..len)
        .map(|_| (0..k).map(|_| rng.gen_range(0..q)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub message: Vec<Vec<Elem>>,
    pub sinks: Vec<String>,
    pub decoded: Vec<Vec<Vec<Elem>>>,
    pub success: Vec<bool>,
    pub schedule: ErrorSchedule,
    pub seed: Option<u64>,
}

impl TrialReport {
    pub fn all_succeeded(&self) -> bool {
        self.success.iter().all(|&s| s)
    }
}

/// Encoder and sink decoders built once for many trials.
pub struct Simulator<'a> {
    construction: &'a Construction,
    encoder: EncoderFsm,
    decoders: Vec<SinkDecoder>,
}

impl<'a> Simulator<'a> {
    pub fn new(construction: &'a Construction) -> Result<Simulator<'a>> {
        let report = &construction.report;
        let encoder = EncoderFsm::build_with_cap(&report.code, DEFAULT_STATE_CAP)?;
        let decoders = report
            .plans
            .iter()
            .map(|p| SinkDecoder::new(p, DEFAULT_STATE_CAP))
            .collect::<Result<_>>()?;
        Ok(Simulator {
            construction,
            encoder,
            decoders,
        })
    }

    pub fn construction(&self) -> &Construction {
        self.construction
    }

    /// Network uses taken by a message of `len` blocks, flush included.
    pub fn num_uses(&self, len: usize) -> usize {
        len + self.encoder.max_memory()
    }

    /// Received sequences per sink for `message` under `schedule`.
    pub fn transmit(
        &self,
        message: &[Vec<Elem>],
        schedule: &ErrorSchedule,
    ) -> Result<Vec<Vec<Vec<Elem>>>> {
        let transfer = &self.construction.transfer;
        let v = self.encoder.encode(message, true)?;
        let zero = vec![0; transfer.num_edges()];
        let mut per_sink = vec![Vec::with_capacity(v.len()); transfer.sinks.len()];
        for (t, block) in v.iter().enumerate() {
            let w = schedule.error_at(t).unwrap_or(&zero);
            for (s, y) in transfer.propagate(block, w)?.into_iter().enumerate() {
                per_sink[s].push(y);
            }
        }
        Ok(per_sink)
    }

    pub fn decode_all(&self, received: &[Vec<Vec<Elem>>]) -> Result<Vec<Vec<Vec<Elem>>>> {
        self.decoders
            .iter()
            .zip(received)
            .map(|(d, y)| d.decode(y))
            .collect()
    }

    pub fn run(
        &self,
        message: &[Vec<Elem>],
        schedule: &ErrorSchedule,
        seed: Option<u64>,
    ) -> Result<TrialReport> {
        let decoded = self.decode_all(&self.transmit(message, schedule)?)?;
        let success = decoded.iter().map(|d| d.as_slice() == message).collect();
        Ok(TrialReport {
            message: message.to_vec(),
            sinks: self
                .construction
                .report
                .plans
                .iter()
                .map(|p| p.sink.clone())
                .collect(),
            decoded,
            success,
            schedule: schedule.clone(),
            seed,
        })
    }
}

/// One trial: encode, transmit with `schedule`, decode at every sink.
pub fn run_experiment(
    construction: &Construction,
    message: &[Vec<Elem>],
    schedule: &ErrorSchedule,
) -> Result<TrialReport> {
    Simulator::new(construction)?.run(message, schedule, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExhaustiveMode {
    /// Every nonzero error vector at every single network use.
    Single,
    /// Every ordered pair of nonzero error vectors at every pair of uses whose
    /// indices differ by at least the spacing.
    Paired,
    /// Two error vectors from different patterns added in the same use.
    /// Outside the guarantee; used as a negative control.
    SameUse,
}

#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveConfig {
    pub mode: ExhaustiveMode,
    pub num_messages: usize,
    pub message_len: usize,
    pub spacing: usize,
    pub seed: u64,
    pub cap: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkTally {
    pub sink: String,
    pub trials: u64,
    pub failures: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveSummary {
    pub mode: ExhaustiveMode,
    pub seed: u64,
    pub num_messages: usize,
    pub message_len: usize,
    pub num_uses: usize,
    pub spacing: usize,
    pub error_vectors: usize,
    pub schedules_per_message: u64,
    pub sinks: Vec<SinkTally>,
}

impl ExhaustiveSummary {
    pub fn total_failures(&self) -> u64 {
        self.sinks.iter().map(|s| s.failures).sum()
    }
}

fn add(field: &Field, a: &mut [Elem], b: &[Elem]) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = field.add(*x, y);
    }
}

/// Enumerates every in-mode error placement for a fixed set of random
/// messages and counts decoding failures per sink.
pub fn run_exhaustive(
    construction: &Construction,
    phi: &ErrorPatternSet,
    config: &ExhaustiveConfig,
) -> Result<ExhaustiveSummary> {
    let sim = Simulator::new(construction)?;
    let transfer = &construction.transfer;
    let field = &transfer.field;
    let k = construction.report.rate_k;
    let num_uses = sim.num_uses(config.message_len);
    let spacing = config.spacing.max(1);

    let errors: Vec<Vec<Elem>> = enumerate_error_vectors(phi, field, config.cap)?
        .into_iter()
        .filter(|w| w.iter().any(|&x| x != 0))
        .collect();
    // images of each error vector at each sink
    let images: Vec<Vec<Vec<Elem>>> = errors
        .iter()
        .map(|w| transfer.sinks.iter().map(|s| s.f_t.left_mul(w)).collect())
        .collect::<Result<_>>()?;

    let pairs_of_uses: Vec<(usize, usize)> = (0..num_uses)
        .flat_map(|a| (a + spacing..num_uses).map(move |b| (a, b)))
        .collect();
    let same_use_pairs: Vec<(usize, usize)> = match config.mode {
        ExhaustiveMode::SameUse => (0..errors.len())
            .flat_map(|i| (i + 1..errors.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let mut sum = errors[i].clone();
                add(field, &mut sum, &errors[j]);
                !phi.matches(&sum)
            })
            .collect(),
        _ => Vec::new(),
    };
    let e = errors.len() as u128;
    let per_message: u128 = match config.mode {
        ExhaustiveMode::Single => e * num_uses as u128,
        ExhaustiveMode::Paired => e * e * pairs_of_uses.len() as u128,
        ExhaustiveMode::SameUse => same_use_pairs.len() as u128 * num_uses as u128,
    };
    let total = per_message.saturating_mul(config.num_messages as u128);
    if total > config.cap {
        return Err(Error::EnumerationTooLarge {
            size: total,
            cap: config.cap,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let messages: Vec<Vec<Vec<Elem>>> = (0..config.num_messages)
        .map(|_| random_message(field, k, config.message_len, &mut rng))
        .collect();
    let num_sinks = transfer.sinks.len();

    // (message index, first error, second error) work items
    let jobs: Vec<(usize, usize, Option<usize>)> = match config.mode {
        ExhaustiveMode::Single => (0..messages.len())
            .flat_map(|m| (0..errors.len()).map(move |i| (m, i, None)))
            .collect(),
        ExhaustiveMode::Paired => (0..messages.len())
            .flat_map(|m| {
                let n = errors.len();
                (0..n).flat_map(move |i| (0..n).map(move |j| (m, i, Some(j))))
            })
            .collect(),
        ExhaustiveMode::SameUse => (0..messages.len())
            .flat_map(|m| same_use_pairs.iter().map(move |&(i, j)| (m, i, Some(j))))
            .collect(),
    };
    let clean: Vec<Vec<Vec<Vec<Elem>>>> = messages
        .iter()
        .map(|m| sim.transmit(m, &ErrorSchedule::empty(spacing)))
        .collect::<Result<_>>()?;

    let failures = jobs
        .par_iter()
        .map(|&(m, i, j)| -> Result<Vec<u64>> {
            let mut fails = vec![0u64; num_sinks];
            let placements: Vec<(usize, Option<usize>)> = match config.mode {
                ExhaustiveMode::Single | ExhaustiveMode::SameUse => {
                    (0..num_uses).map(|t| (t, None)).collect()
                }
                ExhaustiveMode::Paired => {
                    pairs_of_uses.iter().map(|&(a, b)| (a, Some(b))).collect()
                }
            };
            for s in 0..num_sinks {
                let dec = &sim.decoders[s];
                for &(t1, t2) in &placements {
                    let mut y = clean[m][s].clone();
                    add(field, &mut y[t1], &images[i][s]);
                    match (config.mode, j, t2) {
                        (ExhaustiveMode::Paired, Some(j), Some(t2)) => {
                            add(field, &mut y[t2], &images[j][s])
                        }
                        (ExhaustiveMode::SameUse, Some(j), _) => {
                            add(field, &mut y[t1], &images[j][s])
                        }
                        _ => {}
                    }
                    if dec.decode(&y)? != messages[m] {
                        fails[s] += 1;
                    }
                }
            }
            Ok(fails)
        })
        .try_reduce(
            || vec![0u64; num_sinks],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let trials_per_sink = total as u64;
    Ok(ExhaustiveSummary {
        mode: config.mode,
        seed: config.seed,
        num_messages: config.num_messages,
        message_len: config.message_len,
        num_uses,
        spacing,
        error_vectors: errors.len(),
        schedules_per_message: per_message as u64,
        sinks: construction
            .report
            .plans
            .iter()
            .zip(failures)
            .map(|(p, f)| SinkTally {
                sink: p.sink.clone(),
                trials: trials_per_sink,
                failures: f,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomSummary {
    pub seed: u64,
    pub trials: usize,
    pub message_len: usize,
    pub spacing: usize,
    pub sinks: Vec<SinkTally>,
    /// Reports of trials in which some sink failed.
    pub failed_trials: Vec<TrialReport>,
}

/// `trials` random messages, each with a random schedule from
/// [`make_schedule`]. Trial `i` uses seed `seed + i`.
pub fn run_random(
    construction: &Construction,
    phi: &ErrorPatternSet,
    trials: usize,
    message_len: usize,
    spacing: usize,
    seed: u64,
) -> Result<RandomSummary> {
    let sim = Simulator::new(construction)?;
    let field = &construction.transfer.field;
    let k = construction.report.rate_k;
    let num_uses = sim.num_uses(message_len);
    let reports: Vec<TrialReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let message = random_message(field, k, message_len, &mut rng);
            let schedule = make_schedule(phi, field, num_uses, spacing, rng.gen());
            sim.run(&message, &schedule, Some(trial_seed))
        })
        .collect::<Result<_>>()?;
    let sinks = construction
        .report
        .plans
        .iter()
        .enumerate()
        .map(|(s, p)| SinkTally {
            sink: p.sink.clone(),
            trials: trials as u64,
            failures: reports.iter().filter(|r| !r.success[s]).count() as u64,
        })
        .collect();
    Ok(RandomSummary {
        seed,
        trials,
        message_len,
        spacing: spacing.max(1),
        sinks,
        failed_trials: reports.into_iter().filter(|r| !r.all_succeeded()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nec::{construct, ConstructParams};
    use crate::reference;

    fn butterfly_f2() -> (Construction, ErrorPatternSet) {
        let f2 = Field::new(2, 1).unwrap();
        let phi = ErrorPatternSet::single_edges(9);
        let c = construct(
            &reference::butterfly(2),
            &phi,
            Some(&reference::input_code(&f2)),
            &ConstructParams::default(),
        )
        .unwrap();
        (c, phi)
    }

    #[test]
    fn schedule_shape() {
        let (c, phi) = butterfly_f2();
        let s = make_schedule(&phi, &c.transfer.field, 30, 6, 7);
        assert!(!s.entries.is_empty() && s.entries.len() <= 5);
        assert!(s.entries.windows(2).all(|w| w[1].0 - w[0].0 >= 6));
        s.validate(&phi, 30).unwrap();
        assert_eq!(s, make_schedule(&phi, &c.transfer.field, 30, 6, 7));
        assert!(make_schedule(&phi, &c.transfer.field, 0, 6, 7).entries.is_empty());
        let empty = ErrorPatternSet::new(9, vec![]).unwrap();
        assert!(make_schedule(&empty, &c.transfer.field, 30, 6, 7).entries.is_empty());
    }

    #[test]
    fn schedule_validation() {
        let (_, phi) = butterfly_f2();
        let mut w = vec![0; 9];
        w[0] = 1;
        let close = ErrorSchedule {
            entries: vec![(0, w.clone()), (3, w.clone())],
            spacing: 6,
        };
        assert!(close.validate(&phi, 20).is_err());
        let mut two = w.clone();
        two[1] = 1;
        let off_pattern = ErrorSchedule {
            entries: vec![(0, two)],
            spacing: 6,
        };
        assert!(off_pattern.validate(&phi, 20).is_err());
        let late = ErrorSchedule {
            entries: vec![(25, w)],
            spacing: 6,
        };
        assert!(late.validate(&phi, 20).is_err());
    }

    #[test]
    fn error_free_and_single_error_trials() {
        let (c, phi) = butterfly_f2();
        let sim = Simulator::new(&c).unwrap();
        let u: Vec<Vec<Elem>> = [1, 0, 0, 1, 1].iter().map(|&x| vec![x]).collect();
        assert!(sim.run(&u, &ErrorSchedule::empty(6), None).unwrap().all_succeeded());
        let s = make_schedule(&phi, &c.transfer.field, sim.num_uses(5), 6, 11);
        let r = run_experiment(&c, &u, &s).unwrap();
        assert!(r.all_succeeded(), "{r:?}");
        assert_eq!(r.sinks, ["T1", "T2"]);
    }

    #[test]
    fn determinism() {
        let (c, phi) = butterfly_f2();
        let a = run_random(&c, &phi, 20, 8, 6, 99).unwrap();
        let b = run_random(&c, &phi, 20, 8, 6, 99).unwrap();
        assert_eq!(a.sinks, b.sinks);
        assert_eq!(a.failed_trials, b.failed_trials);
        assert!(a.sinks.iter().all(|s| s.failures == 0));
    }

    #[test]
    fn outcome_invariant_under_adding_a_codeword() {
        let (c, phi) = butterfly_f2();
        let sim = Simulator::new(&c).unwrap();
        let field = &c.transfer.field;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cw = random_message(field, 1, 8, &mut rng);
        for seed in 0..40 {
            let u = random_message(field, 1, 8, &mut rng);
            let s = make_schedule(&phi, field, sim.num_uses(8), 6, seed);
            let shifted: Vec<Vec<Elem>> = u
                .iter()
                .zip(&cw)
                .map(|(a, b)| vec![field.add(a[0], b[0])])
                .collect();
            let r1 = sim.run(&u, &s, None).unwrap();
            let r2 = sim.run(&shifted, &s, None).unwrap();
            assert_eq!(r1.success, r2.success);
            assert!(r1.all_succeeded());
        }
    }

    #[test]
    fn small_exhaustive_runs() {
        let (c, phi) = butterfly_f2();
        let cfg = ExhaustiveConfig {
            mode: ExhaustiveMode::Single,
            num_messages: 3,
            message_len: 6,
            spacing: 6,
            seed: 1,
            cap: DEFAULT_TRIAL_CAP,
        };
        let s = run_exhaustive(&c, &phi, &cfg).unwrap();
        assert_eq!(s.error_vectors, 9);
        assert_eq!(s.schedules_per_message, 9 * 8);
        assert_eq!(s.total_failures(), 0);
        let paired = run_exhaustive(
            &c,
            &phi,
            &ExhaustiveConfig {
                mode: ExhaustiveMode::Paired,
                ..cfg
            },
        )
        .unwrap();
        // use pairs (0,6), (0,7), (1,7)
        assert_eq!(paired.schedules_per_message, 81 * 3);
        assert_eq!(paired.total_failures(), 0);
        let empty = ErrorPatternSet::new(9, vec![]).unwrap();
        let none = run_exhaustive(&c, &empty, &cfg).unwrap();
        assert_eq!((none.error_vectors, none.total_failures()), (0, 0));
        let tiny = ExhaustiveConfig { cap: 10, ..cfg };
        assert!(matches!(
            run_exhaustive(&c, &phi, &tiny),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
