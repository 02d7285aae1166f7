//! Seeded Monte-Carlo simulation of shuffle models, with empirical
//! distribution estimation cross-validated against the exact laws.
//!
//! Reproducibility contract: trial t draws from a ChaCha8 stream keyed by
//! (seed, t) via `seed_from_u64(seed)` + `set_stream(t)`, so results are
//! bit-identical for a fixed config regardless of scheduling. Statistical
//! assertions elsewhere depend only on tolerances, never on the stream.

use std::collections::BTreeMap;

use num::BigRational;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::markov::{tv_distance, Distribution, Scalar, MAX_DISTRIBUTION_DECK};
use crate::models::{
    arrangement_of_word, brute_force_distribution, deterministic_permutation,
    single_shuffle_distribution, ShuffleModel,
};
use crate::perm::{factorial_u64, Arrangement, Rank};

/// One simulation request: `trials` independent decks, each dealt `hands`
/// hands of `model` starting from identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationConfig {
    pub model: ShuffleModel,
    pub n: usize,
    pub hands: u32,
    pub trials: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(model: ShuffleModel, n: usize, hands: u32, trials: u64, seed: u64) -> Result<Self> {
        model.validate()?;
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        if n > MAX_DISTRIBUTION_DECK {
            return Err(Error::DeckTooLarge {
                n,
                cap: MAX_DISTRIBUTION_DECK,
            });
        }
        if trials == 0 {
            return Err(Error::NoTrials);
        }
        Ok(SimulationConfig {
            model,
            n,
            hands,
            trials,
            seed,
        })
    }
}

/// Occurrence counts per arrangement over a finite sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    n: usize,
    counts: BTreeMap<Rank, u64>,
    trials: u64,
}

impl EmpiricalDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn count(&self, rank: Rank) -> u64 {
        self.counts.get(&rank).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&Rank, &u64)> {
        self.counts.iter()
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// Frequency estimate as a dense distribution (counts/trials, exact
    /// when S is rational).
    pub fn to_distribution<S: Scalar>(&self) -> Result<Distribution<S>> {
        let len = factorial_u64(self.n)? as usize;
        let mut probs = vec![S::zero(); len];
        for (rank, count) in &self.counts {
            let p = BigRational::new((*count).into(), self.trials.into());
            probs[rank.0 as usize] = S::from_rational(&p);
        }
        Distribution::from_probs(self.n, probs)
    }
}

/// Draws uniformly from 0..bound by rejection, avoiding modulo bias.
fn sample_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = (u64::MAX / bound) * bound;
    loop {
        let v = rng.next_u64();
        if v < limit {
            return v % bound;
        }
    }
}

/// Samples one position-permutation from the model's single-hand law.
///
/// Physical-riffle interpretation (the written routine leaves both open):
/// a packet draw is capped at the cards remaining in its half, and the
/// starting side is drawn fresh each hand.
fn sample_step(model: &ShuffleModel, n: usize, rng: &mut impl RngCore) -> Result<Arrangement> {
    match model {
        ShuffleModel::TopInAtRandom => {
            let j = sample_below(rng, n as u64) as usize + 1;
            let mut labels: Vec<usize> = (2..=n).collect();
            labels.insert(j - 1, 1);
            Arrangement::from_labels(labels)
        }
        ShuffleModel::GsrRiffle { packets } => {
            let word: Vec<u32> = (0..n)
                .map(|_| sample_below(rng, u64::from(*packets)) as u32)
                .collect();
            arrangement_of_word(&word, *packets, n)
        }
        ShuffleModel::PhysicalRiffle {
            cut_spread,
            max_packet,
        } => {
            let lo = (n / 2).saturating_sub(*cut_spread);
            let hi = (n / 2).saturating_add(*cut_spread).min(n);
            let cut = lo + sample_below(rng, (hi - lo + 1) as u64) as usize;
            if cut == 0 || cut == n {
                return Arrangement::identity(n);
            }
            let mut halves = [(1..=cut).collect::<Vec<usize>>(), (cut + 1..=n).collect()];
            let mut side = sample_below(rng, 2) as usize;
            let mut labels = Vec::with_capacity(n);
            loop {
                let remaining = halves[side].len();
                let take = 1 + sample_below(rng, (*max_packet).min(remaining) as u64) as usize;
                labels.extend(halves[side].drain(..take));
                if halves[side].is_empty() {
                    labels.append(&mut halves[1 - side]);
                    break;
                }
                side = 1 - side;
            }
            Arrangement::from_labels(labels)
        }
        ShuffleModel::NaiveUniform => {
            let mut labels: Vec<usize> = (1..=n).collect();
            for i in (1..n).rev() {
                let j = sample_below(rng, (i + 1) as u64) as usize;
                labels.swap(i, j);
            }
            Arrangement::from_labels(labels)
        }
        _ => deterministic_permutation(model, n),
    }
}

/// RNG for one trial: the seed keys the cipher, the trial index selects
/// the stream, so trials are independent and replayable in isolation.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Applies one hand of the model to the deck. Deterministic models ignore
/// the rng.
pub fn shuffle_once(
    deck: &Arrangement,
    model: &ShuffleModel,
    rng: &mut impl RngCore,
) -> Result<Arrangement> {
    model.validate()?;
    let step = sample_step(model, deck.n(), rng)?;
    deck.compose(&step)
}

/// Runs the full simulation; output is a pure function of the config.
pub fn run_trials(cfg: &SimulationConfig) -> Result<EmpiricalDistribution> {
    let mut counts: BTreeMap<Rank, u64> = BTreeMap::new();
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let mut deck = Arrangement::identity(cfg.n)?;
        for _ in 0..cfg.hands {
            deck = shuffle_once(&deck, &cfg.model, &mut rng)?;
        }
        *counts.entry(deck.rank()?).or_insert(0) += 1;
    }
    Ok(EmpiricalDistribution {
        n: cfg.n,
        counts,
        trials: cfg.trials,
    })
}

/// ½ Σ |counts(π)/trials − q(π)|, computed exactly.
pub fn empirical_tv(e: &EmpiricalDistribution, q: &Distribution<BigRational>) -> Result<BigRational> {
    tv_distance(&e.to_distribution::<BigRational>()?, q)
}

/// Three-way gap report between a physical riffle and the GSR model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhysicalGsrReport {
    pub n: usize,
    pub trials: u64,
    /// Sampled physical law vs exact GSR law.
    pub tv_empirical_vs_gsr: BigRational,
    /// Sampled physical law vs its own exact enumeration (pure noise).
    pub tv_empirical_vs_enumeration: BigRational,
    /// Exact model gap, no sampling involved.
    pub tv_enumeration_vs_gsr: BigRational,
}

/// Quantifies how far a physical riffle is from the idealized GSR riffle
/// after one hand, both by simulation and by exact enumeration.
pub fn compare_physical_vs_gsr(
    physical: &ShuffleModel,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<PhysicalGsrReport> {
    if !matches!(physical, ShuffleModel::PhysicalRiffle { .. }) {
        return Err(Error::UnsupportedModel {
            model: physical.to_string(),
            hint: "the comparison is defined for the physical riffle",
        });
    }
    if n > 6 {
        return Err(Error::DeckTooLarge { n, cap: 6 });
    }
    let cfg = SimulationConfig::new(physical.clone(), n, 1, trials, seed)?;
    let empirical = run_trials(&cfg)?;
    let gsr = Distribution::from_step(&single_shuffle_distribution(&ShuffleModel::gsr(), n)?)?;
    let enumerated = Distribution::from_step(&brute_force_distribution(physical, n)?)?;
    Ok(PhysicalGsrReport {
        n,
        trials,
        tv_empirical_vs_gsr: empirical_tv(&empirical, &gsr)?,
        tv_empirical_vs_enumeration: empirical_tv(&empirical, &enumerated)?,
        tv_enumeration_vs_gsr: tv_distance(&enumerated, &gsr)?,
    })
}
