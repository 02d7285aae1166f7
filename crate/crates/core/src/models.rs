//! Shuffle procedures: each is either an exact single-step law over
//! arrangements (sparse rational distribution) or a deterministic
//! permutation with a computable period.
//!
//! The Mongean pile is built with even-numbered cards accumulating on top;
//! this is the direction whose 52-card period is 12 (the other direction
//! has period 51).

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;

use num::{BigRational, One, Zero};

use crate::analytic::a_shuffle_probability;
use crate::error::{Error, Result};
use crate::perm::{enumerate, factorial_u64, Arrangement, Rank, MAX_ENUMERATION_DECK};

/// Hard ceiling on exhaustively enumerated random-choice paths.
pub const BRUTE_FORCE_BUDGET: u64 = 10_000_000;

/// Every shuffle procedure the toolkit models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShuffleModel {
    /// Remove the top card, reinsert at a uniform position.
    TopInAtRandom,
    /// Gilbert-Shannon-Reeds a-shuffle (`packets` = a).
    GsrRiffle { packets: u32 },
    /// Hand-style riffle: noisy cut, then alternating packets of 1 or more
    /// cards from each half.
    PhysicalRiffle { cut_spread: usize, max_packet: usize },
    /// Perfect interleave, original top card stays on top.
    FaroOut,
    /// Perfect interleave, second half's top card becomes the top.
    FaroIn,
    /// Pile built by alternating top/bottom placement.
    Mongean,
    /// One hand lands exactly uniform; the idealized reference model.
    NaiveUniform,
}

impl ShuffleModel {
    /// The standard two-packet riffle.
    pub fn gsr() -> Self {
        ShuffleModel::GsrRiffle { packets: 2 }
    }

    /// Physical riffle with the default noise: cut within 5 cards of the
    /// middle, packets of 1..=5 cards.
    pub fn physical_default() -> Self {
        ShuffleModel::PhysicalRiffle {
            cut_spread: 5,
            max_packet: 5,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(
            self,
            ShuffleModel::FaroOut | ShuffleModel::FaroIn | ShuffleModel::Mongean
        )
    }

    /// Short kind identifier without parameters.
    pub fn name(&self) -> &'static str {
        match self {
            ShuffleModel::TopInAtRandom => "top-in-at-random",
            ShuffleModel::GsrRiffle { .. } => "gsr-riffle",
            ShuffleModel::PhysicalRiffle { .. } => "physical-riffle",
            ShuffleModel::FaroOut => "faro-out",
            ShuffleModel::FaroIn => "faro-in",
            ShuffleModel::Mongean => "mongean",
            ShuffleModel::NaiveUniform => "naive-uniform",
        }
    }

    /// Parameter sanity: GSR needs a >= 2, physical riffle needs packets
    /// of at least one card.
    pub fn validate(&self) -> Result<()> {
        match self {
            ShuffleModel::GsrRiffle { packets } if *packets < 2 => {
                Err(Error::BadPacketCount { packets: *packets })
            }
            ShuffleModel::PhysicalRiffle { max_packet, .. } if *max_packet == 0 => {
                Err(Error::BadMaxPacket)
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ShuffleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShuffleModel::GsrRiffle { packets } => write!(f, "gsr-riffle({packets})"),
            ShuffleModel::PhysicalRiffle {
                cut_spread,
                max_packet,
            } => write!(f, "physical-riffle({cut_spread},{max_packet})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Sparse single-step law: only arrangements with positive probability are
/// present, and the entries sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepDistribution {
    n: usize,
    probs: BTreeMap<Rank, BigRational>,
}

impl StepDistribution {
    fn from_accumulated(n: usize, mut probs: BTreeMap<Rank, BigRational>) -> Self {
        probs.retain(|_, p| !p.is_zero());
        let total: BigRational = probs.values().sum();
        assert!(total.is_one(), "step law must sum to 1, got {total}");
        assert!(probs.values().all(|p| p > &BigRational::zero()));
        StepDistribution { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rank, &BigRational)> {
        self.probs.iter()
    }

    /// Probability of one arrangement; zero when outside the support.
    pub fn prob(&self, rank: Rank) -> BigRational {
        self.probs.get(&rank).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.probs.values().sum()
    }
}

/// Closed-form single-step law for the models that have one.
///
/// Top-in-at-random puts 1/n on each of the n reinsertion results; the GSR
/// a-shuffle puts C(a+n-r, n)/a^n on every arrangement with r rising
/// sequences; the idealized model is uniform. The physical riffle has no
/// closed form (use [`brute_force_distribution`]) and deterministic kinds
/// are point masses (use [`deterministic_permutation`]).
pub fn single_shuffle_distribution(model: &ShuffleModel, n: usize) -> Result<StepDistribution> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    let mut probs = BTreeMap::new();
    match model {
        ShuffleModel::TopInAtRandom => {
            let w = BigRational::new(1.into(), (n as i64).into());
            for j in 1..=n {
                let mut labels: Vec<usize> = (2..=n).collect();
                labels.insert(j - 1, 1);
                let rank = Arrangement::from_labels(labels)?.rank()?;
                *probs.entry(rank).or_insert_with(BigRational::zero) += &w;
            }
        }
        ShuffleModel::GsrRiffle { packets } => {
            for a in enumerate(n, MAX_ENUMERATION_DECK)? {
                let p = a_shuffle_probability(u64::from(*packets), n, a.rising_sequences())?;
                if !p.is_zero() {
                    probs.insert(a.rank()?, p);
                }
            }
        }
        ShuffleModel::NaiveUniform => {
            let w = BigRational::new(1.into(), factorial_u64(n)?.into());
            for a in enumerate(n, MAX_ENUMERATION_DECK)? {
                probs.insert(a.rank()?, w.clone());
            }
        }
        ShuffleModel::PhysicalRiffle { .. } => {
            return Err(Error::UnsupportedModel {
                model: model.to_string(),
                hint: "the physical riffle has no closed form; use brute_force_distribution",
            });
        }
        _ => {
            return Err(Error::UnsupportedModel {
                model: model.to_string(),
                hint: "deterministic shuffles are point masses; use deterministic_permutation",
            });
        }
    }
    Ok(StepDistribution::from_accumulated(n, probs))
}

/// Exact law by exhausting the model's random-choice tree path by path.
///
/// For the physical riffle this is the only exact route; for the GSR
/// riffle it independently reproduces the closed form (every digit word is
/// a path of probability a^-n); stochastic models with a closed form and
/// deterministic models are delegated. Errors with
/// [`Error::EnumerationBudget`] when the tree is too large.
pub fn brute_force_distribution(model: &ShuffleModel, n: usize) -> Result<StepDistribution> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    match model {
        ShuffleModel::GsrRiffle { packets } => gsr_word_enumeration(*packets, n, model),
        ShuffleModel::PhysicalRiffle {
            cut_spread,
            max_packet,
        } => physical_enumeration(*cut_spread, *max_packet, n, model),
        ShuffleModel::TopInAtRandom | ShuffleModel::NaiveUniform => {
            single_shuffle_distribution(model, n)
        }
        _ => {
            let rank = deterministic_permutation(model, n)?.rank()?;
            let mut probs = BTreeMap::new();
            probs.insert(rank, BigRational::one());
            Ok(StepDistribution::from_accumulated(n, probs))
        }
    }
}

/// Single-step law for any model, routed to the cheapest exact source.
pub fn exact_step_distribution(model: &ShuffleModel, n: usize) -> Result<StepDistribution> {
    match model {
        ShuffleModel::TopInAtRandom
        | ShuffleModel::GsrRiffle { .. }
        | ShuffleModel::NaiveUniform => single_shuffle_distribution(model, n),
        _ => brute_force_distribution(model, n),
    }
}

/// Interleaves digit-word packets: position i takes the next unused card
/// of the half selected by digit w[i]. Scanning all a^n words with weight
/// a^-n is exactly the a-shuffle law; one uniform word is one a-shuffle.
pub(crate) fn arrangement_of_word(word: &[u32], packets: u32, n: usize) -> Result<Arrangement> {
    let mut counts = vec![0usize; packets as usize];
    for d in word {
        counts[*d as usize] += 1;
    }
    // cursors[j] = next card of packet j; packet j holds the counts[j]
    // cards after packets 0..j.
    let mut cursors = vec![0usize; packets as usize];
    let mut start = 1usize;
    for (j, c) in counts.iter().enumerate() {
        cursors[j] = start;
        start += c;
    }
    let mut labels = Vec::with_capacity(n);
    for d in word {
        let cur = &mut cursors[*d as usize];
        labels.push(*cur);
        *cur += 1;
    }
    Arrangement::from_labels(labels)
}

fn gsr_word_enumeration(packets: u32, n: usize, model: &ShuffleModel) -> Result<StepDistribution> {
    let paths = u64::from(packets)
        .checked_pow(n as u32)
        .filter(|p| *p <= BRUTE_FORCE_BUDGET)
        .ok_or_else(|| Error::EnumerationBudget {
            model: model.to_string(),
            n,
            budget: BRUTE_FORCE_BUDGET,
        })?;
    let weight = BigRational::new(1.into(), (paths as i64).into());
    let mut probs: BTreeMap<Rank, BigRational> = BTreeMap::new();
    let mut word = vec![0u32; n];
    loop {
        let rank = arrangement_of_word(&word, packets, n)?.rank()?;
        *probs.entry(rank).or_insert_with(BigRational::zero) += &weight;
        // Odometer increment in base `packets`.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(StepDistribution::from_accumulated(n, probs));
            }
            i -= 1;
            word[i] += 1;
            if word[i] < packets {
                break;
            }
            word[i] = 0;
        }
    }
}

fn physical_enumeration(
    cut_spread: usize,
    max_packet: usize,
    n: usize,
    model: &ShuffleModel,
) -> Result<StepDistribution> {
    let cuts: Vec<usize> =
        ((n / 2).saturating_sub(cut_spread)..=(n / 2).saturating_add(cut_spread).min(n)).collect();
    let branching = max_packet.min(n) as u64;
    let estimate = (cuts.len() as u64)
        .checked_mul(2)
        .and_then(|c| branching.checked_pow(n as u32).and_then(|b| c.checked_mul(b)))
        .filter(|p| *p <= BRUTE_FORCE_BUDGET);
    if estimate.is_none() {
        return Err(Error::EnumerationBudget {
            model: model.to_string(),
            n,
            budget: BRUTE_FORCE_BUDGET,
        });
    }
    let cut_weight = BigRational::new(1.into(), (cuts.len() as i64).into());
    let half = BigRational::new(1.into(), 2.into());
    let mut probs: BTreeMap<Rank, BigRational> = BTreeMap::new();
    for c in &cuts {
        // Degenerate cut: one half is empty, the hand changes nothing.
        if *c == 0 || *c == n {
            let rank = Arrangement::identity(n)?.rank()?;
            *probs.entry(rank).or_insert_with(BigRational::zero) += &cut_weight;
            continue;
        }
        let top: Vec<usize> = (1..=*c).collect();
        let bottom: Vec<usize> = (*c + 1..=n).collect();
        for start_with_top in [true, false] {
            let (current, other) = if start_with_top {
                (top.as_slice(), bottom.as_slice())
            } else {
                (bottom.as_slice(), top.as_slice())
            };
            let mut prefix = Vec::with_capacity(n);
            interleave_paths(
                current,
                other,
                max_packet,
                &(&cut_weight * &half),
                &mut prefix,
                &mut probs,
            )?;
        }
    }
    Ok(StepDistribution::from_accumulated(n, probs))
}

/// Walks every packet-size sequence: take 1..=min(max_packet, |current|)
/// cards from the current half, then swap halves; when a half empties the
/// other is appended whole. Probability splits uniformly at each draw.
fn interleave_paths(
    current: &[usize],
    other: &[usize],
    max_packet: usize,
    prob: &BigRational,
    prefix: &mut Vec<usize>,
    probs: &mut BTreeMap<Rank, BigRational>,
) -> Result<()> {
    let choices = max_packet.min(current.len());
    let branch_prob = prob / BigRational::new((choices as i64).into(), 1.into());
    for take in 1..=choices {
        let depth = prefix.len();
        prefix.extend_from_slice(&current[..take]);
        if take == current.len() {
            prefix.extend_from_slice(other);
            let rank = Arrangement::from_labels(prefix.clone())?.rank()?;
            *probs.entry(rank).or_insert_with(BigRational::zero) += &branch_prob;
        } else {
            interleave_paths(other, &current[take..], max_packet, &branch_prob, prefix, probs)?;
        }
        prefix.truncate(depth);
    }
    Ok(())
}

/// The arrangement one hand of a deterministic shuffle produces.
pub fn deterministic_permutation(model: &ShuffleModel, n: usize) -> Result<Arrangement> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    match model {
        ShuffleModel::FaroOut | ShuffleModel::FaroIn => {
            if n % 2 != 0 {
                return Err(Error::OddFaroDeck { n });
            }
            let half = n / 2;
            let mut labels = Vec::with_capacity(n);
            for i in 1..=half {
                if matches!(model, ShuffleModel::FaroOut) {
                    labels.push(i);
                    labels.push(half + i);
                } else {
                    labels.push(half + i);
                    labels.push(i);
                }
            }
            Arrangement::from_labels(labels)
        }
        ShuffleModel::Mongean => {
            let mut pile: VecDeque<usize> = VecDeque::with_capacity(n);
            pile.push_back(1);
            for card in 2..=n {
                if card % 2 == 0 {
                    pile.push_front(card);
                } else {
                    pile.push_back(card);
                }
            }
            Arrangement::from_labels(pile.into_iter().collect())
        }
        _ => Err(Error::UnsupportedModel {
            model: model.to_string(),
            hint: "only faro and Mongean shuffles are deterministic",
        }),
    }
}

/// Smallest k >= 1 with the k-th iterate equal to identity: the lcm of the
/// cycle lengths of the one-hand permutation.
pub fn deterministic_period(model: &ShuffleModel, n: usize) -> Result<u64> {
    let perm = deterministic_permutation(model, n)?;
    let mut seen = vec![false; n + 1];
    let mut period: u128 = 1;
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        let mut len: u128 = 0;
        let mut pos = start;
        while !seen[pos] {
            seen[pos] = true;
            pos = perm.label_at(pos)?;
            len += 1;
        }
        let g = num::integer::gcd(period, len);
        period = (period / g)
            .checked_mul(len)
            .ok_or(Error::PeriodOverflow { n })?;
    }
    u64::try_from(period).map_err(|_| Error::PeriodOverflow { n })
}

/// Position trajectory of one card under repeated out-faro shuffles,
/// in the doubling arithmetic "2s - 1 (mod n-1), plus 1": interior
/// positions cycle, positions 1 and n never move. Returns hands+1 entries
/// starting with the initial position.
pub fn faro_trace(n: usize, start_position: usize, hands: u32) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    if n % 2 != 0 {
        return Err(Error::OddFaroDeck { n });
    }
    if start_position == 0 || start_position > n {
        return Err(Error::PositionOutOfRange {
            position: start_position,
            n,
        });
    }
    let mut trace = Vec::with_capacity(hands as usize + 1);
    trace.push(start_position);
    let fixed = start_position == 1 || start_position == n;
    let mut pos = start_position;
    for _ in 0..hands {
        if !fixed {
            pos = (2 * pos - 1) % (n - 1) + 1;
        }
        trace.push(pos);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn rank_of(labels: &[usize]) -> Rank {
        Arrangement::from_labels(labels.to_vec()).unwrap().rank().unwrap()
    }

    fn tv_sparse(p: &StepDistribution, q: &StepDistribution) -> BigRational {
        let ranks: std::collections::BTreeSet<Rank> =
            p.iter().map(|(r, _)| *r).chain(q.iter().map(|(r, _)| *r)).collect();
        let sum: BigRational = ranks
            .iter()
            .map(|r| {
                let d = p.prob(*r) - q.prob(*r);
                if d < BigRational::zero() {
                    -d
                } else {
                    d
                }
            })
            .sum();
        sum / rat(2, 1)
    }

    #[test]
    fn top_card_law_n3() {
        let d = single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 3).unwrap();
        assert_eq!(d.support_size(), 3);
        assert_eq!(d.prob(rank_of(&[1, 2, 3])), rat(1, 3));
        assert_eq!(d.prob(rank_of(&[2, 1, 3])), rat(1, 3));
        assert_eq!(d.prob(rank_of(&[2, 3, 1])), rat(1, 3));
        assert!(d.prob(rank_of(&[3, 2, 1])).is_zero());
    }

    #[test]
    fn top_card_law_small_decks() {
        let d1 = single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 1).unwrap();
        assert_eq!(d1.support_size(), 1);
        assert!(d1.prob(Rank(0)).is_one());

        let d2 = single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 2).unwrap();
        assert_eq!(d2.prob(rank_of(&[1, 2])), rat(1, 2));
        assert_eq!(d2.prob(rank_of(&[2, 1])), rat(1, 2));

        let d4 = single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 4).unwrap();
        assert_eq!(d4.support_size(), 4);
        for labels in [[1, 2, 3, 4], [2, 1, 3, 4], [2, 3, 1, 4], [2, 3, 4, 1]] {
            assert_eq!(d4.prob(rank_of(&labels)), rat(1, 4));
        }
    }

    #[test]
    fn gsr_law_n3() {
        let d = single_shuffle_distribution(&ShuffleModel::gsr(), 3).unwrap();
        assert_eq!(d.support_size(), 5);
        assert_eq!(d.prob(rank_of(&[1, 2, 3])), rat(1, 2));
        for labels in [[1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2]] {
            assert_eq!(d.prob(rank_of(&labels)), rat(1, 8));
        }
        assert!(d.prob(rank_of(&[3, 2, 1])).is_zero());
    }

    #[test]
    fn gsr_support_is_at_most_two_rising_sequences() {
        for n in 2..=5usize {
            let d = single_shuffle_distribution(&ShuffleModel::gsr(), n).unwrap();
            for (rank, _) in d.iter() {
                let a = Arrangement::unrank(n, *rank).unwrap();
                assert!(a.rising_sequences() <= 2);
            }
        }
        let d3 = single_shuffle_distribution(&ShuffleModel::gsr(), 3).unwrap();
        let d4 = single_shuffle_distribution(&ShuffleModel::gsr(), 4).unwrap();
        assert_eq!(d3.support_size(), 5);
        assert_eq!(d4.support_size(), 12);
    }

    #[test]
    fn gsr_n4_probabilities_by_rising_sequences() {
        let d = single_shuffle_distribution(&ShuffleModel::gsr(), 4).unwrap();
        assert_eq!(d.prob(rank_of(&[1, 2, 3, 4])), rat(5, 16));
        assert_eq!(d.prob(rank_of(&[3, 1, 4, 2])), rat(1, 16));
        assert!(d.total().is_one());
    }

    #[test]
    fn naive_uniform_law() {
        let d = single_shuffle_distribution(&ShuffleModel::NaiveUniform, 4).unwrap();
        assert_eq!(d.support_size(), 24);
        assert!(d.iter().all(|(_, p)| *p == rat(1, 24)));
    }

    #[test]
    fn step_laws_sum_to_one() {
        for model in [
            ShuffleModel::TopInAtRandom,
            ShuffleModel::gsr(),
            ShuffleModel::GsrRiffle { packets: 3 },
            ShuffleModel::NaiveUniform,
        ] {
            for n in 1..=5usize {
                let d = single_shuffle_distribution(&model, n).unwrap();
                assert!(d.total().is_one(), "{model} n={n}");
            }
        }
    }

    #[test]
    fn closed_form_rejects_physical_and_deterministic() {
        let e = single_shuffle_distribution(&ShuffleModel::physical_default(), 4).unwrap_err();
        assert!(matches!(e, Error::UnsupportedModel { .. }));
        assert!(e.to_string().contains("brute_force_distribution"));

        let e = single_shuffle_distribution(&ShuffleModel::FaroOut, 4).unwrap_err();
        assert!(e.to_string().contains("deterministic_permutation"));
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            single_shuffle_distribution(&ShuffleModel::GsrRiffle { packets: 1 }, 3),
            Err(Error::BadPacketCount { packets: 1 })
        ));
        assert!(matches!(
            brute_force_distribution(
                &ShuffleModel::PhysicalRiffle { cut_spread: 0, max_packet: 0 },
                3
            ),
            Err(Error::BadMaxPacket)
        ));
        assert!(matches!(
            single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 0),
            Err(Error::EmptyDeck)
        ));
    }

    #[test]
    fn brute_force_gsr_matches_closed_form() {
        for n in 1..=6usize {
            let brute = brute_force_distribution(&ShuffleModel::gsr(), n).unwrap();
            let closed = single_shuffle_distribution(&ShuffleModel::gsr(), n).unwrap();
            assert_eq!(brute, closed, "n={n}");
        }
        let brute = brute_force_distribution(&ShuffleModel::GsrRiffle { packets: 4 }, 3).unwrap();
        let closed = single_shuffle_distribution(&ShuffleModel::GsrRiffle { packets: 4 }, 3).unwrap();
        assert_eq!(brute, closed);
    }

    #[test]
    fn brute_force_routes_other_models() {
        let top = brute_force_distribution(&ShuffleModel::TopInAtRandom, 4).unwrap();
        assert_eq!(
            top,
            single_shuffle_distribution(&ShuffleModel::TopInAtRandom, 4).unwrap()
        );
        let faro = brute_force_distribution(&ShuffleModel::FaroOut, 4).unwrap();
        assert_eq!(faro.support_size(), 1);
        assert!(faro.prob(rank_of(&[1, 3, 2, 4])).is_one());
    }

    #[test]
    fn forced_alternation_has_two_atoms() {
        let model = ShuffleModel::PhysicalRiffle { cut_spread: 0, max_packet: 1 };
        let d = brute_force_distribution(&model, 4).unwrap();
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.prob(rank_of(&[1, 3, 2, 4])), rat(1, 2));
        assert_eq!(d.prob(rank_of(&[3, 1, 4, 2])), rat(1, 2));
    }

    #[test]
    fn physical_law_n3_default_noise() {
        let d = brute_force_distribution(&ShuffleModel::physical_default(), 3).unwrap();
        assert_eq!(d.prob(rank_of(&[1, 2, 3])), rat(11, 16));
        assert_eq!(d.prob(rank_of(&[3, 1, 2])), rat(1, 8));
        for labels in [[1, 3, 2], [2, 1, 3], [2, 3, 1]] {
            assert_eq!(d.prob(rank_of(&labels)), rat(1, 16));
        }
        assert!(d.prob(rank_of(&[3, 2, 1])).is_zero());
        assert!(d.total().is_one());
    }

    #[test]
    fn physical_support_stays_in_one_cut_interleaves() {
        for n in 2..=5usize {
            let d = brute_force_distribution(&ShuffleModel::physical_default(), n).unwrap();
            assert!(d.total().is_one());
            for (rank, _) in d.iter() {
                let a = Arrangement::unrank(n, *rank).unwrap();
                assert!(a.rising_sequences() <= 2, "n={n} {a}");
            }
        }
        let d4 = brute_force_distribution(&ShuffleModel::physical_default(), 4).unwrap();
        assert_eq!(d4.support_size(), 12);
    }

    #[test]
    fn physical_vs_gsr_gap_n4() {
        let phys = brute_force_distribution(&ShuffleModel::physical_default(), 4).unwrap();
        let gsr = single_shuffle_distribution(&ShuffleModel::gsr(), 4).unwrap();
        assert_eq!(tv_sparse(&phys, &gsr), rat(37, 120));
    }

    #[test]
    fn enumeration_budget_enforced() {
        let e = brute_force_distribution(&ShuffleModel::physical_default(), 9).unwrap_err();
        assert!(matches!(e, Error::EnumerationBudget { n: 9, .. }));
        assert!(e.is_resource_cap());

        assert!(brute_force_distribution(&ShuffleModel::physical_default(), 8).is_ok());
    }

    #[test]
    fn faro_out_interleave() {
        let a = deterministic_permutation(&ShuffleModel::FaroOut, 8).unwrap();
        assert_eq!(a.labels(), &[1, 5, 2, 6, 3, 7, 4, 8]);
        let a4 = deterministic_permutation(&ShuffleModel::FaroOut, 4).unwrap();
        assert_eq!(a4.labels(), &[1, 3, 2, 4]);
    }

    #[test]
    fn faro_in_interleave() {
        let a = deterministic_permutation(&ShuffleModel::FaroIn, 8).unwrap();
        assert_eq!(a.labels(), &[5, 1, 6, 2, 7, 3, 8, 4]);
    }

    #[test]
    fn faro_rejects_odd_decks() {
        assert!(matches!(
            deterministic_permutation(&ShuffleModel::FaroOut, 7),
            Err(Error::OddFaroDeck { n: 7 })
        ));
        assert!(matches!(
            deterministic_period(&ShuffleModel::FaroIn, 5),
            Err(Error::OddFaroDeck { n: 5 })
        ));
    }

    #[test]
    fn mongean_pile_order() {
        let a = deterministic_permutation(&ShuffleModel::Mongean, 4).unwrap();
        assert_eq!(a.labels(), &[4, 2, 1, 3]);
        let a2 = deterministic_permutation(&ShuffleModel::Mongean, 2).unwrap();
        assert_eq!(a2.labels(), &[2, 1]);
        // Evens descend to the top, odds ascend below card 1.
        let a6 = deterministic_permutation(&ShuffleModel::Mongean, 6).unwrap();
        assert_eq!(a6.labels(), &[6, 4, 2, 1, 3, 5]);
    }

    #[test]
    fn deterministic_periods_full_deck() {
        assert_eq!(deterministic_period(&ShuffleModel::FaroOut, 52).unwrap(), 8);
        assert_eq!(deterministic_period(&ShuffleModel::FaroIn, 52).unwrap(), 52);
        assert_eq!(deterministic_period(&ShuffleModel::Mongean, 52).unwrap(), 12);
    }

    #[test]
    fn deterministic_periods_small_decks() {
        assert_eq!(deterministic_period(&ShuffleModel::FaroOut, 8).unwrap(), 3);
        assert_eq!(deterministic_period(&ShuffleModel::FaroIn, 8).unwrap(), 6);
        assert_eq!(deterministic_period(&ShuffleModel::FaroOut, 2).unwrap(), 1);
        assert_eq!(deterministic_period(&ShuffleModel::Mongean, 1).unwrap(), 1);
        assert_eq!(deterministic_period(&ShuffleModel::Mongean, 4).unwrap(), 3);
    }

    #[test]
    fn period_iterate_returns_to_identity_and_no_sooner() {
        for (model, n) in [
            (ShuffleModel::FaroOut, 8),
            (ShuffleModel::FaroIn, 8),
            (ShuffleModel::Mongean, 7),
            (ShuffleModel::Mongean, 12),
        ] {
            let step = deterministic_permutation(&model, n).unwrap();
            let period = deterministic_period(&model, n).unwrap();
            let mut acc = Arrangement::identity(n).unwrap();
            for k in 1..=period {
                acc = acc.compose(&step).unwrap();
                assert_eq!(acc.is_identity(), k == period, "{model} n={n} k={k}");
            }
        }
    }

    #[test]
    fn trace_matches_doubling_arithmetic() {
        assert_eq!(
            faro_trace(52, 7, 8).unwrap(),
            vec![7, 14, 28, 5, 10, 20, 40, 29, 7]
        );
    }

    #[test]
    fn trace_endpoints_never_move() {
        assert_eq!(faro_trace(52, 1, 4).unwrap(), vec![1, 1, 1, 1, 1]);
        assert_eq!(faro_trace(52, 52, 3).unwrap(), vec![52, 52, 52, 52]);
    }

    #[test]
    fn trace_small_deck_period_three() {
        assert_eq!(faro_trace(8, 2, 6).unwrap(), vec![2, 4, 1, 2, 4, 1, 2]);
    }

    #[test]
    fn trace_every_card_returns_after_eight_hands() {
        for p in 1..=52usize {
            let t = faro_trace(52, p, 8).unwrap();
            assert_eq!(t.len(), 9);
            assert_eq!(t[8], p, "start {p}");
        }
    }

    #[test]
    fn trace_rejects_bad_inputs() {
        assert!(matches!(faro_trace(7, 3, 2), Err(Error::OddFaroDeck { n: 7 })));
        assert!(matches!(
            faro_trace(8, 0, 2),
            Err(Error::PositionOutOfRange { position: 0, n: 8 })
        ));
        assert!(matches!(
            faro_trace(8, 9, 2),
            Err(Error::PositionOutOfRange { position: 9, n: 8 })
        ));
    }

    #[test]
    fn model_names_and_display() {
        assert_eq!(ShuffleModel::gsr().to_string(), "gsr-riffle(2)");
        assert_eq!(
            ShuffleModel::physical_default().to_string(),
            "physical-riffle(5,5)"
        );
        assert_eq!(ShuffleModel::FaroOut.to_string(), "faro-out");
        assert!(ShuffleModel::Mongean.is_deterministic());
        assert!(!ShuffleModel::NaiveUniform.is_deterministic());
    }
}
