//! Exact-rational Markov-chain machinery for shuffle walks on S_n:
//! transition matrices, matrix powers, distribution evolution, and total
//! variation distance.
//!
//! Distributions, matrices and curves are generic over the scalar: the
//! engine itself runs on [`crate::Rational`] so that nothing is ever
//! rounded, while the same code instantiated at `f64` serves the empirical
//! estimators.

use std::fmt;

use num::traits::Num;
use num::{BigRational, Signed, Zero};

use crate::decimal;
use crate::error::{Error, Result};
use crate::models::{exact_step_distribution, ShuffleModel, StepDistribution};
use crate::perm::{enumerate, factorial_u64, Arrangement, Rank, MAX_ENUMERATION_DECK};

/// Largest deck for which dense n!-vectors are allocated (8! = 40320).
pub const MAX_DISTRIBUTION_DECK: usize = 8;

/// Scalar the engine is generic over. `BigRational` gives the exact engine;
/// `f64` gives the empirical one.
pub trait Scalar: Num + Signed + Clone + PartialOrd {
    fn from_rational(r: &BigRational) -> Self;
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        decimal::approx_f64(r)
    }
}

/// Probability vector over all n! arrangements, indexed by lexicographic rank.
#[derive(Clone, PartialEq)]
pub struct Distribution<S> {
    n: usize,
    probs: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    fn zeroed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        if n > MAX_DISTRIBUTION_DECK {
            return Err(Error::DeckTooLarge {
                n,
                cap: MAX_DISTRIBUTION_DECK,
            });
        }
        let len = factorial_u64(n)? as usize;
        Ok(Distribution {
            n,
            probs: vec![S::zero(); len],
        })
    }

    /// All mass on one arrangement.
    pub fn point_mass(n: usize, at: Rank) -> Result<Self> {
        let mut d = Self::zeroed(n)?;
        let idx = at.0 as usize;
        if idx >= d.probs.len() {
            return Err(Error::RankOutOfRange { rank: at.0, n });
        }
        d.probs[idx] = S::one();
        Ok(d)
    }

    /// The stationary law of every shuffle walk: 1/n! everywhere.
    pub fn uniform(n: usize) -> Result<Self> {
        let mut d = Self::zeroed(n)?;
        let w = BigRational::new(1.into(), factorial_u64(n)?.into());
        let w = S::from_rational(&w);
        for p in &mut d.probs {
            *p = w.clone();
        }
        Ok(d)
    }

    /// Densifies a sparse single-step law.
    pub fn from_step(step: &StepDistribution) -> Result<Self> {
        let mut d = Self::zeroed(step.n())?;
        for (rank, prob) in step.iter() {
            d.probs[rank.0 as usize] = S::from_rational(prob);
        }
        Ok(d)
    }

    /// Wraps a full probability vector; the length must be exactly n!.
    pub fn from_probs(n: usize, probs: Vec<S>) -> Result<Self> {
        let d = Self::zeroed(n)?;
        if probs.len() != d.probs.len() {
            return Err(Error::SizeMismatch {
                left: probs.len(),
                right: d.probs.len(),
            });
        }
        Ok(Distribution { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, rank: Rank) -> Option<&S> {
        self.probs.get(rank.0 as usize)
    }

    pub fn total(&self) -> S {
        let mut t = S::zero();
        for p in &self.probs {
            t = t + p.clone();
        }
        t
    }
}

impl<S: fmt::Debug> fmt::Debug for Distribution<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Distribution(n={}, {:?})", self.n, self.probs)
    }
}

/// Total variation distance: half the L1 distance between two laws.
pub fn tv_distance<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Result<S> {
    if p.n != q.n {
        return Err(Error::SizeMismatch {
            left: p.n,
            right: q.n,
        });
    }
    let mut sum = S::zero();
    for (a, b) in p.probs.iter().zip(&q.probs) {
        sum = sum + (a.clone() - b.clone()).abs();
    }
    Ok(sum / (S::one() + S::one()))
}

/// Row-stochastic n!×n! single-step matrix. Row index = source rank, column
/// index = target rank; every row is the translate of the identity row
/// (`M[σ][σ∘p] = Q(p)`), the random-walk structure of a shuffle chain.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<S> {
    n: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TransitionMatrix<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, source: Rank) -> Option<&[S]> {
        self.rows.get(source.0 as usize).map(|r| r.as_slice())
    }

    pub fn entry(&self, source: Rank, target: Rank) -> Option<&S> {
        self.rows.get(source.0 as usize)?.get(target.0 as usize)
    }

    pub fn identity_matrix(n: usize, m: usize) -> Self {
        let mut rows = vec![vec![S::zero(); m]; m];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = S::one();
        }
        TransitionMatrix { n, rows }
    }

    pub fn row_sums(&self) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                let mut t = S::zero();
                for v in row {
                    t = t + v.clone();
                }
                t
            })
            .collect()
    }
}

/// Builds the one-step matrix for any model with an exact step law.
/// `cap` bounds the deck size (never above [`MAX_ENUMERATION_DECK`]).
pub fn transition_matrix<S: Scalar>(
    model: &ShuffleModel,
    n: usize,
    cap: usize,
) -> Result<TransitionMatrix<S>> {
    let step = exact_step_distribution(model, n)?;
    let all = enumerate(n, cap)?;
    let m = all.len();
    // Step law over position-permutations p, pre-unranked once.
    let translations: Vec<(Arrangement, S)> = step
        .iter()
        .map(|(rank, prob)| {
            Ok((
                Arrangement::unrank(n, *rank)?,
                S::from_rational(prob),
            ))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(m);
    for sigma in &all {
        let mut row = vec![S::zero(); m];
        for (p, prob) in &translations {
            let target = sigma.compose(p)?.rank()?;
            let cell = &mut row[target.0 as usize];
            *cell = cell.clone() + prob.clone();
        }
        rows.push(row);
    }
    Ok(TransitionMatrix { n, rows })
}

fn mat_mul<S: Scalar>(a: &TransitionMatrix<S>, b: &TransitionMatrix<S>) -> TransitionMatrix<S> {
    let m = a.rows.len();
    let mut rows = vec![vec![S::zero(); m]; m];
    for i in 0..m {
        for (k, aik) in a.rows[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b.rows[k].iter().enumerate() {
                if bkj.is_zero() {
                    continue;
                }
                let cell = &mut rows[i][j];
                *cell = cell.clone() + aik.clone() * bkj.clone();
            }
        }
    }
    TransitionMatrix { n: a.n, rows }
}

/// Exact k-th power by repeated squaring; with exact scalars this equals
/// iterated multiplication. `power(M, 0)` is the identity matrix.
pub fn matrix_power<S: Scalar>(m: &TransitionMatrix<S>, k: u32) -> TransitionMatrix<S> {
    let mut result = TransitionMatrix::identity_matrix(m.n, m.rows.len());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base);
        }
    }
    result
}

/// Row-vector evolution d·Mᵏ.
pub fn evolve<S: Scalar>(
    d: &Distribution<S>,
    m: &TransitionMatrix<S>,
    k: u32,
) -> Result<Distribution<S>> {
    if d.n != m.n || d.probs.len() != m.rows.len() {
        return Err(Error::SizeMismatch {
            left: d.n,
            right: m.n,
        });
    }
    let mut cur = d.clone();
    for _ in 0..k {
        let mut next = vec![S::zero(); cur.probs.len()];
        for (i, w) in cur.probs.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (j, mij) in m.rows[i].iter().enumerate() {
                if mij.is_zero() {
                    continue;
                }
                let cell = &mut next[j];
                *cell = cell.clone() + w.clone() * mij.clone();
            }
        }
        cur = Distribution {
            n: cur.n,
            probs: next,
        };
    }
    Ok(cur)
}

/// One sparse step of the walk: out[σ∘p] += d[σ]·Q(p). Identical to one
/// dense multiply, without materializing the matrix.
fn evolve_by_step(
    d: &Distribution<BigRational>,
    step: &StepDistribution,
    translations: &[(Arrangement, BigRational)],
    n: usize,
) -> Result<Distribution<BigRational>> {
    debug_assert_eq!(d.n, step.n());
    let mut next = vec![BigRational::zero(); d.probs.len()];
    for (idx, w) in d.probs.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let sigma = Arrangement::unrank(n, Rank(idx as u64))?;
        for (p, prob) in translations {
            let target = sigma.compose(p)?.rank()?;
            let cell = &mut next[target.0 as usize];
            *cell = &*cell + &(w * prob);
        }
    }
    Ok(Distribution { n: d.n, probs: next })
}

/// How a [`DistanceCurve`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveMethod {
    Exact,
    ClosedForm,
    Bound,
    Empirical,
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveMethod::Exact => "exact",
            CurveMethod::ClosedForm => "closed-form",
            CurveMethod::Bound => "bound",
            CurveMethod::Empirical => "empirical",
        })
    }
}

/// Sequence of (hands k, distance d(k)) with provenance. k is strictly
/// increasing and every d lies in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceCurve<S> {
    n: usize,
    model: String,
    method: CurveMethod,
    points: Vec<(u32, S)>,
}

impl<S: Scalar> DistanceCurve<S> {
    pub fn new(
        n: usize,
        model: impl Into<String>,
        method: CurveMethod,
        points: Vec<(u32, S)>,
    ) -> Result<Self> {
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::EmptyCurve);
            }
        }
        for (_, d) in &points {
            if *d < S::zero() || *d > S::one() {
                return Err(Error::ThresholdOutOfRange);
            }
        }
        Ok(DistanceCurve {
            n,
            model: model.into(),
            method,
            points,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn method(&self) -> CurveMethod {
        self.method
    }

    pub fn points(&self) -> &[(u32, S)] {
        &self.points
    }

    pub fn value_at(&self, k: u32) -> Option<&S> {
        self.points
            .iter()
            .find_map(|(kk, d)| (*kk == k).then_some(d))
    }
}

/// Exact distance-to-uniformity curve d(k) for k = 0..=k_max, starting from
/// the point mass at identity. d(0) = 1 − 1/n!.
pub fn distance_curve_exact(
    model: &ShuffleModel,
    n: usize,
    k_max: u32,
    cap: usize,
) -> Result<DistanceCurve<BigRational>> {
    let cap = cap.min(MAX_ENUMERATION_DECK);
    if n > cap {
        return Err(Error::DeckTooLarge { n, cap });
    }
    let step = exact_step_distribution(model, n)?;
    let translations: Vec<(Arrangement, BigRational)> = step
        .iter()
        .map(|(rank, prob)| Ok((Arrangement::unrank(n, *rank)?, prob.clone())))
        .collect::<Result<_>>()?;
    let uniform = Distribution::<BigRational>::uniform(n)?;
    let mut d = Distribution::<BigRational>::point_mass(n, Rank(0))?;
    let mut points = Vec::with_capacity(k_max as usize + 1);
    points.push((0, tv_distance(&d, &uniform)?));
    for k in 1..=k_max {
        d = evolve_by_step(&d, &step, &translations, n)?;
        points.push((k, tv_distance(&d, &uniform)?));
    }
    DistanceCurve::new(n, model.name(), CurveMethod::Exact, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::DEFAULT_ENUMERATION_DECK;
    use num::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn top() -> ShuffleModel {
        ShuffleModel::TopInAtRandom
    }

    fn gsr() -> ShuffleModel {
        ShuffleModel::GsrRiffle { packets: 2 }
    }

    #[test]
    fn uniform_and_point_mass_basics() {
        let u = Distribution::<BigRational>::uniform(3).unwrap();
        assert!(u.probs().iter().all(|p| *p == rat(1, 6)));
        assert!(u.total().is_one());

        let p = Distribution::<BigRational>::point_mass(3, Rank(2)).unwrap();
        assert!(p.prob(Rank(2)).unwrap().is_one());
        assert!(p.total().is_one());
    }

    #[test]
    fn distribution_cap() {
        assert!(Distribution::<f64>::uniform(8).is_ok());
        assert!(matches!(
            Distribution::<f64>::uniform(9),
            Err(Error::DeckTooLarge { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn tv_point_mass_to_uniform_is_one_minus_inverse_factorial() {
        let p = Distribution::<BigRational>::point_mass(3, Rank(0)).unwrap();
        let u = Distribution::<BigRational>::uniform(3).unwrap();
        assert_eq!(tv_distance(&p, &u).unwrap(), rat(5, 6));
    }

    #[test]
    fn tv_self_is_zero_and_symmetric() {
        let p = Distribution::<BigRational>::point_mass(4, Rank(7)).unwrap();
        let u = Distribution::<BigRational>::uniform(4).unwrap();
        assert!(tv_distance(&p, &p).unwrap().is_zero());
        assert_eq!(
            tv_distance(&p, &u).unwrap(),
            tv_distance(&u, &p).unwrap()
        );
    }

    #[test]
    fn top_card_identity_row_n3() {
        let m = transition_matrix::<BigRational>(&top(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let row = m.row(Rank(0)).unwrap();
        let expect = [
            rat(1, 3),
            rat(0, 1),
            rat(1, 3),
            rat(1, 3),
            rat(0, 1),
            rat(0, 1),
        ];
        assert_eq!(row, expect);
    }

    #[test]
    fn gsr_identity_row_n3() {
        let m = transition_matrix::<BigRational>(&gsr(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let row = m.row(Rank(0)).unwrap();
        let expect = [
            rat(1, 2),
            rat(1, 8),
            rat(1, 8),
            rat(1, 8),
            rat(1, 8),
            rat(0, 1),
        ];
        assert_eq!(row, expect);
    }

    #[test]
    fn rows_are_stochastic_and_translation_invariant() {
        for model in [top(), gsr(), ShuffleModel::NaiveUniform] {
            let m =
                transition_matrix::<BigRational>(&model, 4, DEFAULT_ENUMERATION_DECK).unwrap();
            assert_eq!(m.size(), 24);
            assert!(m.row_sums().iter().all(|s| s.is_one()), "{model}");

            // M[σ][σ∘p] = M[id][p] on a sample of (σ, p) pairs.
            let id_row = m.row(Rank(0)).unwrap().to_vec();
            for sigma_rank in [1u64, 5, 11, 17, 23] {
                let sigma = Arrangement::unrank(4, Rank(sigma_rank)).unwrap();
                for p_rank in 0..24u64 {
                    let p = Arrangement::unrank(4, Rank(p_rank)).unwrap();
                    let target = sigma.compose(&p).unwrap().rank().unwrap();
                    assert_eq!(
                        m.entry(Rank(sigma_rank), target).unwrap(),
                        &id_row[p_rank as usize],
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_power_zero_is_identity() {
        let m = transition_matrix::<BigRational>(&top(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let p0 = matrix_power(&m, 0);
        for i in 0..6u64 {
            for j in 0..6u64 {
                let want = if i == j { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(p0.entry(Rank(i), Rank(j)).unwrap(), &want);
            }
        }
    }

    #[test]
    fn top_card_two_step_identity_row() {
        let m = transition_matrix::<BigRational>(&top(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let m2 = matrix_power(&m, 2);
        let expect = [
            rat(2, 9),
            rat(1, 9),
            rat(2, 9),
            rat(2, 9),
            rat(1, 9),
            rat(1, 9),
        ];
        assert_eq!(m2.row(Rank(0)).unwrap(), expect);
    }

    #[test]
    fn gsr_two_step_identity_row_is_four_shuffle_law() {
        let m = transition_matrix::<BigRational>(&gsr(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let m2 = matrix_power(&m, 2);
        let row = m2.row(Rank(0)).unwrap();
        for (r, a) in enumerate(3, DEFAULT_ENUMERATION_DECK).unwrap().iter().enumerate() {
            let want = match a.rising_sequences() {
                1 => rat(20, 64),
                2 => rat(10, 64),
                _ => rat(4, 64),
            };
            assert_eq!(&row[r], &want, "rank {r}");
        }
    }

    #[test]
    fn repeated_squaring_matches_iterated_multiplication() {
        let m = transition_matrix::<BigRational>(&gsr(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let mut iterated = TransitionMatrix::identity_matrix(3, 6);
        for k in 0..=5u32 {
            assert_eq!(matrix_power(&m, k), iterated, "k={k}");
            iterated = mat_mul(&iterated, &m);
        }
    }

    #[test]
    fn evolve_matches_matrix_power_row() {
        let m = transition_matrix::<BigRational>(&top(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let d0 = Distribution::<BigRational>::point_mass(3, Rank(0)).unwrap();
        for k in 0..=4u32 {
            let via_evolve = evolve(&d0, &m, k).unwrap();
            let via_power = matrix_power(&m, k);
            assert_eq!(via_evolve.probs(), via_power.row(Rank(0)).unwrap());
            assert!(via_evolve.total().is_one());
        }
    }

    #[test]
    fn evolve_three_steps_top_n3() {
        let m = transition_matrix::<BigRational>(&top(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let d0 = Distribution::<BigRational>::point_mass(3, Rank(0)).unwrap();
        let d3 = evolve(&d0, &m, 3).unwrap();
        let expect = [
            rat(5, 27),
            rat(4, 27),
            rat(5, 27),
            rat(5, 27),
            rat(4, 27),
            rat(4, 27),
        ];
        assert_eq!(d3.probs(), expect);
    }

    #[test]
    fn uniform_is_stationary() {
        for model in [top(), gsr(), ShuffleModel::NaiveUniform] {
            let m =
                transition_matrix::<BigRational>(&model, 4, DEFAULT_ENUMERATION_DECK).unwrap();
            let u = Distribution::<BigRational>::uniform(4).unwrap();
            for k in [1u32, 3] {
                assert_eq!(evolve(&u, &m, k).unwrap(), u, "{model} k={k}");
            }
        }
    }

    #[test]
    fn exact_curve_top_n3() {
        let c = distance_curve_exact(&top(), 3, 3, DEFAULT_ENUMERATION_DECK).unwrap();
        assert_eq!(c.value_at(0).unwrap(), &rat(5, 6));
        assert_eq!(c.value_at(1).unwrap(), &rat(1, 2));
        assert_eq!(c.value_at(2).unwrap(), &rat(1, 6));
        assert_eq!(c.value_at(3).unwrap(), &rat(1, 18));
    }

    #[test]
    fn exact_curve_gsr_n3() {
        let c = distance_curve_exact(&gsr(), 3, 3, DEFAULT_ENUMERATION_DECK).unwrap();
        assert_eq!(c.value_at(0).unwrap(), &rat(5, 6));
        assert_eq!(c.value_at(1).unwrap(), &rat(1, 3));
        assert_eq!(c.value_at(2).unwrap(), &rat(7, 48));
        assert_eq!(c.value_at(3).unwrap(), &rat(13, 192));
    }

    #[test]
    fn exact_curve_top_n4_first_points() {
        let c = distance_curve_exact(&top(), 4, 3, DEFAULT_ENUMERATION_DECK).unwrap();
        assert_eq!(c.value_at(0).unwrap(), &rat(23, 24));
        assert_eq!(c.value_at(1).unwrap(), &rat(5, 6));
        assert_eq!(c.value_at(2).unwrap(), &rat(1, 2));
        assert_eq!(c.value_at(3).unwrap(), &rat(5, 16));
    }

    #[test]
    fn sparse_curve_equals_dense_matrix_path() {
        for model in [top(), gsr()] {
            let c = distance_curve_exact(&model, 4, 5, DEFAULT_ENUMERATION_DECK).unwrap();
            let m =
                transition_matrix::<BigRational>(&model, 4, DEFAULT_ENUMERATION_DECK).unwrap();
            let d0 = Distribution::<BigRational>::point_mass(4, Rank(0)).unwrap();
            let u = Distribution::<BigRational>::uniform(4).unwrap();
            for k in 0..=5u32 {
                let dk = evolve(&d0, &m, k).unwrap();
                assert_eq!(
                    c.value_at(k).unwrap(),
                    &tv_distance(&dk, &u).unwrap(),
                    "{model} k={k}"
                );
            }
        }
    }

    #[test]
    fn curve_rejects_bad_points() {
        assert!(DistanceCurve::new(
            3,
            "x",
            CurveMethod::Exact,
            vec![(0, rat(1, 2)), (0, rat(1, 3))]
        )
        .is_err());
        assert!(DistanceCurve::new(3, "x", CurveMethod::Exact, vec![(0, rat(3, 2))]).is_err());
    }

    #[test]
    fn curve_cap_respected() {
        assert!(matches!(
            distance_curve_exact(&top(), 7, 1, DEFAULT_ENUMERATION_DECK),
            Err(Error::DeckTooLarge { n: 7, cap: 6 })
        ));
        assert!(distance_curve_exact(&top(), 5, 1, MAX_ENUMERATION_DECK).is_ok());
    }

    #[test]
    fn f64_instantiation_tracks_exact_engine() {
        let exact =
            transition_matrix::<BigRational>(&gsr(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let float = transition_matrix::<f64>(&gsr(), 3, DEFAULT_ENUMERATION_DECK).unwrap();
        let pe = Distribution::<BigRational>::point_mass(3, Rank(0)).unwrap();
        let pf = Distribution::<f64>::point_mass(3, Rank(0)).unwrap();
        let ue = Distribution::<BigRational>::uniform(3).unwrap();
        let uf = Distribution::<f64>::uniform(3).unwrap();
        for k in 0..=4u32 {
            let de = tv_distance(&evolve(&pe, &exact, k).unwrap(), &ue).unwrap();
            let df = tv_distance(&evolve(&pf, &float, k).unwrap(), &uf).unwrap();
            assert!((decimal::approx_f64(&de) - df).abs() < 1e-12, "k={k}");
        }
    }
}
