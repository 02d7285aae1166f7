//! Large-n analytics that avoid n!-sized state: Eulerian numbers, the
//! a-shuffle closed form, the coupling upper bound on mixing, and cutoff
//! estimation. Everything is exact rational until rendered.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::markov::{CurveMethod, DistanceCurve, Scalar};

/// A(n, r) for r = 1..=n: arrangements of n cards with exactly r rising
/// sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianTable {
    n: usize,
    counts: Vec<BigInt>,
}

impl EulerianTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    pub fn count(&self, r: usize) -> Result<&BigInt> {
        if r == 0 || r > self.n {
            return Err(Error::RisingCountOutOfRange { r, n: self.n });
        }
        Ok(&self.counts[r - 1])
    }

    pub fn sum(&self) -> BigInt {
        self.counts.iter().sum()
    }
}

/// Builds A(n, r) by the recurrence
/// A(n, r) = r·A(n−1, r) + (n−r+1)·A(n−1, r−1), A(1, 1) = 1.
pub fn eulerian(n: usize) -> Result<EulerianTable> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    let mut row = vec![BigInt::one()];
    for m in 2..=n {
        let mut next = vec![BigInt::zero(); m];
        for (i, v) in row.iter().enumerate() {
            let r = i + 1;
            next[i] += v * BigInt::from(r);
            next[i + 1] += v * BigInt::from(m - r);
        }
        row = next;
    }
    Ok(EulerianTable { n, counts: row })
}

pub fn factorial_big(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// P(arrangement with r rising sequences | one a-shuffle) =
/// C(a + n − r, n) / aⁿ, zero when a < r.
pub fn a_shuffle_probability(a: u64, n: usize, r: usize) -> Result<BigRational> {
    if a == 0 {
        return Err(Error::BadPacketCount { packets: 0 });
    }
    a_shuffle_probability_big(&BigInt::from(a), n, r)
}

fn a_shuffle_probability_big(a: &BigInt, n: usize, r: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    if r == 0 || r > n {
        return Err(Error::RisingCountOutOfRange { r, n });
    }
    // a < r makes the binomial vanish; returning early keeps the falling
    // factorial free of nonpositive terms.
    if a < &BigInt::from(r) {
        return Ok(BigRational::zero());
    }
    let top = num::integer::binomial(a + BigInt::from(n - r), BigInt::from(n));
    Ok(BigRational::new(top, a.pow(n as u32)))
}

/// The k-riffle special case: a = 2ᵏ.
pub fn riffle_k_probability(n: usize, k: u32, r: usize) -> Result<BigRational> {
    a_shuffle_probability_big(&(BigInt::one() << k), n, r)
}

/// d(k) = ½ Σ_r A(n, r) · |C(2ᵏ+n−r, n)/2ᵏⁿ − 1/n!| for k = 0..=k_max,
/// grouped by rising-sequence count so only n terms are summed per k.
pub fn riffle_distance_closed_form(n: usize, k_max: u32) -> Result<DistanceCurve<BigRational>> {
    let table = eulerian(n)?;
    let uniform = BigRational::new(BigInt::one(), factorial_big(n));
    let mut points = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let mut sum = BigRational::zero();
        for r in 1..=n {
            let gap = (riffle_k_probability(n, k, r)? - &uniform).abs();
            sum += BigRational::from(table.count(r)?.clone()) * gap;
        }
        points.push((k, sum / BigRational::from(BigInt::from(2))));
    }
    DistanceCurve::new(n, "gsr-riffle", CurveMethod::ClosedForm, points)
}

/// Deck size and hand count the coupling bound is evaluated at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    n: usize,
    k: u32,
}

impl BoundParams {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        Ok(BoundParams { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// Coupling upper bound on the riffle's distance to uniformity:
/// 1 − ∏_{j=1}^{n−1} (1 − j/2ᵏ), clamped to 1 when 2ᵏ ≤ n−1 (some factor
/// is nonpositive and the probability reading forces the bound to 1).
pub fn coupling_bound(p: &BoundParams) -> BigRational {
    let two_k = BigInt::one() << p.k;
    if p.n >= 2 && two_k <= BigInt::from(p.n - 1) {
        return BigRational::one();
    }
    let mut prod = BigRational::one();
    for j in 1..p.n {
        prod *= BigRational::one() - BigRational::new(BigInt::from(j), two_k.clone());
    }
    BigRational::one() - prod
}

/// The bound as a curve over k = 0..=k_max.
pub fn coupling_bound_curve(n: usize, k_max: u32) -> Result<DistanceCurve<BigRational>> {
    let points = (0..=k_max)
        .map(|k| Ok((k, coupling_bound(&BoundParams::new(n, k)?))))
        .collect::<Result<Vec<_>>>()?;
    DistanceCurve::new(n, "gsr-riffle", CurveMethod::Bound, points)
}

/// Which mixing-time estimate to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffModel {
    Riffle,
    TopCard,
}

/// Hands-to-mix estimate: (3/2)·log₂ n for the riffle, n·log₂ n for
/// top-in-at-random. Deliberately floating point; these are asymptotic
/// scales, not exact quantities.
pub fn cutoff_estimate(model: CutoffModel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    let lg = (n as f64).log2();
    Ok(match model {
        CutoffModel::Riffle => 1.5 * lg,
        CutoffModel::TopCard => n as f64 * lg,
    })
}

/// Smallest k on the curve with d(k) ≤ threshold, or `None` when the curve
/// never crosses. The threshold must lie strictly inside (0, 1).
pub fn cutoff_detect<S: Scalar>(curve: &DistanceCurve<S>, threshold: &S) -> Result<Option<u32>> {
    if curve.points().is_empty() {
        return Err(Error::EmptyCurve);
    }
    if *threshold <= S::zero() || *threshold >= S::one() {
        return Err(Error::ThresholdOutOfRange);
    }
    Ok(curve
        .points()
        .iter()
        .find(|(_, d)| d <= threshold)
        .map(|(k, _)| *k))
}
