//! Deck arrangements as permutations of 1..n, with lexicographic ranking,
//! composition, and rising-sequence counting.

use std::fmt;

use crate::error::{Error, Result};

/// Hard cap for full-S_n enumeration (7! = 5040 arrangements; 8! blows up
/// the dense rational matrices built on top of it).
pub const MAX_ENUMERATION_DECK: usize = 7;

/// Default enumeration cap; raising it up to [`MAX_ENUMERATION_DECK`] is an
/// explicit caller decision.
pub const DEFAULT_ENUMERATION_DECK: usize = 6;

/// A deck ordering: `labels[i]` is the card at position `i + 1`, position 1
/// being the top of the deck. Always a bijection on {1..n}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrangement {
    labels: Vec<usize>,
}

/// Lexicographic index of an arrangement among all n! orderings, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rank(pub u64);

/// n! as u64; only defined through n = 20.
pub fn factorial_u64(n: usize) -> Result<u64> {
    if n > 20 {
        return Err(Error::RankingOverflow { n });
    }
    Ok((1..=n as u64).product())
}

impl Arrangement {
    /// The sorted deck (1, 2, ..., n).
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        Ok(Arrangement {
            labels: (1..=n).collect(),
        })
    }

    /// Builds an arrangement from explicit labels, checking the bijection.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        let mut seen = vec![false; n];
        for &l in &labels {
            if l == 0 || l > n || seen[l - 1] {
                return Err(Error::NotAPermutation { n });
            }
            seen[l - 1] = true;
        }
        Ok(Arrangement { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Card at `position` (1-based, 1 = top).
    pub fn label_at(&self, position: usize) -> Result<usize> {
        if position == 0 || position > self.n() {
            return Err(Error::PositionOutOfRange {
                position,
                n: self.n(),
            });
        }
        Ok(self.labels[position - 1])
    }

    /// 1-based position of `label` in the deck.
    pub fn position_of(&self, label: usize) -> Result<usize> {
        if label == 0 || label > self.n() {
            return Err(Error::PositionOutOfRange {
                position: label,
                n: self.n(),
            });
        }
        // labels is a bijection, so the scan always hits.
        Ok(self.labels.iter().position(|&l| l == label).unwrap() + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i + 1)
    }

    /// Lexicographic rank via the Lehmer code.
    pub fn rank(&self) -> Result<Rank> {
        let n = self.n();
        factorial_u64(n)?;
        let mut rank: u64 = 0;
        // Lehmer digit for position i counts smaller labels to its right.
        for i in 0..n {
            let smaller = self.labels[i + 1..]
                .iter()
                .filter(|&&l| l < self.labels[i])
                .count() as u64;
            rank += smaller * factorial_u64(n - 1 - i)?;
        }
        Ok(Rank(rank))
    }

    /// Inverse of [`Arrangement::rank`]: factorial-number-system decoding.
    pub fn unrank(n: usize, rank: Rank) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDeck);
        }
        let total = factorial_u64(n)?;
        if rank.0 >= total {
            return Err(Error::RankOutOfRange { rank: rank.0, n });
        }
        let mut pool: Vec<usize> = (1..=n).collect();
        let mut labels = Vec::with_capacity(n);
        let mut r = rank.0;
        for i in 0..n {
            let f = factorial_u64(n - 1 - i)?;
            let idx = (r / f) as usize;
            r %= f;
            labels.push(pool.remove(idx));
        }
        Ok(Arrangement { labels })
    }

    /// Functional composition: `(self ∘ g)(i) = self(g(i))`, reading an
    /// arrangement as the map position → label.
    pub fn compose(&self, g: &Arrangement) -> Result<Self> {
        if self.n() != g.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: g.n(),
            });
        }
        Ok(Arrangement {
            labels: g.labels.iter().map(|&l| self.labels[l - 1]).collect(),
        })
    }

    /// Two-sided inverse under [`Arrangement::compose`].
    pub fn inverse(&self) -> Self {
        let mut labels = vec![0; self.n()];
        for (i, &l) in self.labels.iter().enumerate() {
            labels[l - 1] = i + 1;
        }
        Arrangement { labels }
    }

    /// Number of rising sequences: maximal runs of consecutive labels
    /// v, v+1, ... appearing in increasing positions. Equals
    /// 1 + #{v : position(v+1) < position(v)}.
    pub fn rising_sequences(&self) -> usize {
        let n = self.n();
        let mut pos = vec![0usize; n + 1];
        for (i, &l) in self.labels.iter().enumerate() {
            pos[l] = i;
        }
        1 + (1..n).filter(|&v| pos[v + 1] < pos[v]).count()
    }

    /// Digit string for n ≤ 9 ("213"), comma-separated labels above.
    pub fn deck_string(&self) -> String {
        if self.n() <= 9 {
            self.labels.iter().map(|l| l.to_string()).collect()
        } else {
            self.labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.deck_string())
    }
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arrangement({})", self.deck_string())
    }
}

/// All n! arrangements in lexicographic order. Hard-capped at
/// [`MAX_ENUMERATION_DECK`]; pass the cap the caller is willing to pay for.
pub fn enumerate(n: usize, cap: usize) -> Result<Vec<Arrangement>> {
    if n == 0 {
        return Err(Error::EmptyDeck);
    }
    let cap = cap.min(MAX_ENUMERATION_DECK);
    if n > cap {
        return Err(Error::DeckTooLarge { n, cap });
    }
    // Next-permutation walk; independent of the Lehmer unrank path.
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(factorial_u64(n)? as usize);
    loop {
        out.push(Arrangement { labels: cur.clone() });
        // Find the rightmost ascent.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    Ok(out)
}
