use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deck size must be at least 1")]
    EmptyDeck,

    #[error("labels must be a permutation of 1..={n}")]
    NotAPermutation { n: usize },

    #[error("deck size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("rank {rank} out of range for deck size {n}")]
    RankOutOfRange { rank: u64, n: usize },

    #[error("deck size {n} exceeds the cap of {cap} for this operation")]
    DeckTooLarge { n: usize, cap: usize },

    #[error("lexicographic ranks need deck size <= 20, got {n}")]
    RankingOverflow { n: usize },

    #[error("{model} has no tractable exact single-step law here; {hint}")]
    UnsupportedModel { model: String, hint: &'static str },

    #[error("GSR packet count must be at least 2, got {packets}")]
    BadPacketCount { packets: u32 },

    #[error("physical riffle max packet size must be at least 1")]
    BadMaxPacket,

    #[error("faro shuffles need an even deck size, got {n}")]
    OddFaroDeck { n: usize },

    #[error("position {position} outside 1..={n}")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("rising-sequence count {r} outside 1..={n}")]
    RisingCountOutOfRange { r: usize, n: usize },

    #[error("choice tree for {model} at n={n} exceeds the budget of {budget} paths")]
    EnumerationBudget { model: String, n: usize, budget: u64 },

    #[error("shuffle period at n={n} overflows a 64-bit integer")]
    PeriodOverflow { n: usize },

    #[error("trial count must be at least 1")]
    NoTrials,

    #[error("threshold must lie strictly between 0 and 1")]
    ThresholdOutOfRange,

    #[error("distance curve is empty")]
    EmptyCurve,
}

impl Error {
    /// True for errors that signal a size/resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::DeckTooLarge { .. }
                | Error::RankingOverflow { .. }
                | Error::EnumerationBudget { .. }
        )
    }
}
