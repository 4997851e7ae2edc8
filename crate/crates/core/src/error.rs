use crate::election::{CandidateSet, Rational};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("candidate count {0} is outside 1..=64")]
    CandidateCount(usize),
    #[error("committee size {k} is outside 1..={m}")]
    CommitteeSize { k: usize, m: usize },
    #[error("ballot {0} is empty")]
    EmptyBallot(CandidateSet),
    #[error("ballot {ballot} names candidates beyond c{m}")]
    BallotOutOfRange { ballot: CandidateSet, m: usize },
    #[error("ballot {ballot} has negative weight {weight}")]
    NegativeWeight { ballot: CandidateSet, weight: Rational },
    #[error("ballot weights sum to {0}, not 1")]
    WeightSum(Rational),
    #[error("profile has no voters")]
    NoVoters,
    #[error("enumeration of {count} committees exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },
    #[error("deviation search over m = {m} candidates exceeds the cap of {cap}")]
    CandidateCap { m: usize, cap: usize },
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("invalid deviation shape: {0}")]
    InvalidShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
