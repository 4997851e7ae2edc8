//! Core and Droop-core verification by exhaustive deviation search.
//!
//! A deviation `T` is supported by the ballots that strictly prefer it,
//! `u_A(T) > u_A(W)`. Under the Hare quota `T` succeeds when its support is at
//! least `|T|/k`; under the Droop quota when it exceeds `|T|/(k+1)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::election::{
    subsets_of_size, utility, CandidateSet, ElectionInstance, IntegerWeights, Profile, Rational,
};
use crate::error::{Error, Result};

/// Default cap on `m` for exhaustive deviation search.
pub const DEFAULT_MAX_CANDIDATES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quota {
    Hare,
    Droop,
}

impl Quota {
    /// `|T|/k` (Hare) or `|T|/(k+1)` (Droop).
    pub fn threshold(self, deviation_size: usize, k: usize) -> Rational {
        Rational::new(BigInt::from(deviation_size), BigInt::from(self.divisor(k)))
    }

    fn divisor(self, k: usize) -> usize {
        match self {
            Quota::Hare => k,
            Quota::Droop => k + 1,
        }
    }

    /// Whether `support` makes a deviation of the given size succeed.
    pub fn is_success(self, support: &Rational, deviation_size: usize, k: usize) -> bool {
        let threshold = self.threshold(deviation_size, k);
        match self {
            Quota::Hare => *support >= threshold,
            Quota::Droop => *support > threshold,
        }
    }

    /// Integer form of [`Quota::is_success`] for support `numerator / denominator`.
    fn is_success_scaled(self, numerator: &BigInt, denominator: &BigInt, deviation_size: usize, k: usize) -> bool {
        let lhs = numerator * BigInt::from(self.divisor(k));
        let rhs = denominator * BigInt::from(deviation_size);
        match self {
            Quota::Hare => lhs >= rhs,
            Quota::Droop => lhs > rhs,
        }
    }
}

impl fmt::Display for Quota {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quota::Hare => "hare",
            Quota::Droop => "droop",
        })
    }
}

impl std::str::FromStr for Quota {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hare" => Ok(Quota::Hare),
            "droop" => Ok(Quota::Droop),
            other => Err(format!("unknown quota {other:?} (expected hare or droop)")),
        }
    }
}

/// A deviation with its supporters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationReport {
    pub deviation: CandidateSet,
    pub support: Rational,
    pub threshold: Rational,
    pub quota: Quota,
    /// Ballots `A` with `u_A(T) > u_A(W)`.
    pub supporters: Vec<CandidateSet>,
}

impl DeviationReport {
    pub fn is_success(&self) -> bool {
        match self.quota {
            Quota::Hare => self.support >= self.threshold,
            Quota::Droop => self.support > self.threshold,
        }
    }
}

/// Ballots that strictly prefer `deviation` to `committee`.
pub fn supporters(profile: &Profile, committee: CandidateSet, deviation: CandidateSet) -> Vec<CandidateSet> {
    profile
        .ballots()
        .iter()
        .copied()
        .filter(|&a| utility(a, deviation) > utility(a, committee))
        .collect()
}

/// Total weight of the ballots that strictly prefer `deviation` to `committee`.
pub fn deviation_support(profile: &Profile, committee: CandidateSet, deviation: CandidateSet) -> Rational {
    profile
        .iter()
        .filter(|(a, _)| utility(*a, deviation) > utility(*a, committee))
        .fold(Rational::zero(), |acc, (_, w)| acc + w)
}

/// Builds the report for a specific deviation.
pub fn evaluate_deviation(
    instance: &ElectionInstance,
    committee: CandidateSet,
    deviation: CandidateSet,
    quota: Quota,
) -> DeviationReport {
    let profile = instance.profile();
    DeviationReport {
        deviation,
        support: deviation_support(profile, committee, deviation),
        threshold: quota.threshold(deviation.len(), instance.k()),
        quota,
        supporters: supporters(profile, committee, deviation),
    }
}

struct Scan<'a> {
    ballots: &'a [CandidateSet],
    weights: IntegerWeights,
    committee_utility: Vec<usize>,
    k: usize,
    quota: Quota,
}

impl<'a> Scan<'a> {
    fn new(instance: &'a ElectionInstance, committee: CandidateSet, quota: Quota) -> Self {
        let profile = instance.profile();
        Scan {
            ballots: profile.ballots(),
            weights: IntegerWeights::new(profile),
            committee_utility: profile.ballots().iter().map(|&a| utility(a, committee)).collect(),
            k: instance.k(),
            quota,
        }
    }

    fn succeeds(&self, deviation: CandidateSet) -> bool {
        let mut support = BigInt::zero();
        for (i, &a) in self.ballots.iter().enumerate() {
            if utility(a, deviation) > self.committee_utility[i] {
                support += &self.weights.numerators[i];
            }
        }
        !support.is_zero()
            && self
                .quota
                .is_success_scaled(&support, &self.weights.denominator, deviation.len(), self.k)
    }
}

fn check_cap(instance: &ElectionInstance, max_candidates: usize) -> Result<()> {
    if instance.m() > max_candidates {
        return Err(Error::CandidateCap {
            m: instance.m(),
            cap: max_candidates,
        });
    }
    Ok(())
}

/// First successful deviation in order of size, then bitmask; `None` when the
/// committee is (Droop-)core stable.
pub fn find_deviation(
    instance: &ElectionInstance,
    committee: CandidateSet,
    quota: Quota,
) -> Result<Option<DeviationReport>> {
    find_deviation_capped(instance, committee, quota, DEFAULT_MAX_CANDIDATES)
}

pub fn find_deviation_capped(
    instance: &ElectionInstance,
    committee: CandidateSet,
    quota: Quota,
    max_candidates: usize,
) -> Result<Option<DeviationReport>> {
    check_cap(instance, max_candidates)?;
    assert_eq!(committee.len(), instance.k(), "committee {committee} does not have size {}", instance.k());
    let scan = Scan::new(instance, committee, quota);
    let universe = instance.candidates();
    for size in 1..=instance.k() {
        // Subsets of W never have supporters.
        let candidates: Vec<CandidateSet> = subsets_of_size(universe, size)
            .filter(|t| !t.is_subset(committee))
            .collect();
        let hit = if candidates.len() > 4096 {
            candidates.par_iter().find_first(|&&t| scan.succeeds(t)).copied()
        } else {
            candidates.iter().find(|&&t| scan.succeeds(t)).copied()
        };
        if let Some(t) = hit {
            return Ok(Some(evaluate_deviation(instance, committee, t, quota)));
        }
    }
    Ok(None)
}

pub fn is_core_stable(instance: &ElectionInstance, committee: CandidateSet, quota: Quota) -> Result<bool> {
    Ok(find_deviation(instance, committee, quota)?.is_none())
}

/// Every successful deviation, in search order. Slow; used for cross-checks.
pub fn all_deviations(instance: &ElectionInstance, committee: CandidateSet, quota: Quota) -> Result<Vec<DeviationReport>> {
    check_cap(instance, DEFAULT_MAX_CANDIDATES)?;
    let universe = instance.candidates();
    Ok((1..=instance.k())
        .flat_map(|size| subsets_of_size(universe, size))
        .map(|t| evaluate_deviation(instance, committee, t, quota))
        .filter(DeviationReport::is_success)
        .collect())
}

/// Scans only deviations with `T ∩ W = ∅` or `|T \ W| ≤ 1` (Hare quota) and
/// returns the first successful one. Local PAV committees admit none.
pub fn check_special_deviations(instance: &ElectionInstance, committee: CandidateSet) -> Result<Option<DeviationReport>> {
    check_cap(instance, DEFAULT_MAX_CANDIDATES)?;
    let scan = Scan::new(instance, committee, Quota::Hare);
    let universe = instance.candidates();
    for size in 1..=instance.k() {
        for t in subsets_of_size(universe, size) {
            let special = t.is_disjoint(committee) || (t - committee).len() <= 1;
            if special && scan.succeeds(t) {
                return Ok(Some(evaluate_deviation(instance, committee, t, Quota::Hare)));
            }
        }
    }
    Ok(None)
}
