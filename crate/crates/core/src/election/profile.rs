use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{CandidateSet, Rational, MAX_CANDIDATES};
use crate::error::{Error, Result};

/// A distribution of voter mass over approval ballots.
///
/// Ballots are unique, nonempty and stored in increasing bitmask order; every
/// stored weight is strictly positive. Profiles built with [`Profile::new`] or
/// [`Profile::from_counts`] have total mass exactly 1. The only way to obtain a
/// profile with less mass is [`super::restrict_profile`], which reports the
/// missing mass next to the profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    m: usize,
    ballots: Vec<CandidateSet>,
    weights: Vec<Rational>,
}

impl Profile {
    /// Builds a profile from weighted ballots. Repeated ballots are merged and
    /// zero weights dropped; the weights must sum to exactly 1.
    pub fn new(m: usize, entries: impl IntoIterator<Item = (CandidateSet, Rational)>) -> Result<Self> {
        let profile = Self::collect(m, entries)?;
        let total = profile.total_mass();
        if !total.is_one() {
            return Err(Error::WeightSum(total));
        }
        Ok(profile)
    }

    /// Builds a profile from voter counts; each ballot gets weight `count / total`.
    pub fn from_counts(m: usize, entries: impl IntoIterator<Item = (CandidateSet, u64)>) -> Result<Self> {
        let entries: Vec<_> = entries.into_iter().collect();
        let total: u64 = entries.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::NoVoters);
        }
        let total = BigInt::from(total);
        Self::new(
            m,
            entries
                .into_iter()
                .map(|(b, c)| (b, Rational::new(BigInt::from(c), total.clone()))),
        )
    }

    /// Like [`Profile::new`] without the unit-mass check.
    pub(crate) fn collect(
        m: usize,
        entries: impl IntoIterator<Item = (CandidateSet, Rational)>,
    ) -> Result<Self> {
        if m == 0 || m > MAX_CANDIDATES {
            return Err(Error::CandidateCount(m));
        }
        let universe = CandidateSet::all(m);
        let mut merged: BTreeMap<CandidateSet, Rational> = BTreeMap::new();
        for (ballot, weight) in entries {
            if ballot.is_empty() {
                return Err(Error::EmptyBallot(ballot));
            }
            if !ballot.is_subset(universe) {
                return Err(Error::BallotOutOfRange { ballot, m });
            }
            if weight.is_negative() {
                return Err(Error::NegativeWeight { ballot, weight });
            }
            *merged.entry(ballot).or_insert_with(Rational::zero) += weight;
        }
        let (ballots, weights) = merged.into_iter().filter(|(_, w)| !w.is_zero()).unzip();
        Ok(Profile { m, ballots, weights })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.ballots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ballots.is_empty()
    }

    pub fn ballots(&self) -> &[CandidateSet] {
        &self.ballots
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (CandidateSet, &Rational)> + '_ {
        self.ballots.iter().copied().zip(self.weights.iter())
    }

    /// Weight of `ballot`, zero when absent.
    pub fn weight(&self, ballot: CandidateSet) -> Rational {
        self.index_of(ballot)
            .map(|i| self.weights[i].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn index_of(&self, ballot: CandidateSet) -> Option<usize> {
        self.ballots.binary_search(&ballot).ok()
    }

    pub fn total_mass(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |acc, w| acc + w)
    }

    /// Least common denominator of all weights.
    pub fn common_denominator(&self) -> BigInt {
        self.weights
            .iter()
            .fold(BigInt::one(), |acc, w| num_integer::Integer::lcm(&acc, w.denom()))
    }
}

/// Profile weights over their common denominator, for exact comparisons in
/// integer arithmetic: `weight_i = numerators[i] / denominator`.
#[derive(Clone, Debug)]
pub(crate) struct IntegerWeights {
    pub numerators: Vec<BigInt>,
    pub denominator: BigInt,
}

impl IntegerWeights {
    pub fn new(profile: &Profile) -> Self {
        let denominator = profile.common_denominator();
        let numerators = profile
            .weights()
            .iter()
            .map(|w| w.numer() * (&denominator / w.denom()))
            .collect();
        IntegerWeights {
            numerators,
            denominator,
        }
    }
}

/// A profile together with a committee size `1 ≤ k ≤ m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElectionInstance {
    profile: Profile,
    k: usize,
}

impl ElectionInstance {
    pub fn new(profile: Profile, k: usize) -> Result<Self> {
        if k == 0 || k > profile.m() {
            return Err(Error::CommitteeSize { k, m: profile.m() });
        }
        Ok(ElectionInstance { profile, k })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.profile.m()
    }

    pub fn candidates(&self) -> CandidateSet {
        CandidateSet::all(self.m())
    }
}

/// The ballots of a profile that still count, by index into [`Profile::ballots`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSet(Vec<bool>);

impl ActiveSet {
    pub fn all(profile: &Profile) -> Self {
        ActiveSet(vec![true; profile.len()])
    }

    pub fn none(profile: &Profile) -> Self {
        ActiveSet(vec![false; profile.len()])
    }

    /// Ballots of `profile` satisfying `keep`.
    pub fn filter(profile: &Profile, mut keep: impl FnMut(CandidateSet) -> bool) -> Self {
        ActiveSet(profile.ballots().iter().map(|&b| keep(b)).collect())
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn insert(&mut self, index: usize) {
        self.0[index] = true;
    }

    pub fn remove(&mut self, index: usize) {
        self.0[index] = false;
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&a| a).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }
}

/// Output of [`super::restrict_profile`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    /// Ballots intersected with the kept candidates, re-indexed densely.
    /// Its mass is `1 - inactive_mass`.
    pub profile: Profile,
    /// Weight of ballots that became empty.
    pub inactive_mass: Rational,
    /// `index_map[new] = old` candidate index.
    pub index_map: Vec<usize>,
}

impl Restriction {
    /// True when every ballot became empty.
    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }
}
