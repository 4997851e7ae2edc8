//! Local, global and recursive PAV committees.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::election::{
    subsets_of_size, swap_delta, utility, ActiveSet, CandidateSet, ElectionInstance, IntegerWeights,
    Profile, Rational,
};
use crate::error::{Error, Result};
use crate::stability::{find_deviation, Quota};

/// Default cap on the number of committees visited by exhaustive rules.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Start {
    /// Add candidates one at a time by largest marginal gain, lowest index on ties.
    Greedy,
    /// Start from this committee. It must contain the fixed set and have size `k`.
    Committee(CandidateSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// A swap is applied only if it improves the score by more than this.
    pub epsilon: Rational,
    pub start: Start,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            epsilon: Rational::zero(),
            start: Start::Greedy,
        }
    }
}

impl SearchConfig {
    /// The tolerance `0.1 / k²` used to illustrate approximate local search.
    pub fn approximate(k: usize) -> Self {
        SearchConfig {
            epsilon: Rational::new(BigInt::one(), BigInt::from(10 * k * k)),
            start: Start::Greedy,
        }
    }
}

/// PAV scores in integers: weights over their common denominator `D`, and
/// harmonic numbers scaled by `L = lcm(1..=m)`.
struct IntScorer<'a> {
    ballots: &'a [CandidateSet],
    weights: IntegerWeights,
    /// `harmonic[u] = L · H(u)`.
    harmonic: Vec<BigInt>,
    lcm: BigInt,
}

impl<'a> IntScorer<'a> {
    fn new(profile: &'a Profile) -> Self {
        let m = profile.m();
        let lcm = (1..=m).fold(BigInt::one(), |acc, i| acc.lcm(&BigInt::from(i)));
        let mut harmonic = vec![BigInt::zero()];
        for u in 1..=m {
            let next = &harmonic[u - 1] + &lcm / BigInt::from(u);
            harmonic.push(next);
        }
        IntScorer {
            ballots: profile.ballots(),
            weights: IntegerWeights::new(profile),
            harmonic,
            lcm,
        }
    }

    fn score(&self, active: Option<&ActiveSet>, committee: CandidateSet) -> BigInt {
        let mut total = BigInt::zero();
        for (i, &a) in self.ballots.iter().enumerate() {
            if active.map_or(true, |s| s.contains(i)) {
                total += &self.weights.numerators[i] * &self.harmonic[utility(a, committee)];
            }
        }
        total
    }

    /// Scaled score change of replacing `x` by `y`.
    fn swap_delta(&self, active: Option<&ActiveSet>, committee: CandidateSet, x: usize, y: usize) -> BigInt {
        let mut total = BigInt::zero();
        for (i, &a) in self.ballots.iter().enumerate() {
            if !active.map_or(true, |s| s.contains(i)) {
                continue;
            }
            let (has_x, has_y) = (a.contains(x), a.contains(y));
            if has_x == has_y {
                continue;
            }
            let u = utility(a, committee);
            if has_y {
                total += &self.weights.numerators[i] * (&self.lcm / BigInt::from(u + 1));
            } else {
                total -= &self.weights.numerators[i] * (&self.lcm / BigInt::from(u));
            }
        }
        total
    }

    /// `delta / (D·L) > epsilon` in integers.
    fn exceeds(&self, delta: &BigInt, epsilon: &Rational) -> bool {
        delta * epsilon.denom() > epsilon.numer() * &self.weights.denominator * &self.lcm
    }

    fn to_rational(&self, scaled: BigInt) -> Rational {
        Rational::new(scaled, &self.weights.denominator * &self.lcm)
    }
}

fn greedy_start(scorer: &IntScorer, active: &ActiveSet, m: usize, k: usize, fixed: CandidateSet) -> CandidateSet {
    let mut committee = fixed;
    while committee.len() < k {
        let mut best: Option<(BigInt, usize)> = None;
        for c in 0..m {
            if committee.contains(c) {
                continue;
            }
            let gain = scorer.score(Some(active), committee.with(c));
            if best.as_ref().map_or(true, |(b, _)| gain > *b) {
                best = Some((gain, c));
            }
        }
        committee = committee.with(best.expect("fewer than k candidates").1);
    }
    committee
}

/// A committee containing `fixed` on which no swap of a non-fixed member for a
/// non-member improves the PAV score over `active` by more than `epsilon`.
///
/// Swaps are scanned in lexicographic `(x, y)` order and the first improving
/// one is applied.
pub fn local_pav(
    instance: &ElectionInstance,
    fixed: CandidateSet,
    active: &ActiveSet,
    config: &SearchConfig,
) -> CandidateSet {
    let (m, k) = (instance.m(), instance.k());
    assert!(fixed.len() <= k, "fixed set {fixed} larger than k = {k}");
    assert!(!config.epsilon.is_negative(), "epsilon must be nonnegative");
    let scorer = IntScorer::new(instance.profile());
    let mut committee = match &config.start {
        Start::Greedy => greedy_start(&scorer, active, m, k, fixed),
        Start::Committee(w) => {
            assert!(w.len() == k && fixed.is_subset(*w), "start committee {w} must contain {fixed} and have size {k}");
            *w
        }
    };
    let outside_all = instance.candidates();
    'search: loop {
        for x in (committee - fixed).iter() {
            for y in (outside_all - committee).iter() {
                if scorer.exceeds(&scorer.swap_delta(Some(active), committee, x, y), &config.epsilon) {
                    committee = committee.swap(x, y);
                    continue 'search;
                }
            }
        }
        break;
    }
    assert_local(instance.profile(), active, committee, fixed, k, &config.epsilon);
    committee
}

/// Independent exact re-check of the local-search postcondition.
fn assert_local(profile: &Profile, active: &ActiveSet, w: CandidateSet, fixed: CandidateSet, k: usize, epsilon: &Rational) {
    assert!(w.len() == k && fixed.is_subset(w), "local search returned {w}");
    let outside = CandidateSet::all(profile.m()) - w;
    for x in (w - fixed).iter() {
        for y in outside.iter() {
            let delta = swap_delta(profile, active, w, x, y);
            assert!(&delta <= epsilon, "swap c{} -> c{} still improves {w} by {delta}", x + 1, y + 1);
        }
    }
}

fn committees(instance: &ElectionInstance, cap: u128) -> Result<Vec<CandidateSet>> {
    let count = binomial(instance.m(), instance.k());
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(subsets_of_size(instance.candidates(), instance.k()).collect())
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// All committees of maximum PAV score, in bitmask order.
pub fn global_pav(instance: &ElectionInstance) -> Result<Vec<CandidateSet>> {
    global_pav_capped(instance, DEFAULT_ENUMERATION_CAP)
}

pub fn global_pav_capped(instance: &ElectionInstance, cap: u128) -> Result<Vec<CandidateSet>> {
    let all = committees(instance, cap)?;
    let scorer = IntScorer::new(instance.profile());
    let scores: Vec<BigInt> = all.par_iter().map(|&w| scorer.score(None, w)).collect();
    let best = scores.iter().max().cloned().unwrap_or_default();
    Ok(all
        .into_iter()
        .zip(scores)
        .filter(|(_, s)| *s == best)
        .map(|(w, _)| w)
        .collect())
}

/// All committees on which no single swap increases the PAV score, in bitmask order.
pub fn all_local_pav(instance: &ElectionInstance) -> Result<Vec<CandidateSet>> {
    all_local_pav_capped(instance, DEFAULT_ENUMERATION_CAP)
}

pub fn all_local_pav_capped(instance: &ElectionInstance, cap: u128) -> Result<Vec<CandidateSet>> {
    let all = committees(instance, cap)?;
    let scorer = IntScorer::new(instance.profile());
    let universe = instance.candidates();
    Ok(all
        .into_par_iter()
        .filter(|&w| {
            w.iter().all(|x| {
                (universe - w)
                    .iter()
                    .all(|y| !scorer.swap_delta(None, w, x, y).is_positive())
            })
        })
        .collect())
}

/// Exact PAV score of `committee` over the whole profile.
pub fn score(profile: &Profile, committee: CandidateSet) -> Rational {
    let scorer = IntScorer::new(profile);
    scorer.to_rational(scorer.score(None, committee))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleStatus {
    Success,
    /// The fixed set outgrew the committee size.
    Failed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceStep {
    pub committee: CandidateSet,
    pub deviation: CandidateSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    /// The returned committee on success, the last computed one on failure.
    pub committee: CandidateSet,
    pub trace: Vec<TraceStep>,
    pub status: RuleStatus,
}

impl fmt::Display for RuleOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, step) in self.trace.iter().enumerate() {
            writeln!(f, "step {}: W = {}, T = {}", t + 1, step.committee, step.deviation)?;
        }
        match self.status {
            RuleStatus::Success => write!(f, "committee {}", self.committee),
            RuleStatus::Failed => write!(f, "failed: fixed candidates exceed k"),
        }
    }
}

/// The recursive PAV rule: fix each successful deviation, drop its supporters,
/// and re-optimise until the committee is stable or the fixed set exceeds `k`.
///
/// Each round restarts local search greedily. Deviations are chosen smallest
/// first, then by bitmask.
pub fn recursive_pav(instance: &ElectionInstance, quota: Quota) -> Result<RuleOutcome> {
    recursive_pav_with(instance, quota, &SearchConfig::default())
}

/// Like [`recursive_pav`]. A [`Start::Committee`] in `config` seeds the first
/// round only; later rounds start greedily.
pub fn recursive_pav_with(instance: &ElectionInstance, quota: Quota, config: &SearchConfig) -> Result<RuleOutcome> {
    let later = SearchConfig {
        epsilon: config.epsilon.clone(),
        start: Start::Greedy,
    };
    let profile = instance.profile();
    let mut active = ActiveSet::all(profile);
    let mut fixed = CandidateSet::EMPTY;
    let mut trace = Vec::new();
    let mut committee = CandidateSet::EMPTY;
    loop {
        if fixed.len() > instance.k() {
            return Ok(RuleOutcome {
                committee,
                trace,
                status: RuleStatus::Failed,
            });
        }
        let round_config = if trace.is_empty() { config } else { &later };
        committee = local_pav(instance, fixed, &active, round_config);
        let Some(report) = find_deviation(instance, committee, quota)? else {
            return Ok(RuleOutcome {
                committee,
                trace,
                status: RuleStatus::Success,
            });
        };
        let t = report.deviation;
        log::debug!("round {}: W = {committee}, T = {t}", trace.len() + 1);
        fixed = fixed | t;
        for (i, &a) in profile.ballots().iter().enumerate() {
            if utility(a, t) > utility(a, committee) {
                active.remove(i);
            }
        }
        trace.push(TraceStep { committee, deviation: t });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::ratio;

    fn set(ix: &[usize]) -> CandidateSet {
        ix.iter().map(|i| i - 1).collect()
    }

    fn two_blocs() -> ElectionInstance {
        let p = Profile::from_counts(
            10,
            [
                (set(&[1, 2, 3]), 1),
                (set(&[1, 2, 4]), 1),
                (set(&[5, 6, 7, 8, 9, 10]), 2),
            ],
        )
        .unwrap();
        ElectionInstance::new(p, 8).unwrap()
    }

    #[test]
    fn single_ballot() {
        let p = Profile::from_counts(1, [(set(&[1]), 1)]).unwrap();
        let inst = ElectionInstance::new(p, 1).unwrap();
        let active = ActiveSet::all(inst.profile());
        assert_eq!(local_pav(&inst, CandidateSet::EMPTY, &active, &SearchConfig::default()), set(&[1]));
        let p = Profile::from_counts(3, [(set(&[1, 2]), 1)]).unwrap();
        let inst = ElectionInstance::new(p, 2).unwrap();
        assert_eq!(global_pav(&inst).unwrap(), vec![set(&[1, 2])]);
    }

    #[test]
    fn two_blocs_local_and_global() {
        let inst = two_blocs();
        let active = ActiveSet::all(inst.profile());
        let w = local_pav(&inst, CandidateSet::EMPTY, &active, &SearchConfig::default());
        assert_eq!(score(inst.profile(), w), ratio(79, 40));
        let global = global_pav(&inst).unwrap();
        assert!(global.contains(&set(&[1, 2, 5, 6, 7, 8, 9, 10])));
        assert!(global.contains(&set(&[1, 2, 3, 5, 6, 7, 8, 9])));
        let local = all_local_pav(&inst).unwrap();
        assert!(global.iter().all(|w| local.contains(w)));
    }

    #[test]
    fn two_blocs_second_round() {
        let inst = two_blocs();
        let t = set(&[1, 2, 3, 4]);
        let active = ActiveSet::filter(inst.profile(), |a| a == set(&[5, 6, 7, 8, 9, 10]));
        let w = local_pav(&inst, t, &active, &SearchConfig::default());
        assert_eq!(w, set(&[1, 2, 3, 4, 5, 6, 7, 8]));
    }

    #[test]
    fn two_blocs_recursive() {
        let inst = two_blocs();
        // Greedy search lands on a stable committee straight away.
        let outcome = recursive_pav(&inst, Quota::Hare).unwrap();
        assert_eq!(outcome.status, RuleStatus::Success);
        assert!(outcome.trace.is_empty());
        assert_eq!(outcome.committee, set(&[1, 2, 3, 5, 6, 7, 8, 9]));

        let config = SearchConfig {
            start: Start::Committee(set(&[1, 2, 5, 6, 7, 8, 9, 10])),
            ..SearchConfig::default()
        };
        let outcome = recursive_pav_with(&inst, Quota::Hare, &config).unwrap();
        assert_eq!(outcome.status, RuleStatus::Success);
        assert_eq!(outcome.trace.len(), 1);
        assert_eq!(outcome.trace[0].deviation, set(&[1, 2, 3, 4]));
        assert!(set(&[1, 2, 3, 4]).is_subset(outcome.committee));
        assert!(find_deviation(&inst, outcome.committee, Quota::Hare).unwrap().is_none());
    }

    #[test]
    fn given_start_and_epsilon() {
        let inst = two_blocs();
        let active = ActiveSet::all(inst.profile());
        let start = set(&[3, 4, 5, 6, 7, 8, 9, 10]);
        let config = SearchConfig {
            start: Start::Committee(start),
            ..SearchConfig::default()
        };
        let w = local_pav(&inst, CandidateSet::EMPTY, &active, &config);
        assert_eq!(score(inst.profile(), w), ratio(79, 40));
        let loose = SearchConfig {
            epsilon: ratio(100, 1),
            start: Start::Committee(start),
        };
        assert_eq!(local_pav(&inst, CandidateSet::EMPTY, &active, &loose), start);
        assert_eq!(SearchConfig::approximate(8).epsilon, ratio(1, 640));
    }

    #[test]
    fn enumeration_cap() {
        let inst = two_blocs();
        assert!(matches!(
            global_pav_capped(&inst, 44),
            Err(Error::EnumerationCap { count: 45, cap: 44 })
        ));
        assert_eq!(binomial(15, 7), 6435);
    }
}
