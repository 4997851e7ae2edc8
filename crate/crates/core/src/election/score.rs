use num_bigint::BigInt;
use num_traits::Zero;

use super::{ActiveSet, CandidateSet, Profile, Rational, Restriction};

/// `H(n) = 1 + 1/2 + ... + 1/n`, with `H(0) = 0`.
pub fn harmonic(n: usize) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, i| {
        acc + Rational::new(BigInt::from(1), BigInt::from(i))
    })
}

/// `[H(0), H(1), ..., H(n)]`.
pub fn harmonic_table(n: usize) -> Vec<Rational> {
    let mut table = Vec::with_capacity(n + 1);
    table.push(Rational::zero());
    for i in 1..=n {
        let next = &table[i - 1] + Rational::new(BigInt::from(1), BigInt::from(i));
        table.push(next);
    }
    table
}

/// Number of approved members: `|ballot ∩ set|`.
pub fn utility(ballot: CandidateSet, set: CandidateSet) -> usize {
    (ballot & set).len()
}

/// PAV score of `committee` counting only the active ballots.
pub fn pav_score(profile: &Profile, active: &ActiveSet, committee: CandidateSet) -> Rational {
    let h = harmonic_table(committee.len());
    active
        .indices()
        .map(|i| &profile.weights()[i] * &h[utility(profile.ballots()[i], committee)])
        .fold(Rational::zero(), |acc, s| acc + s)
}

/// Change in the PAV score of a single ballot when `x ∈ committee` is replaced by `y ∉ committee`.
pub fn swap_delta_for_ballot(ballot: CandidateSet, committee: CandidateSet, x: usize, y: usize) -> Rational {
    let u = utility(ballot, committee) as i64;
    match (ballot.contains(x), ballot.contains(y)) {
        (false, true) => Rational::new(1.into(), (u + 1).into()),
        (true, false) => Rational::new((-1).into(), u.into()),
        _ => Rational::zero(),
    }
}

/// Exact change in PAV score over the active ballots from swapping `x` out of
/// `committee` and `y` in.
///
/// Panics unless `x ∈ committee` and `y ∉ committee`.
pub fn swap_delta(
    profile: &Profile,
    active: &ActiveSet,
    committee: CandidateSet,
    x: usize,
    y: usize,
) -> Rational {
    assert!(committee.contains(x), "swap-out candidate c{} is not in {committee}", x + 1);
    assert!(!committee.contains(y), "swap-in candidate c{} is already in {committee}", y + 1);
    active
        .indices()
        .filter_map(|i| {
            let ballot = profile.ballots()[i];
            (ballot.contains(x) != ballot.contains(y))
                .then(|| &profile.weights()[i] * swap_delta_for_ballot(ballot, committee, x, y))
        })
        .fold(Rational::zero(), |acc, d| acc + d)
}

/// Intersects every ballot with `keep` and relabels the kept candidates densely.
///
/// Ballots that become empty are dropped; their weight is reported as
/// `inactive_mass` and the remaining weights are not renormalised.
pub fn restrict_profile(profile: &Profile, keep: CandidateSet) -> Restriction {
    assert!(!keep.is_empty(), "restriction to the empty candidate set");
    assert!(keep.is_subset(CandidateSet::all(profile.m())), "restriction outside c1..c{}", profile.m());
    let index_map: Vec<usize> = keep.iter().collect();
    let relabel = |ballot: CandidateSet| -> CandidateSet {
        index_map
            .iter()
            .enumerate()
            .filter(|(_, &old)| ballot.contains(old))
            .map(|(new, _)| new)
            .collect()
    };
    let mut inactive_mass = Rational::zero();
    let mut kept = Vec::new();
    for (ballot, weight) in profile.iter() {
        let restricted = relabel(ballot & keep);
        if restricted.is_empty() {
            inactive_mass += weight;
        } else {
            kept.push((restricted, weight.clone()));
        }
    }
    let profile = Profile::collect(index_map.len(), kept)
        .expect("restriction of a valid profile is valid");
    Restriction {
        profile,
        inactive_mass,
        index_map,
    }
}
