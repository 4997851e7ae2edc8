#![allow(dead_code)]

pub mod orbits;

use pav_core::election::{CandidateSet, ElectionInstance, Profile};
use proptest::prelude::*;

pub fn set(ix: &[usize]) -> CandidateSet {
    ix.iter().map(|i| i - 1).collect()
}

/// Random instance with `m` in `min_m..=max_m`, `k ≤ min(max_k, m)`, up to
/// `max_ballots` distinct ballots and integer voter counts.
pub fn instance(min_m: usize, max_m: usize, max_k: usize, max_ballots: usize) -> impl Strategy<Value = ElectionInstance> {
    (min_m..=max_m).prop_flat_map(move |m| {
        // Mix arbitrary ballots with short ones; short ballots make blocking
        // coalitions common.
        let short = prop::sample::subsequence((0..m).collect::<Vec<_>>(), 1..=m.min(4))
            .prop_map(|c| c.into_iter().collect::<CandidateSet>());
        let ballot = prop_oneof![
            1 => (1u64..(1u64 << m)).prop_map(CandidateSet::from_bits),
            3 => short,
        ];
        (
            1..=max_k.min(m),
            prop::collection::vec((ballot, 1u64..=12), 1..=max_ballots),
        )
            .prop_map(move |(k, entries)| {
                let profile = Profile::from_counts(m, entries).expect("valid profile");
                ElectionInstance::new(profile, k).expect("valid k")
            })
    })
}

/// Instances shaped like the classic blocking example: a few ballots sharing a
/// common core, each with one private candidate, and large ballots on the
/// remaining candidates. These are where local PAV committees get blocked.
pub fn clustered_instance(min_m: usize, max_m: usize) -> impl Strategy<Value = ElectionInstance> {
    (min_m.max(6)..=max_m).prop_flat_map(|m| {
        (
            1usize..=3,
            2usize..=4,
            prop::collection::vec(1u64..=12, 4),
            prop::collection::vec(1u64..=30, 2),
            0usize..m,
            (m / 2).max(1)..=m,
        )
            .prop_map(move |(core, arms, arm_weights, big_weights, split, k)| {
                let core_set = CandidateSet::range(0, core);
                let mut entries = Vec::new();
                for (i, &w) in arm_weights.iter().enumerate().take(arms) {
                    let private = core + i;
                    if private < m {
                        entries.push((core_set.with(private), w));
                    }
                }
                let lo = (core + arms).min(m);
                let cut = (lo + split).min(m);
                let parts = [CandidateSet::range(lo, cut), CandidateSet::range(cut, m)];
                for (part, &w) in parts.iter().zip(&big_weights) {
                    if !part.is_empty() {
                        entries.push((*part, w));
                    }
                }
                if entries.is_empty() {
                    entries.push((core_set, 1));
                }
                let profile = Profile::from_counts(m, entries).expect("valid profile");
                ElectionInstance::new(profile, k.min(m)).expect("valid k")
            })
    })
}
