//! Brute-force oracles for the history search.

use std::collections::{BTreeMap, BTreeSet};

use pav_core::election::{subsets_of_size, CandidateSet};
use pav_core::lp::{solve_feasibility, verify_farkas, LpVerdict};
use pav_core::proof::{canonical_continuations, check_witness, history_system, Enumeration, History};

pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let c = left.remove(i);
            prefix.push(c);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, c);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

fn relabel(set: CandidateSet, perm: &[usize]) -> u64 {
    set.iter().fold(0, |acc, c| acc | 1 << perm[c])
}

/// Smallest relabeled step sequence: equal keys mean the same orbit.
pub fn orbit_key(history: &History, perms: &[Vec<usize>]) -> Vec<(u64, u64)> {
    perms
        .iter()
        .map(|p| {
            history
                .steps()
                .iter()
                .map(|s| (relabel(s.committee, p), relabel(s.deviation, p)))
                .collect::<Vec<_>>()
        })
        .min()
        .expect("at least one permutation")
}

/// Every structurally valid one-step extension, with no symmetry breaking and
/// no pruning.
pub fn all_continuations(history: &History) -> Vec<History> {
    let (m, k) = (history.m(), history.k());
    let universe = CandidateSet::all(m);
    let fixed = history.fixed();
    let mut out = Vec::new();
    for w in subsets_of_size(universe, k).filter(|w| fixed.is_subset(*w)) {
        for bits in 1..(1u64 << m) {
            let t = CandidateSet::from_bits(bits);
            if t.len() <= k {
                out.push(history.extended(w, t).expect("valid extension"));
            }
        }
    }
    out
}

pub fn feasible(history: &History) -> bool {
    match solve_feasibility(&history_system(history)) {
        LpVerdict::Feasible(_) => true,
        LpVerdict::Infeasible(c) => {
            assert!(verify_farkas(&history_system(history), &c).unwrap());
            false
        }
    }
}

pub fn by_level(e: &Enumeration) -> BTreeMap<usize, Vec<History>> {
    let mut levels: BTreeMap<usize, Vec<History>> = BTreeMap::new();
    for h in e.history_list() {
        levels.entry(h.len()).or_default().push(h);
    }
    levels
}

pub fn check_enumeration(e: &Enumeration) {
    assert!(e.complete);
    let kept: BTreeSet<String> = e.histories.iter().map(|h| h.history.encode()).collect();
    assert_eq!(kept.len(), e.histories.len());
    // prefix closure
    for h in &e.histories {
        if let Some(parent) = h.history.parent() {
            assert!(kept.contains(&parent.encode()), "{} has no emitted parent", h.history);
        }
    }
    // every witness realises its history
    for h in &e.histories {
        match &h.witness {
            None => assert!(h.history.is_empty()),
            Some(p) => check_witness(&h.history, p).unwrap(),
        }
    }
    // every canonical continuation of an emitted history is emitted or refuted
    let rejected: BTreeMap<String, _> = e.rejected.iter().map(|r| (r.history.encode(), r)).collect();
    assert_eq!(rejected.len(), e.rejected.len());
    let mut continuations = 0;
    for h in &e.histories {
        for (w, t) in canonical_continuations(&h.history) {
            continuations += 1;
            let c = h.history.extended(w, t).unwrap();
            let key = c.encode();
            if kept.contains(&key) {
                continue;
            }
            let r = rejected.get(&key).unwrap_or_else(|| panic!("{c} neither emitted nor refuted"));
            assert!(verify_farkas(&history_system(&c), &r.certificate).unwrap(), "{c}");
        }
    }
    assert_eq!(continuations, e.histories.len() - 1 + e.rejected.len());
}

