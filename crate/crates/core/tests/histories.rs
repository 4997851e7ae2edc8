mod common;

use std::collections::BTreeSet;

use common::orbits::{all_continuations, by_level, check_enumeration, feasible, orbit_key, permutations};
use pav_core::election::CandidateSet;
use pav_core::lp::verify_farkas;
use pav_core::proof::{
    canonical_continuations, check_proposition1, check_witness, decide_history, enumerate_histories, history_system,
    History, HistoryVerdict, SearchOptions,
};

#[test]
fn enumeration_matches_brute_force_orbits_up_to_six_candidates() {
    for m in 1..=6 {
        let perms = permutations(m);
        for k in 1..=m {
            let e = enumerate_histories(m, k, &SearchOptions::default()).unwrap();
            assert!(e.complete);
            let canonical = by_level(&e);
            let mut frontier = vec![History::empty(m, k).unwrap()];
            let mut level = 0;
            while !frontier.is_empty() {
                let keys: BTreeSet<_> = frontier.iter().map(|h| orbit_key(h, &perms)).collect();
                let found = canonical.get(&level).cloned().unwrap_or_default();
                let found_keys: BTreeSet<_> = found.iter().map(|h| orbit_key(h, &perms)).collect();
                assert_eq!(found_keys.len(), found.len(), "m={m} k={k}: two canonical histories share an orbit");
                assert_eq!(keys, found_keys, "m={m} k={k} level {level}");
                frontier = frontier
                    .iter()
                    .flat_map(all_continuations)
                    .filter(feasible)
                    .collect();
                level += 1;
            }
            assert!(canonical.keys().all(|&l| l < level), "m={m} k={k}");
        }
    }
}

/// Canonical continuations of arbitrary potential histories (feasible or not)
/// meet every orbit of unpruned continuations exactly once.
#[test]
fn canonical_continuations_cover_each_orbit_once() {
    for m in 3..=6 {
        let perms = permutations(m);
        for k in 2..m {
            let mut frontier = vec![History::empty(m, k).unwrap()];
            for _ in 0..2 {
                let mut next = Vec::new();
                for h in &frontier {
                    let canonical: Vec<History> = canonical_continuations(h)
                        .into_iter()
                        .map(|(w, t)| h.extended(w, t).unwrap())
                        .collect();
                    let keys: BTreeSet<_> = canonical.iter().map(|c| orbit_key(c, &perms)).collect();
                    assert_eq!(keys.len(), canonical.len(), "duplicate orbit after {h}");
                    let expected: BTreeSet<_> = all_continuations(h)
                        .into_iter()
                        .filter(|c| {
                            let step = c.steps().last().unwrap();
                            let (w, t) = (step.committee, step.deviation);
                            let pruned = t.is_subset(w) || (h.is_empty() && (t.is_disjoint(w) || (t - w).len() <= 1));
                            !pruned
                        })
                        .map(|c| orbit_key(&c, &perms))
                        .collect();
                    assert_eq!(keys, expected, "continuations of {h} for m={m} k={k}");
                    next.extend(canonical.into_iter().filter(|c| c.fixed().len() <= k));
                }
                frontier = next;
            }
        }
    }
}

#[test]
fn ten_candidates_committee_eight() {
    let e = enumerate_histories(10, 8, &SearchOptions::default()).unwrap();
    check_enumeration(&e);
    let lists: Vec<String> = e.history_list().iter().map(|h| h.to_string()).collect();
    assert_eq!(lists.len(), 2, "{lists:?}");
    assert!(check_proposition1(&e.history_list(), 8));
}

#[test]
fn solver_paths_agree_on_single_histories() {
    use pav_core::lp::{solve_feasibility_with, SolverOptions};
    let set = common::set;
    let w = CandidateSet::range(0, 9);
    let h = History::new(12, 9, [(w, set(&[1, 10, 11]))]).unwrap();
    let conts = canonical_continuations(&h);
    for (w2, t2) in conts.iter().step_by(40) {
        let c = h.extended(*w2, *t2).unwrap();
        let s = history_system(&c);
        let hinted = solve_feasibility_with(&s, SolverOptions { float_hint: true });
        let plain = solve_feasibility_with(&s, SolverOptions { float_hint: false });
        assert_eq!(hinted.is_feasible(), plain.is_feasible(), "{c}");
        match decide_history(&c, SolverOptions::default()) {
            HistoryVerdict::IsHistory(p) => check_witness(&c, &p).unwrap(),
            HistoryVerdict::NotHistory(cert) => assert!(verify_farkas(&s, &cert).unwrap()),
        }
    }
}
