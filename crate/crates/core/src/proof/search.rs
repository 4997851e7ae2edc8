//! Breadth-first enumeration of canonical histories.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::election::{CandidateSet, Profile};
use crate::lp::{solve_feasibility_with, verify_farkas, FarkasCertificate, LpVerdict, SolverOptions};

use super::history::{check_witness, history_system, witness_profile, History};

/// Classes of candidates that no set in `sets` tells apart, ordered by their
/// smallest member.
pub fn equivalence_classes(m: usize, sets: &[CandidateSet]) -> Vec<CandidateSet> {
    let mut classes: Vec<(Vec<bool>, CandidateSet)> = Vec::new();
    for c in 0..m {
        let signature: Vec<bool> = sets.iter().map(|s| s.contains(c)).collect();
        match classes.iter_mut().find(|(sig, _)| *sig == signature) {
            Some((_, class)) => *class = class.with(c),
            None => classes.push((signature, CandidateSet::singleton(c))),
        }
    }
    classes.into_iter().map(|(_, class)| class).collect()
}

/// Every way of taking the lowest `n_i` members of each class with
/// `Σ n_i = total`, or any total when `total` is `None`.
fn class_selections(classes: &[CandidateSet], total: Option<usize>) -> Vec<CandidateSet> {
    fn go(classes: &[CandidateSet], remaining: Option<usize>, acc: CandidateSet, out: &mut Vec<CandidateSet>) {
        let Some((&class, rest)) = classes.split_first() else {
            if remaining.map_or(true, |r| r == 0) {
                out.push(acc);
            }
            return;
        };
        let max = remaining.map_or(class.len(), |r| r.min(class.len()));
        for n in 0..=max {
            go(rest, remaining.map(|r| r - n), acc | class.lowest(n), out);
        }
    }
    let mut out = Vec::new();
    go(classes, total, CandidateSet::EMPTY, &mut out);
    out
}

/// One representative `(W, T)` per orbit of potential continuations of
/// `history` under relabelings that fix every earlier `W_s` and `T_s`.
///
/// `W` contains all earlier deviations and takes the lowest members of each
/// class; `T` is then chosen the same way against the classes refined by `W`.
/// Deviations inside `W` are skipped since nobody can support them, and so are
/// first-step deviations disjoint from `W` or with a single outside member,
/// which local PAV committees always withstand.
pub fn canonical_continuations(history: &History) -> Vec<(CandidateSet, CandidateSet)> {
    let (m, k) = (history.m(), history.k());
    let fixed = history.fixed();
    if fixed.len() > k {
        return Vec::new();
    }
    let mut sets: Vec<CandidateSet> = history
        .steps()
        .iter()
        .flat_map(|s| [s.committee, s.deviation])
        .collect();
    let free_classes: Vec<CandidateSet> = equivalence_classes(m, &sets)
        .into_iter()
        .filter(|c| c.is_disjoint(fixed))
        .collect();
    let first_step = history.is_empty();
    let mut out = Vec::new();
    for extra in class_selections(&free_classes, Some(k - fixed.len())) {
        let w = fixed | extra;
        sets.push(w);
        let classes = equivalence_classes(m, &sets);
        sets.pop();
        for t in class_selections(&classes, None) {
            if t.is_empty() || t.len() > k || t.is_subset(w) {
                continue;
            }
            if first_step && (t.is_disjoint(w) || (t - w).len() <= 1) {
                continue;
            }
            out.push((w, t));
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Stop starting new LP solves after this long.
    pub budget: Option<Duration>,
    pub solver: SolverOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: None,
            solver: SolverOptions::default(),
        }
    }
}

/// A history together with a profile realising it (none for the empty history).
#[derive(Clone, Debug)]
pub struct KeptHistory {
    pub history: History,
    pub witness: Option<Profile>,
}

/// A potential history shown not to be a history.
#[derive(Clone, Debug)]
pub struct Rejected {
    pub history: History,
    pub certificate: FarkasCertificate,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub m: usize,
    pub k: usize,
    /// In breadth-first order; the empty history comes first.
    pub histories: Vec<KeptHistory>,
    pub rejected: Vec<Rejected>,
    /// False when the time budget ran out before the search finished.
    pub complete: bool,
}

impl Enumeration {
    pub fn history_list(&self) -> Vec<History> {
        self.histories.iter().map(|h| h.history.clone()).collect()
    }
}

/// Decision on a single potential history.
#[derive(Clone, Debug)]
pub enum HistoryVerdict {
    IsHistory(Profile),
    NotHistory(FarkasCertificate),
}

/// Decides whether `history` is a history, re-checking the evidence: the
/// witness profile against the definition and the certificate against the
/// system.
///
/// # Panics
/// If the solver's evidence fails its independent check.
pub fn decide_history(history: &History, solver: SolverOptions) -> HistoryVerdict {
    let system = history_system(history);
    match solve_feasibility_with(&system, solver) {
        LpVerdict::Feasible(x) => {
            let profile = witness_profile(history, &x).expect("feasible point is a profile");
            if let Err(e) = check_witness(history, &profile) {
                panic!("witness for {history} fails direct check: {e}");
            }
            HistoryVerdict::IsHistory(profile)
        }
        LpVerdict::Infeasible(certificate) => {
            assert!(
                verify_farkas(&system, &certificate).expect("dimensions match"),
                "certificate for {history} does not verify"
            );
            HistoryVerdict::NotHistory(certificate)
        }
    }
}

/// Finds all canonical histories for `m` candidates and committee size `k`,
/// level by level, with a Farkas certificate for every rejected continuation.
pub fn enumerate_histories(m: usize, k: usize, options: &SearchOptions) -> crate::Result<Enumeration> {
    let started = Instant::now();
    let empty = History::empty(m, k)?;
    let mut result = Enumeration {
        m,
        k,
        histories: vec![KeptHistory {
            history: empty.clone(),
            witness: None,
        }],
        rejected: Vec::new(),
        complete: true,
    };
    let mut frontier = vec![empty];
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let candidates: Vec<History> = frontier
            .iter()
            .flat_map(|h| {
                canonical_continuations(h)
                    .into_iter()
                    .map(move |(w, t)| h.extended(w, t).expect("canonical continuation is valid"))
            })
            .collect();
        log::info!("level {level}: {} continuations of {} histories", candidates.len(), frontier.len());
        let verdicts: Vec<Option<HistoryVerdict>> = candidates
            .par_iter()
            .map(|h| {
                if options.budget.is_some_and(|b| started.elapsed() > b) {
                    return None;
                }
                Some(decide_history(h, options.solver))
            })
            .collect();
        frontier = Vec::new();
        for (history, verdict) in candidates.into_iter().zip(verdicts) {
            match verdict {
                None => result.complete = false,
                Some(HistoryVerdict::IsHistory(profile)) => {
                    frontier.push(history.clone());
                    result.histories.push(KeptHistory {
                        history,
                        witness: Some(profile),
                    });
                }
                Some(HistoryVerdict::NotHistory(certificate)) => result.rejected.push(Rejected { history, certificate }),
            }
        }
        if !result.complete {
            break;
        }
    }
    log::info!(
        "{} histories, {} certificates in {:.1?}",
        result.histories.len(),
        result.rejected.len(),
        started.elapsed()
    );
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> CandidateSet {
        ix.iter().map(|i| i - 1).collect()
    }

    #[test]
    fn classes_split_by_membership() {
        let classes = equivalence_classes(6, &[set(&[1, 2, 3]), set(&[1, 4])]);
        assert_eq!(classes, vec![set(&[1]), set(&[2, 3]), set(&[4]), set(&[5, 6])]);
        assert_eq!(equivalence_classes(3, &[]), vec![set(&[1, 2, 3])]);
    }

    #[test]
    fn first_step_is_one_per_shape() {
        let empty = History::empty(15, 13).unwrap();
        let conts = canonical_continuations(&empty);
        assert!(conts.iter().all(|(w, _)| *w == CandidateSet::range(0, 13)));
        // overlap 1..=11 with both outside candidates
        assert_eq!(conts.len(), 11);
        assert!(conts.contains(&(CandidateSet::range(0, 13), set(&[1, 14, 15]))));
    }

    #[test]
    fn second_step_follows_classes() {
        let h = History::new(15, 13, [(CandidateSet::range(0, 13), set(&[1, 14, 15]))]).unwrap();
        let conts = canonical_continuations(&h);
        let w2 = CandidateSet::range(0, 11) | set(&[14, 15]);
        assert!(conts.iter().all(|(w, _)| *w == w2));
        assert!(conts.contains(&(w2, set(&[2, 12, 13]))));
    }

    #[test]
    fn full_committee_has_no_continuations() {
        for k in 1..=4 {
            let e = enumerate_histories(k, k, &SearchOptions::default()).unwrap();
            assert_eq!(e.histories.len(), 1);
            assert!(e.rejected.is_empty());
        }
    }
}
