//! Histories of the recursive PAV rule and the linear systems deciding them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::election::{
    swap_delta, swap_delta_for_ballot, utility, ActiveSet, CandidateSet, Profile, Rational,
};
use crate::error::{Error, Result};
use crate::lp::{LinearSystem, Row, RowTag};
use crate::rules::TraceStep;
use crate::stability::deviation_support;

/// Largest `m` for which history systems are built (`2^m - 1` variables).
pub const MAX_HISTORY_CANDIDATES: usize = 20;

/// A potential history `(W_1, T_1), …, (W_r, T_r)` over `m` candidates with
/// committee size `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    m: usize,
    k: usize,
    steps: Vec<TraceStep>,
}

impl History {
    pub fn empty(m: usize, k: usize) -> Result<Self> {
        if m == 0 || m > MAX_HISTORY_CANDIDATES {
            return Err(Error::CandidateCount(m));
        }
        if k == 0 || k > m {
            return Err(Error::CommitteeSize { k, m });
        }
        Ok(History { m, k, steps: Vec::new() })
    }

    /// Builds and validates a potential history.
    pub fn new(m: usize, k: usize, steps: impl IntoIterator<Item = (CandidateSet, CandidateSet)>) -> Result<Self> {
        let mut history = History::empty(m, k)?;
        for (w, t) in steps {
            history = history.extended(w, t)?;
        }
        Ok(history)
    }

    /// This history with one more step, checked against the potential-history
    /// conditions.
    pub fn extended(&self, committee: CandidateSet, deviation: CandidateSet) -> Result<Self> {
        let universe = CandidateSet::all(self.m);
        let invalid = |msg: String| Err(Error::InvalidHistory(msg));
        if committee.len() != self.k || !committee.is_subset(universe) {
            return invalid(format!("committee {committee} is not a {}-subset of c1..c{}", self.k, self.m));
        }
        if deviation.is_empty() || deviation.len() > self.k || !deviation.is_subset(universe) {
            return invalid(format!("deviation {deviation} must be a nonempty subset of c1..c{} of size at most {}", self.m, self.k));
        }
        let fixed = self.fixed();
        if !fixed.is_subset(committee) {
            return invalid(format!("committee {committee} does not contain earlier deviations {fixed}"));
        }
        let mut steps = self.steps.clone();
        steps.push(TraceStep { committee, deviation });
        Ok(History { m: self.m, k: self.k, steps })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The history without its last step.
    pub fn parent(&self) -> Option<History> {
        (!self.steps.is_empty()).then(|| History {
            m: self.m,
            k: self.k,
            steps: self.steps[..self.steps.len() - 1].to_vec(),
        })
    }

    /// `T_1 ∪ … ∪ T_r`.
    pub fn fixed(&self) -> CandidateSet {
        self.fixed_before(self.steps.len())
    }

    /// `T_1 ∪ … ∪ T_{t}` for the first `t` steps.
    pub fn fixed_before(&self, t: usize) -> CandidateSet {
        self.steps[..t].iter().fold(CandidateSet::EMPTY, |acc, s| acc | s.deviation)
    }

    /// `|T_1| + … + |T_r|`.
    pub fn deviation_mass(&self) -> usize {
        self.steps.iter().map(|s| s.deviation.len()).sum()
    }

    /// Whether `ballot` is still active at step `t` (0-based): it supported
    /// none of the earlier deviations.
    pub fn is_active(&self, ballot: CandidateSet, t: usize) -> bool {
        self.steps[..t]
            .iter()
            .all(|s| utility(ballot, s.deviation) <= utility(ballot, s.committee))
    }

    /// Deterministic file-name friendly encoding with 1-based indices, e.g.
    /// `W1.2.3_T1.4__W1.2.4_T3.5`. The empty history encodes as `empty`.
    pub fn encode(&self) -> String {
        if self.steps.is_empty() {
            return "empty".to_string();
        }
        let list = |s: CandidateSet| s.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(".");
        self.steps
            .iter()
            .map(|s| format!("W{}_T{}", list(s.committee), list(s.deviation)))
            .collect::<Vec<_>>()
            .join("__")
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return f.write_str("(empty history)");
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", s.committee, s.deviation)?;
        }
        Ok(())
    }
}

/// Ballot variables of a history system: every nonempty subset of the first
/// `m` candidates, in bitmask order. Variable `j` is the ballot with bits `j + 1`.
pub fn ballot_variables(m: usize) -> Vec<CandidateSet> {
    (1..(1u64 << m)).map(CandidateSet::from_bits).collect()
}

/// The linear system whose feasible points are exactly the profiles making
/// `history` a history.
///
/// Rows, in order: `Σ P ≤ 1` and `-Σ P ≤ -1`; for every step the swap rows
/// `Σ_{A active} Δ_{A,x,y} P(A) ≤ 0` for `x ∈ W_t` minus earlier deviations and
/// `y ∉ W_t`, in `(x, y)` order; for every step the deviation row
/// `-Σ_{A supports T_t} P(A) ≤ -|T_t|/k`; then `-P(A) ≤ 0` for every ballot.
pub fn history_system(history: &History) -> LinearSystem {
    let m = history.m();
    let variables = ballot_variables(m);
    let universe = CandidateSet::all(m);
    let one = Rational::from_integer(BigInt::from(1));
    let mut system = LinearSystem::new(variables.clone());
    system.push(Row::new(
        (0..variables.len()).map(|j| (j, one.clone())),
        one.clone(),
        RowTag::NormalizationUpper,
    ));
    system.push(Row::new(
        (0..variables.len()).map(|j| (j, -one.clone())),
        -one.clone(),
        RowTag::NormalizationLower,
    ));
    for (t, step) in history.steps().iter().enumerate() {
        let active: Vec<bool> = variables.iter().map(|&a| history.is_active(a, t)).collect();
        let movable = step.committee - history.fixed_before(t);
        for x in movable.iter() {
            for y in (universe - step.committee).iter() {
                let coeffs = variables
                    .iter()
                    .enumerate()
                    .filter(|&(j, &a)| active[j] && a.contains(x) != a.contains(y))
                    .map(|(j, &a)| (j, swap_delta_for_ballot(a, step.committee, x, y)));
                system.push(Row::new(coeffs, Rational::zero(), RowTag::Swap { x, y, step: t }));
            }
        }
    }
    for (t, step) in history.steps().iter().enumerate() {
        let coeffs = variables
            .iter()
            .enumerate()
            .filter(|&(_, &a)| utility(a, step.deviation) > utility(a, step.committee))
            .map(|(j, _)| (j, -one.clone()));
        let rhs = -Rational::new(BigInt::from(step.deviation.len()), BigInt::from(history.k()));
        system.push(Row::new(coeffs, rhs, RowTag::Deviation { step: t }));
    }
    for (j, &a) in variables.iter().enumerate() {
        system.push(Row::new([(j, -one.clone())], Rational::zero(), RowTag::Nonnegativity { ballot: a }));
    }
    system
}

/// The profile described by a feasible point of [`history_system`].
pub fn witness_profile(history: &History, assignment: &[Rational]) -> Result<Profile> {
    let variables = ballot_variables(history.m());
    Profile::new(
        history.m(),
        variables
            .into_iter()
            .zip(assignment.iter().cloned())
            .filter(|(_, w)| !w.is_zero()),
    )
}

/// Checks directly, without the linear system, that `profile` realises
/// `history`: each `T_t` is a successful deviation from `W_t` and no swap of a
/// non-fixed member improves `W_t` over the ballots active at step `t`.
pub fn check_witness(history: &History, profile: &Profile) -> std::result::Result<(), String> {
    if profile.m() != history.m() {
        return Err(format!("profile has {} candidates, history {}", profile.m(), history.m()));
    }
    let universe = CandidateSet::all(history.m());
    for (t, step) in history.steps().iter().enumerate() {
        let support = deviation_support(profile, step.committee, step.deviation);
        let threshold = Rational::new(BigInt::from(step.deviation.len()), BigInt::from(history.k()));
        if support < threshold {
            return Err(format!("step {}: support {support} of {} is below {threshold}", t + 1, step.deviation));
        }
        let active = ActiveSet::filter(profile, |a| history.is_active(a, t));
        for x in (step.committee - history.fixed_before(t)).iter() {
            for y in (universe - step.committee).iter() {
                let delta = swap_delta(profile, &active, step.committee, x, y);
                if delta > Rational::zero() {
                    return Err(format!("step {}: swapping c{} for c{} gains {delta}", t + 1, x + 1, y + 1));
                }
            }
        }
    }
    Ok(())
}

/// True iff every history has `|T_1| + … + |T_r| ≤ k`.
pub fn check_proposition1(histories: &[History], k: usize) -> bool {
    histories.iter().all(|h| h.deviation_mass() <= k)
}
