//! The structure of blocked local PAV committees at `k = 8`: the optimisation
//! programs over the shape program for shape `(4, 2)`, each optimum certified, and
//! a direct check of the resulting structure on a given profile.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::election::{pav_score, ActiveSet, CandidateSet, Profile, Rational};
use crate::lp::{maximize, minimize, verify_farkas, FarkasCertificate, LinearSystem, Optimum, Row, RowTag};

use super::history::ballot_variables;
use super::shapes::{build_program3, DeviationShape};

const K: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One certified optimisation over the shape program.
#[derive(Clone, Debug)]
pub struct CertifiedOptimum {
    pub label: String,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub value: Rational,
    /// A feasible point attaining `value`.
    pub witness: Vec<Rational>,
    /// Certificate that the program plus "objective beats `value` by the
    /// margin" is infeasible.
    pub certificate: FarkasCertificate,
}

/// Margin by which the certified bound is tightened: `1/10⁶`.
pub fn optimality_margin() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1_000_000))
}

/// `system` plus the row asserting the objective beats `value` by the margin.
pub fn bound_system(system: &LinearSystem, objective: &[Rational], sense: Sense, value: &Rational) -> LinearSystem {
    let mut extended = system.clone();
    let margin = optimality_margin();
    let row = match sense {
        // f ≥ v + ε  ⇔  -f ≤ -(v + ε)
        Sense::Maximize => Row::new(
            objective.iter().map(|c| -c).enumerate(),
            -(value + margin),
            RowTag::ObjectiveBound,
        ),
        // f ≤ v - ε
        Sense::Minimize => Row::new(objective.iter().cloned().enumerate(), value - margin, RowTag::ObjectiveBound),
    };
    extended.push(row);
    extended
}

impl CertifiedOptimum {
    /// Re-checks both halves of the claim without a solver.
    pub fn verify(&self, system: &LinearSystem) -> bool {
        let attained = self
            .objective
            .iter()
            .zip(&self.witness)
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
        system.is_satisfied_by(&self.witness)
            && attained == self.value
            && verify_farkas(&bound_system(system, &self.objective, self.sense, &self.value), &self.certificate)
                .unwrap_or(false)
    }
}

fn certify(system: &LinearSystem, label: String, sense: Sense, objective: Vec<Rational>) -> CertifiedOptimum {
    let optimum = match sense {
        Sense::Maximize => maximize(system, &objective),
        Sense::Minimize => minimize(system, &objective),
    };
    let Optimum::Optimal { value, assignment } = optimum else {
        panic!("{label}: program has no finite optimum ({optimum:?})");
    };
    let extended = bound_system(system, &objective, sense, &value);
    let certificate = match crate::lp::solve_feasibility(&extended) {
        crate::lp::LpVerdict::Infeasible(c) => c,
        crate::lp::LpVerdict::Feasible(_) => panic!("{label}: optimum {value} is beaten"),
    };
    CertifiedOptimum {
        label,
        sense,
        objective,
        value,
        witness: assignment,
        certificate,
    }
}

/// All programs, with the layout `W = {c1..c8}`, `T = {c1, c2, c9, c10}`,
/// i.e. `a = c1`, `b = c2`, `x = c9`, `y = c10`.
#[derive(Clone, Debug)]
pub struct Lemma2Report {
    pub system: LinearSystem,
    pub committee: CandidateSet,
    pub deviation: CandidateSet,
    /// Max and min of `P({a,b,x})`, then of `P({a,b,y})`.
    pub split_quarters: Vec<CertifiedOptimum>,
    /// Max of `P(A)` for every other ballot meeting `T`.
    pub other_supporters: Vec<CertifiedOptimum>,
    /// Max and min of the score change from removing each `c ∈ W \ {a,b}`.
    pub removal_drops: Vec<CertifiedOptimum>,
}

impl Lemma2Report {
    pub fn all(&self) -> impl Iterator<Item = &CertifiedOptimum> {
        self.split_quarters
            .iter()
            .chain(&self.other_supporters)
            .chain(&self.removal_drops)
    }

    /// Every certificate and witness re-checked.
    pub fn verify(&self) -> bool {
        self.all().collect::<Vec<_>>().par_iter().all(|p| p.verify(&self.system))
    }
}

fn indicator(n: usize, j: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[j] = Rational::from_integer(BigInt::from(1));
    v
}

pub fn lemma2_suite() -> Lemma2Report {
    let shape = DeviationShape::new(4, 2);
    let system = build_program3(K, shape).expect("valid shape");
    let (w, t) = shape.layout(K);
    let variables = ballot_variables(K + shape.outside());
    let n = variables.len();
    let index = |a: CandidateSet| (a.bits() - 1) as usize;
    let (a, b, x, y) = (0, 1, K, K + 1);
    let abx = CandidateSet::from_iter([a, b, x]);
    let aby = CandidateSet::from_iter([a, b, y]);

    let mut jobs: Vec<(String, Sense, Vec<Rational>)> = Vec::new();
    for ballot in [abx, aby] {
        for sense in [Sense::Maximize, Sense::Minimize] {
            jobs.push((format!("{sense:?} P({ballot})"), sense, indicator(n, index(ballot))));
        }
    }
    let split = jobs.len();
    for &ballot in &variables {
        if ballot.is_disjoint(t) || ballot == abx || ballot == aby {
            continue;
        }
        jobs.push((format!("Maximize P({ballot})"), Sense::Maximize, indicator(n, index(ballot))));
    }
    let others = jobs.len();
    for c in (w - t).iter() {
        // Removing c costs 1/|A ∩ W| on every ballot approving it.
        let objective: Vec<Rational> = variables
            .iter()
            .map(|&ballot| {
                if ballot.contains(c) {
                    -Rational::new(BigInt::from(1), BigInt::from((ballot & w).len()))
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for sense in [Sense::Maximize, Sense::Minimize] {
            jobs.push((format!("{sense:?} score change removing c{}", c + 1), sense, objective.clone()));
        }
    }
    let mut results: Vec<CertifiedOptimum> = jobs
        .into_par_iter()
        .map(|(label, sense, objective)| certify(&system, label, sense, objective))
        .collect();
    let removal_drops = results.split_off(others);
    let other_supporters = results.split_off(split);
    Lemma2Report {
        system,
        committee: w,
        deviation: t,
        split_quarters: results,
        other_supporters,
        removal_drops,
    }
}

/// Checks on a concrete profile that `W` (eight members) blocked by
/// `T = {a, b, x, y}` (with `a, b ∈ W` and `x, y ∉ W`) has the forced
/// structure: a quarter of the mass on ballots meeting `W ∪ T` in exactly
/// `{a,b,x}`, a quarter on `{a,b,y}`, the remaining half on ballots disjoint
/// from `T`, and removing any member of `W \ {a,b}` costs exactly `1/12`.
pub fn verify_lemma2_structure(profile: &Profile, committee: CandidateSet, deviation: CandidateSet) -> bool {
    let inner = deviation & committee;
    let outer = deviation - committee;
    if committee.len() != K || deviation.len() != 4 || inner.len() != 2 || outer.len() != 2 {
        return false;
    }
    let universe = CandidateSet::all(profile.m());
    if !(committee | deviation).is_subset(universe) {
        return false;
    }
    let span = committee | deviation;
    let quarter = Rational::new(BigInt::from(1), BigInt::from(4));
    let mass = |keep: &dyn Fn(CandidateSet) -> bool| {
        profile
            .iter()
            .filter(|(a, _)| keep(*a))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    };
    for x in outer.iter() {
        let target = inner.with(x);
        if mass(&|a| (a & span) == target) != quarter {
            return false;
        }
    }
    if mass(&|a| a.is_disjoint(deviation)) != Rational::new(BigInt::from(1), BigInt::from(2)) {
        return false;
    }
    let active = ActiveSet::all(profile);
    let base = pav_score(profile, &active, committee);
    let drop = Rational::new(BigInt::from(-1), BigInt::from(12));
    (committee - inner)
        .iter()
        .all(|c| pav_score(profile, &active, committee.without(c)) - &base == drop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::ratio;

    fn set(ix: &[usize]) -> CandidateSet {
        ix.iter().map(|i| i - 1).collect()
    }

    #[test]
    fn structure_on_examples() {
        let w = set(&[1, 2, 5, 6, 7, 8, 9, 10]);
        let t = set(&[1, 2, 3, 4]);
        let p = Profile::from_counts(
            10,
            [(set(&[1, 2, 3]), 1), (set(&[1, 2, 4]), 1), (set(&[5, 6, 7, 8, 9, 10]), 2)],
        )
        .unwrap();
        assert!(verify_lemma2_structure(&p, w, t));
        let skewed = Profile::new(
            10,
            [
                (set(&[1, 2, 3]), ratio(26, 100)),
                (set(&[1, 2, 4]), ratio(24, 100)),
                (set(&[5, 6, 7, 8, 9, 10]), ratio(1, 2)),
            ],
        )
        .unwrap();
        assert!(!verify_lemma2_structure(&skewed, w, t));
        let single = Profile::from_counts(10, [(CandidateSet::all(10), 1)]).unwrap();
        assert!(!verify_lemma2_structure(&single, w, t));
        assert!(!verify_lemma2_structure(&p, w, set(&[1, 2, 3])));
    }

    #[test]
    fn bound_rows() {
        let mut s = LinearSystem::with_variables(1);
        s.push(Row::new([(0, ratio(1, 1))], ratio(1, 1), RowTag::Other));
        let e = bound_system(&s, &[ratio(1, 1)], Sense::Maximize, &ratio(1, 1));
        assert_eq!(e.rows()[1].rhs, -(ratio(1, 1) + optimality_margin()));
        let e = bound_system(&s, &[ratio(1, 1)], Sense::Minimize, &ratio(0, 1));
        assert_eq!(e.rows()[1].rhs, -optimality_margin());
    }
}
