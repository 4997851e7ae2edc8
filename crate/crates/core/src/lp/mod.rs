//! Exact linear-programming feasibility and optimisation with Farkas
//! certificates.
//!
//! Verdicts are decided by an exact integer-preserving simplex. A
//! floating-point simplex runs first and hands over its final basis as a
//! warm start; if that basis turns out singular or infeasible in exact
//! arithmetic it is discarded and the exact solver starts from scratch.
//! Floating-point reduced costs also guide pivoting, but every pivot and the
//! final optimality check are exact.

mod exact;
mod float;
mod standard;
mod system;

pub use system::{
    check_farkas, verify_farkas, CertificateFailure, DimensionMismatch, FarkasCertificate, LinearSystem, Row,
    RowTag,
};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::election::Rational;
use exact::{ExactSimplex, PhaseEnd};
use standard::StandardForm;

/// Result of a feasibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpVerdict {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl LpVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpVerdict::Feasible(_))
    }
}

/// Result of an optimisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: Rational, assignment: Vec<Rational> },
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl Optimum {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Optimum::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Run the floating-point pass to find a warm-start basis.
    pub float_hint: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { float_hint: true }
    }
}

pub fn solve_feasibility(system: &LinearSystem) -> LpVerdict {
    solve_feasibility_with(system, SolverOptions::default())
}

pub fn solve_feasibility_with(system: &LinearSystem, options: SolverOptions) -> LpVerdict {
    let sf = StandardForm::new(system);
    let hint = options.float_hint.then(|| float::suggest_basis(&sf, None)).flatten();
    match phase_one(&sf, hint, options.float_hint) {
        Ok(simplex) => LpVerdict::Feasible(sf.assignment(simplex.basis(), &simplex.values())),
        Err(certificate) => LpVerdict::Infeasible(certificate),
    }
}

pub fn maximize(system: &LinearSystem, objective: &[Rational]) -> Optimum {
    maximize_with(system, objective, SolverOptions::default())
}

pub fn maximize_with(system: &LinearSystem, objective: &[Rational], options: SolverOptions) -> Optimum {
    assert_eq!(objective.len(), system.num_variables(), "objective length");
    let sf = StandardForm::new(system);
    let cost = sf.objective_cost(objective);
    let hint = options
        .float_hint
        .then(|| {
            let fcost: Vec<f64> = cost.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
            float::suggest_basis(&sf, Some(&fcost))
        })
        .flatten();
    let mut simplex = match phase_one(&sf, hint, options.float_hint) {
        Ok(s) => s,
        Err(certificate) => return Optimum::Infeasible(certificate),
    };
    simplex.drive_out_artificials();
    match simplex.run(&cost, false) {
        PhaseEnd::Unbounded => Optimum::Unbounded,
        PhaseEnd::Optimal => {
            let assignment = sf.assignment(simplex.basis(), &simplex.values());
            let value = objective
                .iter()
                .zip(&assignment)
                .filter(|(c, _)| !c.is_zero())
                .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
            Optimum::Optimal { value, assignment }
        }
    }
}

pub fn minimize(system: &LinearSystem, objective: &[Rational]) -> Optimum {
    let negated: Vec<Rational> = objective.iter().map(|c| -c).collect();
    match maximize(system, &negated) {
        Optimum::Optimal { value, assignment } => Optimum::Optimal { value: -value, assignment },
        other => other,
    }
}

fn phase_one<'a>(
    sf: &'a StandardForm,
    hint: Option<Vec<usize>>,
    guided: bool,
) -> Result<ExactSimplex<'a>, FarkasCertificate> {
    let mut simplex = ExactSimplex::start(sf, hint, guided);
    let cost = sf.phase_one_cost();
    match simplex.run(&cost, true) {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => unreachable!("phase one is bounded above by zero"),
    }
    if simplex.objective(&cost).is_negative() {
        let y = sf.original_multipliers(&simplex.duals(&cost));
        return Err(FarkasCertificate::from_rational(&y));
    }
    log::trace!("phase one feasible after {} exact pivots", simplex.pivots);
    Ok(simplex)
}
