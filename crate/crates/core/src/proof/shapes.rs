//! The small-committee argument: the ballot inequality scan, the shape program for
//! a deviation shape, and the analytic Farkas certificate.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::election::{CandidateSet, Rational};
use crate::error::{Error, Result};
use crate::lp::{FarkasCertificate, LinearSystem, RowTag};

use super::history::{ballot_variables, history_system, History};
use crate::election::utility;

/// Sizes of a deviation relative to the committee: `|T|` and `|T ∩ W|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeviationShape {
    pub size: usize,
    pub overlap: usize,
}

impl DeviationShape {
    pub fn new(size: usize, overlap: usize) -> Self {
        DeviationShape { size, overlap }
    }

    /// `|T \ W|`
    pub fn outside(self) -> usize {
        self.size - self.overlap
    }

    /// Checks `1 ≤ size ≤ k`, `overlap < size` and `overlap ≤ k`.
    pub fn validate(self, k: usize) -> Result<()> {
        if self.size == 0 || self.size > k || self.overlap >= self.size || self.overlap > k {
            return Err(Error::InvalidShape(format!(
                "({}, {}) for k = {k}: need 1 ≤ |T| ≤ k and |T ∩ W| < |T|",
                self.size, self.overlap
            )));
        }
        Ok(())
    }

    /// Every shape with `|T \ W| ≥ 1` for committee size `k`, by size then overlap.
    pub fn all(k: usize) -> Vec<DeviationShape> {
        (1..=k)
            .flat_map(|size| (0..size).map(move |overlap| DeviationShape { size, overlap }))
            .collect()
    }

    /// Canonical layout over `k + |T \ W|` candidates: `W = {c1..ck}`, and `T`
    /// takes the first `overlap` members of `W` plus the candidates after `W`.
    pub fn layout(self, k: usize) -> (CandidateSet, CandidateSet) {
        let w = CandidateSet::range(0, k);
        let t = CandidateSet::range(0, self.overlap) | CandidateSet::range(k, k + self.outside());
        (w, t)
    }
}

impl fmt::Display for DeviationShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.size, self.overlap)
    }
}

/// Summed score change `δ_A` over the swaps `x ∈ W \ T`, `y ∈ T \ W` for a
/// ballot with `a = |A ∩ (W \ T)|`, `b = |A ∩ W ∩ T|`, `c = |A ∩ (T \ W)|`:
///
/// `δ_A = (|W∖T| - a)·c/(a+b+1) - a·(|T∖W| - c)/(a+b)`, the second term being 0
/// when `a = 0`.
pub fn delta_formula(shape: DeviationShape, k: usize, a: usize, b: usize, c: usize) -> Result<Rational> {
    if shape.overlap > k || shape.overlap > shape.size {
        return Err(Error::InvalidShape(format!("{shape} for k = {k}")));
    }
    let (w_out, t_out) = (k - shape.overlap, shape.outside());
    if a > w_out || b > shape.overlap || c > t_out {
        return Err(Error::InvalidShape(format!(
            "triple ({a}, {b}, {c}) out of range for shape {shape}, k = {k}"
        )));
    }
    let gain = Rational::new(BigInt::from((w_out - a) * c), BigInt::from(a + b + 1));
    let loss = if a == 0 {
        Rational::zero()
    } else {
        Rational::new(BigInt::from(a * (t_out - c)), BigInt::from(a + b))
    };
    Ok(gain - loss)
}

/// `(k/|T| - 1)·|T \ W|`, the value `δ_A` must exceed for every supporter.
pub fn delta_bound(shape: DeviationShape, k: usize) -> Rational {
    Rational::new(
        BigInt::from((k as i64 - shape.size as i64) * shape.outside() as i64),
        BigInt::from(shape.size),
    )
}

/// A supporter type whose `δ_A` does not exceed the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub shape: DeviationShape,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub delta: Rational,
    pub bound: Rational,
}

/// All shapes and supporter triples (`c > a`) with `δ_A ≤ (k/|T| - 1)·|T \ W|`.
pub fn inequality_scan(k: usize) -> Vec<Violation> {
    let mut violations = Vec::new();
    for shape in DeviationShape::all(k) {
        let bound = delta_bound(shape, k);
        for a in 0..=k - shape.overlap {
            for b in 0..=shape.overlap {
                for c in (a + 1)..=shape.outside() {
                    let delta = delta_formula(shape, k, a, b, c).expect("triple in range");
                    if delta <= bound {
                        violations.push(Violation {
                            shape,
                            a,
                            b,
                            c,
                            delta,
                            bound: bound.clone(),
                        });
                    }
                }
            }
        }
    }
    violations
}

/// The program whose feasible points are profiles over `W ∪ T` on which `W`
/// is a local PAV committee and `T` a successful deviation, in the canonical
/// layout of [`DeviationShape::layout`].
pub fn build_program3(k: usize, shape: DeviationShape) -> Result<LinearSystem> {
    shape.validate(k)?;
    let (w, t) = shape.layout(k);
    Ok(history_system(&History::new(k + shape.outside(), k, [(w, t)])?))
}

/// The certificate built in the small-committee proof: `α = |T \ W|` on
/// `Σ P ≤ 1`, `β = 1` on each swap row with `x ∈ W \ T` and `y ∈ T \ W`, and
/// `γ = α + min δ_A` over supporters on the deviation row, scaled to integers.
/// It verifies exactly when every supporter has `δ_A > (k/|T| - 1)·α`.
pub fn farkas_from_theorem1(k: usize, shape: DeviationShape) -> Result<FarkasCertificate> {
    let system = build_program3(k, shape)?;
    let (w, t) = shape.layout(k);
    let alpha = Rational::from_integer(BigInt::from(shape.outside()));
    let min_delta = ballot_variables(k + shape.outside())
        .into_iter()
        .filter(|&a| utility(a, t) > utility(a, w))
        .map(|a| {
            delta_formula(shape, k, (a & (w - t)).len(), (a & w & t).len(), (a & (t - w)).len())
                .expect("ballot counts are in range")
        })
        .min()
        .expect("T itself is a supporter");
    let gamma = &alpha + min_delta;
    let y: Vec<Rational> = system
        .rows()
        .iter()
        .map(|row| match row.tag {
            RowTag::NormalizationUpper => alpha.clone(),
            RowTag::Swap { x, y, .. } if !t.contains(x) && t.contains(y) => Rational::from_integer(BigInt::from(1)),
            RowTag::Deviation { .. } => gamma.clone(),
            _ => Rational::zero(),
        })
        .collect();
    Ok(FarkasCertificate::from_rational(&y))
}
