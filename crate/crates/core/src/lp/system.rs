use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::election::{CandidateSet, Rational};

/// Where a row of a [`LinearSystem`] comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowTag {
    /// `Σ x ≤ 1`
    NormalizationUpper,
    /// `-Σ x ≤ -1`
    NormalizationLower,
    /// Swapping `x` out for `y` at history step `step` (0-based) does not
    /// increase the PAV score.
    Swap { x: usize, y: usize, step: usize },
    /// Negated success condition of the deviation at `step`.
    Deviation { step: usize },
    /// `-P(ballot) ≤ 0`
    Nonnegativity { ballot: CandidateSet },
    /// A bound on an objective, added when certifying optimal values.
    ObjectiveBound,
    /// Anything else.
    Other,
}

/// One inequality `coeffs · x ≤ rhs`, with `coeffs` stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    /// `(variable, coefficient)` pairs, strictly increasing in variable, no zeros.
    coeffs: Vec<(u32, Rational)>,
    pub rhs: Rational,
    pub tag: RowTag,
}

impl Row {
    /// Builds a row from arbitrary `(variable, coefficient)` pairs; repeated
    /// variables are summed.
    pub fn new(coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational, tag: RowTag) -> Self {
        let mut coeffs: Vec<(u32, Rational)> = coeffs
            .into_iter()
            .map(|(j, c)| (u32::try_from(j).expect("variable index fits in u32"), c))
            .collect();
        coeffs.sort_by_key(|(j, _)| *j);
        let mut merged: Vec<(u32, Rational)> = Vec::with_capacity(coeffs.len());
        for (j, c) in coeffs {
            match merged.last_mut() {
                Some((last, acc)) if *last == j => *acc += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Row {
            coeffs: merged,
            rhs,
            tag,
        }
    }

    pub fn from_dense(coeffs: &[Rational], rhs: Rational, tag: RowTag) -> Self {
        Self::new(coeffs.iter().cloned().enumerate(), rhs, tag)
    }

    /// Nonzero coefficients in variable order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.coeffs.iter().map(|(j, c)| (*j as usize, c))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, variable: usize) -> Rational {
        self.coeffs
            .binary_search_by_key(&(variable as u32), |(j, _)| *j)
            .map(|i| self.coeffs[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn dense(&self, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for (j, c) in self.terms() {
            out[j] = c.clone();
        }
        out
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.terms().fold(Rational::zero(), |acc, (j, c)| acc + c * &x[j])
    }

    /// The variable this row bounds below by zero, if it has the form `-c·x_j ≤ 0` with `c > 0`.
    pub fn nonnegativity_of(&self) -> Option<usize> {
        match self.coeffs.as_slice() {
            [(j, c)] if c.is_negative() && self.rhs.is_zero() => Some(*j as usize),
            _ => None,
        }
    }
}

/// A system of inequalities `A x ≤ b` over rational `x`.
///
/// Variables are labelled by ballots. Equalities are represented as two
/// opposing rows. Variables are free unless the system contains a
/// nonnegativity row for them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<CandidateSet>,
    rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new(variables: Vec<CandidateSet>) -> Self {
        LinearSystem {
            variables,
            rows: Vec::new(),
        }
    }

    /// A system over `n` anonymous variables, labelled `1..=n` as bitmasks.
    pub fn with_variables(n: usize) -> Self {
        Self::new((1..=n as u64).map(CandidateSet::from_bits).collect())
    }

    pub fn push(&mut self, row: Row) {
        if let Some((j, _)) = row.coeffs.last() {
            assert!((*j as usize) < self.variables.len(), "row mentions variable {j} of {}", self.variables.len());
        }
        self.rows.push(row);
    }

    pub fn variables(&self) -> &[CandidateSet] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Whether `x` satisfies every row exactly.
    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len() && self.rows.iter().all(|r| r.evaluate(x) <= r.rhs)
    }

    /// `nonneg[j]` is true when some row is a nonnegativity bound on variable `j`.
    pub fn nonnegative_variables(&self) -> Vec<bool> {
        let mut nonneg = vec![false; self.variables.len()];
        for j in self.rows.iter().filter_map(Row::nonnegativity_of) {
            nonneg[j] = true;
        }
        nonneg
    }
}

/// Nonnegative integer row multipliers `y` proving `A x ≤ b` infeasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<BigInt>,
}

impl FarkasCertificate {
    /// Clears denominators of a rational multiplier vector and divides out the
    /// common factor of the numerators.
    pub fn from_rational(y: &[Rational]) -> Self {
        let lcm = y
            .iter()
            .fold(BigInt::from(1), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
        let scaled: Vec<BigInt> = y.iter().map(|v| (v * &lcm).to_integer()).collect();
        let gcd = scaled
            .iter()
            .fold(BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v));
        let multipliers = if gcd.is_zero() {
            scaled
        } else {
            scaled.into_iter().map(|v| v / &gcd).collect()
        };
        FarkasCertificate { multipliers }
    }

    /// Number of rows with a nonzero multiplier.
    pub fn support(&self) -> usize {
        self.multipliers.iter().filter(|m| !m.is_zero()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate has {multipliers} multipliers for a system with {rows} rows")]
pub struct DimensionMismatch {
    pub multipliers: usize,
    pub rows: usize,
}

/// Why a certificate does not verify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateFailure {
    NegativeMultiplier { row: usize },
    /// `yᵀb ≥ 0`
    RhsNotNegative(Rational),
    /// `(Aᵀy)_j < 0`, or `(Aᵀy)_j ≠ 0` on a variable with no nonnegativity row.
    Column { variable: usize, value: Rational },
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateFailure::NegativeMultiplier { row } => write!(f, "multiplier of row {row} is negative"),
            CertificateFailure::RhsNotNegative(v) => write!(f, "y·b = {v} is not negative"),
            CertificateFailure::Column { variable, value } => {
                write!(f, "column {variable} of Aᵀy is {value}")
            }
        }
    }
}

/// Checks a Farkas certificate with exact arithmetic and no solver:
/// `y ≥ 0`, `yᵀb < 0` and `Aᵀy ≥ 0`.
///
/// A positive entry of `Aᵀy` is accepted only on variables the system bounds
/// below by zero; free variables need `(Aᵀy)_j = 0`.
pub fn verify_farkas(system: &LinearSystem, certificate: &FarkasCertificate) -> Result<bool, DimensionMismatch> {
    Ok(check_farkas(system, certificate)?.is_ok())
}

/// Like [`verify_farkas`] but reports the first violated condition.
pub fn check_farkas(
    system: &LinearSystem,
    certificate: &FarkasCertificate,
) -> Result<Result<(), CertificateFailure>, DimensionMismatch> {
    let y = &certificate.multipliers;
    if y.len() != system.num_rows() {
        return Err(DimensionMismatch {
            multipliers: y.len(),
            rows: system.num_rows(),
        });
    }
    if let Some(row) = y.iter().position(|v| v.is_negative()) {
        return Ok(Err(CertificateFailure::NegativeMultiplier { row }));
    }
    let mut rhs = Rational::zero();
    let mut columns = vec![Rational::zero(); system.num_variables()];
    for (row, m) in system.rows().iter().zip(y) {
        if m.is_zero() {
            continue;
        }
        let m = Rational::from_integer(m.clone());
        rhs += &row.rhs * &m;
        for (j, c) in row.terms() {
            columns[j] += c * &m;
        }
    }
    if !rhs.is_negative() {
        return Ok(Err(CertificateFailure::RhsNotNegative(rhs)));
    }
    let nonneg = system.nonnegative_variables();
    for (j, value) in columns.into_iter().enumerate() {
        if value.is_negative() || (value.is_positive() && !nonneg[j]) {
            return Ok(Err(CertificateFailure::Column { variable: j, value }));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::election::int;

    pub(crate) fn two_rows(b0: i64) -> LinearSystem {
        let mut s = LinearSystem::with_variables(1);
        s.push(Row::new([(0, int(1))], int(b0), RowTag::Other));
        s.push(Row::new([(0, int(-1))], int(0), RowTag::Nonnegativity { ballot: CandidateSet::from_bits(1) }));
        s
    }

    fn cert(v: &[i64]) -> FarkasCertificate {
        FarkasCertificate {
            multipliers: v.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    #[test]
    fn verifies_two_row_contradiction() {
        let s = two_rows(-1);
        assert!(verify_farkas(&s, &cert(&[1, 1])).unwrap());
        // Aᵀy = 1 is fine because x is bounded below.
        assert!(verify_farkas(&s, &cert(&[1, 0])).unwrap());
        assert!(!verify_farkas(&s, &cert(&[0, 1])).unwrap());
        assert!(!verify_farkas(&s, &cert(&[-1, 1])).unwrap());
        assert!(verify_farkas(&s, &cert(&[1])).is_err());
    }

    #[test]
    fn free_variables_need_exact_cancellation() {
        let mut s = LinearSystem::with_variables(1);
        s.push(Row::new([(0, int(1))], int(-1), RowTag::Other));
        // x ≤ -1 alone is feasible; y = 1 must not verify.
        assert_eq!(
            check_farkas(&s, &cert(&[1])).unwrap(),
            Err(CertificateFailure::Column { variable: 0, value: int(1) })
        );
        s.push(Row::new([(0, int(-2))], int(1), RowTag::Other));
        // x ≤ -1 and x ≥ -1/2: 2·row0 + row1 gives 0 ≤ -1.
        assert!(verify_farkas(&s, &cert(&[2, 1])).unwrap());
    }

    #[test]
    fn rows_merge_and_drop_zeros() {
        let r = Row::new([(2, int(1)), (0, int(3)), (2, int(-1))], int(0), RowTag::Other);
        assert_eq!(r.nnz(), 1);
        assert_eq!(r.coefficient(0), int(3));
        assert_eq!(r.dense(3), vec![int(3), int(0), int(0)]);
    }

    #[test]
    fn certificate_scaling() {
        let c = FarkasCertificate::from_rational(&[crate::election::ratio(1, 2), crate::election::ratio(3, 4), int(0)]);
        assert_eq!(c.multipliers, vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]);
        assert_eq!(c.support(), 2);
    }
}
