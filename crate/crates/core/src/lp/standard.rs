//! Conversion of a [`LinearSystem`] into the column layout both simplex
//! implementations work on:
//!
//! ```text
//! A' x' + s - a = b',   x', s, a ≥ 0
//! ```
//!
//! where nonnegativity rows become variable bounds, free variables are split
//! into a positive and a negated column, every remaining row is scaled by a
//! positive integer so its coefficients and right-hand side are integral, and
//! an artificial column `a_i` exists only for rows with `b'_i < 0`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::system::LinearSystem;
use crate::election::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ColumnKind {
    Variable { index: usize, negated: bool },
    Slack,
    Artificial,
}

pub(crate) struct StandardForm {
    /// Original row index of each kept row.
    pub row_source: Vec<usize>,
    /// Positive integer multiplier applied to each kept row.
    pub row_scale: Vec<BigInt>,
    pub rhs: Vec<BigInt>,
    pub columns: Vec<Vec<(u32, BigInt)>>,
    /// `columns` and `rhs` as floats, for the floating-point pass and pricing hints.
    pub float_columns: Vec<Vec<(u32, f64)>>,
    pub float_rhs: Vec<f64>,
    pub kinds: Vec<ColumnKind>,
    /// Index of the slack column of each row.
    pub slack_of_row: Vec<usize>,
    /// Index of the artificial column of each row, if it has one.
    pub artificial_of_row: Vec<Option<usize>>,
    pub num_original_rows: usize,
    pub num_variables: usize,
}

impl StandardForm {
    pub fn new(system: &LinearSystem) -> Self {
        let nonneg = system.nonnegative_variables();
        let n = system.num_variables();

        // Columns: each variable (and its negation when free), then slacks, then artificials.
        let mut kinds = Vec::new();
        let mut positive_col = vec![0usize; n];
        let mut negative_col = vec![None; n];
        for j in 0..n {
            positive_col[j] = kinds.len();
            kinds.push(ColumnKind::Variable { index: j, negated: false });
            if !nonneg[j] {
                negative_col[j] = Some(kinds.len());
                kinds.push(ColumnKind::Variable { index: j, negated: true });
            }
        }
        let num_structural = kinds.len();
        let mut columns: Vec<Vec<(u32, BigInt)>> = vec![Vec::new(); num_structural];

        let mut row_source = Vec::new();
        let mut row_scale = Vec::new();
        let mut rhs = Vec::new();
        for (i, row) in system.rows().iter().enumerate() {
            if row.nonnegativity_of().is_some() {
                continue;
            }
            let r = row_source.len() as u32;
            let scale = row
                .terms()
                .map(|(_, c)| c.denom())
                .chain(std::iter::once(row.rhs.denom()))
                .fold(BigInt::from(1), |acc, d| num_integer::Integer::lcm(&acc, d));
            for (j, c) in row.terms() {
                let a = c.numer() * (&scale / c.denom());
                if let Some(neg) = negative_col[j] {
                    columns[neg].push((r, -a.clone()));
                }
                columns[positive_col[j]].push((r, a));
            }
            rhs.push(row.rhs.numer() * (&scale / row.rhs.denom()));
            row_scale.push(scale);
            row_source.push(i);
        }

        let m = row_source.len();
        let mut slack_of_row = Vec::with_capacity(m);
        for r in 0..m {
            slack_of_row.push(kinds.len());
            kinds.push(ColumnKind::Slack);
            columns.push(vec![(r as u32, BigInt::from(1))]);
        }
        let mut artificial_of_row = vec![None; m];
        for r in 0..m {
            if rhs[r].is_negative() {
                artificial_of_row[r] = Some(kinds.len());
                kinds.push(ColumnKind::Artificial);
                columns.push(vec![(r as u32, BigInt::from(-1))]);
            }
        }

        let float_columns = columns
            .iter()
            .map(|col| col.iter().map(|(r, a)| (*r, a.to_f64().unwrap_or(f64::NAN))).collect())
            .collect();
        let float_rhs = rhs.iter().map(|b| b.to_f64().unwrap_or(f64::NAN)).collect();
        StandardForm {
            row_source,
            row_scale,
            rhs,
            columns,
            float_columns,
            float_rhs,
            kinds,
            slack_of_row,
            artificial_of_row,
            num_original_rows: system.num_rows(),
            num_variables: n,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.row_source.len()
    }

    pub fn num_columns(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_artificial(&self, col: usize) -> bool {
        self.kinds[col] == ColumnKind::Artificial
    }

    /// The all-slack / artificial starting basis, which is feasible with value `|b'_i|`.
    pub fn initial_basis(&self) -> Vec<usize> {
        (0..self.num_rows())
            .map(|r| self.artificial_of_row[r].unwrap_or(self.slack_of_row[r]))
            .collect()
    }

    /// Phase-one cost: maximise `-Σ a`.
    pub fn phase_one_cost(&self) -> Vec<BigInt> {
        self.kinds
            .iter()
            .map(|k| match k {
                ColumnKind::Artificial => BigInt::from(-1),
                _ => BigInt::zero(),
            })
            .collect()
    }

    /// Integer cost vector over all columns proportional to `objective` over the variables.
    pub fn objective_cost(&self, objective: &[Rational]) -> Vec<BigInt> {
        let scale = objective
            .iter()
            .fold(BigInt::from(1), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let scale = Rational::from_integer(scale);
        self.kinds
            .iter()
            .map(|k| match k {
                ColumnKind::Variable { index, negated } => {
                    let c = (&objective[*index] * &scale).to_integer();
                    if *negated {
                        -c
                    } else {
                        c
                    }
                }
                _ => BigInt::zero(),
            })
            .collect()
    }

    /// Maps basic column values back to a value per original variable.
    pub fn assignment(&self, basis: &[usize], values: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_variables];
        for (&col, v) in basis.iter().zip(values) {
            if let ColumnKind::Variable { index, negated } = self.kinds[col] {
                if negated {
                    x[index] -= v;
                } else {
                    x[index] += v;
                }
            }
        }
        x
    }

    /// Maps duals of the scaled rows to multipliers on the original rows.
    pub fn original_multipliers(&self, duals: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.num_original_rows];
        for (r, d) in duals.iter().enumerate() {
            y[self.row_source[r]] = d * Rational::from_integer(self.row_scale[r].clone());
        }
        y
    }
}
