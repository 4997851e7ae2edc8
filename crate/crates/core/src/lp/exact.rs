//! Exact revised simplex in integer-preserving form.
//!
//! The basis inverse is kept as `N / D` with `N` an integer matrix and `D` an
//! integer equal to `±det(B)`, so `N` is (up to sign) the adjugate of `B`. A
//! pivot on row `r` with `u = N a_q` sets `D' = u_r`, keeps row `r` of `N`, and
//! replaces every other row by `(u_r N_i - u_i N_r) / D`, a division that is
//! always exact. Basic values are kept the same way as `β / D`.
//!
//! Entering columns are suggested by floating-point reduced costs and always
//! confirmed in exact arithmetic; optimality is only declared after a full
//! exact pricing pass. The leaving row is chosen by the lexicographic ratio
//! test, so no entering rule can make the method cycle.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::standard::StandardForm;
use crate::election::Rational;

const FLOAT_COST_TOL: f64 = 1e-9;

pub(crate) struct ExactSimplex<'a> {
    sf: &'a StandardForm,
    m: usize,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    /// `D · B⁻¹`, row-major.
    adj: Vec<Vec<BigInt>>,
    /// `D · x_B`.
    beta: Vec<BigInt>,
    det: BigInt,
    /// Basis at the start of the current run; ties in the ratio test compare rows of
    /// `[x_B | B⁻¹ B₀]`, which are lexicographically positive at the start.
    origin: Vec<usize>,
    guided: bool,
    pub pivots: usize,
}

pub(crate) enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl<'a> ExactSimplex<'a> {
    /// Starts from the slack/artificial basis. With `hint`, the hinted columns
    /// are pivoted in and kept if the result is lexicographically feasible. `guided`
    /// enables floating-point suggestions for entering columns.
    pub fn start(sf: &'a StandardForm, hint: Option<Vec<usize>>, guided: bool) -> Self {
        let basis = sf.initial_basis();
        let m = sf.num_rows();
        let mut adj = vec![vec![BigInt::zero(); m]; m];
        let mut beta = Vec::with_capacity(m);
        for r in 0..m {
            let sign = if sf.is_artificial(basis[r]) { -1 } else { 1 };
            adj[r][r] = BigInt::from(sign);
            beta.push(&sf.rhs[r] * sign);
        }
        let mut basic_row = vec![None; sf.num_columns()];
        for (r, &c) in basis.iter().enumerate() {
            basic_row[c] = Some(r);
        }
        let fresh = ExactSimplex {
            sf,
            m,
            basis,
            basic_row,
            adj,
            beta,
            det: BigInt::one(),
            origin: Vec::new(),
            guided,
            pivots: 0,
        };
        if let Some(hint) = hint {
            let mut warm = ExactSimplex {
                sf,
                m,
                basis: fresh.basis.clone(),
                basic_row: fresh.basic_row.clone(),
                adj: fresh.adj.clone(),
                beta: fresh.beta.clone(),
                det: fresh.det.clone(),
                origin: Vec::new(),
                guided,
                pivots: 0,
            };
            if warm.crash(&hint) {
                warm.pivots = 0;
                return warm;
            }
        }
        fresh
    }

    /// Pivots the columns of `hint` into the basis; true if the resulting basis
    /// is the hinted one and primal feasible.
    fn crash(&mut self, hint: &[usize]) -> bool {
        if hint.len() != self.m {
            return false;
        }
        let mut wanted = vec![false; self.sf.num_columns()];
        for &c in hint {
            if c >= wanted.len() || wanted[c] {
                return false;
            }
            wanted[c] = true;
        }
        for &q in hint {
            if self.basic_row[q].is_some() {
                continue;
            }
            let u = self.column_in_basis(q);
            let Some(r) = (0..self.m).find(|&r| !wanted[self.basis[r]] && !u[r].is_zero()) else {
                return false;
            };
            self.pivot(r, q, &u);
        }
        let sign = self.det.sign();
        self.beta.iter().all(|b| b.is_zero() || b.sign() == sign)
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    /// Basic values `x_B`.
    pub fn values(&self) -> Vec<Rational> {
        self.beta
            .iter()
            .map(|b| Rational::new(b.clone(), self.det.clone()))
            .collect()
    }

    pub fn objective(&self, cost: &[BigInt]) -> Rational {
        let total = self
            .basis
            .iter()
            .zip(&self.beta)
            .filter(|(&c, _)| !cost[c].is_zero())
            .fold(BigInt::zero(), |acc, (&c, b)| acc + &cost[c] * b);
        Rational::new(total, self.det.clone())
    }

    /// `D · c_Bᵀ B⁻¹`.
    fn scaled_duals(&self, cost: &[BigInt]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.m];
        for (r, &c) in self.basis.iter().enumerate() {
            let cb = &cost[c];
            if cb.is_zero() {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(&self.adj[r]) {
                if !a.is_zero() {
                    *yi += cb * a;
                }
            }
        }
        y
    }

    /// Simplex multipliers `c_Bᵀ B⁻¹`.
    pub fn duals(&self, cost: &[BigInt]) -> Vec<Rational> {
        self.scaled_duals(cost)
            .into_iter()
            .map(|y| Rational::new(y, self.det.clone()))
            .collect()
    }

    /// `D · B⁻¹ a_col`.
    fn column_in_basis(&self, col: usize) -> Vec<BigInt> {
        let mut u = vec![BigInt::zero(); self.m];
        for (i, a) in &self.sf.columns[col] {
            let i = *i as usize;
            for (ur, row) in u.iter_mut().zip(&self.adj) {
                let n = &row[i];
                if !n.is_zero() {
                    *ur += n * a;
                }
            }
        }
        u
    }

    /// Whether column `j` has positive reduced cost, given `y = D · duals`.
    fn improves(&self, cost: &[BigInt], y: &[BigInt], j: usize) -> bool {
        // c_j - yᵀa_j / D > 0  ⇔  sign(D)·(c_j·D - yᵀa_j) > 0
        let mut d = &cost[j] * &self.det;
        for (i, a) in &self.sf.columns[j] {
            let yi = &y[*i as usize];
            if !yi.is_zero() {
                d -= yi * a;
            }
        }
        is_positive_scaled(d.sign(), self.det.sign())
    }

    fn eligible(&self, j: usize, allow_artificial: bool) -> bool {
        self.basic_row[j].is_none() && (allow_artificial || !self.sf.is_artificial(j))
    }

    /// Bland's entering rule: lowest-index eligible column with positive exact
    /// reduced cost.
    fn bland_entering(&self, cost: &[BigInt], y: &[BigInt], allow_artificial: bool) -> Option<usize> {
        (0..self.sf.num_columns()).find(|&j| self.eligible(j, allow_artificial) && self.improves(cost, y, j))
    }

    /// Column with the best floating-point reduced cost among those whose
    /// exact reduced cost is positive; falls back to Bland.
    fn guided_entering(&self, cost: &[BigInt], y: &[BigInt], allow_artificial: bool) -> Option<usize> {
        let det = self.det.to_f64().unwrap_or(f64::NAN);
        let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN) / det).collect();
        if yf.iter().any(|v| !v.is_finite()) {
            return self.bland_entering(cost, y, allow_artificial);
        }
        let fcost = |j: usize| cost[j].to_f64().unwrap_or(0.0);
        let mut scored: Vec<(f64, usize)> = (0..self.sf.num_columns())
            .filter(|&j| self.eligible(j, allow_artificial))
            .filter_map(|j| {
                let d = fcost(j)
                    - self.sf.float_columns[j]
                        .iter()
                        .map(|&(i, a)| yf[i as usize] * a)
                        .sum::<f64>();
                (d > FLOAT_COST_TOL).then_some((d, j))
            })
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        scored
            .into_iter()
            .take(8)
            .map(|(_, j)| j)
            .find(|&j| self.improves(cost, y, j))
            .or_else(|| self.bland_entering(cost, y, allow_artificial))
    }

    /// Maximises `cost` from the current basis.
    pub fn run(&mut self, cost: &[BigInt], allow_artificial: bool) -> PhaseEnd {
        self.origin = self.basis.clone();
        loop {
            let y = self.scaled_duals(cost);
            let q = if self.guided {
                self.guided_entering(cost, &y, allow_artificial)
            } else {
                self.bland_entering(cost, &y, allow_artificial)
            };
            let Some(q) = q else {
                return PhaseEnd::Optimal;
            };
            let u = self.column_in_basis(q);
            let Some(r) = self.leaving(&u) else {
                return PhaseEnd::Unbounded;
            };
            self.pivot(r, q, &u);
        }
    }

    /// Minimum ratio test with lexicographic tie-breaking on the rows of
    /// `[x_B | B⁻¹]`, which keeps every basis lexicographically feasible and
    /// rules out cycling whatever the entering rule.
    fn leaving(&self, u: &[BigInt]) -> Option<usize> {
        let sign = self.det.sign();
        let mut leave: Option<usize> = None;
        for r in 0..self.m {
            if !is_positive_scaled(u[r].sign(), sign) {
                continue;
            }
            leave = match leave {
                None => Some(r),
                Some(l) => Some(if self.lex_less(r, l, u) { r } else { l }),
            };
        }
        leave
    }

    /// Entry `j` of row `r` of `D · [x_B | B⁻¹ B₀]`.
    fn lex_entry(&self, r: usize, j: usize) -> BigInt {
        if j == 0 {
            return self.beta[r].clone();
        }
        self.sf.columns[self.origin[j - 1]]
            .iter()
            .fold(BigInt::zero(), |acc, (i, a)| acc + &self.adj[r][*i as usize] * a)
    }

    /// Whether row `r` of `[x_B | B⁻¹ B₀] / u_r` is lexicographically below
    /// row `l`. Both `u_r` and `u_l` share the sign of `D`, so multiplying by
    /// `u_r·u_l` keeps the order.
    fn lex_less(&self, r: usize, l: usize, u: &[BigInt]) -> bool {
        for j in 0..=self.m {
            let lhs = self.lex_entry(r, j) * &u[l];
            let rhs = self.lex_entry(l, j) * &u[r];
            if lhs != rhs {
                return lhs < rhs;
            }
        }
        unreachable!("rows of a nonsingular basis inverse are distinct")
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[BigInt]) {
        let p = u[r].clone();
        debug_assert!(!p.is_zero());
        let pivot_row = self.adj[r].clone();
        let pivot_beta = self.beta[r].clone();
        for row in 0..self.m {
            if row == r {
                continue;
            }
            let f = &u[row];
            let adj_row = &mut self.adj[row];
            for (v, pv) in adj_row.iter_mut().zip(&pivot_row) {
                let mut next = &p * &*v;
                if !f.is_zero() && !pv.is_zero() {
                    next -= f * pv;
                }
                *v = exact_div(next, &self.det);
            }
            let next = &p * &self.beta[row] - f * &pivot_beta;
            self.beta[row] = exact_div(next, &self.det);
        }
        self.det = p;
        self.basic_row[self.basis[r]] = None;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
        self.pivots += 1;
    }

    /// Replaces basic artificial columns (all at value zero after a successful
    /// phase one) by structural or slack columns where possible.
    pub fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if !self.sf.is_artificial(self.basis[r]) {
                continue;
            }
            debug_assert!(self.beta[r].is_zero());
            let candidate = (0..self.sf.num_columns()).find(|&j| {
                self.basic_row[j].is_none()
                    && !self.sf.is_artificial(j)
                    && !self.sf.columns[j]
                        .iter()
                        .fold(BigInt::zero(), |acc, (i, a)| acc + &self.adj[r][*i as usize] * a)
                        .is_zero()
            });
            if let Some(q) = candidate {
                let u = self.column_in_basis(q);
                self.pivot(r, q, &u);
            }
        }
    }
}

fn exact_div(n: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return n;
    }
    let (q, rem) = n.div_rem(d);
    debug_assert!(rem.is_zero(), "inexact division in integer-preserving pivot");
    q
}

/// Whether `v / D > 0` given the signs of `v` and `D`.
fn is_positive_scaled(v: Sign, d: Sign) -> bool {
    v != Sign::NoSign && v == d
}
