//! Floating-point revised simplex used only to suggest a starting basis for
//! the exact solver. Nothing it computes is ever reported.

use super::standard::StandardForm;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const INFEASIBLE_TOL: f64 = 1e-7;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_LIMIT: usize = 50;
const PERTURBATION: f64 = 1e-7;

struct FloatSimplex<'a> {
    sf: &'a StandardForm,
    m: usize,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    binv: Vec<f64>,
    beta: Vec<f64>,
    /// Right-hand side with a small positive perturbation per row, which keeps
    /// degenerate vertices from stalling the float pass.
    rhs: Vec<f64>,
    since_refactor: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Failed,
}

/// Runs phase one and, when `objective` is given and phase one reaches
/// feasibility, phase two. Returns the final basis, or `None` on numerical trouble.
pub(crate) fn suggest_basis(sf: &StandardForm, objective: Option<&[f64]>) -> Option<Vec<usize>> {
    let mut s = FloatSimplex::new(sf);
    let phase_one: Vec<f64> = (0..sf.num_columns())
        .map(|c| if sf.is_artificial(c) { -1.0 } else { 0.0 })
        .collect();
    match s.run(&phase_one, true) {
        PhaseEnd::Optimal => {}
        _ => return None,
    }
    let infeasibility: f64 = s
        .basis
        .iter()
        .zip(&s.beta)
        .filter(|(&c, _)| sf.is_artificial(c))
        .map(|(_, v)| *v)
        .sum();
    if infeasibility > INFEASIBLE_TOL {
        return Some(s.basis);
    }
    if let Some(objective) = objective {
        s.drive_out_artificials();
        match s.run(objective, false) {
            PhaseEnd::Optimal | PhaseEnd::Unbounded => {}
            PhaseEnd::Failed => return None,
        }
    }
    Some(s.basis)
}

fn perturbed_rhs(sf: &StandardForm) -> Vec<f64> {
    let mut row_max = vec![0.0f64; sf.num_rows()];
    for col in &sf.float_columns {
        for &(i, v) in col {
            row_max[i as usize] = row_max[i as usize].max(v.abs());
        }
    }
    sf.float_rhs
        .iter()
        .zip(&row_max)
        .enumerate()
        .map(|(i, (b, scale))| {
            let spread = 1.0 + (i as f64 * 0.618_033_988_7).fract();
            b + PERTURBATION * spread * scale.max(b.abs())
        })
        .collect()
}

impl<'a> FloatSimplex<'a> {
    fn new(sf: &'a StandardForm) -> Self {
        let m = sf.num_rows();
        let basis = sf.initial_basis();
        let mut s = FloatSimplex {
            sf,
            m,
            basic_row: vec![None; sf.num_columns()],
            basis,
            binv: vec![0.0; m * m],
            beta: vec![0.0; m],
            rhs: perturbed_rhs(sf),
            since_refactor: 0,
        };
        for (r, &c) in s.basis.iter().enumerate() {
            s.basic_row[c] = Some(r);
        }
        s.refactor();
        s
    }

    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (r, &c) in self.basis.iter().enumerate() {
            for &(i, v) in &self.sf.float_columns[c] {
                a[i as usize * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))
                .unwrap();
            if a[pivot * m + col].abs() < 1e-12 {
                return false;
            }
            if pivot != col {
                for k in 0..m {
                    a.swap(pivot * m + k, col * m + k);
                    inv.swap(pivot * m + k, col * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for row in 0..m {
                if row == col {
                    continue;
                }
                let f = a[row * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        a[row * m + k] -= f * a[col * m + k];
                        inv[row * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        for r in 0..m {
            let v: f64 = (0..m).map(|i| self.binv[r * m + i] * self.rhs[i]).sum();
            self.beta[r] = if v.abs() < 1e-11 { 0.0 } else { v };
        }
        self.since_refactor = 0;
        true
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (r, &c) in self.basis.iter().enumerate() {
            let cb = cost[c];
            if cb != 0.0 {
                for i in 0..m {
                    y[i] += cb * self.binv[r * m + i];
                }
            }
        }
        y
    }

    fn column_in_basis(&self, col: usize) -> Vec<f64> {
        let m = self.m;
        let mut u = vec![0.0; m];
        for &(i, v) in &self.sf.float_columns[col] {
            let i = i as usize;
            for r in 0..m {
                u[r] += self.binv[r * m + i] * v;
            }
        }
        u
    }

    fn run(&mut self, cost: &[f64], allow_artificial: bool) -> PhaseEnd {
        let limit = 50 * (self.m + self.sf.num_columns()) + 1000;
        let mut degenerate_run = 0;
        for _ in 0..limit {
            let y = self.duals(cost);
            let bland = degenerate_run > DEGENERATE_LIMIT;
            let mut entering = None;
            let mut best = COST_TOL;
            for (j, col) in self.sf.float_columns.iter().enumerate() {
                if self.basic_row[j].is_some() || (!allow_artificial && self.sf.is_artificial(j)) {
                    continue;
                }
                let d = cost[j] - col.iter().map(|&(i, v)| y[i as usize] * v).sum::<f64>();
                if d > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return PhaseEnd::Optimal;
            };
            let u = self.column_in_basis(q);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if u[r] > PIVOT_TOL {
                    let ratio = self.beta[r].max(0.0) / u[r];
                    let better = match leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12
                                    && if bland { self.basis[r] < self.basis[l] } else { u[r] > u[l] })
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, step)) = leave else {
                return PhaseEnd::Unbounded;
            };
            degenerate_run = if step < 1e-12 { degenerate_run + 1 } else { 0 };
            self.pivot(r, q, &u);
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return PhaseEnd::Failed;
            }
        }
        PhaseEnd::Failed
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[f64]) {
        let m = self.m;
        let p = u[r];
        for k in 0..m {
            self.binv[r * m + k] /= p;
        }
        self.beta[r] = self.beta[r].max(0.0) / p;
        for row in 0..m {
            if row == r || u[row] == 0.0 {
                continue;
            }
            let f = u[row];
            for k in 0..m {
                self.binv[row * m + k] -= f * self.binv[r * m + k];
            }
            self.beta[row] -= f * self.beta[r];
            if self.beta[row] < 0.0 && self.beta[row] > -1e-11 {
                self.beta[row] = 0.0;
            }
        }
        self.basic_row[self.basis[r]] = None;
        self.basis[r] = q;
        self.basic_row[q] = Some(r);
        self.since_refactor += 1;
    }

    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.sf.is_artificial(self.basis[r]) {
                continue;
            }
            let candidate = (0..self.sf.num_columns()).find(|&j| {
                self.basic_row[j].is_none()
                    && !self.sf.is_artificial(j)
                    && self.sf.float_columns[j]
                        .iter()
                        .map(|&(i, v)| self.binv[r * m + i as usize] * v)
                        .sum::<f64>()
                        .abs()
                        > 1e-7
            });
            if let Some(q) = candidate {
                let u = self.column_in_basis(q);
                self.pivot(r, q, &u);
            }
        }
    }
}
