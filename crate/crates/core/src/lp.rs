//! Dense two-phase tableau simplex for small linear programs of the form
//! `max/min cᵀx  s.t.  Ax ≤ b, x ≥ 0`.
//!
//! Bland's rule picks both the entering and the leaving variable, so the
//! method terminates on degenerate problems without perturbation. Sized for
//! a few dozen variables; the tableau is a single row-major `Vec<f64>`.

use crate::error::{Error, Result};

/// Smallest magnitude accepted as a pivot or a positive reduced cost.
pub const PIVOT_TOL: f64 = 1e-9;
/// Phase-one artificial level (relative to its row's |bᵢ|) above which a problem is infeasible.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Dense rows of A, each of length `objective.len()`.
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub maximize: bool,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
            rhs: Vec::new(),
            maximize: true,
        }
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self {
            maximize: false,
            ..Self::maximize(objective)
        }
    }

    /// Append the row `a·x ≤ b`.
    pub fn with_le(mut self, row: Vec<f64>, b: f64) -> Self {
        self.constraints.push(row);
        self.rhs.push(b);
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.rhs.len() != self.constraints.len() {
            return Err(Error::DimensionMismatch {
                what: "LP right-hand side vs constraint rows",
                expected: self.constraints.len(),
                got: self.rhs.len(),
            });
        }
        for row in &self.constraints {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "LP constraint row vs objective",
                    expected: n,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("LP constraint matrix"));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LP objective"));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LP right-hand side"));
        }
        Ok(())
    }

    /// Largest violation of `Ax ≤ b` and `x ≥ 0` at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().zip(&self.rhs).map(|(row, b)| {
            let ax: f64 = row.iter().zip(x).map(|(a, xi)| a * xi).sum();
            ax - b
        });
        let bounds = x.iter().map(|xi| -xi);
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, xi)| c * xi).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub x: Option<Vec<f64>>,
    pub value: Option<f64>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        Self {
            status,
            x: None,
            value: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    rows: usize,
    /// Columns excluding the right-hand side.
    cols: usize,
    data: Vec<f64>,
    /// Reduced costs (c_j − z_j) followed by −z in the last slot.
    reduced: Vec<f64>,
    basis: Vec<usize>,
    /// Columns barred from entering (artificials in phase two).
    barred: Vec<bool>,
    row_alive: Vec<bool>,
}

enum PivotOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width();
        self.reduced = vec![0.0; w];
        self.reduced[..self.cols].copy_from_slice(cost);
        for r in 0..self.rows {
            if !self.row_alive[r] {
                continue;
            }
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.data[r * w..(r + 1) * w];
                for (red, v) in self.reduced.iter_mut().zip(row) {
                    *red -= cb * v;
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let inv = 1.0 / self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr || !self.row_alive[r] {
                continue;
            }
            let factor = self.data[r * w + pc];
            if factor != 0.0 {
                let row = &mut self.data[r * w..(r + 1) * w];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[pc] = 0.0;
            }
        }
        let factor = self.reduced[pc];
        if factor != 0.0 {
            for (v, p) in self.reduced.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.reduced[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Run primal simplex iterations under Bland's rule until optimal or unbounded.
    fn iterate(&mut self, max_pivots: usize) -> Result<PivotOutcome> {
        for _ in 0..max_pivots {
            let entering = (0..self.cols).find(|&c| !self.barred[c] && self.reduced[c] > PIVOT_TOL);
            let Some(pc) = entering else {
                return Ok(PivotOutcome::Optimal);
            };

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                if !self.row_alive[r] {
                    continue;
                }
                let a = self.at(r, pc);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if (!tie && ratio < best) || (tie && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(PivotOutcome::Unbounded),
                Some((pr, _)) => self.pivot(pr, pc),
            }
        }
        Err(Error::InvalidParameter {
            field: "linear program",
            reason: format!("simplex exceeded {max_pivots} pivots"),
        })
    }
}

/// Solve a dense LP with the two-phase simplex method.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let sense = if lp.maximize { 1.0 } else { -1.0 };

    let negative_rows: Vec<usize> = (0..m).filter(|&i| lp.rhs[i] < 0.0).collect();
    let n_art = negative_rows.len();
    let cols = n + m + n_art;
    let w = cols + 1;

    let mut data = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        let flip = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut data[i * w..(i + 1) * w];
        for (dst, a) in row[..n].iter_mut().zip(&lp.constraints[i]) {
            *dst = flip * a;
        }
        row[n + i] = flip;
        row[cols] = flip * lp.rhs[i];
        if flip < 0.0 {
            row[n + m + art] = 1.0;
            basis[i] = n + m + art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }

    let mut t = Tableau {
        rows: m,
        cols,
        data,
        reduced: Vec::new(),
        basis,
        barred: vec![false; cols],
        row_alive: vec![true; m],
    };
    let max_pivots = 50 * (m + cols + 10) * (m + cols + 10);

    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        cost[n + m..].iter_mut().for_each(|c| *c = -1.0);
        t.set_costs(&cost);
        t.iterate(max_pivots)?;
        // Each artificial is judged against the scale of the row it repairs,
        // so a tiny row is not hidden behind a large one.
        let infeasible = (0..m).any(|r| {
            let b = t.basis[r];
            b >= n + m && t.rhs(r) > FEAS_TOL * (1.0 + lp.rhs[negative_rows[b - n - m]].abs())
        });
        if infeasible {
            return Ok(LpSolution::without_point(LpStatus::Infeasible));
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        for r in 0..m {
            if t.basis[r] < n + m {
                continue;
            }
            match (0..n + m).find(|&c| t.at(r, c).abs() > PIVOT_TOL) {
                Some(c) => t.pivot(r, c),
                None => t.row_alive[r] = false,
            }
        }
        for c in n + m..cols {
            t.barred[c] = true;
        }
    }

    let mut cost = vec![0.0; cols];
    for (dst, c) in cost[..n].iter_mut().zip(&lp.objective) {
        *dst = sense * c;
    }
    t.set_costs(&cost);
    if let PivotOutcome::Unbounded = t.iterate(max_pivots)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.row_alive[r] && t.basis[r] < n {
            let v = t.rhs(r);
            x[t.basis[r]] = if v < 0.0 && v > -PIVOT_TOL { 0.0 } else { v };
        }
    }
    let value = lp.value_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x: Some(x),
        value: Some(value),
    })
}
