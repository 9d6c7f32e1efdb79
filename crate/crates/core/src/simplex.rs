//! Dense two-phase primal simplex for the linearized subproblems.
//!
//! Pivoting follows Bland's smallest-index rule in both phases, so every run is
//! deterministic and cannot cycle. On top of the plain solver sit a Gomory
//! fractional-cut loop (for 0-1 resolution) and a crossover that turns a
//! feasible interior point into a vertex without increasing the objective.

use serde::Serialize;
use thiserror::Error;

use crate::model::{BinarySolution, FractionalPoint};

pub const PIVOT_TOL: f64 = 1e-9;
/// A value is fractional when its distance to the nearest integer exceeds this.
pub const FRACTIONALITY_TOL: f64 = 1e-6;
/// Hard pivot cap; hitting it indicates a defect, not a tolerance problem.
pub const MAX_PIVOTS: usize = 1_000_000;

const PHASE_ONE_TOL: f64 = 1e-7;
const ZERO_SNAP: f64 = 1e-9;
/// Pivots between refactorizations of the tableau.
const REFACTOR_INTERVAL: usize = 100;
const DRIVE_OUT_TOL: f64 = 1e-7;
/// Smallest column entry accepted as a pivot by the ratio test.
const RATIO_PIVOT_TOL: f64 = 1e-7;
/// Largest cut coefficient or right-hand side accepted by the cut loop.
pub const MAX_CUT_COEF: f64 = 1e4;
/// Largest accepted ratio between nonzero cut coefficient magnitudes.
pub const MAX_CUT_RANGE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("objective has {objective} entries but the constraint matrix has {columns} columns")]
    Shape { objective: usize, columns: usize },
    #[error("constraint row {0} has the wrong length")]
    RaggedRow(usize),
    #[error("right-hand side {value} of row {row} is not strictly positive")]
    NonPositiveRhs { row: usize, value: f64 },
    #[error("rhs has {rhs} entries for {rows} rows")]
    RhsLength { rhs: usize, rows: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("0-1 resolution needs upper bounds of 1 on every variable")]
    MissingUpperBounds,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("starting point is not feasible")]
    InfeasibleStart,
    #[error("point has {actual} entries, expected {expected}")]
    PointDimension { expected: usize, actual: usize },
    #[error("pivot limit of {MAX_PIVOTS} exceeded")]
    PivotLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstraintSense {
    Geq,
    Leq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UpperBound {
    Infinite,
    One,
}

/// `min g.x` subject to `Ax (>= | <=) rhs`, `0 <= x <= u` with `u` either
/// infinite or 1 for every variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearProgram {
    objective: Vec<f64>,
    matrix: Vec<Vec<f64>>,
    sense: ConstraintSense,
    rhs: Vec<f64>,
    upper: UpperBound,
}

impl LinearProgram {
    /// All right-hand sides equal to one.
    pub fn new(
        objective: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        sense: ConstraintSense,
        upper: UpperBound,
    ) -> Result<Self, LpError> {
        let rhs = vec![1.0; matrix.len()];
        Self::with_rhs(objective, matrix, sense, rhs, upper)
    }

    pub fn with_rhs(
        objective: Vec<f64>,
        matrix: Vec<Vec<f64>>,
        sense: ConstraintSense,
        rhs: Vec<f64>,
        upper: UpperBound,
    ) -> Result<Self, LpError> {
        let n = objective.len();
        if rhs.len() != matrix.len() {
            return Err(LpError::RhsLength {
                rhs: rhs.len(),
                rows: matrix.len(),
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                if i == 0 {
                    return Err(LpError::Shape {
                        objective: n,
                        columns: row.len(),
                    });
                }
                return Err(LpError::RaggedRow(i));
            }
        }
        if let Some((row, &value)) = rhs.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
            return Err(LpError::NonPositiveRhs { row, value });
        }
        if objective
            .iter()
            .chain(matrix.iter().flatten())
            .chain(&rhs)
            .any(|v| !v.is_finite())
        {
            return Err(LpError::NonFinite);
        }
        Ok(Self {
            objective,
            matrix,
            sense,
            rhs,
            upper,
        })
    }

    /// Covering relaxation `min g.x, Ax >= 1, x >= 0` from a 0-1 matrix.
    pub fn covering(objective: Vec<f64>, a: &[Vec<u8>], upper: UpperBound) -> Result<Self, LpError> {
        let matrix = a
            .iter()
            .map(|row| row.iter().map(|&v| v as f64).collect())
            .collect();
        Self::new(objective, matrix, ConstraintSense::Geq, upper)
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn m(&self) -> usize {
        self.matrix.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn sense(&self) -> ConstraintSense {
        self.sense
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn upper(&self) -> UpperBound {
        self.upper
    }

    pub fn with_objective(&self, objective: Vec<f64>) -> Result<Self, LpError> {
        Self::with_rhs(
            objective,
            self.matrix.clone(),
            self.sense,
            self.rhs.clone(),
            self.upper,
        )
    }

    pub fn with_upper(&self, upper: UpperBound) -> Self {
        Self {
            upper,
            ..self.clone()
        }
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Primal feasibility with absolute slack `tol`.
    pub fn is_feasible_point(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.n() || x.iter().any(|&v| v < -tol) {
            return false;
        }
        if self.upper == UpperBound::One && x.iter().any(|&v| v > 1.0 + tol) {
            return false;
        }
        self.matrix.iter().zip(&self.rhs).all(|(row, &b)| {
            let s = dot(row, x);
            match self.sense {
                ConstraintSense::Geq => s >= b - tol,
                ConstraintSense::Leq => s <= b + tol,
            }
        })
    }

    /// Constraint rows including the `x_j <= 1` bound rows.
    fn rows(&self) -> Vec<Row> {
        let mut rows: Vec<Row> = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(coeffs, &rhs)| Row {
                coeffs: coeffs.clone(),
                sense: self.sense,
                rhs,
            })
            .collect();
        if self.upper == UpperBound::One {
            let n = self.n();
            rows.extend((0..n).map(|j| {
                let mut coeffs = vec![0.0; n];
                coeffs[j] = 1.0;
                Row {
                    coeffs,
                    sense: ConstraintSense::Leq,
                    rhs: 1.0,
                }
            }));
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    coeffs: Vec<f64>,
    sense: ConstraintSense,
    rhs: f64,
}

/// A Gomory cut `coeffs.x >= rhs`, expressed over the structural variables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cut {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Cut {
    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        dot(&self.coeffs, x) >= self.rhs - tol
    }

    /// True when coefficients and right-hand side stay within [`MAX_CUT_COEF`]
    /// and the nonzero magnitudes span at most [`MAX_CUT_RANGE`].
    pub fn is_well_scaled(&self) -> bool {
        let mags = self.coeffs.iter().map(|c| c.abs()).filter(|&c| c > PIVOT_TOL);
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0_f64), |(lo, hi), c| (lo.min(c), hi.max(c)));
        hi > 0.0 && hi <= MAX_CUT_COEF && self.rhs.abs() <= MAX_CUT_COEF && hi / lo <= MAX_CUT_RANGE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexOutcome {
    pub status: LpStatus,
    /// Final basic feasible solution (also present for `Unbounded`).
    pub point: Option<FractionalPoint>,
    /// `g.point` when optimal.
    pub value: Option<f64>,
    /// Recession direction with `g.ray < 0` when unbounded.
    pub ray: Option<Vec<f64>>,
    /// Basic columns; `0..n` are structural, `n..` are row slacks.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutLoopStatus {
    IntegerOptimal,
    CutCapReached,
    /// Every candidate cut had coefficients too badly scaled to add safely.
    CutsUnstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutLoopReport {
    pub status: CutLoopStatus,
    pub solution: Option<BinarySolution>,
    pub value: f64,
    pub cuts_added: usize,
    pub cuts: Vec<Cut>,
    /// Optimum of the last LP solved.
    pub last_point: FractionalPoint,
}

enum PhaseEnd {
    Optimal,
    Unbounded(usize),
}

/// Dense tableau in the standard form `[A | slacks | artificials | cut slacks] z = b`.
#[derive(Clone)]
struct Tableau {
    n: usize,
    /// Row definitions in x-space; cuts are appended after the original rows.
    rows: Vec<Row>,
    t: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    artificial_end: usize,
    pivots: usize,
    /// Initial rows, kept for refactorization.
    t0: Vec<Vec<f64>>,
    b0: Vec<f64>,
}

impl Tableau {
    fn new(n: usize, rows: Vec<Row>) -> Self {
        let r = rows.len();
        let mut t = Vec::with_capacity(r);
        let mut b = Vec::with_capacity(r);
        let mut needs_artificial = Vec::with_capacity(r);
        for (i, row) in rows.iter().enumerate() {
            let slack = match row.sense {
                ConstraintSense::Geq => -1.0,
                ConstraintSense::Leq => 1.0,
            };
            let flip = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let mut line = vec![0.0; n + r];
            for (dst, &a) in line.iter_mut().zip(&row.coeffs) {
                *dst = flip * a;
            }
            line[n + i] = flip * slack;
            t.push(line);
            b.push(flip * row.rhs);
            needs_artificial.push(flip * slack < 0.0);
        }
        let first_artificial = n + r;
        let artificial_count = needs_artificial.iter().filter(|&&v| v).count();
        let mut basis = Vec::with_capacity(r);
        let mut next = first_artificial;
        for (i, line) in t.iter_mut().enumerate() {
            line.resize(first_artificial + artificial_count, 0.0);
            if needs_artificial[i] {
                line[next] = 1.0;
                basis.push(next);
                next += 1;
            } else {
                basis.push(n + i);
            }
        }
        Self {
            n,
            rows,
            t0: t.clone(),
            b0: b.clone(),
            t,
            b,
            basis,
            first_artificial,
            artificial_end: first_artificial + artificial_count,
            pivots: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.t.first().map_or(self.first_artificial, Vec::len)
    }

    fn is_artificial(&self, col: usize) -> bool {
        (self.first_artificial..self.artificial_end).contains(&col)
    }

    /// Index into `rows` of the constraint whose slack is column `col`.
    fn slack_row(&self, col: usize) -> Option<usize> {
        if (self.n..self.first_artificial).contains(&col) {
            Some(col - self.n)
        } else if col >= self.artificial_end {
            Some(self.first_artificial - self.n + col - self.artificial_end)
        } else {
            None
        }
    }

    fn basic_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.ncols()];
        for &bv in &self.basis {
            mask[bv] = true;
        }
        mask
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (r, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb != 0.0 {
                for (dj, &tij) in d.iter_mut().zip(&self.t[r]) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        self.b[row] /= p;
        let pivot_row = self.t[row].clone();
        let pivot_b = self.b[row];
        for r in 0..self.t.len() {
            if r == row {
                continue;
            }
            let factor = self.t[r][col];
            if factor == 0.0 {
                continue;
            }
            for (v, &pv) in self.t[r].iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.t[r][col] = 0.0;
            self.b[r] -= factor * pivot_b;
            // Exact zeros keep degenerate pivots degenerate, which Bland's rule needs.
            if self.b[r].abs() <= ZERO_SNAP {
                self.b[r] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule iterations for `cost` until optimal or unbounded.
    fn iterate(&mut self, cost: &[f64], allow_artificial: bool) -> Result<PhaseEnd, LpError> {
        // Reduced-cost noise scales with the cost vector.
        let tol = PIVOT_TOL * cost.iter().fold(1.0_f64, |acc, c| acc.max(c.abs()));
        loop {
            if self.pivots > 0 && self.pivots.is_multiple_of(REFACTOR_INTERVAL) {
                self.refactor(!allow_artificial);
            }
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::PivotLimit);
            }
            let d = self.reduced_costs(cost);
            let basic = self.basic_mask();
            let entering = (0..self.ncols())
                .find(|&j| (allow_artificial || !self.is_artificial(j)) && d[j] < -tol && !basic[j]);
            let Some(q) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            // Tiny entries make poor pivots; use them only if nothing else bounds the step.
            let leave = self.ratio_test(q, RATIO_PIVOT_TOL).or_else(|| self.ratio_test(q, PIVOT_TOL));
            match leave {
                Some((r, _)) => self.pivot(r, q),
                None => return Ok(PhaseEnd::Unbounded(q)),
            }
        }
    }

    /// Dual simplex from a dual feasible basis until every basic value is
    /// nonnegative. Leaving rows and entering columns follow Bland's rule.
    /// Returns false when a row proves the constraints infeasible.
    fn dual_iterate(&mut self, cost: &[f64]) -> Result<bool, LpError> {
        loop {
            if self.pivots > 0 && self.pivots.is_multiple_of(REFACTOR_INTERVAL) {
                self.refactor(true);
            }
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::PivotLimit);
            }
            let Some(r) = (0..self.t.len())
                .filter(|&r| self.b[r] < -ZERO_SNAP)
                .min_by_key(|&r| self.basis[r])
            else {
                return Ok(true);
            };
            let d = self.reduced_costs(cost);
            let basic = self.basic_mask();
            let entering = |min_pivot: f64| {
                (0..self.ncols())
                    .filter(|&j| !basic[j] && !self.is_artificial(j) && self.t[r][j] < -min_pivot)
                    .map(|j| (j, d[j].max(0.0) / -self.t[r][j]))
                    .fold(None, |best: Option<(usize, f64)>, (j, ratio)| match best {
                        Some((_, b)) if ratio >= b - PIVOT_TOL * b.abs().max(1.0) => best,
                        _ => Some((j, ratio)),
                    })
            };
            match entering(RATIO_PIVOT_TOL).or_else(|| entering(PIVOT_TOL)) {
                Some((q, _)) => self.pivot(r, q),
                None => return Ok(false),
            }
        }
    }

    /// Appends `cut` as a new row whose slack enters the basis. `terms` and
    /// `f0` give the same cut over the current nonbasic columns.
    fn add_cut(&mut self, cut: &Cut, terms: &[(usize, f64)], f0: f64) {
        for line in self.t.iter_mut().chain(self.t0.iter_mut()) {
            line.push(0.0);
        }
        let ncols = self.ncols();
        let mut line = vec![0.0; ncols];
        for &(k, f) in terms {
            line[k] = -f;
        }
        line[ncols - 1] = 1.0;
        self.t.push(line);
        self.b.push(-f0);
        self.basis.push(ncols - 1);

        let mut line0 = vec![0.0; ncols];
        line0[..self.n].copy_from_slice(&cut.coeffs);
        line0[ncols - 1] = -1.0;
        self.t0.push(line0);
        self.b0.push(cut.rhs);
        self.rows.push(Row {
            coeffs: cut.coeffs.clone(),
            sense: ConstraintSense::Geq,
            rhs: cut.rhs,
        });
    }

    /// Appends the x-space row `coeffs.x (sense) rhs` with a fresh basic slack.
    fn add_row(&mut self, coeffs: &[f64], sense: ConstraintSense, rhs: f64) {
        for line in self.t.iter_mut().chain(self.t0.iter_mut()) {
            line.push(0.0);
        }
        let ncols = self.ncols();
        let slack = match sense {
            ConstraintSense::Geq => -1.0,
            ConstraintSense::Leq => 1.0,
        };
        let mut line0 = vec![0.0; ncols];
        line0[..self.n].copy_from_slice(coeffs);
        line0[ncols - 1] = slack;
        // Scale so the slack has coefficient +1, then eliminate basic columns.
        let mut line: Vec<f64> = line0.iter().map(|v| v * slack).collect();
        let mut b = rhs * slack;
        for (r, &bv) in self.basis.iter().enumerate() {
            let f = line[bv];
            if f != 0.0 {
                for (v, &tv) in line.iter_mut().zip(&self.t[r]) {
                    *v -= f * tv;
                }
                line[bv] = 0.0;
                b -= f * self.b[r];
            }
        }
        self.t.push(line);
        self.b.push(if b.abs() <= ZERO_SNAP { 0.0 } else { b });
        self.basis.push(ncols - 1);
        self.t0.push(line0);
        self.b0.push(rhs);
        self.rows.push(Row {
            coeffs: coeffs.to_vec(),
            sense,
            rhs,
        });
    }

    /// Restores optimality after rows were appended.
    fn reoptimize(&mut self, objective: &[f64]) -> Result<SimplexOutcome, LpError> {
        let cost = self.phase_two_cost(objective);
        if !self.dual_iterate(&cost)? {
            return Ok(self.infeasible_outcome());
        }
        let end = self.iterate(&cost, false)?;
        Ok(self.outcome(end, objective))
    }

    fn infeasible_outcome(&self) -> SimplexOutcome {
        SimplexOutcome {
            status: LpStatus::Infeasible,
            point: None,
            value: None,
            ray: None,
            basis: self.basic_columns(),
            pivots: self.pivots,
        }
    }

    /// Recomputes the tableau for the current basis from the initial rows by
    /// Gauss-Jordan elimination with partial pivoting, discarding the error
    /// accumulated by pivot updates. Leaves the tableau untouched when the
    /// basis matrix is numerically singular.
    fn refactor(&mut self, phase_two: bool) {
        let mut t = self.t0.clone();
        let mut b = self.b0.clone();
        let r = t.len();
        let mut basis = vec![0; r];
        let mut done = vec![false; r];
        for &col in &self.basis {
            let Some(row) = (0..r)
                .filter(|&i| !done[i])
                .max_by(|&i, &j| t[i][col].abs().total_cmp(&t[j][col].abs()))
            else {
                return;
            };
            let p = t[row][col];
            if p.abs() <= PIVOT_TOL {
                return;
            }
            for v in t[row].iter_mut() {
                *v /= p;
            }
            b[row] /= p;
            let pivot_row = t[row].clone();
            let pivot_b = b[row];
            for i in (0..r).filter(|&i| i != row) {
                let factor = t[i][col];
                if factor != 0.0 {
                    for (v, &pv) in t[i].iter_mut().zip(&pivot_row) {
                        *v -= factor * pv;
                    }
                    t[i][col] = 0.0;
                    b[i] -= factor * pivot_b;
                }
            }
            done[row] = true;
            basis[row] = col;
        }
        for v in b.iter_mut() {
            if v.abs() <= ZERO_SNAP {
                *v = 0.0;
            }
        }
        self.t = t;
        self.b = b;
        self.basis = basis;
        if phase_two {
            for row in 0..r {
                if self.is_artificial(self.basis[row]) {
                    self.clear_redundant(row);
                }
            }
        }
    }

    fn basic_columns(&self) -> Vec<usize> {
        self.basis.iter().copied().filter(|&c| !self.is_artificial(c)).collect()
    }

    fn clear_redundant(&mut self, row: usize) {
        self.b[row] = 0.0;
        let (first, end) = (self.first_artificial, self.artificial_end);
        for (j, v) in self.t[row].iter_mut().enumerate() {
            if !(first..end).contains(&j) {
                *v = 0.0;
            }
        }
    }

    /// Bland's ratio test over entries above `min_pivot`; ties go to the
    /// smallest basic index.
    fn ratio_test(&self, q: usize, min_pivot: f64) -> Option<(usize, f64)> {
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..self.t.len() {
            let a = self.t[r][q];
            if a <= min_pivot {
                continue;
            }
            let ratio = self.b[r].max(0.0) / a;
            leave = match leave {
                None => Some((r, ratio)),
                Some((best, best_ratio)) => {
                    let tie = (ratio - best_ratio).abs() <= PIVOT_TOL * best_ratio.abs().max(1.0);
                    if (tie && self.basis[r] < self.basis[best]) || (!tie && ratio < best_ratio) {
                        Some((r, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        leave
    }

    /// Phase one; returns false when the constraints are infeasible.
    fn phase_one(&mut self) -> Result<bool, LpError> {
        let ncols = self.ncols();
        if self.first_artificial == self.artificial_end {
            return Ok(true);
        }
        let cost: Vec<f64> = (0..ncols)
            .map(|j| if self.is_artificial(j) { 1.0 } else { 0.0 })
            .collect();
        self.iterate(&cost, true)?;
        let infeasibility: f64 = self
            .basis
            .iter()
            .zip(&self.b)
            .filter(|(&bv, _)| self.is_artificial(bv))
            .map(|(_, &v)| v)
            .sum();
        if infeasibility > PHASE_ONE_TOL {
            return Ok(false);
        }
        // Drive zero-level artificials out of the basis. A row with nothing to
        // pivot on is redundant: it keeps its artificial at zero, and since
        // artificials never re-enter it plays no further part.
        for r in 0..self.t.len() {
            if self.is_artificial(self.basis[r]) {
                self.b[r] = 0.0;
                let col = (0..self.first_artificial)
                    .filter(|&j| self.t[r][j].abs() > DRIVE_OUT_TOL)
                    .max_by(|&i, &j| self.t[r][i].abs().total_cmp(&self.t[r][j].abs()));
                match col {
                    Some(j) => self.pivot(r, j),
                    None => self.clear_redundant(r),
                }
            }
        }
        Ok(true)
    }

    fn phase_two_cost(&self, objective: &[f64]) -> Vec<f64> {
        let mut cost = vec![0.0; self.ncols()];
        cost[..self.n].copy_from_slice(objective);
        cost
    }

    fn structural_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, &bv) in self.basis.iter().enumerate() {
            if bv < self.n {
                x[bv] = self.b[r].max(0.0);
            }
        }
        x
    }

    fn ray(&self, q: usize) -> Vec<f64> {
        let mut ray = vec![0.0; self.n];
        if q < self.n {
            ray[q] = 1.0;
        }
        for (r, &bv) in self.basis.iter().enumerate() {
            if bv < self.n {
                ray[bv] = -self.t[r][q];
            }
        }
        ray
    }

    fn outcome(&self, end: PhaseEnd, objective: &[f64]) -> SimplexOutcome {
        let x = self.structural_point();
        let point = FractionalPoint::new_clamped(x.clone(), 1e-9).ok();
        match end {
            PhaseEnd::Optimal => SimplexOutcome {
                status: LpStatus::Optimal,
                point,
                value: Some(dot(objective, &x)),
                ray: None,
                basis: self.basic_columns(),
                pivots: self.pivots,
            },
            PhaseEnd::Unbounded(q) => SimplexOutcome {
                status: LpStatus::Unbounded,
                point,
                value: None,
                ray: Some(self.ray(q)),
                basis: self.basic_columns(),
                pivots: self.pivots,
            },
        }
    }

    /// Gomory fractional cut from the fractional row with the smallest basic
    /// index whose cut passes [`Cut::is_well_scaled`]. `None` means every
    /// candidate cut was rejected.
    fn gomory_cut(&self) -> Option<TableauCut> {
        let mut rows: Vec<usize> = (0..self.t.len())
            .filter(|&r| !self.is_artificial(self.basis[r]) && frac(self.b[r]) > FRACTIONALITY_TOL)
            .collect();
        rows.sort_by_key(|&r| self.basis[r]);
        rows.into_iter()
            .map(|r| self.cut_from_row(r))
            .find(|c| c.cut.is_well_scaled())
    }

    fn cut_from_row(&self, row: usize) -> TableauCut {
        let basic = self.basic_mask();
        let f0 = frac(self.b[row]);
        let mut coeffs = vec![0.0; self.n];
        let mut rhs = f0;
        let mut terms = Vec::new();
        for k in (0..self.ncols()).filter(|&k| !basic[k] && !self.is_artificial(k)) {
            let f = frac(self.t[row][k]);
            if f == 0.0 {
                continue;
            }
            terms.push((k, f));
            match self.slack_row(k) {
                None => coeffs[k] += f,
                Some(i) => {
                    // slack = sign * (row.x - rhs)
                    let def = &self.rows[i];
                    let sign = match def.sense {
                        ConstraintSense::Geq => 1.0,
                        ConstraintSense::Leq => -1.0,
                    };
                    for (c, &a) in coeffs.iter_mut().zip(&def.coeffs) {
                        *c += f * sign * a;
                    }
                    rhs += f * sign * def.rhs;
                }
            }
        }
        TableauCut {
            cut: Cut { coeffs, rhs },
            terms,
            f0,
        }
    }
}

/// A cut in x-space together with its form over the nonbasic columns.
struct TableauCut {
    cut: Cut,
    terms: Vec<(usize, f64)>,
    f0: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fractional part, with values within 1e-9 of an integer treated as integral.
fn frac(v: f64) -> f64 {
    let f = v - v.floor();
    if !(1e-9..=1.0 - 1e-9).contains(&f) {
        0.0
    } else {
        f
    }
}

fn solve_rows(n: usize, rows: Vec<Row>, objective: &[f64]) -> Result<(Tableau, SimplexOutcome), LpError> {
    let mut tab = Tableau::new(n, rows);
    if !tab.phase_one()? {
        let outcome = tab.infeasible_outcome();
        return Ok((tab, outcome));
    }
    let cost = tab.phase_two_cost(objective);
    let end = tab.iterate(&cost, false)?;
    let outcome = tab.outcome(end, objective);
    Ok((tab, outcome))
}

/// An optimal tableau that accepts variable fixings and re-optimizes from the
/// previous basis with the dual simplex.
#[derive(Clone)]
pub(crate) struct WarmLp {
    tab: Tableau,
    objective: Vec<f64>,
    outcome: SimplexOutcome,
}

impl WarmLp {
    pub(crate) fn new(lp: &LinearProgram) -> Result<Self, LpError> {
        let (tab, outcome) = solve_rows(lp.n(), lp.rows(), &lp.objective)?;
        Ok(Self {
            tab,
            objective: lp.objective.clone(),
            outcome,
        })
    }

    pub(crate) fn outcome(&self) -> &SimplexOutcome {
        &self.outcome
    }

    /// Adds `x_j = value` and re-optimizes. No-op on an infeasible LP.
    pub(crate) fn fix(&mut self, j: usize, value: bool) -> Result<(), LpError> {
        if self.outcome.status == LpStatus::Infeasible {
            return Ok(());
        }
        let mut coeffs = vec![0.0; self.tab.n];
        coeffs[j] = 1.0;
        if value {
            self.tab.add_row(&coeffs, ConstraintSense::Geq, 1.0);
        } else {
            self.tab.add_row(&coeffs, ConstraintSense::Leq, 0.0);
        }
        self.outcome = self.tab.reoptimize(&self.objective)?;
        Ok(())
    }
}

/// Solves `lp` to a vertex optimum or an unboundedness certificate.
pub fn solve_lp(lp: &LinearProgram) -> Result<SimplexOutcome, LpError> {
    solve_rows(lp.n(), lp.rows(), &lp.objective).map(|(_, outcome)| outcome)
}

/// Solves `lp` (with 0-1 bounds), then adds one Gomory fractional cut per
/// round and re-optimizes with the dual simplex, until the optimum is integral
/// or `cut_cap` cuts were added.
pub fn gomory_binary_solve(lp: &LinearProgram, cut_cap: usize) -> Result<CutLoopReport, LpError> {
    if lp.upper != UpperBound::One {
        return Err(LpError::MissingUpperBounds);
    }
    let (mut tab, mut outcome) = solve_rows(lp.n(), lp.rows(), &lp.objective)?;
    let mut cuts: Vec<Cut> = Vec::new();
    loop {
        match outcome.status {
            LpStatus::Unbounded => return Err(LpError::Unbounded),
            LpStatus::Infeasible => return Err(LpError::Infeasible),
            LpStatus::Optimal => {}
        }
        let point = outcome.point.clone().expect("optimal outcome carries a point");
        let value = outcome.value.unwrap_or_default();
        let integral = point
            .values()
            .iter()
            .all(|&v| (v - v.round()).abs() <= FRACTIONALITY_TOL);
        if integral {
            let solution = BinarySolution::from_point(&point, FRACTIONALITY_TOL).ok();
            return Ok(CutLoopReport {
                status: CutLoopStatus::IntegerOptimal,
                solution,
                value,
                cuts_added: cuts.len(),
                cuts,
                last_point: point,
            });
        }
        let next = if cuts.len() < cut_cap {
            tab.gomory_cut().ok_or(CutLoopStatus::CutsUnstable)
        } else {
            Err(CutLoopStatus::CutCapReached)
        };
        match next {
            Ok(c) => {
                tab.add_cut(&c.cut, &c.terms, c.f0);
                cuts.push(c.cut);
                outcome = tab.reoptimize(&lp.objective)?;
            }
            Err(status) => {
                return Ok(CutLoopReport {
                    status,
                    solution: None,
                    value,
                    cuts_added: cuts.len(),
                    cuts,
                    last_point: point,
                })
            }
        }
    }
}

/// Moves a feasible point to a basic feasible solution without increasing
/// `g.x`, then re-optimizes from that vertex with the primal simplex.
pub fn crossover_to_vertex(lp: &LinearProgram, x: &FractionalPoint) -> Result<SimplexOutcome, LpError> {
    let n = lp.n();
    if x.values().len() != n {
        return Err(LpError::PointDimension {
            expected: n,
            actual: x.values().len(),
        });
    }
    if !lp.is_feasible_point(x.values(), 1e-9) {
        return Err(LpError::InfeasibleStart);
    }
    let rows = lp.rows();
    let g = &lp.objective;
    let mut y = x.values().to_vec();
    loop {
        let active = active_normals(&rows, &y);
        let Some(mut dir) = null_direction(&active, n) else {
            break;
        };
        let slope = dot(g, &dir);
        let scale = norm(g) * norm(&dir);
        if slope > PIVOT_TOL * scale.max(1.0) {
            negate(&mut dir);
        } else if slope.abs() <= PIVOT_TOL * scale.max(1.0) {
            // No objective change either way: push the lowest-index variable down.
            if dir.iter().find(|v| v.abs() > PIVOT_TOL).is_some_and(|&v| v > 0.0) {
                negate(&mut dir);
            }
        }
        let step = match max_step(&rows, &y, &dir) {
            Some(step) => step,
            None if dot(g, &dir) < -PIVOT_TOL * scale.max(1.0) => {
                return Ok(SimplexOutcome {
                    status: LpStatus::Unbounded,
                    point: FractionalPoint::new_clamped(y, 1e-9).ok(),
                    value: None,
                    ray: Some(dir),
                    basis: Vec::new(),
                    pivots: 0,
                });
            }
            None => {
                negate(&mut dir);
                max_step(&rows, &y, &dir).expect("polyhedron in the nonnegative orthant has no lines")
            }
        };
        for (yj, dj) in y.iter_mut().zip(&dir) {
            *yj += step * dj;
            if yj.abs() < 1e-12 {
                *yj = 0.0;
            }
        }
    }
    // Recover a basis: the vertex uniquely minimizes the sum of its active
    // constraint normals.
    let mut steer = vec![0.0; n];
    for (normal, _) in active_normals(&rows, &y) {
        for (s, v) in steer.iter_mut().zip(&normal) {
            *s += v;
        }
    }
    let mut tab = Tableau::new(n, rows);
    if !tab.phase_one()? {
        return Err(LpError::Infeasible);
    }
    let steer_cost = tab.phase_two_cost(&steer);
    tab.iterate(&steer_cost, false)?;
    let cost = tab.phase_two_cost(g);
    let end = tab.iterate(&cost, false)?;
    Ok(tab.outcome(end, g))
}

/// Inward normals (and right-hand sides) of the constraints tight at `y`,
/// oriented so that `normal.x >= rhs` on the feasible set.
fn active_normals(rows: &[Row], y: &[f64]) -> Vec<(Vec<f64>, f64)> {
    let n = y.len();
    let mut active = Vec::new();
    for row in rows {
        let s = dot(&row.coeffs, y);
        if (s - row.rhs).abs() <= 1e-9 * row.rhs.abs().max(1.0) {
            match row.sense {
                ConstraintSense::Geq => active.push((row.coeffs.clone(), row.rhs)),
                ConstraintSense::Leq => {
                    active.push((row.coeffs.iter().map(|v| -v).collect(), -row.rhs))
                }
            }
        }
    }
    for (j, &v) in y.iter().enumerate() {
        if v.abs() <= 1e-9 {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            active.push((e, 0.0));
        }
    }
    active
}

/// A nonzero direction orthogonal to every active normal, or `None` at a vertex.
fn null_direction(active: &[(Vec<f64>, f64)], n: usize) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = active.iter().map(|(a, _)| a.clone()).collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m.len() {
            break;
        }
        let best = (row..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[best][col].abs() <= PIVOT_TOL {
            continue;
        }
        m.swap(row, best);
        let p = m[row][col];
        for v in m[row].iter_mut() {
            *v /= p;
        }
        let pr = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r != row && line[col] != 0.0 {
                let f = line[col];
                for (v, &pv) in line.iter_mut().zip(&pr) {
                    *v -= f * pv;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut dir = vec![0.0; n];
    dir[free] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        dir[pc] = -m[r][free];
    }
    Some(dir)
}

/// Largest `t` keeping `y + t dir` feasible; `None` if unlimited.
fn max_step(rows: &[Row], y: &[f64], dir: &[f64]) -> Option<f64> {
    let mut step: Option<f64> = None;
    let mut limit = |t: f64| {
        let t = t.max(0.0);
        step = Some(step.map_or(t, |s: f64| s.min(t)));
    };
    for row in rows {
        let rate = dot(&row.coeffs, dir);
        let gap = dot(&row.coeffs, y) - row.rhs;
        match row.sense {
            ConstraintSense::Geq if rate < -PIVOT_TOL => limit(gap / -rate),
            ConstraintSense::Leq if rate > PIVOT_TOL => limit(-gap / rate),
            _ => {}
        }
    }
    for (&yj, &dj) in y.iter().zip(dir) {
        if dj < -PIVOT_TOL {
            limit(yj / -dj);
        }
    }
    step
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn negate(v: &mut [f64]) {
    for x in v.iter_mut() {
        *x = -*x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_matrix() -> Vec<Vec<u8>> {
        vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]]
    }

    fn covering(g: &[f64], upper: UpperBound) -> LinearProgram {
        LinearProgram::covering(g.to_vec(), &star_matrix(), upper).unwrap()
    }

    fn assert_point(outcome: &SimplexOutcome, expected: &[f64]) {
        let p = outcome.point.as_ref().unwrap();
        for (a, b) in p.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", p.values(), expected);
        }
    }

    #[test]
    fn linearized_subproblems_from_the_drawback_examples() {
        let out = solve_lp(&covering(&[20.0, 4.0, 4.0, 4.0], UpperBound::Infinite)).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_point(&out, &[0.0, 1.0, 1.0, 1.0]);
        assert!((out.value.unwrap() - 12.0).abs() < 1e-9);

        let out = solve_lp(&covering(&[8.0, 2.0, 2.0, 2.0], UpperBound::Infinite)).unwrap();
        assert_point(&out, &[0.0, 1.0, 1.0, 1.0]);
        assert!((out.value.unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_subproblem_has_certificate() {
        let g = [20.0, -6.0, -8.0, -8.0];
        let out = solve_lp(&covering(&g, UpperBound::Infinite)).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        let ray = out.ray.unwrap();
        assert!(ray.iter().all(|&v| v >= -1e-12));
        assert!(dot(&g, &ray) < 0.0);
        for row in star_matrix() {
            let r: f64 = row.iter().zip(&ray).map(|(&a, v)| a as f64 * v).sum();
            assert!(r >= -1e-12);
        }
    }

    #[test]
    fn single_variable() {
        let lp = LinearProgram::new(vec![1.0], vec![vec![1.0]], ConstraintSense::Geq, UpperBound::Infinite)
            .unwrap();
        let out = solve_lp(&lp).unwrap();
        assert_point(&out, &[1.0]);
        assert_eq!(out.value, Some(1.0));
    }

    #[test]
    fn infeasible_with_upper_bounds() {
        let lp = LinearProgram::with_rhs(
            vec![1.0],
            vec![vec![1.0]],
            ConstraintSense::Geq,
            vec![2.0],
            UpperBound::One,
        )
        .unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        assert_eq!(gomory_binary_solve(&lp, 5), Err(LpError::Infeasible));
    }

    #[test]
    fn packing_rows() {
        // max x1 + x2 + x3 with x1+x2 <= 1, x2+x3 <= 1 -> (1,0,1)
        let lp = LinearProgram::new(
            vec![-1.0, -1.0, -1.0],
            vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]],
            ConstraintSense::Leq,
            UpperBound::Infinite,
        )
        .unwrap();
        let out = solve_lp(&lp).unwrap();
        assert_point(&out, &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            LinearProgram::new(vec![1.0], vec![vec![1.0, 1.0]], ConstraintSense::Geq, UpperBound::One),
            Err(LpError::Shape { .. })
        ));
        assert!(matches!(
            LinearProgram::with_rhs(vec![1.0], vec![vec![1.0]], ConstraintSense::Geq, vec![0.0], UpperBound::One),
            Err(LpError::NonPositiveRhs { .. })
        ));
        let lp = covering(&[1.0; 4], UpperBound::Infinite);
        assert_eq!(gomory_binary_solve(&lp, 3), Err(LpError::MissingUpperBounds));
    }

    fn triangle_cover() -> LinearProgram {
        LinearProgram::new(
            vec![1.0, 1.0, 1.0],
            vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]],
            ConstraintSense::Geq,
            UpperBound::One,
        )
        .unwrap()
    }

    #[test]
    fn gomory_closes_the_odd_cycle_gap() {
        let lp = triangle_cover();
        let relaxed = solve_lp(&lp).unwrap();
        assert_point(&relaxed, &[0.5, 0.5, 0.5]);

        let report = gomory_binary_solve(&lp, 50).unwrap();
        assert_eq!(report.status, CutLoopStatus::IntegerOptimal);
        assert!(report.cuts_added >= 1);
        assert!((report.value - 2.0).abs() < 1e-9);
        for bits in 0u32..8 {
            let x: Vec<f64> = (0..3).map(|j| ((bits >> j) & 1) as f64).collect();
            if lp.is_feasible_point(&x, 1e-9) {
                assert!(report.cuts.iter().all(|c| c.is_satisfied(&x, 1e-9)));
            }
        }
    }

    /// Fixing x_j by a dual re-solve must match a fresh solve of the LP with
    /// column j eliminated.
    #[test]
    fn warm_fixings_match_fresh_solves() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(3..7);
            let m = rng.gen_range(2..7);
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| f64::from(u8::from(rng.gen_bool(0.5)))).collect())
                .filter(|row: &Vec<f64>| row.iter().sum::<f64>() >= 2.0)
                .collect();
            if a.is_empty() {
                continue;
            }
            let g: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(1..20)) / 4.0).collect();
            let lp = LinearProgram::new(g.clone(), a.clone(), ConstraintSense::Geq, UpperBound::One).unwrap();
            let root = WarmLp::new(&lp).unwrap();
            for j in 0..n {
                for value in [true, false] {
                    let mut warm = root.clone();
                    warm.fix(j, value).unwrap();
                    let keep: Vec<usize> = (0..n).filter(|&k| k != j).collect();
                    let rows: Vec<Vec<f64>> = a
                        .iter()
                        .filter(|row| !(value && row[j] == 1.0))
                        .map(|row| keep.iter().map(|&k| row[k]).collect())
                        .collect();
                    let offset = if value { g[j] } else { 0.0 };
                    let sub_g: Vec<f64> = keep.iter().map(|&k| g[k]).collect();
                    let expected = if rows.is_empty() {
                        Some(offset)
                    } else {
                        let sub = LinearProgram::new(sub_g, rows, ConstraintSense::Geq, UpperBound::One).unwrap();
                        let fresh = solve_lp(&sub).unwrap();
                        fresh.value.map(|v| v + offset)
                    };
                    match (warm.outcome().value, expected) {
                        (Some(w), Some(e)) => assert!((w - e).abs() < 1e-9, "fix x{j}={value}: {w} vs {e}"),
                        (w, e) => assert_eq!(w.is_some(), e.is_some(), "fix x{j}={value}"),
                    }
                }
            }
        }
    }

    #[test]
    fn cut_scaling_limits() {
        let cut = |coeffs: Vec<f64>, rhs| Cut { coeffs, rhs };
        assert!(cut(vec![0.5, 0.0, 2.0], 1.0).is_well_scaled());
        assert!(!cut(vec![0.0, 0.0], 1.0).is_well_scaled());
        assert!(!cut(vec![2e4, 1.0], 1.0).is_well_scaled());
        assert!(!cut(vec![1.0, 1.0], 2e4).is_well_scaled());
        assert!(!cut(vec![1e3, 1e-4], 1.0).is_well_scaled());
    }

    #[test]
    fn gomory_cap_zero_stops_immediately() {
        let report = gomory_binary_solve(&triangle_cover(), 0).unwrap();
        assert_eq!(report.status, CutLoopStatus::CutCapReached);
        assert_eq!(report.cuts_added, 0);
        assert!(report.solution.is_none());
    }

    #[test]
    fn gomory_on_integral_relaxation_adds_nothing() {
        let lp = covering(&[8.0, 2.0, 2.0, 2.0], UpperBound::One);
        let report = gomory_binary_solve(&lp, 10).unwrap();
        assert_eq!(report.status, CutLoopStatus::IntegerOptimal);
        assert_eq!(report.cuts_added, 0);
        assert_eq!(
            report.solution.unwrap(),
            BinarySolution::from_bits(&[0, 1, 1, 1]).unwrap()
        );
    }

    #[test]
    fn crossover_from_interior_optimum() {
        let lp = covering(&[7.5, 2.5, 2.5, 2.5], UpperBound::Infinite);
        let x = FractionalPoint::new(vec![0.75, 0.25, 0.25, 0.25]).unwrap();
        let out = crossover_to_vertex(&lp, &x).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_point(&out, &[0.0, 1.0, 1.0, 1.0]);
        assert!((out.value.unwrap() - 7.5).abs() < 1e-9);
    }

    #[test]
    fn crossover_keeps_an_optimal_vertex() {
        let lp = covering(&[8.0, 2.0, 2.0, 2.0], UpperBound::Infinite);
        let x = FractionalPoint::new(vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let out = crossover_to_vertex(&lp, &x).unwrap();
        assert_point(&out, &[0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn crossover_rejects_infeasible_start() {
        let lp = covering(&[1.0; 4], UpperBound::Infinite);
        let x = FractionalPoint::new(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(crossover_to_vertex(&lp, &x), Err(LpError::InfeasibleStart));
    }

    #[test]
    fn crossover_detects_unbounded_direction() {
        let lp = covering(&[1.0, -1.0, 0.0, 0.0], UpperBound::Infinite);
        let x = FractionalPoint::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let out = crossover_to_vertex(&lp, &x).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        assert!(dot(lp.objective(), out.ray.as_ref().unwrap()) < 0.0);
    }
}
