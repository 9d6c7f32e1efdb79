//! Exact oracles: exhaustive enumeration and depth-first branch-and-bound for
//! 0-1 quadratic covering / packing, and a 0-1 linear solver.
//!
//! Packing instances are maximized; internally both senses minimize `s * f`
//! with `s = +1` for covers and `s = -1` for packs. Ties between optimal
//! vectors are broken towards the lexicographically smallest one, so
//! enumeration and branch-and-bound return identical solutions.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{evaluate_objective, BinarySolution, Instance, ObjectiveValue, Sense};
use crate::saxena_arora::greedy_cover;
use crate::simplex::{LinearProgram, LpError, LpStatus, UpperBound, WarmLp};

/// Enumeration refuses instances with more columns than this.
pub const MAX_BRUTE_FORCE_N: usize = 25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("enumeration over 2^{n} points refused (limit n <= {MAX_BRUTE_FORCE_N})")]
    TooLarge { n: usize },
    #[error("no feasible 0-1 solution exists")]
    Infeasible,
    #[error("time limit reached before any feasible 0-1 solution was found")]
    NoIncumbent,
    #[error("partial assignment has {actual} entries, expected {expected}")]
    AssignmentLength { expected: usize, actual: usize },
    #[error("relaxation failed: {0}")]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExactStatus {
    Optimal,
    TimeLimitBestFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactResult {
    pub status: ExactStatus,
    pub solution: BinarySolution,
    pub value: ObjectiveValue,
    /// Lower bound on the optimum for covers, upper bound for packs.
    pub lower_bound: f64,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbOptions {
    pub time_limit: Option<Duration>,
    /// Elapsed times at which to snapshot the incumbent.
    pub checkpoints: Vec<Duration>,
    /// Disable to explore every feasibility-consistent node.
    pub prune: bool,
}

impl Default for BbOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            checkpoints: Vec::new(),
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BbRun {
    pub result: ExactResult,
    /// One entry per requested checkpoint, in the order given.
    pub snapshots: Vec<ExactResult>,
}

fn sign(sense: Sense) -> f64 {
    match sense {
        Sense::Cover => 1.0,
        Sense::Pack => -1.0,
    }
}

fn tie_tol(best: f64) -> f64 {
    1e-9 * best.abs().max(1.0)
}

/// Enumerates all `2^n` vectors in lexicographic order and keeps the first
/// best feasible one.
pub fn brute_force(inst: &Instance) -> Result<ExactResult, ExactError> {
    let n = inst.n();
    if n > MAX_BRUTE_FORCE_N {
        return Err(ExactError::TooLarge { n });
    }
    let s = sign(inst.sense());
    // bit (n-1-j) of the counter is x_j, so counting up is lexicographic order
    let row_masks: Vec<u32> = inst
        .a()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v == 1)
                .fold(0u32, |acc, (j, _)| acc | 1 << (n - 1 - j))
        })
        .collect();
    let mut best: Option<(u32, f64)> = None;
    for v in 0u32..(1u32 << n) {
        let feasible = match inst.sense() {
            Sense::Cover => row_masks.iter().all(|&r| r & v != 0),
            Sense::Pack => row_masks.iter().all(|&r| (r & v).count_ones() <= 1),
        };
        if !feasible {
            continue;
        }
        let value = s * masked_objective(inst, v, n);
        if best.is_none_or(|(_, b)| value < b - tie_tol(b)) {
            best = Some((v, value));
        }
    }
    let (v, value) = best.ok_or(ExactError::Infeasible)?;
    let solution = BinarySolution::from_bools((0..n).map(|j| v >> (n - 1 - j) & 1 == 1).collect());
    Ok(ExactResult {
        status: ExactStatus::Optimal,
        solution,
        value: ObjectiveValue(s * value),
        lower_bound: s * value,
        nodes_explored: 1u64 << n,
    })
}

fn masked_objective(inst: &Instance, v: u32, n: usize) -> f64 {
    let support: Vec<usize> = (0..n).filter(|j| v >> (n - 1 - j) & 1 == 1).collect();
    let (c, d) = (inst.c(), inst.d());
    support
        .iter()
        .map(|&i| c[i] + support.iter().map(|&j| d[i][j]).sum::<f64>())
        .sum()
}

/// Termwise bound on `f` over all binary completions of `fixed`: committed
/// terms count in full, every term touching an undecided variable (and no
/// variable fixed to 0) contributes `min(0, term)`.
pub fn quadratic_lower_bound(inst: &Instance, fixed: &[Option<bool>]) -> Result<f64, ExactError> {
    let n = inst.n();
    if fixed.len() != n {
        return Err(ExactError::AssignmentLength {
            expected: n,
            actual: fixed.len(),
        });
    }
    let mut bound = 0.0;
    for j in 0..n {
        match fixed[j] {
            Some(false) => {}
            Some(true) => bound += inst.c()[j],
            None => bound += inst.c()[j].min(0.0),
        }
    }
    for i in 0..n {
        for j in 0..n {
            match (fixed[i], fixed[j]) {
                (Some(false), _) | (_, Some(false)) => {}
                (Some(true), Some(true)) => bound += inst.d()[i][j],
                _ => bound += inst.d()[i][j].min(0.0),
            }
        }
    }
    Ok(bound)
}

/// Depth-first branch-and-bound with the default options and an optional
/// time limit.
pub fn branch_and_bound(inst: &Instance, time_limit: Option<Duration>) -> Result<ExactResult, ExactError> {
    branch_and_bound_with(
        inst,
        &BbOptions {
            time_limit,
            ..BbOptions::default()
        },
    )
    .map(|run| run.result)
}

/// Branches on variables in index order, 1-branch first. Pruning uses a
/// pair-aggregated bound that dominates [`quadratic_lower_bound`].
pub fn branch_and_bound_with(inst: &Instance, opts: &BbOptions) -> Result<BbRun, ExactError> {
    let start = Instant::now();
    let mut search = QuadSearch::new(inst, opts, start)?;
    search.dfs(0);
    Ok(search.finish())
}

struct Snapshot {
    at: Instant,
    taken: Option<ExactResult>,
}

struct QuadSearch<'a> {
    inst: &'a Instance,
    s: f64,
    n: usize,
    pair: Vec<Vec<f64>>,
    neg_suffix: Vec<Vec<f64>>,
    cols: Vec<Vec<usize>>,
    last_col: Vec<usize>,
    x: Vec<bool>,
    lin: Vec<f64>,
    counts: Vec<usize>,
    committed: f64,
    best: Option<(Vec<bool>, f64)>,
    nodes: u64,
    prune: bool,
    deadline: Option<Instant>,
    snapshots: Vec<Snapshot>,
    timed_out: bool,
    open_bound: f64,
    root_bound: f64,
}

impl<'a> QuadSearch<'a> {
    fn new(inst: &'a Instance, opts: &BbOptions, start: Instant) -> Result<Self, ExactError> {
        let n = inst.n();
        let s = sign(inst.sense());
        let (c, d) = (inst.c(), inst.d());
        let lin0: Vec<f64> = (0..n).map(|j| s * (c[j] + d[j][j])).collect();
        let pair: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else { s * (d[i][j] + d[j][i]) })
                    .collect()
            })
            .collect();
        let mut neg_suffix = vec![vec![0.0; n]; n + 1];
        for k in (0..n).rev() {
            for j in 0..n {
                neg_suffix[k][j] = neg_suffix[k + 1][j] + pair[k][j].min(0.0);
            }
        }
        let cols: Vec<Vec<usize>> = (0..n).map(|j| inst.column_rows(j).collect()).collect();
        let mut last_col = vec![usize::MAX; inst.m()];
        for (j, rows) in cols.iter().enumerate() {
            for &i in rows {
                last_col[i] = j;
            }
        }
        let initial = match inst.sense() {
            Sense::Cover => {
                if inst.uncoverable_row().is_some() {
                    return Err(ExactError::Infeasible);
                }
                greedy_cover(inst).map_err(|_| ExactError::Infeasible)?
            }
            Sense::Pack => BinarySolution::zeros(n),
        };
        let initial_value = s * evaluate_objective(inst, &initial)
            .expect("incumbent has instance dimension")
            .get();
        let mut search = Self {
            inst,
            s,
            n,
            lin: lin0,
            pair,
            neg_suffix,
            cols,
            last_col,
            x: vec![false; n],
            counts: vec![0; inst.m()],
            committed: 0.0,
            best: Some((initial.bits().to_vec(), initial_value)),
            nodes: 0,
            prune: opts.prune,
            deadline: opts.time_limit.map(|t| start + t),
            snapshots: opts
                .checkpoints
                .iter()
                .map(|&t| Snapshot {
                    at: start + t,
                    taken: None,
                })
                .collect(),
            timed_out: false,
            open_bound: f64::INFINITY,
            root_bound: f64::NEG_INFINITY,
        };
        search.root_bound = search.bound(0);
        Ok(search)
    }

    /// Valid lower bound on `s * f` over completions of `x[..k]`.
    fn bound(&self, k: usize) -> f64 {
        self.committed
            + (k..self.n)
                .map(|j| (self.lin[j] + 0.5 * self.neg_suffix[k][j]).min(0.0))
                .sum::<f64>()
    }

    fn current_result(&self, status: ExactStatus, bound: f64) -> ExactResult {
        let (bits, value) = self.best.clone().expect("incumbent always present");
        ExactResult {
            status,
            solution: BinarySolution::from_bools(bits),
            value: ObjectiveValue(self.s * value),
            lower_bound: self.s * bound,
            nodes_explored: self.nodes,
        }
    }

    fn take_snapshots(&mut self, now: Instant) {
        for i in 0..self.snapshots.len() {
            if self.snapshots[i].taken.is_none() && now >= self.snapshots[i].at {
                let snap = self.current_result(ExactStatus::TimeLimitBestFound, self.root_bound);
                self.snapshots[i].taken = Some(snap);
            }
        }
    }

    fn can_improve(&self, bound: f64, k: usize) -> bool {
        let Some((bits, best)) = &self.best else {
            return true;
        };
        let tol = tie_tol(*best);
        if bound < best - tol {
            return true;
        }
        bound <= best + tol && self.x[..k] <= bits[..k]
    }

    fn record_leaf(&mut self) {
        let value = self.committed;
        let better = match &self.best {
            None => true,
            Some((bits, best)) => {
                let tol = tie_tol(*best);
                value < best - tol || (value <= best + tol && self.x < *bits)
            }
        };
        if better {
            debug_assert!(crate::model::is_feasible(
                self.inst,
                &BinarySolution::from_bools(self.x.clone())
            )
            .unwrap());
            self.best = Some((self.x.clone(), value));
        }
    }

    fn can_set_one(&self, k: usize) -> bool {
        match self.inst.sense() {
            Sense::Cover => true,
            Sense::Pack => self.cols[k].iter().all(|&i| self.counts[i] == 0),
        }
    }

    fn can_set_zero(&self, k: usize) -> bool {
        match self.inst.sense() {
            Sense::Cover => self.cols[k]
                .iter()
                .all(|&i| self.counts[i] > 0 || self.last_col[i] != k),
            Sense::Pack => true,
        }
    }

    fn set_one(&mut self, k: usize) {
        self.x[k] = true;
        self.committed += self.lin[k];
        for j in k + 1..self.n {
            self.lin[j] += self.pair[k][j];
        }
        for &i in &self.cols[k] {
            self.counts[i] += 1;
        }
    }

    fn unset_one(&mut self, k: usize) {
        self.x[k] = false;
        self.committed -= self.lin[k];
        for j in k + 1..self.n {
            self.lin[j] -= self.pair[k][j];
        }
        for &i in &self.cols[k] {
            self.counts[i] -= 1;
        }
    }

    fn dfs(&mut self, k: usize) {
        self.nodes += 1;
        let bound = self.bound(k);
        if self.deadline.is_some() || !self.snapshots.is_empty() {
            let now = Instant::now();
            self.take_snapshots(now);
            if self.deadline.is_some_and(|d| now >= d) {
                self.timed_out = true;
                self.open_bound = self.open_bound.min(bound);
                return;
            }
        }
        if k == self.n {
            self.record_leaf();
            return;
        }
        if self.prune && !self.can_improve(bound, k) {
            return;
        }
        if self.can_set_one(k) {
            self.set_one(k);
            self.dfs(k + 1);
            self.unset_one(k);
        }
        if self.timed_out {
            if self.can_set_zero(k) {
                self.open_bound = self.open_bound.min(self.bound(k + 1));
            }
            return;
        }
        if self.can_set_zero(k) {
            self.dfs(k + 1);
        }
    }

    fn finish(mut self) -> BbRun {
        let result = if self.timed_out {
            let best = self.best.as_ref().map_or(f64::INFINITY, |b| b.1);
            self.current_result(ExactStatus::TimeLimitBestFound, self.open_bound.min(best))
        } else {
            let best = self.best.as_ref().expect("incumbent").1;
            self.current_result(ExactStatus::Optimal, best)
        };
        let snapshots = std::mem::take(&mut self.snapshots)
            .into_iter()
            .map(|s| s.taken.unwrap_or_else(|| result.clone()))
            .collect();
        BbRun { result, snapshots }
    }
}

/// Minimizes `g.x` over binary points satisfying the rows of `lp`.
///
/// Depth-first branch-and-bound on the LP relaxation with `0 <= x <= 1`.
/// Each child adds one fixing to its parent's optimal tableau and is
/// re-optimized with the dual simplex. Branches on the fractional variable of
/// smallest index, 1-branch first. Ties go to the lexicographically smallest
/// vector.
pub fn binary_linear_solve(lp: &LinearProgram, time_limit: Option<Duration>) -> Result<ExactResult, ExactError> {
    let start = Instant::now();
    let boxed = lp.with_upper(UpperBound::One);
    let root = WarmLp::new(&boxed)?;
    let mut search = LpSearch {
        lp: &boxed,
        best: None,
        nodes: 0,
        deadline: time_limit.map(|t| start + t),
        timed_out: false,
        open_bound: f64::INFINITY,
    };
    search.node(root, vec![None; boxed.n()])?;
    let (bits, value) = search.best.clone().ok_or(if search.timed_out {
        ExactError::NoIncumbent
    } else {
        ExactError::Infeasible
    })?;
    let (status, lower_bound) = if search.timed_out {
        (ExactStatus::TimeLimitBestFound, search.open_bound.min(value))
    } else {
        (ExactStatus::Optimal, value)
    };
    Ok(ExactResult {
        status,
        solution: BinarySolution::from_bools(bits),
        value: ObjectiveValue(value),
        lower_bound,
        nodes_explored: search.nodes,
    })
}

struct LpSearch<'a> {
    lp: &'a LinearProgram,
    best: Option<(Vec<bool>, f64)>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    /// Smallest relaxation value among nodes left unexplored at the deadline.
    open_bound: f64,
}

impl LpSearch<'_> {
    fn node(&mut self, mut relax: WarmLp, mut fixed: Vec<Option<bool>>) -> Result<(), ExactError> {
        self.nodes += 1;
        let outcome = relax.outcome();
        if outcome.status != LpStatus::Optimal {
            return Ok(());
        }
        let bound = outcome.value.unwrap_or(f64::NEG_INFINITY);
        if self.timed_out || self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            self.open_bound = self.open_bound.min(bound);
            return Ok(());
        }
        if let Some((bits, best)) = &self.best {
            let tol = tie_tol(*best);
            if bound > best + tol || (bound >= best - tol && !may_precede(&fixed, bits)) {
                return Ok(());
            }
        }
        let x = outcome.point.as_ref().map(|p| p.values().to_vec()).unwrap_or_default();
        let fractional = x.iter().position(|&v| (v - v.round()).abs() > INTEGRALITY_TOL);
        if fractional.is_none() {
            self.offer(x.iter().map(|&v| v > 0.5).collect());
        } else {
            // Rounding up is feasible for covering rows and gives an early incumbent.
            self.offer(x.iter().map(|&v| v > INTEGRALITY_TOL).collect());
        }
        // An integral relaxation still branches while a tied, lexicographically
        // smaller vector may exist below this node.
        let j = match fractional {
            Some(j) => j,
            None => match self.best.as_ref() {
                Some((bits, _)) if may_precede(&fixed, bits) => match fixed.iter().position(Option::is_none) {
                    Some(j) => j,
                    None => return Ok(()),
                },
                _ => return Ok(()),
            },
        };
        let mut up = relax.clone();
        up.fix(j, true)?;
        let mut up_fixed = fixed.clone();
        up_fixed[j] = Some(true);
        self.node(up, up_fixed)?;
        relax.fix(j, false)?;
        fixed[j] = Some(false);
        self.node(relax, fixed)
    }
}

impl LpSearch<'_> {
    /// Records `bits` if it is feasible and beats the incumbent.
    fn offer(&mut self, bits: Vec<bool>) {
        let point: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        if !self.lp.is_feasible_point(&point, 1e-9) {
            return;
        }
        let value = self.lp.value_at(&point);
        let better = self.best.as_ref().is_none_or(|(inc, best)| {
            let tol = tie_tol(*best);
            value < best - tol || (value <= best + tol && bits < *inc)
        });
        if better {
            self.best = Some((bits, value));
        }
    }
}

/// Whether some completion of `fixed` is lexicographically smaller than `bits`.
fn may_precede(fixed: &[Option<bool>], bits: &[bool]) -> bool {
    for (f, &b) in fixed.iter().zip(bits) {
        match (f, b) {
            (Some(v), _) if *v != b => return !*v,
            (None, true) => return true,
            _ => {}
        }
    }
    false
}

/// Relaxation values this close to an integer count as integral.
const INTEGRALITY_TOL: f64 = 1e-6;
