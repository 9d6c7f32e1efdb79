//! The iterative linearization heuristic for quadratic set covering.
//!
//! Starting from a feasible point of the relaxation, each round minimizes the
//! gradient of `f` at the current point over `{Ax >= 1, x >= 0}`. The loop
//! stops as soon as an LP optimum repeats a vertex seen before; that vertex is
//! taken as the relaxation optimum. A binary vertex is returned directly,
//! otherwise the last linear objective is resolved over 0-1 points with
//! Gomory cuts (or branch-and-bound).
//!
//! The procedure is reproduced as published, including its failure modes:
//! unbounded subproblems, repeated vertices that are not relaxation optima,
//! and binary answers that are not optimal.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::exact::{binary_linear_solve, ExactError};
use crate::model::{
    evaluate_objective, gradient, is_feasible, reduce_to_prime_cover, BinarySolution, Coordinates,
    FractionalPoint, Instance, ModelError, ObjectiveValue, ReductionMode, Sense,
};
use crate::simplex::{
    gomory_binary_solve, solve_lp, CutLoopStatus, LinearProgram, LpError, LpStatus, UpperBound,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SaError {
    #[error("the heuristic is defined for covering instances only")]
    NotCovering,
    #[error("row {0} cannot be covered by any column")]
    NoCover(usize),
    #[error("starting point is not feasible for the relaxation")]
    InfeasibleStart,
    #[error("max_outer_iterations must be at least 1")]
    InvalidOptions,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StartStrategy {
    AllOnes,
    GreedyCover,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Step6Mode {
    /// Gomory cuts; falls back to branch-and-bound when the cut cap is hit.
    GomoryCuts,
    BranchAndBoundFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrimeReduction {
    Never,
    ImprovingOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaOptions {
    pub x0: StartStrategy,
    pub max_outer_iterations: usize,
    pub binary_tol: f64,
    pub step6_mode: Step6Mode,
    pub cut_cap: usize,
    pub prime_reduce_result: PrimeReduction,
    /// Bounds of the linearized subproblems. `Infinite` is the method as
    /// stated; `One` is an opt-in box-bounded variant.
    pub relaxation_upper: UpperBound,
}

impl Default for SaOptions {
    fn default() -> Self {
        Self {
            x0: StartStrategy::AllOnes,
            max_outer_iterations: 1000,
            binary_tol: 1e-9,
            step6_mode: Step6Mode::GomoryCuts,
            cut_cap: 200,
            prime_reduce_result: PrimeReduction::Never,
            relaxation_upper: UpperBound::Infinite,
        }
    }
}

impl SaOptions {
    pub fn starting_at(x0: Vec<f64>) -> Self {
        Self {
            x0: StartStrategy::Given(x0),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SaStatus {
    BinaryAtStep5,
    IntegerizedAtStep6,
    UnboundedLP,
    ZeroGradientStart,
    IterationCapReached,
}

/// One linearized subproblem: its objective, the vertex it returned and the
/// LP value at that vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub point: FractionalPoint,
    pub objective: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Step6Route {
    GomoryCuts { cuts_added: usize },
    /// Cut loop hit its cap (`cuts_added` cuts) before branch-and-bound took over.
    BranchAndBound { cuts_added: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaRunReport {
    pub status: SaStatus,
    pub start: FractionalPoint,
    pub trace: Vec<TraceEntry>,
    /// The repeated vertex the procedure declares optimal for the relaxation.
    pub claimed_relaxation_point: Option<FractionalPoint>,
    pub step6_route: Option<Step6Route>,
    pub final_solution: Option<BinarySolution>,
    pub objective: Option<ObjectiveValue>,
    /// Objective before the optional prime reduction.
    pub unreduced_objective: Option<ObjectiveValue>,
    pub wall_time: Duration,
}

/// The LP `min grad f(x).y` over `{Ay >= 1, y >= 0}`.
pub fn linearize_at<P: Coordinates + ?Sized>(inst: &Instance, x: &P) -> Result<LinearProgram, ModelError> {
    let g = gradient(inst, x)?;
    Ok(LinearProgram::covering(g, inst.a(), UpperBound::Infinite)
        .expect("covering rows have unit right-hand sides"))
}

/// Repeatedly adds the column covering the most uncovered rows (ties go to the
/// smallest index).
pub fn greedy_cover(inst: &Instance) -> Result<BinarySolution, SaError> {
    if let Some(row) = inst.uncoverable_row() {
        return Err(SaError::NoCover(row));
    }
    let cols: Vec<Vec<usize>> = (0..inst.n()).map(|j| inst.column_rows(j).collect()).collect();
    let mut covered = vec![false; inst.m()];
    let mut remaining = inst.m();
    let mut x = BinarySolution::zeros(inst.n());
    while remaining > 0 {
        let (best, gain) = cols
            .iter()
            .enumerate()
            .map(|(j, rows)| (j, rows.iter().filter(|&&i| !covered[i]).count()))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        debug_assert!(gain > 0);
        x.set(best, true);
        for &i in &cols[best] {
            if !covered[i] {
                covered[i] = true;
                remaining -= 1;
            }
        }
    }
    Ok(x)
}

fn starting_point(inst: &Instance, strategy: &StartStrategy) -> Result<FractionalPoint, SaError> {
    let x0 = match strategy {
        StartStrategy::AllOnes => FractionalPoint::new(vec![1.0; inst.n()])?,
        StartStrategy::GreedyCover => greedy_cover(inst)?.to_point(),
        StartStrategy::Given(x) => FractionalPoint::new(x.clone())?,
    };
    if !is_feasible(inst, &x0)? {
        return Err(SaError::InfeasibleStart);
    }
    Ok(x0)
}

/// Runs the heuristic on a covering instance.
pub fn run(inst: &Instance, opts: &SaOptions) -> Result<SaRunReport, SaError> {
    let started = Instant::now();
    if inst.sense() != Sense::Cover {
        return Err(SaError::NotCovering);
    }
    if opts.max_outer_iterations == 0 {
        return Err(SaError::InvalidOptions);
    }
    if let Some(row) = inst.uncoverable_row() {
        return Err(SaError::NoCover(row));
    }
    let start = starting_point(inst, &opts.x0)?;
    let mut report = SaRunReport {
        status: SaStatus::IterationCapReached,
        start: start.clone(),
        trace: Vec::new(),
        claimed_relaxation_point: None,
        step6_route: None,
        final_solution: None,
        objective: None,
        unreduced_objective: None,
        wall_time: Duration::ZERO,
    };
    if gradient(inst, &start)?.iter().all(|&g| g == 0.0) {
        report.status = SaStatus::ZeroGradientStart;
        report.wall_time = started.elapsed();
        return Ok(report);
    }

    let mut visited: Vec<FractionalPoint> = Vec::new();
    let mut current = start;
    let mut repeat: Option<(FractionalPoint, Vec<f64>)> = None;
    for _ in 0..opts.max_outer_iterations {
        let lp = linearize_at(inst, &current)?.with_upper(opts.relaxation_upper);
        let outcome = solve_lp(&lp)?;
        match outcome.status {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => {
                report.status = SaStatus::UnboundedLP;
                report.wall_time = started.elapsed();
                return Ok(report);
            }
            LpStatus::Infeasible => return Err(SaError::Lp(LpError::Infeasible)),
        }
        let next = outcome.point.expect("optimal outcome carries a point");
        report.trace.push(TraceEntry {
            point: next.clone(),
            objective: lp.objective().to_vec(),
            value: lp.value_at(next.values()),
        });
        if visited.iter().any(|p| p.approx_eq(&next, opts.binary_tol)) {
            repeat = Some((next, lp.objective().to_vec()));
            break;
        }
        visited.push(next.clone());
        current = next;
    }
    let Some((claimed, last_objective)) = repeat else {
        report.status = SaStatus::IterationCapReached;
        report.wall_time = started.elapsed();
        return Ok(report);
    };
    report.claimed_relaxation_point = Some(claimed.clone());

    let solution = if claimed.is_binary(opts.binary_tol) {
        report.status = SaStatus::BinaryAtStep5;
        BinarySolution::from_point(&claimed, opts.binary_tol)?
    } else {
        report.status = SaStatus::IntegerizedAtStep6;
        let lp01 = LinearProgram::covering(last_objective, inst.a(), UpperBound::One)?;
        let (solution, route) = integerize(&lp01, opts)?;
        report.step6_route = Some(route);
        solution
    };
    debug_assert!(is_feasible(inst, &solution)?);

    let unreduced = evaluate_objective(inst, &solution)?;
    let solution = match opts.prime_reduce_result {
        PrimeReduction::Never => solution,
        PrimeReduction::ImprovingOnly => {
            reduce_to_prime_cover(inst, &solution, ReductionMode::ImprovingOnly)?
        }
    };
    report.objective = Some(evaluate_objective(inst, &solution)?);
    report.unreduced_objective = Some(unreduced);
    report.final_solution = Some(solution);
    report.wall_time = started.elapsed();
    Ok(report)
}

fn integerize(lp01: &LinearProgram, opts: &SaOptions) -> Result<(BinarySolution, Step6Route), SaError> {
    let mut cuts_added = 0;
    if opts.step6_mode == Step6Mode::GomoryCuts {
        let cuts = gomory_binary_solve(lp01, opts.cut_cap)?;
        cuts_added = cuts.cuts_added;
        if cuts.status == CutLoopStatus::IntegerOptimal {
            if let Some(solution) = cuts.solution {
                return Ok((solution, Step6Route::GomoryCuts { cuts_added }));
            }
        }
    }
    let exact = binary_linear_solve(lp01, None)?;
    Ok((exact.solution, Step6Route::BranchAndBound { cuts_added }))
}
