//! Quadratic set covering and packing.
//!
//! The crate bundles the problem model, a dense simplex engine with Gomory
//! cuts, the iterative linearization heuristic for quadratic covering, exact
//! enumeration / branch-and-bound oracles, and instance generation and I/O.

pub mod exact;
pub mod instances;
pub mod model;
pub mod saxena_arora;
pub mod simplex;

pub use model::{
    analyze_structure, evaluate_objective, extend_to_prime_pack, gradient, is_feasible,
    is_prime_cover, is_prime_pack, reduce_to_prime_cover, BinarySolution, Coordinates,
    FractionalPoint, Instance, ModelError, ObjectiveValue, ReductionMode, Sense,
    StructureReport,
};
pub use simplex::{
    crossover_to_vertex, gomory_binary_solve, solve_lp, ConstraintSense, Cut, CutLoopReport,
    CutLoopStatus, LinearProgram, LpError, LpStatus, SimplexOutcome, UpperBound,
};
pub use exact::{
    binary_linear_solve, branch_and_bound, branch_and_bound_with, brute_force,
    quadratic_lower_bound, BbOptions, BbRun, ExactError, ExactResult, ExactStatus,
};
pub use saxena_arora::{
    greedy_cover, linearize_at, run as run_saxena_arora, PrimeReduction, SaError, SaOptions,
    SaRunReport, SaStatus, StartStrategy, Step6Mode, Step6Route, TraceEntry,
};
pub use instances::{
    attach_quadratic, generate, parse_dimacs_vertex_cover, parse_orlib_scp, read_native,
    verify_counterexamples, write_native, Category, ClaimOutcome, CounterexampleId,
    GeneratorConfig, InstanceError,
};
