//! Fixed inputs shared by the criterion benchmarks.

use qsp_core::{generate, linearize_at, Category, GeneratorConfig, Instance, LinearProgram};

/// Seeded covering instance with `2n` rows.
pub fn instance(n: usize, category: Category, seed: u64) -> Instance {
    generate(&GeneratorConfig::new(n, 2 * n, category, seed).with_density(0.15))
        .expect("benchmark config is valid")
}

/// The heuristic's first subproblem on `inst`, linearized at the all-ones point.
pub fn first_subproblem(inst: &Instance) -> LinearProgram {
    linearize_at(inst, &vec![1.0; inst.n()]).expect("dimension matches")
}
