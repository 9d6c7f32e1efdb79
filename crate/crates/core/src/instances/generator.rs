use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::InstanceError;
use crate::model::{Instance, Sense};

/// Largest `n` the generator accepts (`D` is dense n x n).
pub const MAX_GENERATED_N: usize = 4096;

const DEFAULT_DENSITY: f64 = 0.05;
const COST_RANGE: (i64, i64) = (3, 5);

/// Quadratic cost families. Both have `c` uniform in `[3, 5]` and `D = BB'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Category {
    /// Category 1: `B` entries uniform in `[-10, 10]`.
    PsdMixedSign,
    /// Category 2: `B` entries uniform in `[0, 20]`.
    PsdNonnegative,
}

impl Category {
    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Self::PsdMixedSign),
            2 => Some(Self::PsdNonnegative),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::PsdMixedSign => 1,
            Self::PsdNonnegative => 2,
        }
    }

    fn b_range(self) -> (i64, i64) {
        match self {
            Self::PsdMixedSign => (-10, 10),
            Self::PsdNonnegative => (0, 20),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub m: usize,
    pub row_density: f64,
    pub category: Category,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(n: usize, m: usize, category: Category, seed: u64) -> Self {
        Self {
            n,
            m,
            row_density: DEFAULT_DENSITY,
            category,
            seed,
        }
    }

    pub fn with_density(self, row_density: f64) -> Self {
        Self { row_density, ..self }
    }

    fn validate(&self) -> Result<(), InstanceError> {
        if self.n == 0 || self.m == 0 {
            return Err(InstanceError::InvalidConfig("n and m must be positive".into()));
        }
        if !(self.row_density > 0.0 && self.row_density <= 1.0) {
            return Err(InstanceError::InvalidConfig(format!(
                "row density {} is outside (0, 1]",
                self.row_density
            )));
        }
        if self.n > MAX_GENERATED_N {
            return Err(InstanceError::DimensionOverflow { n: self.n });
        }
        Ok(())
    }
}

// A and the costs come from separate streams of the same seed, so attaching
// costs to a generated matrix reproduces the generated costs exactly.
const MATRIX_STREAM: u64 = 0;
const COST_STREAM: u64 = 1;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Random covering instance; rows that come out empty are redrawn.
pub fn generate(config: &GeneratorConfig) -> Result<Instance, InstanceError> {
    config.validate()?;
    let mut rng = stream(config.seed, MATRIX_STREAM);
    let a: Vec<Vec<u8>> = (0..config.m)
        .map(|_| loop {
            let row: Vec<u8> = (0..config.n)
                .map(|_| rng.gen_bool(config.row_density) as u8)
                .collect();
            if row.contains(&1) {
                break row;
            }
        })
        .collect();
    let (c, d) = quadratic_costs(config.n, config.category, config.seed);
    Ok(Instance::new(a, c, d, Sense::Cover)?)
}

/// Replaces the (zero) costs of a parsed linear instance by generated ones.
/// Only `category` and `seed` of the config are used; `n` comes from `inst`.
pub fn attach_quadratic(inst: &Instance, config: &GeneratorConfig) -> Result<Instance, InstanceError> {
    if inst.n() > MAX_GENERATED_N {
        return Err(InstanceError::DimensionOverflow { n: inst.n() });
    }
    if !inst.is_linear() {
        return Err(InstanceError::NotLinear);
    }
    let (c, d) = quadratic_costs(inst.n(), config.category, config.seed);
    Ok(inst.with_costs(c, d)?)
}

fn quadratic_costs(n: usize, category: Category, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rng = stream(seed, COST_STREAM);
    let c: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(COST_RANGE.0..=COST_RANGE.1) as f64)
        .collect();
    let (lo, hi) = category.b_range();
    let b: Vec<Vec<i64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v: i64 = b[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
            d[i][j] = v as f64;
            d[j][i] = v as f64;
        }
    }
    (c, d)
}
