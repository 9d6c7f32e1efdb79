//! Problem data for quadratic set covering / packing, objective and gradient
//! evaluation, feasibility predicates and the prime cover / prime pack
//! procedures.

use serde::Serialize;
use thiserror::Error;

/// Row-activity slack allowed when checking fractional points.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Default pivot tolerance for the PSD factorization test.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("instance needs at least one row and one column")]
    Empty,
    #[error("row {row} of A has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("A[{row}][{col}] = {value} is not 0 or 1")]
    NonBinaryEntry { row: usize, col: usize, value: u8 },
    #[error("cost vector has length {len}, expected {expected}")]
    CostLength { len: usize, expected: usize },
    #[error("D must be {expected}x{expected}, row {row} has {len} entries")]
    QuadraticShape { row: usize, len: usize, expected: usize },
    #[error("D has {rows} rows, expected {expected}")]
    QuadraticRows { rows: usize, expected: usize },
    #[error("non-finite cost coefficient")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("entry {index} = {value} is not 0 or 1")]
    NotBinary { index: usize, value: f64 },
    #[error("entry {index} = {value} is negative or not finite")]
    InvalidCoordinate { index: usize, value: f64 },
    #[error("solution is not a cover")]
    NotACover,
    #[error("solution is not a pack")]
    NotAPack,
}

/// Constraint orientation: `Ax >= 1` (minimize) or `Ax <= 1` (maximize).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sense {
    Cover,
    Pack,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Cover => "cover",
            Sense::Pack => "pack",
        }
    }
}

/// Covering or packing data: incidence matrix `A` (m x n), linear costs `c`
/// and quadratic costs `D` (n x n).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    a: Vec<Vec<u8>>,
    c: Vec<f64>,
    d: Vec<Vec<f64>>,
    sense: Sense,
}

impl Instance {
    pub fn new(
        a: Vec<Vec<u8>>,
        c: Vec<f64>,
        d: Vec<Vec<f64>>,
        sense: Sense,
    ) -> Result<Self, ModelError> {
        let n = c.len();
        if a.is_empty() || n == 0 {
            return Err(ModelError::Empty);
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::RaggedRow {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            if let Some((j, &v)) = row.iter().enumerate().find(|(_, &v)| v > 1) {
                return Err(ModelError::NonBinaryEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
        check_costs(n, &c, &d)?;
        Ok(Self { a, c, d, sense })
    }

    /// Instance with the same incidence matrix and zero costs everywhere.
    pub fn linear(a: Vec<Vec<u8>>, c: Vec<f64>, sense: Sense) -> Result<Self, ModelError> {
        let n = c.len();
        Self::new(a, c, vec![vec![0.0; n]; n], sense)
    }

    /// Same incidence matrix and sense, new costs.
    pub fn with_costs(&self, c: Vec<f64>, d: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        if c.len() != self.n() {
            return Err(ModelError::CostLength {
                len: c.len(),
                expected: self.n(),
            });
        }
        check_costs(self.n(), &c, &d)?;
        Ok(Self {
            a: self.a.clone(),
            c,
            d,
            sense: self.sense,
        })
    }

    pub fn with_sense(&self, sense: Sense) -> Self {
        Self {
            sense,
            ..self.clone()
        }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &[Vec<u8>] {
        &self.a
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> &[Vec<f64>] {
        &self.d
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Rows (elements) contained in column `j`.
    pub fn column_rows(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.a
            .iter()
            .enumerate()
            .filter(move |(_, row)| row[j] == 1)
            .map(|(i, _)| i)
    }

    /// First row that no column covers, if any. A cover exists iff this is `None`.
    pub fn uncoverable_row(&self) -> Option<usize> {
        self.a.iter().position(|row| row.iter().all(|&v| v == 0))
    }

    pub fn has_cover(&self) -> bool {
        self.uncoverable_row().is_none()
    }

    /// True when `D` has no nonzero entry.
    pub fn is_linear(&self) -> bool {
        self.d.iter().flatten().all(|&v| v == 0.0)
    }

    /// Percentage of entries of `D` that are strictly negative.
    pub fn negative_d_percent(&self) -> f64 {
        let n = self.n();
        let negatives = self.d.iter().flatten().filter(|&&v| v < 0.0).count();
        100.0 * negatives as f64 / (n * n) as f64
    }

    fn row_activity<P: Coordinates + ?Sized>(&self, x: &P) -> impl Iterator<Item = f64> + '_ {
        let values: Vec<f64> = (0..x.dim()).map(|j| x.coord(j)).collect();
        self.a.iter().map(move |row| {
            row.iter()
                .zip(&values)
                .filter(|(&a, _)| a == 1)
                .map(|(_, &v)| v)
                .sum()
        })
    }

    fn check_dim<P: Coordinates + ?Sized>(&self, x: &P) -> Result<(), ModelError> {
        if x.dim() != self.n() {
            return Err(ModelError::DimensionMismatch {
                expected: self.n(),
                actual: x.dim(),
            });
        }
        Ok(())
    }
}

fn check_costs(n: usize, c: &[f64], d: &[Vec<f64>]) -> Result<(), ModelError> {
    if d.len() != n {
        return Err(ModelError::QuadraticRows {
            rows: d.len(),
            expected: n,
        });
    }
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::QuadraticShape {
                row: i,
                len: row.len(),
                expected: n,
            });
        }
    }
    if c.iter().chain(d.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

/// Read access to the coordinates of a candidate point.
pub trait Coordinates {
    fn dim(&self) -> usize;
    fn coord(&self, j: usize) -> f64;

    fn to_vec(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.coord(j)).collect()
    }
}

impl Coordinates for [f64] {
    fn dim(&self) -> usize {
        self.len()
    }
    fn coord(&self, j: usize) -> f64 {
        self[j]
    }
}

impl Coordinates for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }
    fn coord(&self, j: usize) -> f64 {
        self[j]
    }
}

/// A 0-1 vector together with its support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinarySolution {
    bits: Vec<bool>,
}

impl BinarySolution {
    pub fn from_bits(bits: &[u8]) -> Result<Self, ModelError> {
        bits.iter()
            .enumerate()
            .map(|(index, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(ModelError::NotBinary {
                    index,
                    value: b as f64,
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bits| Self { bits })
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Rounds a point whose entries are all within `tol` of 0 or 1.
    pub fn from_point<P: Coordinates + ?Sized>(x: &P, tol: f64) -> Result<Self, ModelError> {
        (0..x.dim())
            .map(|index| {
                let value = x.coord(index);
                if value.abs() <= tol {
                    Ok(false)
                } else if (value - 1.0).abs() <= tol {
                    Ok(true)
                } else {
                    Err(ModelError::NotBinary { index, value })
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bits| Self { bits })
    }

    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &j in support {
            bits[j] = true;
        }
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.bits[j] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Index set of the 1-entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn to_point(&self) -> FractionalPoint {
        FractionalPoint {
            x: self.to_vec(),
        }
    }

    /// 0/1 entries as integers, e.g. for display.
    pub fn as_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}

impl Coordinates for BinarySolution {
    fn dim(&self) -> usize {
        self.bits.len()
    }
    fn coord(&self, j: usize) -> f64 {
        if self.bits[j] {
            1.0
        } else {
            0.0
        }
    }
}

/// A nonnegative point of the continuous relaxation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalPoint {
    x: Vec<f64>,
}

impl FractionalPoint {
    pub fn new(x: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((index, &value)) = x
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(ModelError::InvalidCoordinate { index, value });
        }
        Ok(Self { x })
    }

    /// Clamps entries in `[-tol, 0)` to zero before validating.
    pub fn new_clamped(mut x: Vec<f64>, tol: f64) -> Result<Self, ModelError> {
        for v in &mut x {
            if *v < 0.0 && *v >= -tol {
                *v = 0.0;
            }
        }
        Self::new(x)
    }

    pub fn zeros(n: usize) -> Self {
        Self { x: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn into_values(self) -> Vec<f64> {
        self.x
    }

    /// Componentwise match within `tol`.
    pub fn approx_eq(&self, other: &FractionalPoint, tol: f64) -> bool {
        self.x.len() == other.x.len()
            && self.x.iter().zip(&other.x).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn is_binary(&self, tol: f64) -> bool {
        self.x
            .iter()
            .all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
    }
}

impl Coordinates for FractionalPoint {
    fn dim(&self) -> usize {
        self.x.len()
    }
    fn coord(&self, j: usize) -> f64 {
        self.x[j]
    }
}

/// `f(x) = c.x + x'Dx`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ObjectiveValue(pub f64);

impl ObjectiveValue {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for ObjectiveValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub symmetric: bool,
    /// Decided on the symmetrized matrix `(D + D')/2`.
    pub psd: bool,
    pub nonnegative_d: bool,
    pub nonnegative_c: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionMode {
    Unconditional,
    /// Drop (or add) a column only if the objective does not get worse.
    ImprovingOnly,
}

/// `c.x + x'Dx`, evaluated as written (no symmetrization).
pub fn evaluate_objective<P: Coordinates + ?Sized>(
    inst: &Instance,
    x: &P,
) -> Result<ObjectiveValue, ModelError> {
    inst.check_dim(x)?;
    let x = x.to_vec();
    let mut value = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        value += inst.c[j] * xj;
        let row = &inst.d[j];
        let quad: f64 = row.iter().zip(&x).map(|(d, xi)| d * xi).sum();
        value += xj * quad;
    }
    Ok(ObjectiveValue(value))
}

/// `c + (D + D')x`; equals `c + 2Dx` when `D` is symmetric.
pub fn gradient<P: Coordinates + ?Sized>(inst: &Instance, x: &P) -> Result<Vec<f64>, ModelError> {
    inst.check_dim(x)?;
    let x = x.to_vec();
    let n = inst.n();
    Ok((0..n)
        .map(|j| {
            inst.c[j]
                + (0..n)
                    .map(|i| (inst.d[j][i] + inst.d[i][j]) * x[i])
                    .sum::<f64>()
        })
        .collect())
}

/// `Ax >= 1` for covers, `Ax <= 1` for packs. Fractional inputs get
/// [`FEASIBILITY_TOL`] slack.
pub fn is_feasible<P: Coordinates + ?Sized>(inst: &Instance, x: &P) -> Result<bool, ModelError> {
    inst.check_dim(x)?;
    let feasible = match inst.sense {
        Sense::Cover => inst.row_activity(x).all(|s| s >= 1.0 - FEASIBILITY_TOL),
        Sense::Pack => inst.row_activity(x).all(|s| s <= 1.0 + FEASIBILITY_TOL),
    };
    Ok(feasible)
}

fn row_counts(inst: &Instance, x: &BinarySolution) -> Vec<usize> {
    inst.a
        .iter()
        .map(|row| row.iter().zip(x.bits()).filter(|(&a, &b)| a == 1 && b).count())
        .collect()
}

fn require_cover(inst: &Instance, x: &BinarySolution) -> Result<Vec<usize>, ModelError> {
    inst.check_dim(x)?;
    let counts = row_counts(inst, x);
    if counts.contains(&0) {
        return Err(ModelError::NotACover);
    }
    Ok(counts)
}

fn require_pack(inst: &Instance, x: &BinarySolution) -> Result<Vec<usize>, ModelError> {
    inst.check_dim(x)?;
    let counts = row_counts(inst, x);
    if counts.iter().any(|&k| k > 1) {
        return Err(ModelError::NotAPack);
    }
    Ok(counts)
}

fn removable(inst: &Instance, counts: &[usize], j: usize) -> bool {
    inst.column_rows(j).all(|i| counts[i] >= 2)
}

fn addable(inst: &Instance, counts: &[usize], j: usize) -> bool {
    inst.column_rows(j).all(|i| counts[i] == 0)
}

/// Change in the objective caused by switching column `j` on, given the
/// current support (excluding `j`).
fn toggle_gain(inst: &Instance, x: &BinarySolution, j: usize) -> f64 {
    let cross: f64 = x
        .support()
        .into_iter()
        .filter(|&i| i != j)
        .map(|i| inst.d[i][j] + inst.d[j][i])
        .sum();
    inst.c[j] + inst.d[j][j] + cross
}

/// A cover is prime when none of its columns can be dropped.
pub fn is_prime_cover(inst: &Instance, x: &BinarySolution) -> Result<bool, ModelError> {
    let counts = require_cover(inst, x)?;
    Ok(!x.support().into_iter().any(|j| removable(inst, &counts, j)))
}

/// Drops redundant columns in descending index order until the cover is prime.
///
/// With [`ReductionMode::ImprovingOnly`] a column is dropped only when that
/// does not increase the objective; passes repeat until nothing changes.
pub fn reduce_to_prime_cover(
    inst: &Instance,
    x: &BinarySolution,
    mode: ReductionMode,
) -> Result<BinarySolution, ModelError> {
    let mut counts = require_cover(inst, x)?;
    let mut current = x.clone();
    loop {
        let mut changed = false;
        for j in current.support().into_iter().rev() {
            if !removable(inst, &counts, j) {
                continue;
            }
            if mode == ReductionMode::ImprovingOnly && toggle_gain(inst, &current, j) < 0.0 {
                continue;
            }
            current.set(j, false);
            for i in inst.column_rows(j) {
                counts[i] -= 1;
            }
            changed = true;
        }
        if !changed || mode == ReductionMode::Unconditional {
            break;
        }
    }
    Ok(current)
}

/// A pack is prime when no column outside it can be added.
pub fn is_prime_pack(inst: &Instance, x: &BinarySolution) -> Result<bool, ModelError> {
    let counts = require_pack(inst, x)?;
    Ok(!(0..inst.n()).any(|j| !x.get(j) && addable(inst, &counts, j)))
}

/// Adds columns in ascending index order while the result stays a pack.
///
/// With [`ReductionMode::ImprovingOnly`] a column is added only when that does
/// not decrease the (maximized) objective; passes repeat until nothing changes.
pub fn extend_to_prime_pack(
    inst: &Instance,
    x: &BinarySolution,
    mode: ReductionMode,
) -> Result<BinarySolution, ModelError> {
    let mut counts = require_pack(inst, x)?;
    let mut current = x.clone();
    loop {
        let mut changed = false;
        for j in 0..inst.n() {
            if current.get(j) || !addable(inst, &counts, j) {
                continue;
            }
            if mode == ReductionMode::ImprovingOnly && toggle_gain(inst, &current, j) < 0.0 {
                continue;
            }
            current.set(j, true);
            for i in inst.column_rows(j) {
                counts[i] += 1;
            }
            changed = true;
        }
        if !changed || mode == ReductionMode::Unconditional {
            break;
        }
    }
    Ok(current)
}

/// Symmetry, positive semidefiniteness and sign structure of the costs.
pub fn analyze_structure(inst: &Instance, tol: f64) -> StructureReport {
    let n = inst.n();
    let d = &inst.d;
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((d[i][j] - d[j][i]).abs());
        }
    }
    let sym: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (d[i][j] + d[j][i])).collect())
        .collect();
    StructureReport {
        symmetric: asym <= tol,
        psd: is_psd(sym, tol),
        nonnegative_d: d.iter().flatten().all(|&v| v >= 0.0),
        nonnegative_c: inst.c.iter().all(|&v| v >= 0.0),
    }
}

/// Symmetric LDL' elimination without pivoting. A negative pivot means the
/// matrix is indefinite; a zero pivot is allowed only if the rest of its
/// column vanishes too.
fn is_psd(mut s: Vec<Vec<f64>>, tol: f64) -> bool {
    let n = s.len();
    let scale = s
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].abs())
        .fold(1.0, f64::max);
    let eps = tol * scale;
    for k in 0..n {
        let pivot = s[k][k];
        if pivot < -eps {
            return false;
        }
        if pivot <= eps {
            let limit = (eps * scale).sqrt();
            if (k + 1..n).any(|i| s[i][k].abs() > limit) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let factor = s[i][k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                s[i][j] -= factor * s[k][j];
            }
        }
    }
    true
}
