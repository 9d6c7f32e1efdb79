//! Small instances on which the heuristic and the prime-solution theorems
//! fail, each carrying the claims it is meant to demonstrate.

use std::fmt;

use serde::Serialize;

use crate::exact::brute_force;
use crate::model::{
    analyze_structure, evaluate_objective, is_feasible, is_prime_cover, is_prime_pack,
    BinarySolution, Instance, Sense, DEFAULT_PSD_TOL,
};
use crate::saxena_arora::{run, SaOptions, SaStatus};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CounterexampleId {
    T1,
    D1,
    D2,
    D3,
    P1,
}

impl CounterexampleId {
    pub const ALL: [Self; 5] = [Self::T1, Self::D1, Self::D2, Self::D3, Self::P1];

    pub fn label(self) -> &'static str {
        match self {
            Self::T1 => "CE-T1",
            Self::D1 => "CE-D1",
            Self::D2 => "CE-D2",
            Self::D3 => "CE-D3",
            Self::P1 => "CE-P1",
        }
    }
}

impl fmt::Display for CounterexampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A machine-checkable assertion about a record's instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Claim {
    /// Structure flags of `D`.
    Structure {
        symmetric: bool,
        psd: bool,
        nonnegative_d: bool,
    },
    /// Sorted objective values over every feasible cover.
    CoverObjectives { expected: Vec<f64> },
    /// Optimum (value and lexicographically first minimizer).
    ExactOptimum { solution: Vec<u8>, value: f64 },
    /// Every prime cover (or pack) is strictly worse than the optimum.
    NoPrimeOptimal,
    /// Every prime pack with its objective, in lexicographic order.
    PrimePacks { expected: Vec<(Vec<u8>, f64)> },
    /// The heuristic stops on an unbounded linear subproblem.
    UnboundedStep { x0: Vec<f64> },
    /// Iterates of the heuristic and `f` at the point it declares optimal.
    HeuristicTrace {
        x0: Vec<f64>,
        points: Vec<Vec<f64>>,
        claimed_value: f64,
    },
    /// A relaxation-feasible point with value below the heuristic's claim.
    RelaxationGap {
        point: Vec<f64>,
        value: f64,
        claimed: f64,
    },
    /// Final binary solution and objective of the heuristic.
    HeuristicResult {
        x0: Vec<f64>,
        solution: Vec<u8>,
        value: f64,
    },
}

impl Claim {
    /// The operation that verifies the claim.
    pub fn operation(&self) -> &'static str {
        match self {
            Self::Structure { .. } => "analyze_structure",
            Self::CoverObjectives { .. } => "enumerate covers + evaluate_objective",
            Self::ExactOptimum { .. } => "brute_force",
            Self::NoPrimeOptimal => "enumerate prime solutions + brute_force",
            Self::PrimePacks { .. } => "enumerate packs + is_prime_pack",
            Self::UnboundedStep { .. } => "saxena_arora::run",
            Self::HeuristicTrace { .. } => "saxena_arora::run",
            Self::RelaxationGap { .. } => "is_feasible + evaluate_objective",
            Self::HeuristicResult { .. } => "saxena_arora::run",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedClaim {
    pub name: &'static str,
    pub claim: Claim,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleRecord {
    pub id: CounterexampleId,
    pub instance: Instance,
    pub claims: Vec<NamedClaim>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimOutcome {
    /// `<record>/<claim name>`.
    pub id: String,
    pub operation: &'static str,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

fn inst(a: Vec<Vec<u8>>, d: [&[f64]; 4], sense: Sense) -> Instance {
    let d: Vec<Vec<f64>> = d.iter().map(|r| r.to_vec()).collect();
    Instance::new(a, vec![0.0; 4], d, sense).expect("embedded instance is well formed")
}

fn star() -> Vec<Vec<u8>> {
    vec![vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 0, 0, 1]]
}

fn named(name: &'static str, claim: Claim) -> NamedClaim {
    NamedClaim { name, claim }
}

pub fn record(id: CounterexampleId) -> CounterexampleRecord {
    use Claim::*;
    let (instance, claims) = match id {
        CounterexampleId::T1 => (
            Instance::new(
                vec![vec![1, 1, 0], vec![1, 0, 1]],
                vec![0.0; 3],
                vec![
                    vec![2.0, -1.0, -1.0],
                    vec![-1.0, 1.0, 0.0],
                    vec![-1.0, 0.0, 1.0],
                ],
                Sense::Cover,
            )
            .expect("embedded instance is well formed"),
            vec![
                named("structure", Structure { symmetric: true, psd: true, nonnegative_d: false }),
                named("cover-objectives", CoverObjectives { expected: vec![0.0, 1.0, 1.0, 2.0, 2.0] }),
                named("optimum", ExactOptimum { solution: vec![1, 1, 1], value: 0.0 }),
                named("no-prime-optimal", NoPrimeOptimal),
            ],
        ),
        CounterexampleId::D1 => (
            inst(
                star(),
                [&[10.0, -3.0, -4.0, -4.0], &[-3.0, 2.0, 1.0, 1.0], &[-4.0, 1.0, 3.0, 1.0], &[-4.0, 1.0, 1.0, 3.0]],
                Sense::Cover,
            ),
            vec![
                named("structure", Structure { symmetric: true, psd: true, nonnegative_d: false }),
                named("unbounded-step", UnboundedStep { x0: vec![1.0, 0.0, 0.0, 0.0] }),
            ],
        ),
        CounterexampleId::D2 => (
            inst(
                star(),
                [&[10.0, 2.0, 2.0, 2.0], &[2.0, 3.0, 1.0, 1.0], &[2.0, 1.0, 3.0, 1.0], &[2.0, 1.0, 1.0, 4.0]],
                Sense::Cover,
            ),
            vec![
                named(
                    "trace",
                    HeuristicTrace {
                        x0: vec![1.0, 0.0, 0.0, 0.0],
                        points: vec![
                            vec![0.0, 1.0, 1.0, 1.0],
                            vec![1.0, 0.0, 0.0, 0.0],
                            vec![0.0, 1.0, 1.0, 1.0],
                        ],
                        claimed_value: 16.0,
                    },
                ),
                named(
                    "relaxation-gap",
                    RelaxationGap {
                        point: vec![5.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0],
                        value: 62.0 / 7.0,
                        claimed: 16.0,
                    },
                ),
                named("optimum", ExactOptimum { solution: vec![1, 0, 0, 0], value: 10.0 }),
            ],
        ),
        CounterexampleId::D3 => (
            inst(
                star(),
                [&[4.0, 1.0, 1.0, 1.0], &[1.0, 2.0, 0.0, 0.0], &[1.0, 0.0, 2.0, 0.0], &[1.0, 0.0, 0.0, 2.0]],
                Sense::Cover,
            ),
            vec![
                named("structure", Structure { symmetric: true, psd: true, nonnegative_d: true }),
                named(
                    "trace",
                    HeuristicTrace {
                        x0: vec![1.0, 0.5, 0.0, 0.0],
                        points: vec![
                            vec![0.0, 1.0, 1.0, 1.0],
                            vec![1.0, 0.0, 0.0, 0.0],
                            vec![0.0, 1.0, 1.0, 1.0],
                        ],
                        claimed_value: 6.0,
                    },
                ),
                named(
                    "heuristic-value",
                    HeuristicResult { x0: vec![1.0, 0.5, 0.0, 0.0], solution: vec![0, 1, 1, 1], value: 6.0 },
                ),
                named("optimum", ExactOptimum { solution: vec![1, 0, 0, 0], value: 4.0 }),
                named(
                    "alternate-start",
                    HeuristicResult { x0: vec![0.0, 1.0, 1.0, 1.0], solution: vec![1, 0, 0, 0], value: 4.0 },
                ),
            ],
        ),
        CounterexampleId::P1 => (
            Instance::new(
                vec![vec![1, 1, 0], vec![1, 0, 1]],
                vec![0.0; 3],
                vec![
                    vec![-2.0, 1.0, 0.0],
                    vec![1.0, -2.0, 1.0],
                    vec![0.0, 1.0, -2.0],
                ],
                Sense::Pack,
            )
            .expect("embedded instance is well formed"),
            vec![
                named("optimum", ExactOptimum { solution: vec![0, 0, 0], value: 0.0 }),
                named(
                    "prime-packs",
                    PrimePacks { expected: vec![(vec![0, 1, 1], -2.0), (vec![1, 0, 0], -2.0)] },
                ),
                named("no-prime-optimal", NoPrimeOptimal),
            ],
        ),
    };
    CounterexampleRecord { id, instance, claims }
}

pub fn all_records() -> Vec<CounterexampleRecord> {
    CounterexampleId::ALL.into_iter().map(record).collect()
}

/// Runs every claim of every embedded record; outcomes sorted by id.
pub fn verify_counterexamples() -> Vec<ClaimOutcome> {
    let mut out: Vec<ClaimOutcome> = all_records().iter().flat_map(verify_record).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

pub fn verify_record(rec: &CounterexampleRecord) -> Vec<ClaimOutcome> {
    rec.claims
        .iter()
        .map(|nc| {
            let (expected, actual) = match check(&rec.instance, &nc.claim) {
                Ok(pair) => pair,
                Err(e) => (describe_expected(&nc.claim), Err(format!("error: {e}"))),
            };
            let (passed, actual) = match actual {
                Ok(s) => (true, s),
                Err(s) => (false, s),
            };
            ClaimOutcome {
                id: format!("{}/{}", rec.id, nc.name),
                operation: nc.claim.operation(),
                passed,
                expected,
                actual,
            }
        })
        .collect()
}

type Checked = (String, Result<String, String>);

fn verdict(ok: bool, actual: String) -> Result<String, String> {
    if ok {
        Ok(actual)
    } else {
        Err(actual)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn points_close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(*x, *y))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{}", round(*x))).collect();
    format!("({})", parts.join(","))
}

fn fmt_bits(v: &[u8]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn round(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn describe_expected(claim: &Claim) -> String {
    match claim {
        Claim::Structure { symmetric, psd, nonnegative_d } => {
            format!("symmetric={symmetric} psd={psd} nonnegative_d={nonnegative_d}")
        }
        Claim::CoverObjectives { expected } => format!("cover objectives {}", fmt_vec(expected)),
        Claim::ExactOptimum { solution, value } => {
            format!("optimum {} at {}", round(*value), fmt_bits(solution))
        }
        Claim::NoPrimeOptimal => "every prime solution worse than the optimum".into(),
        Claim::PrimePacks { expected } => {
            let parts: Vec<String> = expected
                .iter()
                .map(|(b, v)| format!("{}={}", fmt_bits(b), round(*v)))
                .collect();
            format!("prime packs {}", parts.join(" "))
        }
        Claim::UnboundedStep { .. } => "status UnboundedLP".into(),
        Claim::HeuristicTrace { points, claimed_value, .. } => {
            let parts: Vec<String> = points.iter().map(|p| fmt_vec(p)).collect();
            format!("trace {} claimed f={}", parts.join("->"), round(*claimed_value))
        }
        Claim::RelaxationGap { point, value, claimed } => format!(
            "feasible {} with f={} < {}",
            fmt_vec(point),
            round(*value),
            round(*claimed)
        ),
        Claim::HeuristicResult { solution, value, .. } => {
            format!("solution {} f={}", fmt_bits(solution), round(*value))
        }
    }
}

fn all_binaries(n: usize) -> impl Iterator<Item = BinarySolution> {
    (0u32..1 << n).map(move |mask| {
        BinarySolution::from_bools((0..n).map(|j| mask >> (n - 1 - j) & 1 == 1).collect())
    })
}

fn check(inst: &Instance, claim: &Claim) -> Result<Checked, Box<dyn std::error::Error>> {
    let expected = describe_expected(claim);
    let actual = match claim {
        Claim::Structure { symmetric, psd, nonnegative_d } => {
            let s = analyze_structure(inst, DEFAULT_PSD_TOL);
            verdict(
                s.symmetric == *symmetric && s.psd == *psd && s.nonnegative_d == *nonnegative_d,
                format!("symmetric={} psd={} nonnegative_d={}", s.symmetric, s.psd, s.nonnegative_d),
            )
        }
        Claim::CoverObjectives { expected: want } => {
            let mut values = Vec::new();
            for x in all_binaries(inst.n()) {
                if is_feasible(inst, &x)? {
                    values.push(evaluate_objective(inst, &x)?.get());
                }
            }
            values.sort_by(f64::total_cmp);
            verdict(points_close(&values, want), format!("cover objectives {}", fmt_vec(&values)))
        }
        Claim::ExactOptimum { solution, value } => {
            let r = brute_force(inst)?;
            let bits = r.solution.as_u8();
            verdict(
                bits == *solution && close(r.value.get(), *value),
                format!("optimum {} at {}", round(r.value.get()), fmt_bits(&bits)),
            )
        }
        Claim::NoPrimeOptimal => {
            let opt = brute_force(inst)?.value.get();
            let mut best_prime: Option<f64> = None;
            for x in all_binaries(inst.n()) {
                if !is_feasible(inst, &x)? {
                    continue;
                }
                let prime = match inst.sense() {
                    Sense::Cover => is_prime_cover(inst, &x)?,
                    Sense::Pack => is_prime_pack(inst, &x)?,
                };
                if prime {
                    let v = evaluate_objective(inst, &x)?.get();
                    best_prime = Some(match (best_prime, inst.sense()) {
                        (None, _) => v,
                        (Some(b), Sense::Cover) => b.min(v),
                        (Some(b), Sense::Pack) => b.max(v),
                    });
                }
            }
            let strictly_worse = best_prime.is_none_or(|b| match inst.sense() {
                Sense::Cover => b > opt + TOL,
                Sense::Pack => b < opt - TOL,
            });
            let shown = best_prime.map_or("none".to_string(), |b| round(b).to_string());
            verdict(strictly_worse, format!("best prime {shown} vs optimum {}", round(opt)))
        }
        Claim::PrimePacks { expected: want } => {
            let mut found = Vec::new();
            for x in all_binaries(inst.n()) {
                if is_feasible(inst, &x)? && is_prime_pack(inst, &x)? {
                    found.push((x.as_u8(), evaluate_objective(inst, &x)?.get()));
                }
            }
            let ok = found.len() == want.len()
                && found.iter().zip(want).all(|((b, v), (wb, wv))| b == wb && close(*v, *wv));
            let parts: Vec<String> = found
                .iter()
                .map(|(b, v)| format!("{}={}", fmt_bits(b), round(*v)))
                .collect();
            verdict(ok, format!("prime packs {}", parts.join(" ")))
        }
        Claim::UnboundedStep { x0 } => {
            let r = run(inst, &SaOptions::starting_at(x0.clone()))?;
            verdict(r.status == SaStatus::UnboundedLP, format!("status {:?}", r.status))
        }
        Claim::HeuristicTrace { x0, points, claimed_value } => {
            let r = run(inst, &SaOptions::starting_at(x0.clone()))?;
            let got: Vec<&[f64]> = r.trace.iter().map(|t| t.point.values()).collect();
            let claimed = match &r.claimed_relaxation_point {
                Some(p) => Some(evaluate_objective(inst, p)?.get()),
                None => None,
            };
            let ok = got.len() == points.len()
                && got.iter().zip(points).all(|(g, p)| points_close(g, p))
                && claimed.is_some_and(|v| close(v, *claimed_value));
            let parts: Vec<String> = got.iter().map(|p| fmt_vec(p)).collect();
            let shown = claimed.map_or("none".to_string(), |v| round(v).to_string());
            verdict(ok, format!("trace {} claimed f={shown}", parts.join("->")))
        }
        Claim::RelaxationGap { point, value, claimed } => {
            let feasible = is_feasible(inst, point.as_slice())?;
            let f = evaluate_objective(inst, point.as_slice())?.get();
            verdict(
                feasible && close(f, *value) && f < *claimed - TOL,
                format!("feasible={feasible} f={} vs {}", round(f), round(*claimed)),
            )
        }
        Claim::HeuristicResult { x0, solution, value } => {
            let r = run(inst, &SaOptions::starting_at(x0.clone()))?;
            match (&r.final_solution, r.objective) {
                (Some(sol), Some(obj)) => {
                    let bits = sol.as_u8();
                    verdict(
                        bits == *solution && close(obj.get(), *value),
                        format!("solution {} f={}", fmt_bits(&bits), round(obj.get())),
                    )
                }
                _ => Err(format!("no solution, status {:?}", r.status)),
            }
        }
    };
    Ok((expected, actual))
}
