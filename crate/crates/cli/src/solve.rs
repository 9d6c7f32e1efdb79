use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use qsp_core::instances::parse_number;
use qsp_core::{
    branch_and_bound, brute_force, read_native, run_saxena_arora, ExactResult, Instance,
    SaOptions, SaRunReport, StartStrategy, Step6Route,
};
use serde::Serialize;

use crate::args::{Algo, Relaxation, SolveArgs};
use crate::{read_file, CliError, Output};

#[derive(Debug, Serialize)]
struct TraceRow {
    point: Vec<f64>,
    objective: Vec<f64>,
    value: f64,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    algorithm: &'static str,
    status: String,
    solution: Option<Vec<u8>>,
    objective: Option<f64>,
    /// Proven bound from the exact solvers.
    bound: Option<f64>,
    nodes_explored: Option<u64>,
    trace: Vec<TraceRow>,
    claimed_relaxation_point: Option<Vec<f64>>,
    step6: Option<String>,
    wall_time_s: f64,
}

pub(crate) fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read_file(path)?;
    read_native(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn parse_start(spec: Option<&str>) -> Result<StartStrategy, CliError> {
    Ok(match spec {
        None | Some("all-ones") => StartStrategy::AllOnes,
        Some("greedy") => StartStrategy::GreedyCover,
        Some(path) => {
            let path = Path::new(path);
            let text = read_file(path)?;
            let values = text
                .split_whitespace()
                .map(|tok| {
                    parse_number(tok).ok_or_else(|| CliError::Usage(format!(
                        "{}: bad starting value {tok:?}",
                        path.display()
                    )))
                })
                .collect::<Result<Vec<_>, _>>()?;
            StartStrategy::Given(values)
        }
    })
}

fn validate(args: &SolveArgs) -> Result<(), CliError> {
    if args.algo != Algo::Sa && args.x0.is_some() {
        return Err(CliError::Usage("--x0 applies to --algo sa only".into()));
    }
    if args.algo != Algo::Sa && args.relaxation != Relaxation::Unbounded {
        return Err(CliError::Usage("--relaxation applies to --algo sa only".into()));
    }
    if let Some(t) = args.time_limit {
        if args.algo != Algo::Bb {
            return Err(CliError::Usage("--time-limit applies to --algo bb only".into()));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("invalid time limit {t}")));
        }
    }
    Ok(())
}

pub fn run(args: &SolveArgs) -> Result<Output, CliError> {
    validate(args)?;
    let start = parse_start(args.x0.as_deref())?;
    let inst = load_instance(&args.instance)?;
    let report = match args.algo {
        Algo::Sa => {
            let opts = SaOptions {
                x0: start,
                relaxation_upper: args.relaxation.upper(),
                ..SaOptions::default()
            };
            from_heuristic(run_saxena_arora(&inst, &opts)?)
        }
        Algo::Bb => {
            let started = std::time::Instant::now();
            let r = branch_and_bound(&inst, args.time_limit.map(Duration::from_secs_f64))?;
            from_exact("bb", r, started.elapsed())
        }
        Algo::Brute => {
            let started = std::time::Instant::now();
            let r = brute_force(&inst)?;
            from_exact("brute", r, started.elapsed())
        }
    };
    let code = if report.solution.is_some() { 0 } else { 1 };
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(&report)?;
        s.push('\n');
        s
    } else {
        render_text(&report)
    };
    Ok(Output { text, code })
}

fn from_heuristic(r: SaRunReport) -> SolveReport {
    SolveReport {
        algorithm: "sa",
        status: format!("{:?}", r.status),
        solution: r.final_solution.as_ref().map(|s| s.as_u8()),
        objective: r.objective.map(|v| v.get()),
        bound: None,
        nodes_explored: None,
        trace: r
            .trace
            .iter()
            .map(|t| TraceRow {
                point: t.point.values().to_vec(),
                objective: t.objective.clone(),
                value: t.value,
            })
            .collect(),
        claimed_relaxation_point: r.claimed_relaxation_point.map(|p| p.into_values()),
        step6: r.step6_route.map(|route| match route {
            Step6Route::GomoryCuts { cuts_added } => format!("gomory cuts ({cuts_added} cuts)"),
            Step6Route::BranchAndBound { cuts_added } => {
                format!("branch-and-bound after {cuts_added} cuts")
            }
        }),
        wall_time_s: r.wall_time.as_secs_f64(),
    }
}

fn from_exact(algorithm: &'static str, r: ExactResult, elapsed: Duration) -> SolveReport {
    SolveReport {
        algorithm,
        status: format!("{:?}", r.status),
        solution: Some(r.solution.as_u8()),
        objective: Some(r.value.get()),
        bound: Some(r.lower_bound),
        nodes_explored: Some(r.nodes_explored),
        trace: Vec::new(),
        claimed_relaxation_point: None,
        step6: None,
        wall_time_s: elapsed.as_secs_f64(),
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{}", (x * 1e9).round() / 1e9)).collect();
    format!("({})", parts.join(", "))
}

fn render_text(r: &SolveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "algorithm: {}", r.algorithm);
    let _ = writeln!(s, "status: {}", r.status);
    match &r.solution {
        Some(bits) => {
            let bits: Vec<String> = bits.iter().map(|b| b.to_string()).collect();
            let _ = writeln!(s, "solution: {}", bits.join(" "));
        }
        None => {
            let _ = writeln!(s, "solution: none");
        }
    }
    if let Some(v) = r.objective {
        let _ = writeln!(s, "objective: {v}");
    }
    if let Some(b) = r.bound {
        let _ = writeln!(s, "bound: {b}");
    }
    if let Some(nodes) = r.nodes_explored {
        let _ = writeln!(s, "nodes: {nodes}");
    }
    if r.algorithm == "sa" {
        let _ = writeln!(s, "subproblems: {}", r.trace.len());
        for (k, t) in r.trace.iter().enumerate() {
            let _ = writeln!(s, "  {}: {} value {}", k + 1, vector(&t.point), t.value);
        }
        if let Some(p) = &r.claimed_relaxation_point {
            let _ = writeln!(s, "claimed relaxation point: {}", vector(p));
        }
        if let Some(step6) = &r.step6 {
            let _ = writeln!(s, "integerized by: {step6}");
        }
    }
    let _ = writeln!(s, "wall time: {:.3} s", r.wall_time_s);
    s
}
