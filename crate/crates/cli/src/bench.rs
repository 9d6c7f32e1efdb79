use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use qsp_core::instances::format_number;
use qsp_core::{
    attach_quadratic, branch_and_bound_with, read_native, run_saxena_arora, BbOptions, ExactError,
    ExactResult, ExactStatus, GeneratorConfig, Instance, SaError, SaOptions,
};
use serde::Serialize;

use crate::args::BenchArgs;
use crate::{read_file, write_file, CliError, Output};

pub const CSV_HEADER: &str = "problem,m,n,bound,sa_time_s,sa_value,oracle_t1,oracle_2t1,neg_D_pct";

const FOOTER: &str = "Oracle columns are the built-in branch-and-bound solver run under the \
heuristic's wall-clock budget t1 and under 2*t1; it stands in for CPLEX, so absolute times and \
values are not comparable with published tables.";

/// One instance of the time-matched comparison. Failed cells hold a status
/// token instead of a number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub m: String,
    pub n: String,
    pub bound: String,
    pub sa_time_s: String,
    pub sa_value: String,
    pub oracle_t1: String,
    pub oracle_2t1: String,
    #[serde(rename = "neg_D_pct")]
    pub neg_d_pct: String,
}

fn list_instances(args: &BenchArgs) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(&args.dir).map_err(|source| CliError::Io {
        path: args.dir.clone(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!("{}: no instance files", args.dir.display())));
    }
    Ok(paths)
}

fn status_token(e: &SaError) -> &'static str {
    match e {
        SaError::NotCovering => "NotCovering",
        SaError::NoCover(_) => "NoCover",
        SaError::InfeasibleStart => "InfeasibleStart",
        _ => "Error",
    }
}

fn oracle_cell(r: &Result<ExactResult, ExactError>) -> String {
    match r {
        Ok(r) => format_number(r.value.get()),
        Err(ExactError::NoIncumbent) => "NoIncumbent".into(),
        Err(ExactError::Infeasible) => "Infeasible".into(),
        Err(_) => "Error".into(),
    }
}

fn bench_instance(name: String, inst: &Instance, args: &BenchArgs) -> BenchRow {
    let opts = SaOptions {
        relaxation_upper: args.relaxation.upper(),
        ..SaOptions::default()
    };
    let started = Instant::now();
    let sa = run_saxena_arora(inst, &opts);
    let t1 = match &sa {
        Ok(r) => r.wall_time,
        Err(_) => started.elapsed(),
    };
    let sa_value = match &sa {
        Ok(r) => match r.objective {
            Some(v) => format_number(v.get()),
            None => format!("{:?}", r.status),
        },
        Err(e) => status_token(e).into(),
    };

    let bb = branch_and_bound_with(
        inst,
        &BbOptions {
            time_limit: Some(2 * t1),
            checkpoints: vec![t1, 2 * t1],
            ..BbOptions::default()
        },
    );
    let (bound, at_t1, at_2t1) = match bb {
        Ok(run) => {
            let bound = match run.result.status {
                ExactStatus::Optimal => run.result.value.get(),
                ExactStatus::TimeLimitBestFound => run.result.lower_bound,
            };
            let mut snaps = run.snapshots.into_iter().map(Ok);
            let a = snaps.next().unwrap_or(Err(ExactError::NoIncumbent));
            let b = snaps.next().unwrap_or(Err(ExactError::NoIncumbent));
            (format_number(bound), oracle_cell(&a), oracle_cell(&b))
        }
        Err(e) => {
            let cell = oracle_cell(&Err(e));
            (cell.clone(), cell.clone(), cell)
        }
    };
    BenchRow {
        problem: name,
        m: inst.m().to_string(),
        n: inst.n().to_string(),
        bound,
        sa_time_s: format!("{:.1}", t1.as_secs_f64()),
        sa_value,
        oracle_t1: at_t1,
        oracle_2t1: at_2t1,
        neg_d_pct: format!("{:.2}", inst.negative_d_percent()),
    }
}

fn failed_row(name: String, token: &str) -> BenchRow {
    BenchRow {
        problem: name,
        m: String::new(),
        n: String::new(),
        bound: token.into(),
        sa_time_s: format!("{:.1}", Duration::ZERO.as_secs_f64()),
        sa_value: token.into(),
        oracle_t1: token.into(),
        oracle_2t1: token.into(),
        neg_d_pct: String::new(),
    }
}

pub fn run(args: &BenchArgs) -> Result<Output, CliError> {
    let paths = list_instances(args)?;
    let mut rows = Vec::with_capacity(paths.len());
    for path in &paths {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let loaded = read_file(path).and_then(|text| {
            read_native(&text).map_err(|source| CliError::Parse {
                path: path.clone(),
                source,
            })
        });
        let inst = match loaded {
            Ok(inst) if inst.is_linear() => {
                let config = GeneratorConfig::new(inst.n(), inst.m(), args.category.into(), args.seed);
                attach_quadratic(&inst, &config).map_err(CliError::from)
            }
            other => other,
        };
        rows.push(match inst {
            Ok(inst) => bench_instance(name, &inst, args),
            Err(_) => failed_row(name, "ParseError"),
        });
    }

    let provenance = format!(
        "# qsp {} bench dir={} category={} seed={} relaxation={:?} x0=all-ones",
        env!("CARGO_PKG_VERSION"),
        args.dir.display(),
        qsp_core::Category::from(args.category).number(),
        args.seed,
        args.relaxation,
    );
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    for row in &rows {
        writer.serialize(row)?;
    }
    let body = writer.into_inner().map_err(|e| CliError::Io {
        path: args.out.clone(),
        source: e.into_error(),
    })?;
    let csv_text = format!("{provenance}\n{}", String::from_utf8_lossy(&body));
    debug_assert!(csv_text.lines().nth(1) == Some(CSV_HEADER));
    write_file(&args.out, &csv_text)?;
    if let Some(md) = &args.markdown {
        write_file(md, &markdown(&provenance, &rows))?;
    }
    Ok(Output::ok(format!("wrote {} rows to {}\n", rows.len(), args.out.display())))
}

fn markdown(provenance: &str, rows: &[BenchRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<!-- {} -->\n", provenance.trim_start_matches("# "));
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let _ = writeln!(s, "| {} |", header.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let cells = [
            &r.problem, &r.m, &r.n, &r.bound, &r.sa_time_s, &r.sa_value, &r.oracle_t1, &r.oracle_2t1,
            &r.neg_d_pct,
        ];
        let cells: Vec<&str> = cells.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(s, "| {} |", cells.join(" | "));
    }
    let _ = writeln!(s, "\n{FOOTER}");
    s
}
