//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion outside `KNOWN_RED` fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use qsp_core::instances::{all_records, parse_dimacs_vertex_cover, parse_orlib_scp};
use qsp_core::{
    branch_and_bound, brute_force, evaluate_objective, extend_to_prime_pack, generate,
    gomory_binary_solve, gradient, greedy_cover, is_feasible, is_prime_cover, is_prime_pack,
    read_native, reduce_to_prime_cover, run_saxena_arora, solve_lp, verify_counterexamples,
    write_native, BinarySolution, Category, CutLoopStatus, GeneratorConfig, Instance,
    LinearProgram, LpStatus, ReductionMode, SaOptions, Sense, UpperBound,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that are known not to hold; the analysis is in the README.
const KNOWN_RED: &[u8] = &[6];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(u8, &str, fn() -> Verdict); 7] = [
        (1, "counterexample suite", counterexample_suite),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "prime-solution properties on nonnegative data", theorem_properties),
        (4, "simplex validity", simplex_validity),
        (5, "gradient check", gradient_check),
        (6, "heuristic quality pattern", quality_pattern),
        (7, "format fidelity", format_fidelity),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let started = Instant::now();
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "{tag} [{id}] {name}: {} ({:.2} s)",
            v.detail,
            started.elapsed().as_secs_f64()
        );
        if !v.passed && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn f(inst: &Instance, x: &BinarySolution) -> f64 {
    evaluate_objective(inst, x).unwrap().get()
}

fn all_binaries(n: usize) -> impl Iterator<Item = BinarySolution> {
    (0u32..1 << n).map(move |mask| BinarySolution::from_bools((0..n).map(|j| mask >> j & 1 == 1).collect()))
}

fn random_matrix(r: &mut ChaCha8Rng, n: usize, m: usize, density: f64) -> Vec<Vec<u8>> {
    (0..m)
        .map(|_| loop {
            let row: Vec<u8> = (0..n).map(|_| r.gen_bool(density) as u8).collect();
            if row.contains(&1) {
                break row;
            }
        })
        .collect()
}

// ---------------------------------------------------------------- 1

fn counterexample_suite() -> Verdict {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qsp"))
        .arg("verify-paper")
        .output()
        .expect("qsp binary runs");
    let elapsed = started.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL "))
        .collect();
    let passed = lines.iter().filter(|l| l.starts_with("PASS ")).count();
    let required = [
        "CE-T1/cover-objectives",
        "CE-T1/optimum",
        "CE-T1/no-prime-optimal",
        "CE-D1/unbounded-step",
        "CE-D2/trace",
        "CE-D2/relaxation-gap",
        "CE-D3/heuristic-value",
        "CE-D3/optimum",
        "CE-D3/alternate-start",
        "CE-P1/prime-packs",
        "CE-P1/optimum",
    ];
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|id| !lines.iter().any(|l| l.starts_with(&format!("PASS {id} "))))
        .collect();
    let in_process = verify_counterexamples().iter().all(|o| o.passed);
    let ok = out.status.success()
        && passed == lines.len()
        && missing.is_empty()
        && in_process
        && elapsed < Duration::from_secs(10);
    verdict(
        ok,
        format!(
            "{passed}/{} claims pass in {:.2} s (limit 10 s){}",
            lines.len(),
            elapsed.as_secs_f64(),
            if missing.is_empty() {
                String::new()
            } else {
                format!(", missing {missing:?}")
            }
        ),
    )
}

// ---------------------------------------------------------------- 2

fn oracle_equivalence() -> Verdict {
    let started = Instant::now();
    let mut mismatches = 0;
    let mut total = 0;
    for category in [Category::PsdMixedSign, Category::PsdNonnegative] {
        let mut r = rng(20 + category.number() as u64);
        for k in 0..100u64 {
            let n = r.gen_range(4..=15);
            let m = r.gen_range(n / 2 + 1..=2 * n);
            let cfg = GeneratorConfig::new(n, m, category, 5000 + k).with_density(0.2);
            let inst = generate(&cfg).unwrap();
            let bf = brute_force(&inst).unwrap().value.get();
            let bb = branch_and_bound(&inst, None).unwrap().value.get();
            total += 1;
            if bf != bb {
                mismatches += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        mismatches == 0 && elapsed < Duration::from_secs(300),
        format!("{}/{total} exact matches, n <= 15, in {:.1} s (limit 300 s)", total - mismatches, elapsed.as_secs_f64()),
    )
}

// ---------------------------------------------------------------- 3

fn random_cover(r: &mut ChaCha8Rng, inst: &Instance) -> BinarySolution {
    let mut x = BinarySolution::from_bools((0..inst.n()).map(|_| r.gen_bool(0.4)).collect());
    for row in inst.a() {
        let covered = row.iter().enumerate().any(|(j, &a)| a == 1 && x.get(j));
        if !covered {
            let cols: Vec<usize> = (0..inst.n()).filter(|&j| row[j] == 1).collect();
            x.set(cols[r.gen_range(0..cols.len())], true);
        }
    }
    x
}

fn random_pack(r: &mut ChaCha8Rng, inst: &Instance) -> BinarySolution {
    let mut x = BinarySolution::zeros(inst.n());
    for j in 0..inst.n() {
        if r.gen_bool(0.5) {
            x.set(j, true);
            if !is_feasible(inst, &x).unwrap() {
                x.set(j, false);
            }
        }
    }
    x
}

fn theorem_properties() -> Verdict {
    let mut r = rng(3);
    let mut violations = Vec::new();
    let mut reductions = 0;
    for k in 0..200u64 {
        let n = r.gen_range(3..=12);
        let m = r.gen_range(2..=2 * n);
        let cover = generate(&GeneratorConfig::new(n, m, Category::PsdNonnegative, 9000 + k).with_density(0.25)).unwrap();

        let mut starts = vec![BinarySolution::ones(n), greedy_cover(&cover).unwrap()];
        starts.extend((0..3).map(|_| random_cover(&mut r, &cover)));
        for x in &starts {
            let reduced = reduce_to_prime_cover(&cover, x, ReductionMode::Unconditional).unwrap();
            reductions += 1;
            if !is_prime_cover(&cover, &reduced).unwrap() || f(&cover, &reduced) > f(&cover, x) {
                violations.push(format!("cover reduction, instance {k}"));
            }
        }
        let opt = brute_force(&cover).unwrap().value.get();
        let best_prime = all_binaries(n)
            .filter(|x| is_feasible(&cover, x).unwrap() && is_prime_cover(&cover, x).unwrap())
            .map(|x| f(&cover, &x))
            .fold(f64::INFINITY, f64::min);
        if best_prime != opt {
            violations.push(format!("no optimal prime cover, instance {k}"));
        }

        let pack = cover.with_sense(Sense::Pack);
        let mut starts = vec![BinarySolution::zeros(n)];
        starts.extend((0..3).map(|_| random_pack(&mut r, &pack)));
        for x in &starts {
            let extended = extend_to_prime_pack(&pack, x, ReductionMode::Unconditional).unwrap();
            reductions += 1;
            if !is_prime_pack(&pack, &extended).unwrap() || f(&pack, &extended) < f(&pack, x) {
                violations.push(format!("pack extension, instance {k}"));
            }
        }
        let opt = brute_force(&pack).unwrap().value.get();
        let best_prime = all_binaries(n)
            .filter(|x| is_feasible(&pack, x).unwrap() && is_prime_pack(&pack, x).unwrap())
            .map(|x| f(&pack, &x))
            .fold(f64::NEG_INFINITY, f64::max);
        if best_prime != opt {
            violations.push(format!("no optimal prime pack, instance {k}"));
        }
    }
    verdict(
        violations.is_empty(),
        format!(
            "200 instances, {reductions} reductions/extensions, {} violations{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 4

/// Minimum of `g.x` over basic solutions of `{Ax >= 1, x >= 0}` (and
/// `x <= 1` when `boxed`): each variable is fixed at a bound or free, and the
/// free ones are determined by as many tight rows of `A`.
fn basic_solution_min(g: &[f64], a: &[Vec<u8>], boxed: bool) -> f64 {
    let n = g.len();
    let m = a.len();
    let states: u32 = if boxed { 3 } else { 2 };
    let mut best = f64::INFINITY;
    let mut code = vec![0u32; n];
    loop {
        // 0: at zero, states - 1: free, 1 (boxed only): at one
        let free: Vec<usize> = (0..n).filter(|&j| code[j] == states - 1).collect();
        let ones: Vec<usize> = (0..n).filter(|&j| boxed && code[j] == 1).collect();
        let k = free.len();
        if k <= m {
            for rows in subsets(m, k) {
                let mut x = vec![0.0; n];
                for &j in &ones {
                    x[j] = 1.0;
                }
                if k > 0 {
                    let mat = DMatrix::from_fn(k, k, |r, c| a[rows[r]][free[c]] as f64);
                    let rhs = DVector::from_fn(k, |r, _| {
                        1.0 - ones.iter().map(|&j| a[rows[r]][j] as f64).sum::<f64>()
                    });
                    let Some(sol) = mat.lu().solve(&rhs) else { continue };
                    for (c, &j) in free.iter().enumerate() {
                        x[j] = sol[c];
                    }
                }
                let in_bounds = x.iter().all(|&v| v >= -1e-9 && (!boxed || v <= 1.0 + 1e-9));
                let covers = a.iter().all(|row| {
                    row.iter().zip(&x).map(|(&aij, xj)| aij as f64 * xj).sum::<f64>() >= 1.0 - 1e-9
                });
                if in_bounds && covers {
                    best = best.min(g.iter().zip(&x).map(|(p, q)| p * q).sum());
                }
            }
        }
        let mut j = 0;
        while j < n {
            code[j] += 1;
            if code[j] < states {
                break;
            }
            code[j] = 0;
            j += 1;
        }
        if j == n {
            return best;
        }
    }
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

fn simplex_validity() -> Verdict {
    let mut r = rng(4);
    let (mut matched, mut rays, mut failures) = (0, 0, Vec::new());
    for k in 0..200 {
        let n = r.gen_range(2..=8);
        let m = r.gen_range(1..=6);
        let a = random_matrix(&mut r, n, m, 0.4);
        let g: Vec<f64> = (0..n).map(|_| r.gen_range(-6..=6) as f64).collect();
        let upper = if k % 2 == 0 { UpperBound::One } else { UpperBound::Infinite };
        let lp = LinearProgram::covering(g.clone(), &a, upper).unwrap();
        let out = solve_lp(&lp).unwrap();
        match out.status {
            LpStatus::Optimal => {
                let want = basic_solution_min(&g, &a, upper == UpperBound::One);
                let got = out.value.unwrap();
                let point = out.point.unwrap();
                if (got - want).abs() <= 1e-9 && lp.is_feasible_point(point.values(), 1e-9) {
                    matched += 1;
                } else {
                    failures.push(format!("lp {k}: {got} vs {want}"));
                }
            }
            LpStatus::Unbounded => {
                let ray = out.ray.unwrap();
                let base = out.point.unwrap();
                let descent: f64 = g.iter().zip(&ray).map(|(p, q)| p * q).sum();
                let recession = ray.iter().all(|&v| v >= -1e-12)
                    && a.iter().all(|row| row.iter().zip(&ray).map(|(&aij, d)| aij as f64 * d).sum::<f64>() >= -1e-12);
                let far: Vec<f64> = base.values().iter().zip(&ray).map(|(x, d)| x + 1e3 * d).collect();
                if upper == UpperBound::Infinite
                    && descent < 0.0
                    && recession
                    && lp.is_feasible_point(&far, 1e-9)
                {
                    rays += 1;
                } else {
                    failures.push(format!("lp {k}: unverified ray"));
                }
            }
            LpStatus::Infeasible => failures.push(format!("lp {k}: infeasible")),
        }
    }

    let (mut cuts_checked, mut cut_runs, mut capped) = (0, 0, 0);
    for k in 0..200 {
        let n = r.gen_range(3..=12);
        // Rows with two or three entries have fractional relaxations often.
        let m = r.gen_range(n..=2 * n);
        let a: Vec<Vec<u8>> = (0..m)
            .map(|_| {
                let mut row = vec![0u8; n];
                let k = r.gen_range(2..=3);
                while row.iter().filter(|&&v| v == 1).count() < k {
                    row[r.gen_range(0..n)] = 1;
                }
                row
            })
            .collect();
        let g: Vec<f64> = (0..n).map(|_| r.gen_range(1..=9) as f64).collect();
        let lp = LinearProgram::covering(g.clone(), &a, UpperBound::One).unwrap();
        let report = gomory_binary_solve(&lp, 200).unwrap();
        cut_runs += 1;
        let feasible: Vec<Vec<f64>> = (0u32..1 << n)
            .map(|mask| (0..n).map(|j| (mask >> j & 1) as f64).collect::<Vec<_>>())
            .filter(|x| lp.is_feasible_point(x, 1e-9))
            .collect();
        for cut in &report.cuts {
            cuts_checked += 1;
            if let Some(x) = feasible.iter().find(|x| !cut.is_satisfied(x, 1e-7)) {
                failures.push(format!("cut run {k} removes {x:?}"));
            }
        }
        if report.status != CutLoopStatus::IntegerOptimal {
            capped += 1;
        }
        if report.status == CutLoopStatus::IntegerOptimal {
            let best = feasible
                .iter()
                .map(|x| g.iter().zip(x).map(|(p, q)| p * q).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if (report.value - best).abs() > 1e-9 {
                failures.push(format!("cut run {k}: value {} vs {best}", report.value));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{matched} optima match enumeration, {rays} rays verified, {cuts_checked} cuts from {cut_runs} runs ({capped} hit the cap) keep every 0-1 point{}",
            failures.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 5

fn gradient_check() -> Verdict {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.gen_range(1..=10);
        let a = random_matrix(&mut r, n, 2, 0.5);
        let c: Vec<f64> = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
        let d: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| r.gen_range(-10.0..10.0)).collect()).collect();
        let inst = Instance::new(a, c, d, Sense::Cover).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0)).collect();
        let g = gradient(&inst, x.as_slice()).unwrap();
        let h = 1e-4;
        for j in 0..n {
            let mut up = x.clone();
            let mut down = x.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (evaluate_objective(&inst, up.as_slice()).unwrap().get()
                - evaluate_objective(&inst, down.as_slice()).unwrap().get())
                / (2.0 * h);
            worst = worst.max((fd - g[j]).abs() / g[j].abs().max(1.0));
        }
    }
    verdict(worst <= 1e-6, format!("100 instances, worst relative error {worst:.2e} (limit 1e-6)"))
}

// ---------------------------------------------------------------- 6

struct Batch {
    solved: usize,
    feasible: usize,
    ties: usize,
    big_gaps: usize,
    statuses: Vec<String>,
}

fn batch(category: Category, upper: UpperBound) -> Batch {
    let mut b = Batch {
        solved: 0,
        feasible: 0,
        ties: 0,
        big_gaps: 0,
        statuses: Vec::new(),
    };
    for k in 0..20u64 {
        let n = 12 + (k as usize % 9);
        let inst = generate(&GeneratorConfig::new(n, 2 * n, category, 1000 + k).with_density(0.15)).unwrap();
        let opt = branch_and_bound(&inst, None).unwrap().value.get();
        let opts = SaOptions {
            relaxation_upper: upper,
            ..SaOptions::default()
        };
        let run = run_saxena_arora(&inst, &opts).unwrap();
        let status = format!("{:?}", run.status);
        if !b.statuses.contains(&status) {
            b.statuses.push(status);
        }
        if let (Some(sol), Some(v)) = (&run.final_solution, run.objective) {
            b.solved += 1;
            if is_feasible(&inst, sol).unwrap() {
                b.feasible += 1;
            }
            let gap = (v.get() - opt) / opt.abs().max(1e-9);
            if gap.abs() <= 1e-9 {
                b.ties += 1;
            }
            if gap >= 0.25 {
                b.big_gaps += 1;
            }
        }
    }
    b
}

fn quality_pattern() -> Verdict {
    let nonneg = batch(Category::PsdNonnegative, UpperBound::Infinite);
    let mixed = batch(Category::PsdMixedSign, UpperBound::Infinite);
    let boxed = batch(Category::PsdMixedSign, UpperBound::One);
    let cat2 = nonneg.feasible == 20 && nonneg.ties >= 1;
    let cat1 = mixed.big_gaps >= 1;
    verdict(
        cat2 && cat1,
        format!(
            "category 2: {}/20 feasible covers, {} ties with the optimum; category 1: {}/20 runs \
             return a solution (statuses {:?}), {} with gap >= 25%; box-bounded variant on the same \
             category-1 batch: {}/20 solved, {} with gap >= 25%",
            nonneg.feasible,
            nonneg.ties,
            mixed.solved,
            mixed.statuses,
            mixed.big_gaps,
            boxed.solved,
            boxed.big_gaps,
        ),
    )
}

// ---------------------------------------------------------------- 7

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(path).expect("fixture exists")
}

fn format_fidelity() -> Verdict {
    let mut problems = Vec::new();

    let scp = parse_orlib_scp(&fixture("scp_small.txt")).unwrap();
    let want_a = vec![
        vec![1, 1, 0, 0, 0],
        vec![0, 1, 1, 0, 1],
        vec![0, 0, 0, 1, 0],
        vec![1, 0, 0, 0, 1],
    ];
    if scp.a() != want_a.as_slice() || scp.c() != [1.0, 2.0, 3.0, 4.0, 5.0] {
        problems.push("OR-Library fixture".to_string());
    }

    let graph = parse_dimacs_vertex_cover(&fixture("square.dimacs")).unwrap();
    let want_a = vec![
        vec![1, 1, 0, 0],
        vec![0, 1, 1, 0],
        vec![0, 0, 1, 1],
        vec![1, 0, 0, 1],
        vec![1, 0, 1, 0],
    ];
    if graph.a() != want_a.as_slice() || graph.c() != [1.0; 4] {
        problems.push("DIMACS fixture".to_string());
    }

    let mut instances: Vec<Instance> = all_records().into_iter().map(|r| r.instance).collect();
    instances.push(scp);
    instances.push(graph);
    for seed in 0..50 {
        let category = if seed % 2 == 0 { Category::PsdMixedSign } else { Category::PsdNonnegative };
        instances.push(generate(&GeneratorConfig::new(3 + seed as usize % 15, 10, category, seed).with_density(0.3)).unwrap());
    }
    let mut frac = Instance::linear(vec![vec![1, 1]], vec![0.5, -1.0 / 3.0], Sense::Pack).unwrap();
    frac = frac.with_costs(frac.c().to_vec(), vec![vec![0.1, 2.5], vec![-7.0, 1e-3]]).unwrap();
    instances.push(frac);

    let mut stable = 0;
    for inst in &instances {
        let text = write_native(inst);
        match read_native(&text) {
            Ok(back) if &back == inst && write_native(&back) == text => stable += 1,
            _ => problems.push(format!("round trip of {}x{} instance", inst.m(), inst.n())),
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "fixtures match hand matrices, {stable}/{} native round trips byte-stable{}",
            instances.len(),
            problems.first().map(|p| format!("; failed: {p}")).unwrap_or_default()
        ),
    )
}
