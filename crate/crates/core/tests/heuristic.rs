use qsp_core::instances::{record, CounterexampleId};
use qsp_core::{
    brute_force, evaluate_objective, generate, gradient, is_feasible, run_saxena_arora, Category,
    GeneratorConfig, PrimeReduction, SaOptions, SaStatus, Step6Mode, Step6Route, TraceEntry,
};

fn pts(trace: &[TraceEntry]) -> Vec<Vec<f64>> {
    trace.iter().map(|t| t.point.values().to_vec()).collect()
}

/// Each LP objective is the gradient at the previous iterate and each value is
/// that objective dotted with the returned vertex.
fn assert_trace_consistent(inst: &qsp_core::Instance, start: &[f64], trace: &[TraceEntry]) {
    let mut prev = start.to_vec();
    for t in trace {
        let g = gradient(inst, prev.as_slice()).unwrap();
        assert_eq!(t.objective, g);
        let v: f64 = g.iter().zip(t.point.values()).map(|(a, b)| a * b).sum();
        assert!((v - t.value).abs() < 1e-9);
        prev = t.point.values().to_vec();
    }
}

#[test]
fn unbounded_first_subproblem() {
    let inst = record(CounterexampleId::D1).instance;
    let r = run_saxena_arora(&inst, &SaOptions::starting_at(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
    assert_eq!(r.status, SaStatus::UnboundedLP);
    assert!(r.final_solution.is_none());
    assert_eq!(
        gradient(&inst, &[1.0, 0.0, 0.0, 0.0][..]).unwrap(),
        vec![20.0, -6.0, -8.0, -8.0]
    );
}

#[test]
fn false_relaxation_optimum() {
    let inst = record(CounterexampleId::D2).instance;
    let x0 = [1.0, 0.0, 0.0, 0.0];
    let r = run_saxena_arora(&inst, &SaOptions::starting_at(x0.to_vec())).unwrap();
    assert_eq!(
        pts(&r.trace),
        vec![
            vec![0.0, 1.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 1.0]
        ]
    );
    assert_trace_consistent(&inst, &x0, &r.trace);
    let claimed = r.claimed_relaxation_point.unwrap();
    assert_eq!(evaluate_objective(&inst, &claimed).unwrap().get(), 16.0);
    let better = [5.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0];
    assert!(is_feasible(&inst, &better[..]).unwrap());
    let f = evaluate_objective(&inst, &better[..]).unwrap().get();
    assert!((f - 62.0 / 7.0).abs() < 1e-12 && f < 16.0);
}

#[test]
fn suboptimal_binary_result_and_alternate_start() {
    let inst = record(CounterexampleId::D3).instance;
    let x0 = [1.0, 0.5, 0.0, 0.0];
    let r = run_saxena_arora(&inst, &SaOptions::starting_at(x0.to_vec())).unwrap();
    assert_eq!(r.status, SaStatus::BinaryAtStep5);
    assert_eq!(r.final_solution.as_ref().unwrap().as_u8(), vec![0, 1, 1, 1]);
    assert_eq!(r.objective.unwrap().get(), 6.0);
    assert_eq!(r.trace[0].objective, vec![9.0, 4.0, 2.0, 2.0]);
    assert_eq!(r.trace[1].objective, vec![6.0, 4.0, 4.0, 4.0]);
    assert_eq!(r.trace[2].objective, vec![8.0, 2.0, 2.0, 2.0]);
    assert_trace_consistent(&inst, &x0, &r.trace);
    assert_eq!(brute_force(&inst).unwrap().value.get(), 4.0);

    let alt = run_saxena_arora(&inst, &SaOptions::starting_at(vec![0.0, 1.0, 1.0, 1.0])).unwrap();
    assert_eq!(alt.final_solution.unwrap().as_u8(), vec![1, 0, 0, 0]);
    assert_eq!(alt.objective.unwrap().get(), 4.0);
}

#[test]
fn runs_are_deterministic() {
    for category in [Category::PsdMixedSign, Category::PsdNonnegative] {
        let inst = generate(&GeneratorConfig::new(15, 30, category, 5).with_density(0.2)).unwrap();
        let a = run_saxena_arora(&inst, &SaOptions::default()).unwrap();
        let b = run_saxena_arora(&inst, &SaOptions::default()).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_solution, b.final_solution);
    }
}

#[test]
fn results_on_generated_instances_are_feasible_and_bounded_by_optimum() {
    for seed in 0..10 {
        let inst =
            generate(&GeneratorConfig::new(10, 15, Category::PsdNonnegative, seed).with_density(0.2)).unwrap();
        let opt = brute_force(&inst).unwrap().value.get();
        for mode in [Step6Mode::GomoryCuts, Step6Mode::BranchAndBoundFallback] {
            let opts = SaOptions {
                step6_mode: mode,
                ..SaOptions::default()
            };
            let r = run_saxena_arora(&inst, &opts).unwrap();
            let sol = r.final_solution.expect("nonnegative data keeps every LP bounded");
            assert!(is_feasible(&inst, &sol).unwrap());
            let f = evaluate_objective(&inst, &sol).unwrap().get();
            assert_eq!(f, r.objective.unwrap().get());
            assert!(f >= opt - 1e-9);
            if mode == Step6Mode::BranchAndBoundFallback {
                assert!(!matches!(r.step6_route, Some(Step6Route::GomoryCuts { .. })));
            }
        }
    }
}

#[test]
fn improving_prime_reduction_never_hurts() {
    for seed in 0..10 {
        let inst =
            generate(&GeneratorConfig::new(10, 12, Category::PsdMixedSign, seed).with_density(0.3)).unwrap();
        let opts = SaOptions {
            x0: qsp_core::StartStrategy::GreedyCover,
            prime_reduce_result: PrimeReduction::ImprovingOnly,
            ..SaOptions::default()
        };
        let r = run_saxena_arora(&inst, &opts).unwrap();
        if let (Some(after), Some(before)) = (r.objective, r.unreduced_objective) {
            assert!(after.get() <= before.get() + 1e-9);
        }
    }
}
