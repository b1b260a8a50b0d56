use ceda2_core::benchmarks::basic::sphere;
use ceda2_core::benchmarks::FnObjective;
use ceda2_core::eda2::{Eda2, StopReason};
use ceda2_core::{
    run_eda2, seeded_rng, Bounds, Eda2Params, EvalBudget, Individual, Sense, TerminationPolicy,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn shifted_sphere(dim: usize) -> FnObjective<impl Fn(&[f64]) -> f64> {
    FnObjective::new(dim, |x: &[f64]| x.iter().map(|v| (v - 1.5) * (v - 1.5)).sum())
}

fn sum_of_abs(dim: usize) -> FnObjective<impl Fn(&[f64]) -> f64> {
    FnObjective::new(dim, |x: &[f64]| x.iter().map(|v| v.abs()).sum())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generation_invariants(
        dim in 1usize..5,
        p in 4usize..30,
        l in 0usize..6,
        seed in any::<u64>(),
    ) {
        let obj = shifted_sphere(dim);
        let bounds = Bounds::uniform(dim, -5.0, 5.0).unwrap();
        let params = Eda2Params::new(p, 0.35, l, Sense::Minimize);
        prop_assume!(params.validate().is_ok());
        let mut budget = EvalBudget::new(60 * p as u64);
        let mut rng = seeded_rng(seed);
        let mut run = Eda2::start(&obj, &bounds, params, TerminationPolicy::budget_only(u64::MAX), None, &mut budget, &mut rng).unwrap();

        let mut previous_best = run.best().unwrap().fitness;
        loop {
            let t = run.generation();
            // Archive window before generation t runs.
            let expected: Vec<u64> = (t.saturating_sub(l as u64)..t).collect();
            prop_assert_eq!(run.archive().generations(), expected);
            prop_assert_eq!(run.fes_used(), budget.used());

            let elite = run.best().unwrap().clone();
            let before = budget.used();
            if run.step(&mut budget, &mut rng).unwrap().is_some() {
                break;
            }
            let pop = run.population();
            prop_assert_eq!(pop.len(), p);
            prop_assert_eq!(pop.iter().filter(|i| **i == elite).count(), 1);
            prop_assert_eq!(budget.used() - before, p as u64 - 1);

            let best = run.best().unwrap().fitness;
            prop_assert!(best <= previous_best);
            previous_best = best;

            if l == 0 {
                // Plain Gaussian: the covariance is the scatter of the current selection alone.
                let sel = run.last_selected().unwrap();
                let n = sel.members().len() as f64;
                let mut mean = DVector::zeros(dim);
                for m in sel.members() {
                    mean += DVector::from_column_slice(&m.genome);
                }
                mean /= n;
                let mut cov = DMatrix::zeros(dim, dim);
                for m in sel.members() {
                    let d = DVector::from_column_slice(&m.genome) - &mean;
                    cov += &d * d.transpose();
                }
                cov /= n;
                let model = run.last_model().unwrap();
                prop_assert!((model.covariance() - cov).abs().max() <= 1e-12 * (1.0 + model.covariance().abs().max()));
            }
        }
        let result = run.into_result();
        for w in result.history.windows(2) {
            prop_assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        prop_assert_eq!(result.fes_used, budget.used());
    }
}

#[test]
fn identical_seeds_give_identical_results() {
    let obj = sum_of_abs(4);
    let bounds = Bounds::uniform(4, -3.0, 3.0).unwrap();
    let params = Eda2Params::new(20, 0.35, 5, Sense::Minimize);
    let go = |seed| {
        let mut budget = EvalBudget::new(5_000);
        run_eda2(&obj, &bounds, params.clone(), TerminationPolicy::budget_only(5_000), None, &mut budget, &mut seeded_rng(seed))
            .unwrap()
    };
    assert_eq!(go(9), go(9));
    assert_ne!(go(9).best, go(10).best);
}

#[test]
fn sphere_smoke() {
    let obj = FnObjective::new(5, sphere);
    let bounds = Bounds::uniform(5, -100.0, 100.0).unwrap();
    let mut budget = EvalBudget::new(50_000);
    let r = run_eda2(
        &obj,
        &bounds,
        Eda2Params::new(24, 0.35, 5, Sense::Minimize),
        TerminationPolicy::budget_only(50_000),
        None,
        &mut budget,
        &mut seeded_rng(5),
    )
    .unwrap();
    assert!(r.best.unwrap().fitness < 1e-10);
    assert_eq!(r.fes_used, 50_000);
}

#[test]
fn identical_initial_population_still_runs() {
    let obj = shifted_sphere(3);
    let bounds = Bounds::uniform(3, -5.0, 5.0).unwrap();
    let init = vec![Individual::unevaluated(vec![0.5, -0.5, 2.0]); 12];
    let mut budget = EvalBudget::new(2_000);
    let mut rng = seeded_rng(1);
    let mut run = Eda2::start(
        &obj,
        &bounds,
        Eda2Params::new(12, 0.35, 3, Sense::Minimize),
        TerminationPolicy::budget_only(2_000),
        Some(init),
        &mut budget,
        &mut rng,
    )
    .unwrap();
    assert_eq!(run.step(&mut budget, &mut rng).unwrap(), None);
    assert!(run.last_model().unwrap().jitter_applied() > 0.0);
    while run.step(&mut budget, &mut rng).unwrap().is_none() {}
    let r = run.into_result();
    assert!(matches!(r.stop, StopReason::BudgetExhausted | StopReason::DegenerateModel));
    assert!(r.best.unwrap().fitness < obj_at(&[0.5, -0.5, 2.0]));
}

fn obj_at(x: &[f64]) -> f64 {
    x.iter().map(|v| (v - 1.5) * (v - 1.5)).sum()
}

#[test]
fn exhausted_budget_returns_immediately() {
    let obj = shifted_sphere(2);
    let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
    let mut budget = EvalBudget::new(0);
    let r = run_eda2(
        &obj,
        &bounds,
        Eda2Params::new(10, 0.35, 2, Sense::Minimize),
        TerminationPolicy::budget_only(100),
        None,
        &mut budget,
        &mut seeded_rng(0),
    )
    .unwrap();
    assert!(r.history.is_empty());
    assert!(r.best.is_none());
    assert_eq!(r.fes_used, 0);
}
