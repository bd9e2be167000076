use entangler_core::analysis::{time_to_threshold, ThresholdSearch, ThresholdTime};
use entangler_core::qops::{DensityMatrix, Ket, SpaceLayout};
use entangler_core::{
    build_reduced, concurrence, evolve, steady_concurrence, DetuningSchedule, EvolveOptions,
    OutputGrid, PhysicalParams,
};
use proptest::prelude::*;

fn basis_state(k: usize) -> DensityMatrix<f64> {
    DensityMatrix::pure(&Ket::basis(&SpaceLayout::atoms(), k).unwrap()).unwrap()
}

fn reduced(schedule: DetuningSchedule<f64>) -> entangler_core::LindbladModel<f64> {
    build_reduced(&PhysicalParams::standard(), &schedule, false).unwrap()
}

#[test]
fn zero_target_is_immediate() {
    let model = reduced(DetuningSchedule::constant(5.6));
    let t = time_to_threshold(&model, &basis_state(0), 0.0, 1.0, 10.0, &ThresholdSearch::default())
        .unwrap();
    assert_eq!(t, ThresholdTime::Reached(0.0));
}

#[test]
fn constant_detuning_reaches_99_percent_within_20_ms() {
    let model = reduced(DetuningSchedule::constant(5.6));
    let c_ss = steady_concurrence(5.6 / 40.0);
    for k in 0..4 {
        let t = time_to_threshold(&model, &basis_state(k), 0.99, c_ss, 200.0, &ThresholdSearch::default())
            .unwrap()
            .time()
            .expect("threshold reached");
        assert!(t < 20.0, "start {k}: {t} ms");
    }
}

#[test]
fn exponential_detuning_passes_99_percent_within_5_ms() {
    let model = reduced(DetuningSchedule::standard_exponential());
    for k in 0..4 {
        let t = time_to_threshold(&model, &basis_state(k), 0.99, 1.0, 20.0, &ThresholdSearch::default())
            .unwrap()
            .time()
            .expect("threshold reached");
        assert!(t < 5.0, "start {k}: {t} ms");
    }
}

#[test]
fn bisection_brackets_the_crossing() {
    let model = reduced(DetuningSchedule::constant(5.6));
    let target = 0.9;
    let t = time_to_threshold(&model, &basis_state(3), target, 1.0, 50.0, &ThresholdSearch::default())
        .unwrap()
        .time()
        .unwrap();
    let traj = evolve(
        &model,
        &basis_state(3),
        t,
        &OutputGrid::Times(vec![t - 2e-3, t]),
        EvolveOptions::default(),
    )
    .unwrap();
    let before = concurrence(&traj.states()[0]).unwrap();
    let after = concurrence(&traj.states()[1]).unwrap();
    assert!(before < target && after >= target, "{before} {after}");
}

#[test]
fn unreachable_target() {
    // steady concurrence at κ = 1 is 2/3
    let model = reduced(DetuningSchedule::constant(40.0));
    let t = time_to_threshold(&model, &basis_state(0), 0.9, 1.0, 30.0, &ThresholdSearch::default())
        .unwrap();
    assert_eq!(t, ThresholdTime::NotReached);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn threshold_time_grows_with_fraction(f1 in 0.2f64..0.99, f2 in 0.2f64..0.99, start in 0usize..4) {
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let model = reduced(DetuningSchedule::constant(5.6));
        let c_ss = steady_concurrence(5.6 / 40.0);
        let search = ThresholdSearch::default();
        let a = time_to_threshold(&model, &basis_state(start), lo, c_ss, 100.0, &search).unwrap().time().unwrap();
        let b = time_to_threshold(&model, &basis_state(start), hi, c_ss, 100.0, &search).unwrap().time().unwrap();
        prop_assert!(a <= b + search.resolution, "{lo} -> {a}, {hi} -> {b}");
    }
}
