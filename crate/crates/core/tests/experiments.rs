use poissonity::distributions::AlternativeSpec;
use poissonity::engine::{
    run_experiment, run_experiment_with_workers, ExperimentResult, Half, TestKind,
};
use poissonity::presets::{preset, PRESET_REPLICATIONS};

fn power(result: &ExperimentResult, test: TestKind) -> f64 {
    result.power_at(test, 0.05).unwrap().power
}

fn rejections(result: &ExperimentResult, test: TestKind) -> usize {
    (power(result, test) * PRESET_REPLICATIONS as f64).round() as usize
}

/// Rejection counts out of 5000 at alpha = 0.05 and seed 1, in the order
/// c_hat, T at theta, T at the MLE.
const BASELINES: [[usize; 3]; 9] = [
    [728, 282, 541],
    [655, 323, 457],
    [147, 515, 874],
    [180, 967, 1808],
    [254, 658, 1565],
    [792, 351, 976],
    [279, 332, 669],
    [350, 184, 523],
    [216, 415, 982],
];

#[test]
fn preset_powers_are_frozen() {
    for id in 1..=9u8 {
        let result = run_experiment(&preset(id).unwrap()).unwrap();
        assert!(result.failed_replications.is_empty(), "preset {id}");
        let got: Vec<usize> = TestKind::ALL
            .iter()
            .map(|&t| rejections(&result, t))
            .collect();
        assert_eq!(got, BASELINES[usize::from(id) - 1], "preset {id}");
    }
}

#[test]
fn null_versus_null_holds_its_size() {
    for id in [1u8, 5, 9] {
        let mut config = preset(id).unwrap();
        config.alternative = AlternativeSpec::Poisson {
            lambda: config.lambda,
        };
        let result = run_experiment(&config).unwrap();
        for test in TestKind::ALL {
            let p = power(&result, test);
            assert!(
                (0.04..=0.06).contains(&p),
                "preset {id} {}: size {p}",
                test.name()
            );
        }
    }
}

#[test]
fn dispersion_test_wins_against_binomial() {
    let result = run_experiment(&preset(2).unwrap()).unwrap();
    let c = power(&result, TestKind::CHat);
    assert!(c > power(&result, TestKind::GofTheta));
    assert!(c > power(&result, TestKind::GofMle));
}

#[test]
fn estimated_cells_win_against_the_mixture() {
    let result = run_experiment(&preset(6).unwrap()).unwrap();
    let mle = power(&result, TestKind::GofMle);
    assert!(mle > power(&result, TestKind::GofTheta));
    assert!(mle > power(&result, TestKind::CHat));
}

#[test]
fn null_half_does_not_depend_on_the_alternative() {
    let a = run_experiment(&preset(1).unwrap()).unwrap();
    let b = run_experiment(&preset(2).unwrap()).unwrap();
    assert_eq!(a.statistics(Half::Null), b.statistics(Half::Null));
}

#[test]
fn seeds_and_workers() {
    let mut config = preset(7).unwrap();
    config.replications = 400;
    let one = run_experiment_with_workers(&config, Some(1)).unwrap();
    let three = run_experiment_with_workers(&config, Some(3)).unwrap();
    assert_eq!(one, three);
    config.master_seed = 2;
    let other = run_experiment_with_workers(&config, Some(3)).unwrap();
    assert_ne!(one.statistics(Half::Null), other.statistics(Half::Null));
}
