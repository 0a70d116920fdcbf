use readmit::features::{los_hours, FixedFeature};
use readmit::synth::{cohort_summary, generate_with_rule, PlantedSignal, SignalWeight};
use readmit::{build_catalog, generate_cohort, validate_episode, CohortProfile, Dataset};

#[test]
fn default_cohort_is_valid_and_deterministic() {
    let profile = CohortProfile { seed: 42, ..CohortProfile::default() };
    let a = generate_cohort(&profile).unwrap();
    assert_eq!(a.len(), 2300);
    for e in a.episodes() {
        validate_episode(e).unwrap();
        let hours = (e.discharge_time - e.admission_time).num_seconds() as f64 / 3600.0;
        assert!((hours - los_hours(e)).abs() < 1e-6);
    }
    assert_eq!(a, generate_cohort(&profile).unwrap());
}

#[test]
fn realized_moments_sit_in_three_sigma_bands() {
    for seed in [0, 42, 7] {
        let s = cohort_summary(&generate_cohort(&CohortProfile { seed, ..CohortProfile::default() }).unwrap()).unwrap();
        let n = 2300f64.sqrt();
        assert!((s.age_years.mean - 59.0).abs() <= 3.0 * 18.4 / n, "{seed}: age {}", s.age_years.mean);
        assert!((s.los_hours.mean - 91.5).abs() <= 3.0 * 98.5 / n, "{seed}: los {}", s.los_hours.mean);
        assert!((s.nurse_experience_years.mean - 1.7).abs() <= 3.0 * 2.4 / n, "{seed}: exp {}", s.nurse_experience_years.mean);
        let sigma = (0.426f64 * 0.574 / 2300.0).sqrt();
        assert!((s.prevalence - 0.426).abs() <= 3.0 * sigma, "{seed}: prevalence {}", s.prevalence);
    }
}

#[test]
fn planted_rule_scores_at_the_bayes_rate_on_a_fresh_sample() {
    // fix the intercept from one sample, then score the rule on another
    let (_, rule) = generate_with_rule(&CohortProfile { seed: 1, ..CohortProfile::default() }).unwrap();
    let mut signal = PlantedSignal::default();
    signal.bias = Some(rule.bias);
    let profile = CohortProfile { n: 20_000, seed: 2, signal, ..CohortProfile::default() };
    let (cohort, fresh) = generate_with_rule(&profile).unwrap();
    let hits = cohort.episodes().iter().filter(|e| fresh.predict(e).unwrap() == e.readmitted).count();
    let accuracy = hits as f64 / cohort.len() as f64;
    // 1 - 0.26 with a binomial 4-sigma allowance at n = 20000
    assert!((accuracy - 0.74).abs() < 4.0 * (0.74f64 * 0.26 / 20_000.0).sqrt(), "{accuracy}");
}

#[test]
fn noiseless_single_feature_rule_is_exact() {
    let signal = PlantedSignal {
        weights: vec![SignalWeight::new("age_band", "very-old", 5.0), SignalWeight::new("age_band", "old", 5.0)],
        bias: Some(-1.0),
        noise_flip_prob: 0.0,
    };
    let cohort = generate_cohort(&CohortProfile { n: 10, seed: 9, signal, ..CohortProfile::default() }).unwrap();
    for e in cohort.episodes() {
        assert_eq!(e.readmitted, e.age_years >= 65, "{}", e.episode_id);
    }
}

#[test]
fn default_tree_roots_on_age() {
    let cohort = generate_cohort(&CohortProfile { seed: 42, ..CohortProfile::default() }).unwrap();
    let data = Dataset::from_cohort(&cohort, build_catalog(&cohort, 0.05).unwrap()).unwrap();
    let model = readmit::DecisionTreeModel::fit(&data, readmit::TreeParams::default()).unwrap();
    assert_eq!(model.root_feature(), Some(FixedFeature::AgeBand.name()));
}

#[test]
fn invalid_profiles_are_rejected() {
    let bad = [
        CohortProfile { n: 5, ..CohortProfile::default() },
        CohortProfile { prevalence: 1.0, ..CohortProfile::default() },
        CohortProfile { age_sd: 0.0, ..CohortProfile::default() },
    ];
    for p in bad {
        assert!(generate_cohort(&p).is_err());
    }
    let mut p = CohortProfile::default();
    p.signal.noise_flip_prob = 0.5;
    assert!(generate_cohort(&p).is_err());
}
