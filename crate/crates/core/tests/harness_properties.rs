//! Harness-level behaviour: determinism, replicate independence, and the
//! calibration of the testing procedures.

use bayeschi::binning::BinScheme;
use bayeschi::gof::rb_continuous;
use bayeschi::harness::{
    analyze, app_test, null_a_distribution, null_calibration, power_study, rb_monitor, size_study,
    AlertRule, ExperimentConfig, PowerMethod, RbMonitor,
};
use bayeschi::models::{generate_t, Model, NormalParam, NormalRefPrior, PoissonLogLinear, PoissonParam};
use bayeschi::probkit::{RngStream, ScalarDistribution};

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = ExperimentConfig {
        replicates: 64,
        classical: true,
        seed: 41,
        ..Default::default()
    };
    let one = with_threads(1, || null_calibration(&c).unwrap());
    let four = with_threads(4, || null_calibration(&c).unwrap());
    assert_eq!(one, four);

    let p = ExperimentConfig {
        replicates: 30,
        draws_per_dataset: 40,
        df_grid: vec![1, 4],
        seed: 42,
        ..Default::default()
    };
    let na = null_a_distribution(&ExperimentConfig { replicates: 40, ..p.clone() }).unwrap();
    let one = with_threads(1, || power_study(&p, Some(&na)).unwrap());
    let three = with_threads(3, || power_study(&p, Some(&na)).unwrap());
    assert_eq!(one, three);
}

#[test]
fn replicates_are_independent_of_run_length() {
    let short = ExperimentConfig {
        replicates: 50,
        seed: 43,
        ..Default::default()
    };
    let long = ExperimentConfig {
        replicates: 80,
        ..short.clone()
    };
    let a = null_calibration(&short).unwrap().rb.values;
    let b = null_calibration(&long).unwrap().rb.values;
    assert_eq!(a[..], b[..50]);
}

#[test]
fn null_a_distribution_and_size() {
    let c = ExperimentConfig {
        replicates: 2000,
        draws_per_dataset: 500,
        seed: 44,
        ..Default::default()
    };
    let d = null_a_distribution(&c).unwrap();
    assert!((d.mean() - 0.5).abs() < 0.02, "mean A {}", d.mean());
    assert!(d.critical > 0.5);

    let fresh = ExperimentConfig {
        replicates: 1000,
        methods: vec![PowerMethod::A],
        ..c
    };
    let rows = size_study(&fresh, Some(&d)).unwrap();
    assert!((rows[0].rate - 0.05).abs() <= 0.015, "size {}", rows[0].rate);
}

#[test]
fn null_calibration_means() {
    let c = ExperimentConfig {
        replicates: 2000,
        classical: true,
        seed: 45,
        ..Default::default()
    };
    let r = null_calibration(&c).unwrap();
    assert!((3.7..=4.3).contains(&r.rb.mean), "{}", r.rb.mean);
    let g = r.r_grouped.unwrap().mean;
    assert!((1.7..=2.3).contains(&g), "{g}");
}

#[test]
fn power_decreases_with_df() {
    let c = ExperimentConfig {
        replicates: 400,
        draws_per_dataset: 200,
        seed: 46,
        df_grid: vec![1, 2, 3, 5, 10],
        ..Default::default()
    };
    let na = null_a_distribution(&ExperimentConfig { replicates: 1000, ..c.clone() }).unwrap();
    let rows = power_study(&c, Some(&na)).unwrap();
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.rate)));
    for m in [PowerMethod::A, PowerMethod::SingleRb, PowerMethod::Grouped] {
        let rates: Vec<f64> = rows.iter().filter(|r| r.method == m).map(|r| r.rate).collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0] + 0.05), "{m:?}: {rates:?}");
    }
    for df in [1, 2, 3, 5, 10] {
        let rate = |m| rows.iter().find(|r| r.df == Some(df) && r.method == m).unwrap().rate;
        assert!(
            rate(PowerMethod::A) >= rate(PowerMethod::Grouped) - 0.02,
            "df={df}: a {} vs rg {}",
            rate(PowerMethod::A),
            rate(PowerMethod::Grouped)
        );
    }
}

fn normal_mean_a_over_replicates(reps: u64, seed: u64) -> Vec<f64> {
    let root = RngStream::new(seed, 0);
    (0..reps)
        .map(|r| {
            let mut rng = root.split(r);
            let data = ScalarDistribution::normal(2.0, 3.0).unwrap().sample_n(50, &mut rng);
            let c = ExperimentConfig {
                draws_per_dataset: 500,
                seed: seed + r,
                ..Default::default()
            };
            analyze(&data, &NormalRefPrior, &c).unwrap().a_value
        })
        .collect()
}

#[test]
fn analyze_is_centered_at_one_half_on_average() {
    let a = normal_mean_a_over_replicates(100, 47);
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    assert!((mean - 0.5).abs() < 0.05, "mean A {mean}");

    let n = 60;
    let model = PoissonLogLinear::common(vec![1.0; n]).unwrap();
    let root = RngStream::new(48, 0);
    let pa: Vec<f64> = (0..100)
        .map(|r| {
            let mut rng = root.split(r);
            let y = model.predictive_draw(&PoissonParam::Common { rate: 6.0 }, n, &mut rng);
            let c = ExperimentConfig {
                draws_per_dataset: 500,
                seed: r,
                ..Default::default()
            };
            analyze(&y, &model, &c).unwrap().a_value
        })
        .collect();
    let mean = pa.iter().sum::<f64>() / pa.len() as f64;
    assert!((mean - 0.5).abs() < 0.05, "poisson mean A {mean}");
}

/// The sampling spread of `A` is much wider than `[0.4, 0.6]` (its null 5%
/// and 95% points are near 0.29 and 0.82), so this property does not hold.
#[test]
#[ignore]
fn analyze_a_within_band_in_ninety_percent_of_replicates() {
    let a = normal_mean_a_over_replicates(100, 49);
    let inside = a.iter().filter(|&&v| (0.4..=0.6).contains(&v)).count();
    assert!(inside >= 90, "{inside} of 100 inside [0.4, 0.6]");
}

#[test]
fn app_test_size_and_power() {
    let root = RngStream::new(50, 0);
    let config = |seed| ExperimentConfig {
        pp_reps: 20,
        draws_per_dataset: 200,
        seed,
        ..Default::default()
    };
    let mut null_rejections = 0;
    for r in 0..100 {
        let data = ScalarDistribution::standard_normal().sample_n(50, &mut root.split(r));
        let res = app_test(&data, &NormalRefPrior, &config(r)).unwrap();
        null_rejections += (res.p_value < 0.05) as usize;
    }
    assert!((2..=8).contains(&null_rejections), "{null_rejections} of 100");

    let mut alt_rejections = 0;
    for r in 0..100 {
        let data = generate_t(50, 1.0, &mut root.split(1000 + r)).unwrap();
        let res = app_test(&data, &NormalRefPrior, &config(1000 + r)).unwrap();
        alt_rejections += (res.p_value < 0.05) as usize;
    }
    assert!(alt_rejections >= 80, "{alt_rejections} of 100");
}

fn monitor_run(seed: u64, sigma_factor: f64) -> (f64, Option<usize>) {
    let mut rng = RngStream::new(seed, 0);
    let data = ScalarDistribution::standard_normal().sample_n(50, &mut rng);
    let scheme = BinScheme::equiprobable(5).unwrap();
    let draws = NormalRefPrior.posterior_sample(&data, 1000, &mut rng).unwrap();
    let mut mon = RbMonitor::new(4, 9.4877, AlertRule::default()).unwrap();
    let s = rb_monitor(
        draws.into_iter().map(Ok),
        |t: &NormalParam| {
            let evaluated = NormalParam {
                mu: t.mu,
                sigma: sigma_factor * t.sigma,
            };
            rb_continuous(&data, &NormalRefPrior, &evaluated, &scheme).map(|s| s.value)
        },
        &mut mon,
        |_| {},
    );
    (s.rate, s.first_alert)
}

#[test]
fn monitor_rate_centres_on_nominal_and_miscoding_alerts() {
    let rates: Vec<f64> = (0..100).map(|r| monitor_run(r, 1.0).0).collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    assert!((mean - 0.05).abs() < 0.03, "mean final rate {mean}");

    let alerts = (0..100).filter(|&r| monitor_run(500 + r, 2.0).1.is_some()).count();
    assert!(alerts >= 95, "{alerts} of 100");
}
