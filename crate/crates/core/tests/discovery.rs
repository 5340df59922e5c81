use trajregions::discovery::{discover, discover_with_traces, DiscoveryConfig, DiscoveryReport};
use trajregions::eval::hard_conditional_entropy;
use trajregions::reward::{discretize_rewards, RewardAlphabet};
use trajregions::synth::{generate, TaskSpec};
use trajregions::trajectory::Dataset;
use trajregions::Error;

fn corpus(spec: &TaskSpec) -> (Dataset, RewardAlphabet) {
    let (data, _) = generate(spec).unwrap();
    let labels = discretize_rewards(&data.rewards(), 2).unwrap();
    (data, labels)
}

fn config(m: usize, seed: u64) -> DiscoveryConfig {
    DiscoveryConfig {
        m,
        n_restart: 8,
        seed,
        ..Default::default()
    }
}

fn check_report_invariants(report: &DiscoveryReport, data: &Dataset, labels: &RewardAlphabet) {
    let mut prev = report.reward_entropy;
    for (i, s) in report.stages.iter().enumerate() {
        assert_eq!(s.stage, i + 1);
        assert!((s.h_before - prev).abs() < 1e-12);
        assert!(s.ig >= -1e-9, "stage {} ig {}", s.stage, s.ig);
        assert!(s.h_after <= s.h_before + 1e-9);
        assert!(s.h_after <= s.floor_h_hard + 1e-12);
        if s.accepted {
            for r in &s.restarts {
                if let Some(h) = r.h_hard {
                    assert!(s.h_after <= h + 1e-12);
                }
            }
            // recomputed from scratch with the regions kept so far
            let h = hard_conditional_entropy(data, labels, &report.regions[..=i]).unwrap();
            assert!((h - s.h_after).abs() < 1e-12);
        }
        prev = s.h_after;
    }
    assert!((report.final_entropy - prev).abs() < 1e-12);
    assert!((report.final_ig - (report.reward_entropy - report.final_entropy)).abs() < 1e-12);
}

#[test]
fn planted_paint_region_is_found() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 5));
    let report = discover(&data, &labels, &config(1, 5)).unwrap();
    assert!(report.final_entropy <= 0.05, "{}", report.final_entropy);
    assert!(report.final_ig >= 0.95 * report.reward_entropy);
    assert!(!report.no_structure);
    check_report_invariants(&report, &data, &labels);
}

#[test]
fn unstructured_labels_are_flagged() {
    let (data, labels) = corpus(&TaskSpec::null(2, 2));
    let report = discover(&data, &labels, &config(1, 2)).unwrap();
    assert!(report.final_ig <= 0.05, "{}", report.final_ig);
    assert!(report.no_structure);
    check_report_invariants(&report, &data, &labels);
}

#[test]
fn later_stages_never_lose_information() {
    for seed in 0..3 {
        let (data, labels) = corpus(&TaskSpec::door(2, seed));
        let report = discover(&data, &labels, &config(3, seed)).unwrap();
        assert_eq!(report.regions.len(), 3);
        check_report_invariants(&report, &data, &labels);
    }
}

#[test]
fn same_inputs_same_report_for_any_thread_count() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 8));
    let base = discover(&data, &labels, &config(2, 8))
        .unwrap()
        .to_json()
        .unwrap();
    for jobs in [1, 3, 8] {
        let cfg = DiscoveryConfig {
            jobs,
            ..config(2, 8)
        };
        assert_eq!(
            discover(&data, &labels, &cfg).unwrap().to_json().unwrap(),
            base,
            "jobs {jobs}"
        );
    }
    let other = discover(&data, &labels, &config(2, 9))
        .unwrap()
        .to_json()
        .unwrap();
    assert_ne!(other, base);
}

#[test]
fn relaxed_reduction_order_stays_close() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 4));
    let strict = discover(&data, &labels, &config(1, 4)).unwrap();
    let loose = discover(
        &data,
        &labels,
        &DiscoveryConfig {
            deterministic: false,
            jobs: 4,
            ..config(1, 4)
        },
    )
    .unwrap();
    assert!((strict.final_entropy - loose.final_entropy).abs() <= 0.05);
}

#[test]
fn ig_floor_truncates_the_report() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 1));
    let cfg = DiscoveryConfig {
        ig_floor: Some(0.01),
        ..config(3, 1)
    };
    let report = discover(&data, &labels, &cfg).unwrap();
    // the first region explains everything, the second adds nothing
    assert!(report.early_stop);
    assert!(report.early_stop_is_extension);
    assert_eq!(report.regions.len(), 1);
    assert_eq!(report.stages.len(), 2);
    assert!(!report.stages[1].accepted);
    check_report_invariants(&report, &data, &labels);
}

#[test]
fn traces_cover_every_restart() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 0));
    let d = discover_with_traces(&data, &labels, &config(2, 0)).unwrap();
    assert_eq!(d.traces.len(), 2);
    for (stage, traces) in d.report.stages.iter().zip(&d.traces) {
        assert_eq!(traces.len(), 8);
        for (summary, trace) in stage.restarts.iter().zip(traces) {
            let trace = trace.as_ref().unwrap();
            assert_eq!(trace.steps.len(), summary.steps_run);
            assert!(data.radius_bounds().contains(summary.init_radius));
        }
    }
}

#[test]
fn report_round_trips_and_rejects_future_schema() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 3));
    let report = discover(&data, &labels, &config(1, 3)).unwrap();
    let json = report.to_json().unwrap();
    assert_eq!(DiscoveryReport::from_json(&json).unwrap(), report);
    let future = json.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(DiscoveryReport::from_json(&future).is_err());
    let table = report.table();
    assert!(table.contains("IG_nats") && table.contains("IG_bits"));
}

#[test]
fn invalid_inputs() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 0));
    assert!(matches!(
        discover(&data, &labels, &config(0, 0)),
        Err(Error::InvalidParameter(_))
    ));
    let cfg = DiscoveryConfig {
        n_restart: 0,
        ..config(1, 0)
    };
    assert!(discover(&data, &labels, &cfg).is_err());
    let constant = RewardAlphabet::from_labels(vec![0; data.len()], 1).unwrap();
    let err = discover(&data, &constant, &config(1, 0)).unwrap_err();
    assert!(matches!(err, Error::DegenerateLabels));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn seeding_failure_names_the_stage() {
    let (data, labels) = corpus(&TaskSpec::paint(2, 0));
    let cfg = DiscoveryConfig {
        init: trajregions::kde::InitConfig {
            success_labels: Some(vec![]),
            ..Default::default()
        },
        ..config(1, 0)
    };
    match discover(&data, &labels, &cfg) {
        Err(e @ Error::Stage { stage: 1, .. }) => assert_eq!(e.exit_code(), 4),
        other => panic!("expected a stage error, got {other:?}"),
    }
}
