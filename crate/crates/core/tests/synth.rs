use trajregions::eval::hard_conditional_entropy;
use trajregions::oracle::grid_search_default;
use trajregions::reward::discretize_rewards;
use trajregions::synth::{gen_door, gen_null, gen_paint, generate, TaskKind, TaskSpec};

#[test]
fn paint_success_fraction_range() {
    for seed in 0..20 {
        let (_, truth) = gen_paint(&TaskSpec::paint(2, seed)).unwrap();
        assert!(
            (0.1..=0.6).contains(&truth.success_fraction),
            "seed {seed}: {}",
            truth.success_fraction
        );
    }
}

#[test]
fn states_stay_in_unit_box() {
    for kind in [TaskKind::Paint, TaskKind::Door, TaskKind::Null] {
        for dim in [1, 2, 3] {
            let mut spec = TaskSpec::for_kind(kind, dim, 9);
            spec.step_scale = 0.3;
            spec.n_traj = 50;
            let Ok((data, _)) = generate(&spec) else {
                continue;
            };
            assert!(data
                .states()
                .all(|s| s.coords().iter().all(|&x| (0.0..=1.0).contains(&x))));
        }
    }
}

#[test]
fn clean_labels_reproduce_from_truth() {
    for seed in 0..5 {
        for spec in [TaskSpec::paint(2, seed), TaskSpec::door(2, seed)] {
            let (data, truth) = generate(&spec).unwrap();
            for t in data.trajectories() {
                assert_eq!(truth.clean_reward(t), Some(t.reward));
            }
        }
    }
}

#[test]
fn label_noise_flips_at_the_requested_rate() {
    let mut spec = TaskSpec::paint(2, 4);
    spec.n_traj = 2000;
    spec.label_noise = 0.2;
    let (data, truth) = generate(&spec).unwrap();
    let flipped = data
        .trajectories()
        .iter()
        .filter(|t| truth.clean_reward(t) != Some(t.reward))
        .count() as f64
        / 2000.0;
    // binomial sd ≈ 0.009
    assert!((flipped - 0.2).abs() < 0.04, "{flipped}");
}

#[test]
fn success_fraction_is_seed_stable_at_scale() {
    for kind in [TaskKind::Paint, TaskKind::Door, TaskKind::Null] {
        let fracs: Vec<f64> = (0..10)
            .map(|seed| {
                let mut spec = TaskSpec::for_kind(kind, 2, seed);
                spec.n_traj = 1000;
                generate(&spec).unwrap().1.success_fraction
            })
            .collect();
        let mean = fracs.iter().sum::<f64>() / fracs.len() as f64;
        let var = fracs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (fracs.len() - 1) as f64;
        let cv = var.sqrt() / mean;
        assert!(cv <= 0.2, "{kind}: cv {cv}");
    }
}

#[test]
fn generation_is_bit_identical_per_seed() {
    let spec = TaskSpec::door(2, 21);
    let (a, ta) = gen_door(&spec).unwrap();
    let (b, tb) = gen_door(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&ta).unwrap(),
        serde_json::to_string(&tb).unwrap()
    );
    let (c, _) = gen_door(&TaskSpec::door(2, 22)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn null_labels_ignore_states() {
    let (data, truth) = gen_null(&TaskSpec::null(2, 3)).unwrap();
    assert!(truth.regions.is_empty());
    assert_eq!(truth.clean_reward(&data.trajectories()[0]), None);
    let labels = discretize_rewards(&data.rewards(), 2).unwrap();
    let best = grid_search_default(&data, &labels, &[]).unwrap();
    let h_r = trajregions::entropy::marginal_entropy(&labels);
    // no sphere explains much of the reward
    assert!(h_r - best.h_hard < 0.1, "{} vs {h_r}", best.h_hard);
}

#[test]
fn door_needs_both_regions() {
    let (data, truth) = gen_door(&TaskSpec::door(2, 0)).unwrap();
    let labels = discretize_rewards(&data.rewards(), 2).unwrap();
    assert_eq!(
        hard_conditional_entropy(&data, &labels, &truth.regions).unwrap(),
        0.0
    );
    let single = grid_search_default(&data, &labels, &[]).unwrap();
    assert!(single.h_hard >= 0.15, "{}", single.h_hard);
}
