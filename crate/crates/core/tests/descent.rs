use edgeplan_core::sim::{
    envelope_violations, fit_gradient_envelope, generate_problem, run_descent, DataPartition,
    DescentConfig, EnvelopeTarget,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn full_data_descent_contracts_geometrically() {
    let p = generate_problem(6, 150, 0.05, 21).unwrap();
    let all = DataPartition::from_fraction(150, 1.0, 3, 21).unwrap();
    let rep = run_descent(&p, &all, 60, &DescentConfig::default()).unwrap();
    let rate = 1.0 - p.mu / p.lip;
    for (i, g) in rep.gaps.iter().enumerate() {
        assert!(
            *g <= rate.powi(i as i32) * rep.gaps[0] * (1.0 + 1e-9) + 1e-15,
            "iteration {i}"
        );
    }
    assert!(rep
        .grad_error_sq
        .iter()
        .all(|e| *e <= 1e-20 * (1.0 + rep.gaps[0])));
    assert_eq!(rep.contraction_violations, 0);
}

#[test]
fn three_quarters_of_the_data_respects_every_bound() {
    for seed in 0..5 {
        let p = generate_problem(5, 200, 0.1, seed).unwrap();
        let part = DataPartition::from_fraction(200, 0.75, 4, seed).unwrap();
        let rep = run_descent(
            &p,
            &part,
            40,
            &DescentConfig {
                seed,
                ..DescentConfig::default()
            },
        )
        .unwrap();
        assert_eq!(rep.gaps.len(), 41);
        assert_eq!(rep.theorem_bound.len(), 41);
        assert!(rep.envelope_validated);
        assert_eq!(rep.error_bound_violations, 0, "seed {seed}");
        assert_eq!(rep.recursion_violations, 0, "seed {seed}");
        if rep.psi_contractive {
            assert!(!rep.bound_violated, "seed {seed}");
        }
    }
}

#[test]
fn envelope_survives_fresh_points() {
    let p = generate_problem(4, 120, 0.2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cloud = |rng: &mut ChaCha8Rng, n: usize| -> Vec<DVector<f64>> {
        (0..n)
            .map(|_| p.x_star.clone() + DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0)))
            .collect()
    };
    let probes = cloud(&mut rng, 2000);
    let env = fit_gradient_envelope(
        &p,
        &probes,
        EnvelopeTarget {
            collected: 60,
            rounds: 20,
        },
    )
    .unwrap();
    // Fresh points drawn from a smaller ball sit inside the probed region.
    let fresh: Vec<DVector<f64>> = cloud(&mut rng, 1000)
        .into_iter()
        .map(|x| &p.x_star + (x - &p.x_star) * 0.5)
        .collect();
    assert!(envelope_violations(&p, &env, &fresh).is_empty());
}

#[test]
fn more_data_lowers_the_final_gap_on_average() {
    let ladder = [0.25, 0.5, 0.75, 1.0];
    let mean_gap: Vec<f64> = ladder
        .iter()
        .map(|&f| {
            (0..20u64)
                .map(|seed| {
                    let p = generate_problem(5, 200, 0.1, seed).unwrap();
                    let part = DataPartition::from_fraction(200, f, 4, seed).unwrap();
                    let cfg = DescentConfig {
                        perturbations: 10,
                        holdout: 10,
                        ..DescentConfig::default()
                    };
                    *run_descent(&p, &part, 60, &cfg)
                        .unwrap()
                        .gaps
                        .last()
                        .unwrap()
                })
                .sum::<f64>()
                / 20.0
        })
        .collect();
    assert!(mean_gap.windows(2).all(|w| w[1] <= w[0]), "{mean_gap:?}");
}

#[test]
fn runs_are_reproducible() {
    let p = generate_problem(3, 80, 0.1, 4).unwrap();
    let part = DataPartition::from_fraction(80, 0.5, 2, 4).unwrap();
    let cfg = DescentConfig::default();
    assert_eq!(
        run_descent(&p, &part, 15, &cfg).unwrap(),
        run_descent(&p, &part, 15, &cfg).unwrap()
    );
}
