use edgeplan_core::cost_model::{
    comm_time_and_energy_per_round, comp_energy_per_round, comp_time_per_round, evaluate_plan,
    link_rate, sensing_energy, AllocationPlan, DeviceProfile, SystemBudget,
};
use edgeplan_core::surrogate::{
    contraction_factor, convergence_bound, objective, objective_continuous, ConvergenceParams,
    SurrogateParams,
};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = DeviceProfile> {
    (
        0.5f64..50.0,
        0.05f64..2.0,
        1.0f64..3.0,
        0.0f64..1.0,
        5.0f64..500.0,
        20.0f64..5000.0,
        100.0f64..1e5,
        0.01f64..5.0,
    )
        .prop_map(|(fs, eta, delta, zeta, c, fc, bw, p)| DeviceProfile {
            sample_rate_hz: fs,
            sense_eff: eta,
            sense_exp: delta,
            sense_offset_j: zeta,
            cycles_per_sample: c,
            cpu_hz: fc,
            bandwidth_hz: bw,
            tx_power_w: p,
            ..DeviceProfile::default()
        })
}

proptest! {
    #[test]
    fn sensing_energy_grows_with_time(p in profile(), t in 0.0f64..500.0, dt in 1e-3f64..100.0) {
        prop_assert!(sensing_energy(t + dt, &p) > sensing_energy(t, &p));
        prop_assert_eq!(sensing_energy(0.0, &p), p.sense_offset_j);
    }

    #[test]
    fn computation_is_linear_in_samples(p in profile(), m in 0.0f64..1e4, n in 0.0f64..1e4) {
        let sum_t = comp_time_per_round(m + n, &p);
        let parts_t = comp_time_per_round(m, &p) + comp_time_per_round(n, &p);
        prop_assert!((sum_t - parts_t).abs() <= 1e-9 * sum_t.max(1.0));
        let sum_e = comp_energy_per_round(m + n, &p);
        let parts_e = comp_energy_per_round(m, &p) + comp_energy_per_round(n, &p);
        prop_assert!((sum_e - parts_e).abs() <= 1e-9 * sum_e.max(1e-30));
    }

    #[test]
    fn rate_grows_with_power_and_upload_shrinks(p in profile(), k in 1.01f64..10.0) {
        let q = DeviceProfile { tx_power_w: p.tx_power_w * k, ..p.clone() };
        prop_assert!(link_rate(&q) > link_rate(&p));
        prop_assert!(comm_time_and_energy_per_round(&q).0 < comm_time_and_energy_per_round(&p).0);
    }

    #[test]
    fn wall_clock_is_affine_in_rounds(p in profile(), t in 0.0f64..50.0, i in 0u64..500) {
        let b = SystemBudget { num_devices: 3, ..SystemBudget::default() };
        let fleet = vec![p; 3];
        let at = |r: u64| evaluate_plan(&AllocationPlan::uniform(t, 3, r), &fleet, &b).unwrap();
        let (r0, r1, r2) = (at(i), at(i + 1), at(i + 2));
        let step1 = r1.wall_clock_s - r0.wall_clock_s;
        let step2 = r2.wall_clock_s - r1.wall_clock_s;
        prop_assert!((step1 - step2).abs() <= 1e-9 * r2.wall_clock_s.max(1.0));
        let e1 = r1.total_energy_j - r0.total_energy_j;
        let e2 = r2.total_energy_j - r1.total_energy_j;
        prop_assert!((e1 - e2).abs() <= 1e-9 * r2.total_energy_j.max(1.0));
    }

    #[test]
    fn objective_falls_with_rounds_and_data(
        alpha in 0.05f64..0.95,
        frac in 0.05f64..1.0,
        more in 0.0f64..0.5,
        rounds in 1u64..500,
    ) {
        let sp = SurrogateParams::new(alpha, 1.0 - alpha);
        let b = frac * 20_000.0;
        let b_more = ((frac + more).min(1.0)) * 20_000.0;
        let f = objective(rounds, b, 20_000, &sp).unwrap();
        prop_assert!(objective(rounds + 1, b, 20_000, &sp).unwrap() < f);
        prop_assert!(objective(rounds, b_more, 20_000, &sp).unwrap() <= f);
        prop_assert_eq!(objective_continuous(rounds as f64, b, 20_000, &sp).unwrap(), f);
    }

    #[test]
    fn contraction_grows_with_missing_data(frac in 0.0f64..0.99, beta2 in 0.0f64..0.2) {
        let params = ConvergenceParams { mu: 0.5, lip: 2.0, beta1: 0.1, beta2, init_gap: 1.0 };
        let a = contraction_factor(frac * 1000.0, 1000, &params).unwrap().value;
        let b = contraction_factor((frac + 0.01) * 1000.0, 1000, &params).unwrap().value;
        prop_assert!(b <= a);
        prop_assert!(a >= 0.75);
    }

    #[test]
    fn bound_with_full_data_is_pure_contraction(rounds in 0u64..200) {
        let params = ConvergenceParams { mu: 0.5, lip: 2.0, beta1: 3.0, beta2: 1.0, init_gap: 7.0 };
        let got = convergence_bound(rounds, 1000.0, 1000, &params).unwrap().value;
        let want = 0.75f64.powi(rounds as i32) * 7.0;
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1e-300));
    }
}
