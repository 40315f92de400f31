use edgeplan_core::cost_model::{
    comm_time_and_energy_per_round, evaluate_plan, link_rate, AllocationPlan, DeviceProfile,
    SystemBudget,
};
use edgeplan_core::heterogeneous::{solve_heterogeneous, AoConfig};
use edgeplan_core::homogeneous::{solve_homogeneous, BindingConstraint, DEFAULT_GRID_POINTS};
use edgeplan_core::surrogate::{objective, SurrogateParams};
use edgeplan_core::Error;
use proptest::prelude::*;

/// Integer-round reference: for each I the best common sensing time is the
/// largest one both budgets and the data cap allow, because the log term
/// falls as more data is collected.
fn integer_optimum(
    p: &DeviceProfile,
    b: &SystemBudget,
    sp: &SurrogateParams,
) -> Option<(u64, f64, f64)> {
    let k = b.num_devices as f64;
    let (t_comm, e_comm) = comm_time_and_energy_per_round(p);
    let a_time = p.sample_rate_hz * p.cycles_per_sample / p.cpu_hz;
    let a_energy = p.sample_rate_hz * p.switch_cap * p.cycles_per_sample * p.cpu_hz.powi(2);
    let t_cap = b.m_total as f64 / (k * p.sample_rate_hz);
    let mut best: Option<(u64, f64, f64)> = None;
    for i in 1u64.. {
        let fi = i as f64;
        let t_time = (b.t_total_s - fi * t_comm) / (1.0 + fi * a_time);
        let t_energy =
            (b.e_total_j / k - p.sense_offset_j - fi * e_comm) / (p.sense_eff + fi * a_energy);
        let t = t_time.min(t_energy).min(t_cap);
        if t < 0.0 {
            break;
        }
        let ratio = 1.0 - k * p.sample_rate_hz * t / b.m_total as f64;
        let lt = (sp.alpha + sp.beta * ratio * ratio).ln();
        let v = fi * lt;
        if lt < 0.0 && best.is_none_or(|(_, _, bv)| v < bv) {
            best = Some((i, t, v));
        }
    }
    best
}

fn calibrated() -> DeviceProfile {
    let base = DeviceProfile::default();
    DeviceProfile {
        payload_bits: 2.0 * link_rate(&base),
        ..base
    }
}

#[test]
fn published_weight_rows_with_two_second_uplink() {
    let rows = [
        (0.5, 0.5, 24.54, -19.0411),
        (0.4, 0.6, 34.26, -23.6004),
        (0.6, 0.4, 19.24, -14.8918),
        (0.8, 0.2, 14.14, -7.2075),
        (0.2, 0.8, 65.74, -36.3215),
    ];
    let b = SystemBudget::default();
    for (alpha, beta, t, obj) in rows {
        let sol = solve_homogeneous(
            &calibrated(),
            &b,
            &SurrogateParams::new(alpha, beta),
            DEFAULT_GRID_POINTS,
        )
        .unwrap();
        assert!(
            (sol.t_sens_s - t).abs() < 0.01,
            "alpha {alpha}: t {}",
            sol.t_sens_s
        );
        assert!(
            (sol.objective_value - obj).abs() < 1e-3,
            "alpha {alpha}: obj {}",
            sol.objective_value
        );
        assert_eq!(sol.binding_constraint, BindingConstraint::Time);
    }
}

#[test]
fn literal_payload_optimum() {
    let sol = solve_homogeneous(
        &DeviceProfile::default(),
        &SystemBudget::default(),
        &SurrogateParams::default(),
        DEFAULT_GRID_POINTS,
    )
    .unwrap();
    assert!((sol.t_sens_s - 15.36).abs() < 0.01, "{}", sol.t_sens_s);
    assert!(
        (sol.objective_value - -19.603).abs() < 1e-2,
        "{}",
        sol.objective_value
    );
}

#[test]
fn tiny_environment_stays_inside_the_cap() {
    // ln(α + β·ratio²) is flat at ratio = 0, so the optimum backs off the cap.
    let b = SystemBudget {
        m_total: 200,
        ..SystemBudget::default()
    };
    let sol = solve_homogeneous(
        &DeviceProfile::default(),
        &b,
        &SurrogateParams::default(),
        1000,
    )
    .unwrap();
    assert!(sol.t_sens_s < 1.0);
    assert!(sol.collected <= 200.0);
    assert_ne!(sol.binding_constraint, BindingConstraint::DataCap);
}

#[test]
fn energy_binds_when_uplink_is_expensive() {
    let p = DeviceProfile {
        tx_power_w: 40.0,
        ..DeviceProfile::default()
    };
    let b = SystemBudget {
        e_total_j: 2000.0,
        ..SystemBudget::default()
    };
    let sol = solve_homogeneous(&p, &b, &SurrogateParams::default(), 20_000).unwrap();
    assert_eq!(sol.binding_constraint, BindingConstraint::Energy);
}

#[test]
fn single_device_alternation_matches_the_grid() {
    let p = calibrated();
    let b = SystemBudget {
        num_devices: 1,
        m_total: 1000,
        ..SystemBudget::default()
    };
    let sp = SurrogateParams::default();
    let grid = solve_homogeneous(&p, &b, &sp, DEFAULT_GRID_POINTS).unwrap();
    let (plan, _) =
        solve_heterogeneous(std::slice::from_ref(&p), &b, &sp, &AoConfig::default()).unwrap();
    let collected = plan.collected_continuous(&[p]).min(1000.0);
    let ao = objective(plan.rounds, collected, 1000, &sp).unwrap();
    assert!(
        ao <= grid.objective_floored + 1e-9,
        "ao {ao} grid {}",
        grid.objective_floored
    );
    assert!(ao >= grid.objective_value - 1e-9);
}

#[test]
fn two_devices_never_exceed_the_environment() {
    let p = DeviceProfile::default();
    let q = DeviceProfile {
        sample_rate_hz: 40.0,
        cpu_hz: 2000.0,
        ..DeviceProfile::default()
    };
    let b = SystemBudget {
        num_devices: 2,
        m_total: 500,
        ..SystemBudget::default()
    };
    let fleet = [p, q];
    let (plan, _) = solve_heterogeneous(
        &fleet,
        &b,
        &SurrogateParams::default(),
        &AoConfig::default(),
    )
    .unwrap();
    assert!(plan.collected_continuous(&fleet) <= 500.0 + 1e-6);
    let report = evaluate_plan(&plan, &fleet, &b).unwrap();
    assert!(report.feasible && report.within_data_cap);
}

#[test]
fn unaffordable_uplink_is_infeasible() {
    let p = DeviceProfile {
        payload_bits: 1e12,
        ..DeviceProfile::default()
    };
    assert_eq!(
        solve_homogeneous(
            &p,
            &SystemBudget::default(),
            &SurrogateParams::default(),
            1000
        ),
        Err(Error::Infeasible)
    );
}

fn scenario() -> impl Strategy<Value = (DeviceProfile, SystemBudget, SurrogateParams)> {
    (
        2.0f64..30.0,
        50.0f64..1000.0,
        0.2f64..3.0,
        500.0f64..8000.0,
        2000.0f64..20000.0,
        0.1f64..0.9,
    )
        .prop_map(|(fs, cpu, t_comm, t_total, e_total, alpha)| {
            let base = DeviceProfile::default();
            let p = DeviceProfile {
                sample_rate_hz: fs,
                cpu_hz: cpu,
                payload_bits: t_comm * link_rate(&base),
                ..base
            };
            let b = SystemBudget {
                t_total_s: t_total,
                e_total_j: e_total,
                ..SystemBudget::default()
            };
            (p, b, SurrogateParams::new(alpha, 1.0 - alpha))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, .. ProptestConfig::default() })]

    #[test]
    fn grid_brackets_the_integer_optimum((p, b, sp) in scenario()) {
        let Some((_, _, best)) = integer_optimum(&p, &b, &sp) else {
            return Ok(());
        };
        let Ok(sol) = solve_homogeneous(&p, &b, &sp, 20_000) else {
            return Ok(());
        };
        // Continuous rounds relax the integer problem; the floored plan is one of its points.
        prop_assert!(sol.objective_floored >= best - 1e-9);
        prop_assert!(sol.objective_value <= best + 1e-3 * best.abs());
        let plan = AllocationPlan::uniform(sol.t_sens_s, b.num_devices, sol.rounds);
        let devices = vec![p.clone(); b.num_devices];
        prop_assert!(evaluate_plan(&plan, &devices, &b).unwrap().feasible);
    }

    #[test]
    fn refining_the_grid_never_hurts((p, b, sp) in scenario()) {
        if let (Ok(coarse), Ok(fine)) = (solve_homogeneous(&p, &b, &sp, 2_000), solve_homogeneous(&p, &b, &sp, 4_000)) {
            prop_assert!(fine.objective_value <= coarse.objective_value);
        }
    }

    #[test]
    fn larger_budgets_never_hurt((p, b, sp) in scenario(), grow_t in 1.0f64..2.0, grow_e in 1.0f64..2.0) {
        let bigger = SystemBudget { t_total_s: b.t_total_s * grow_t, e_total_j: b.e_total_j * grow_e, ..b.clone() };
        if let Ok(small) = solve_homogeneous(&p, &b, &sp, 5_000) {
            let large = solve_homogeneous(&p, &bigger, &sp, 5_000).unwrap();
            prop_assert!(large.objective_value <= small.objective_value);
        }
    }
}
