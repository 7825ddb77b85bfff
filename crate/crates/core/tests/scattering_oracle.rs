mod common;

use barrier_rhs::scattering::{s_matrix, unitarity_defect};
use barrier_rhs::{solve_matching, BarrierModel};
use common::{log_grid, ode_oracle, oracle_discrepancy};
use proptest::prelude::*;

#[test]
fn coefficients_match_integrated_solution() {
    let model = BarrierModel::default();
    for e in log_grid(0.01, 100.0, 12) {
        let d = oracle_discrepancy(&model, e);
        assert!(d < 1e-8, "E={e}: {d:e}");
    }
}

#[test]
fn oracle_reproduces_closed_form_tunneling() {
    let model = BarrierModel::default();
    let o = ode_oracle(&model, 1.0);
    let expected = 1.0 / (1.0 + 1f64.sinh().powi(2));
    assert!((o.t_left.norm_sqr() - expected).abs() < 1e-8);
    let res = ode_oracle(&model, 2.0 + std::f64::consts::PI.powi(2));
    assert!((res.t_left.norm_sqr() - 1.0).abs() < 1e-8);
}

#[test]
fn degenerate_energy_matches_oracle() {
    let model = BarrierModel::default();
    assert!(oracle_discrepancy(&model, 2.0) < 1e-8);
}

#[test]
fn shifted_and_rescaled_barriers_match_oracle() {
    let model = BarrierModel::with_units(-1.5, 0.7, 3.0, 0.8, 1.3).unwrap();
    for e in [0.3, 2.9, 3.0, 7.5] {
        let d = oracle_discrepancy(&model, e);
        assert!(d < 1e-8, "E={e}: {d:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn s_matrix_is_unitary(v0 in 0.0f64..20.0, width in 0.05f64..3.0, log_e in -4.0f64..4.0) {
        let model = BarrierModel::new(0.0, width, v0).unwrap();
        let e = 10f64.powf(log_e);
        let s = s_matrix(&model, e).unwrap();
        prop_assert!(unitarity_defect(&s) < 1e-10);
        prop_assert_eq!(s.0[0][0], s.0[1][1]);
    }

    #[test]
    fn flux_is_conserved(v0 in 0.0f64..20.0, width in 0.05f64..3.0, e in 1e-3f64..50.0) {
        let model = BarrierModel::new(-0.5 * width, 0.5 * width, v0).unwrap();
        let sol = solve_matching(&model, e).unwrap();
        prop_assert!(sol.flux_defect() < 1e-10);
        prop_assert!(sol.off_diagonal_defect() < 1e-10);
    }

    #[test]
    fn symmetric_barrier_has_equal_reflection_moduli(v0 in 0.0f64..10.0, e in 0.01f64..30.0) {
        let model = BarrierModel::new(-1.0, 1.0, v0).unwrap();
        let sol = solve_matching(&model, e).unwrap();
        prop_assert!((sol.r_l.norm() - sol.r_r.norm()).abs() < 1e-12);
    }
}

#[test]
fn unitarity_over_scaled_range() {
    for v0 in [0.0, 0.5, 2.0, 30.0] {
        let model = BarrierModel::new(0.0, 1.0, v0).unwrap();
        for e in log_grid(1e-3 * v0.max(1.0), 1e3 * v0.max(1.0), 200) {
            let d = unitarity_defect(&s_matrix(&model, e).unwrap());
            assert!(d < 1e-10, "V0={v0} E={e}: {d:e}");
        }
    }
}

#[test]
fn transmission_approaches_one_at_high_energy() {
    for v0 in [0.5, 2.0, 30.0] {
        let model = BarrierModel::new(0.0, 1.0, v0).unwrap();
        let scale = v0.max(1.0);
        let t2 = solve_matching(&model, 1e4 * scale).unwrap().t.norm_sqr();
        assert!((1.0 - t2).abs() < 1e-4, "V0={v0}: {t2}");
        // The reflection envelope ((V0/4E)^2 bound) shrinks decade by decade.
        let envelope = |e: f64| 1.0 - solve_matching(&model, e).unwrap().t.norm_sqr();
        let decades: Vec<f64> = (1..=4)
            .map(|d| {
                let e0 = scale * 10f64.powi(d);
                log_grid(e0, 10.0 * e0, 200).into_iter().map(envelope).fold(0.0, f64::max)
            })
            .collect();
        assert!(decades.windows(2).all(|w| w[1] < w[0]), "{decades:?}");
    }
}
