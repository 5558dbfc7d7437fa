use std::f64::consts::TAU;

use faddeev_core::field::{energy_density, n_from_u, spinor_z};
use faddeev_core::io::{load_solution, save_solution};
use faddeev_core::topology::{
    ab_density, hopf_closed, hopf_grid3d, hopf_reduced, levi_civita_density, Grid3dSpec,
};
use faddeev_core::verify::{boundary_audit, field_equation_residual};
use faddeev_core::{
    integrate_profile, scan_coefficient, AnalyticProfile, AnsatzParams, CylPoint, EnergyConfig,
    ProfileEnd, RadialProfile, ResidualGrid, SolveConfig, Stereo,
};
use proptest::prelude::*;

fn windings() -> impl Strategy<Value = (i32, i32)> {
    let nz = prop_oneof![-3i32..=-1, 1i32..=3];
    (nz.clone(), nz)
}

/// `g = ρ^|m|/(ρ₀ − ρ)`, regular at the axis with a simple pole at `ρ₀`.
fn pole_profile(m: i32, n: i32, rho0: f64) -> AnalyticProfile {
    let k = m.abs();
    AnalyticProfile::new(
        m,
        n,
        rho0,
        move |r| r.powi(k) / (rho0 - r),
        move |r| k as f64 * r.powi(k - 1) / (rho0 - r) + r.powi(k) / ((rho0 - r) * (rho0 - r)),
    )
    .with_pole(rho0, rho0 * (1.0 - 1e-6))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn closed_and_reduced_agree_on_poles((m, n) in windings(), rho0 in 0.5f64..3.0) {
        let p = pole_profile(m, n, rho0);
        let closed = hopf_closed(&p).unwrap();
        let reduced = hopf_reduced(&p, 5, 4).unwrap();
        prop_assert_eq!(closed.value, (m * n) as f64);
        prop_assert!((closed.value - reduced.value).abs() < 1e-6, "{} vs {}", closed.value, reduced.value);
    }

    #[test]
    fn charge_is_odd_in_each_winding((m, n) in windings(), rho0 in 0.5f64..3.0) {
        let q = hopf_reduced(&pole_profile(m, n, rho0), 3, 2).unwrap().value;
        let qn = hopf_reduced(&pole_profile(m, -n, rho0), 3, 2).unwrap().value;
        let qm = hopf_reduced(&pole_profile(-m, n, rho0), 3, 2).unwrap().value;
        prop_assert_eq!(q, -qn);
        prop_assert_eq!(q, -qm);
    }

    #[test]
    fn charge_densities_agree(
        (m, n) in windings(),
        frac in 0.05f64..0.9,
        phi in 0.0f64..TAU,
        z in 0.0f64..TAU,
    ) {
        let p = pole_profile(m, n, 2.0);
        let pt = CylPoint::new(2.0 * frac, phi, z).unwrap();
        let a = ab_density(&pt, &p).unwrap();
        let b = levi_civita_density(&pt, &p, 1e-5).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-12), "{} vs {}", a, b);
    }

    #[test]
    fn spinor_and_stereographic_fields_coincide(
        (m, n) in windings(),
        frac in 0.01f64..0.99,
        phi in 0.0f64..TAU,
        z in 0.0f64..TAU,
    ) {
        let p = pole_profile(m, n, 1.5);
        let pt = CylPoint::new(1.5 * frac, phi, z).unwrap();
        let from_spinor = spinor_z(&pt, &p).unwrap().n_vec();
        let u = faddeev_core::field::ansatz_u(&pt, &p).unwrap();
        let from_u = n_from_u(u).unwrap();
        prop_assert!((from_spinor - from_u).norm() < 1e-12);
        prop_assert!((from_u.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_is_non_negative_and_phase_free(
        (m, n) in windings(),
        frac in 0.01f64..0.99,
        phi in 0.0f64..TAU,
        z in 0.0f64..TAU,
    ) {
        let p = pole_profile(m, n, 1.5);
        let cfg = EnergyConfig::default();
        let e = energy_density(&CylPoint::new(1.5 * frac, phi, z).unwrap(), &p, &cfg).unwrap();
        let e0 = energy_density(&CylPoint::new(1.5 * frac, 0.0, 0.0).unwrap(), &p, &cfg).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!((e - e0).abs() <= 1e-12 * e0.max(1.0));
    }
}

#[test]
fn pole_is_the_point_at_infinity() {
    let p = pole_profile(1, 1, 2.0);
    let at_pole =
        faddeev_core::field::ansatz_u(&CylPoint::new(2.0, 0.3, 0.4).unwrap(), &p).unwrap();
    assert_eq!(at_pole, Stereo::Infinity);
    assert_eq!(
        n_from_u(at_pole).unwrap(),
        faddeev_core::field::Vec3::new(0.0, 0.0, 1.0)
    );
}

#[test]
fn solve_save_load_check_pipeline() {
    let cfg = SolveConfig::default();
    let sol = integrate_profile(&AnsatzParams::new(1, 1, 1.0).unwrap(), &cfg).unwrap();
    let path = std::env::temp_dir().join(format!("faddeev-pipeline-{}.json", std::process::id()));
    save_solution(&path, &sol).unwrap();
    let back = load_solution(&path).unwrap();
    let _ = std::fs::remove_file(&path);

    assert!(matches!(back.end(), ProfileEnd::Pole { .. }));
    assert_eq!(hopf_closed(&back).unwrap(), hopf_closed(&sol).unwrap());
    let grid = ResidualGrid::default_window(&back, 256);
    assert!(field_equation_residual(&back, &grid).unwrap().linf_norm < 1e-4);
    let audit = boundary_audit(&back, cfg.tail_lo).unwrap();
    assert_eq!(audit.periodicity_z_defect, 0.0);
    let q = hopf_grid3d(
        &back,
        &Grid3dSpec {
            n_rho: 128,
            n_phi: 16,
            n_z: 16,
            axis_excision: 1e-3,
        },
    )
    .unwrap();
    assert!((q.value - 1.0).abs() < 1e-3);
}

#[test]
fn scan_rows_are_ordered_and_poles_recede_with_smaller_coefficient() {
    let table = scan_coefficient(1, 1, (0.5, 2.0), 8, &SolveConfig::default()).unwrap();
    assert_eq!(table.rows.len(), 8);
    assert!(table.rows.windows(2).all(|w| w[1].c_lead > w[0].c_lead));
    let rho0: Vec<f64> = table.rows.iter().filter_map(|r| r.outcome.rho0()).collect();
    assert!(rho0.len() >= 2);
    assert!(rho0.windows(2).all(|w| w[1] < w[0]));
    // once singular, larger coefficients stay singular
    let first = table
        .rows
        .iter()
        .position(|r| r.outcome.rho0().is_some())
        .unwrap();
    assert!(table.rows[first..]
        .iter()
        .all(|r| r.outcome.rho0().is_some()));

    let bounded = scan_coefficient(1, 2, (0.5, 1.2), 4, &SolveConfig::default()).unwrap();
    assert!(bounded.rows.iter().all(|r| r.outcome.label() == "BOUNDED"));
}
