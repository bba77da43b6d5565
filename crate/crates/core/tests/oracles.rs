use std::f64::consts::PI;

use num_complex::Complex64;

use qbattery::dissipation::{build_gamma, Channel, NoiseSpec, Topology};
use qbattery::evolver::liouvillian_rhs;
use qbattery::model::{battery_hamiltonian, BatteryModel, CouplingRange, EffectiveCoupling};
use qbattery::oracles::{correlated_dephasing_energy, correlated_dephasing_state, DephasingTwoQubitParams};
use qbattery::spin::expectation;

fn params() -> DephasingTwoQubitParams {
    DephasingTwoQubitParams::from_polar(1.0, 0.2, 0.07, PI / 3.0, 0.8)
}

fn spec(p: &DephasingTwoQubitParams) -> NoiseSpec {
    NoiseSpec::correlated(
        Channel::Dephasing,
        Topology::NearestNeighbor,
        p.gamma,
        p.gamma_offdiag(),
        EffectiveCoupling::ising(p.j_z, CouplingRange::NearestNeighbor),
    )
    .open()
}

/// The closed-form state solves the master equation: its central
/// difference matches the generator applied to it.
#[test]
fn closed_form_satisfies_master_equation() {
    let p = params();
    let spec = spec(&p);
    let gamma = build_gamma(&spec, 2).unwrap();
    let h = spec.effective_hamiltonian(2);
    let step = 1e-4;
    for k in 1..=40 {
        let t = k as f64 * 0.25;
        let fwd = correlated_dephasing_state(&p, t + step).unwrap();
        let bwd = correlated_dephasing_state(&p, t - step).unwrap();
        let derivative = (fwd.matrix() - bwd.matrix()) / Complex64::new(2.0 * step, 0.0);
        let rhs = liouvillian_rhs(&h, &gamma, Channel::Dephasing, &correlated_dephasing_state(&p, t).unwrap()).unwrap();
        let err = qbattery::linalg::max_abs_diff(&derivative, rhs.matrix());
        assert!(err < 1e-6, "t={t}: {err:e}");
    }
}

#[test]
fn closed_form_energy_is_the_field_expectation() {
    let p = params();
    let h_b = battery_hamiltonian(&BatteryModel::new(2, p.h, 0.0).unwrap());
    for k in 0..=50 {
        let t = k as f64 * 0.2;
        let rho = correlated_dephasing_state(&p, t).unwrap();
        let w = expectation(&rho, &h_b).unwrap();
        assert!((w - correlated_dephasing_energy(&p, t)).abs() < 1e-10, "t={t}");
    }
}
