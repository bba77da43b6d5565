use num_complex::Complex64;

use qbattery::linalg::CMatrix;
use qbattery::model::{battery_hamiltonian, ground_state, product_minus_state, BatteryModel};
use qbattery::observables::{ergotropy, ergotropy_bruteforce_oracle, EnergyBasis};
use qbattery::state::DensityMatrix;

fn all_up(n: usize) -> DensityMatrix {
    let dim = 1 << n;
    let mut m = CMatrix::zeros(dim, dim);
    m[(0, 0)] = Complex64::new(1.0, 0.0);
    DensityMatrix::new(m).unwrap()
}

fn product_plus(n: usize) -> DensityMatrix {
    let dim = 1 << n;
    DensityMatrix::new(CMatrix::from_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0))).unwrap()
}

#[test]
fn field_states_have_textbook_ergotropy() {
    for n in 1..=5 {
        let h = 0.7;
        let basis = EnergyBasis::new(&battery_hamiltonian(&BatteryModel::new(n, h, 0.0).unwrap())).unwrap();
        let minus = basis.ergotropy(&product_minus_state(n).unwrap()).unwrap();
        assert!(minus.ergotropy.abs() < 1e-12);
        let plus = basis.ergotropy(&product_plus(n)).unwrap();
        assert!((plus.ergotropy - n as f64 * h).abs() < 1e-12, "N={n}");
        // z-polarized: half the energy window is extractable
        let up = basis.ergotropy(&all_up(n)).unwrap();
        assert!(up.w.abs() < 1e-12);
        assert!((up.ergotropy - n as f64 * h / 2.0).abs() < 1e-12, "N={n}");
    }
}

#[test]
fn coherence_in_the_field_basis() {
    for n in 1..=5 {
        let basis = EnergyBasis::new(&battery_hamiltonian(&BatteryModel::new(n, 1.0, 0.0).unwrap())).unwrap();
        assert!(basis.coherence(&product_minus_state(n).unwrap()).unwrap() < 1e-12);
        let expected = ((1usize << n) - 1) as f64;
        let c = basis.coherence(&all_up(n)).unwrap();
        assert!((c - expected).abs() < 1e-10, "N={n}: {c}");
    }
}

#[test]
fn interacting_ground_state_is_passive() {
    for n in 2..=5 {
        let h = battery_hamiltonian(&BatteryModel::new(n, 1.3, 1.0).unwrap());
        let g = ground_state(&h).unwrap();
        assert!(ergotropy(&g, &h).unwrap().ergotropy.abs() < 1e-10, "N={n}");
    }
}

#[test]
fn brute_force_agrees_on_chain_states() {
    let h = battery_hamiltonian(&BatteryModel::new(3, 1.0, 0.5).unwrap());
    for rho in [all_up(3), product_plus(3)] {
        let spectral = ergotropy(&rho, &h).unwrap().ergotropy;
        let brute = ergotropy_bruteforce_oracle(&rho, &h, 200, 7).unwrap();
        assert!((spectral - brute).abs() < 1e-9);
    }
}
