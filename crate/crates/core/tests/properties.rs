use proptest::prelude::*;

use cellbath::dephasing::DephasingFactor;
use cellbath::entanglement::{concurrence, pair_state};
use cellbath::linalg::{c, evolve_unitary, hermitian_spectral, hermiticity_error, kron, max_abs, CMatrix, C64};
use cellbath::mean_field::{alignment_error, solve_gap, CellEnvironment, SolverOptions};
use cellbath::model::{AtomParams, FieldVector, LatticeSpec, ThermalPoint};
use cellbath::spin::{multiplicity, multiplicity_oracle, sector_spins, SpinMagnitude};
use cellbath::transitions::{build_sectors, channel_tomography, evolve_atom};

fn hermitian2(v: [f64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(v[0]), C64::new(v[1], v[2]), C64::new(v[1], -v[2]), c(v[3])])
}

/// A valid qubit state from a point in the unit ball.
fn qubit(r: [f64; 3]) -> CMatrix {
    let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt().max(1.0);
    let (x, y, z) = (r[0] / n, r[1] / n, r[2] / n);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + z)),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            c(0.5 * (1.0 - z)),
        ],
    )
}

fn spin() -> impl Strategy<Value = SpinMagnitude> {
    (1u32..=3).prop_map(SpinMagnitude::from_twice)
}

fn field() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-2.0f64..2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplicities_fill_the_cell(eta in 1usize..=8, s in spin()) {
        let mut total = 0u64;
        for j in sector_spins(eta, s) {
            let nu = multiplicity(j, eta, s);
            prop_assert_eq!(nu, multiplicity_oracle(j, eta, s));
            total += nu * j.dim() as u64;
        }
        prop_assert_eq!(total, (s.dim() as u64).pow(eta as u32));
    }

    #[test]
    fn dephasing_factor_is_contractive_and_time_reversal_symmetric(
        b in field(), beta in 0.05f64..3.0, lambda in -2.0f64..2.0, s in spin(), t in 0.0f64..60.0,
    ) {
        let env = CellEnvironment::with_field(LatticeSpec::simple_cubic(s), beta, b);
        let f = DephasingFactor::new(&env, &AtomParams::ising(1.0, lambda)).unwrap();
        let v = f.single(t);
        prop_assert!(v.norm() <= 1.0 + 1e-12);
        prop_assert!((f.single(-t) - v.conj()).norm() <= 1e-12);
    }

    #[test]
    fn atom_evolution_gives_states(
        b in field(), beta in 0.05f64..3.0, omega0 in -2.0f64..2.0, alpha in -1.5f64..1.5,
        r in prop::array::uniform3(-1.0f64..1.0), t in 0.0f64..40.0, eta in 1usize..=5,
    ) {
        let lat = LatticeSpec::new(6.0, eta, SpinMagnitude::HALF).unwrap();
        let env = CellEnvironment::with_field(lat, beta, b);
        let set = build_sectors(&env, &AtomParams::isotropic(omega0, alpha)).unwrap();
        let rho = evolve_atom(&qubit(r), t, &set).unwrap();
        prop_assert!(hermiticity_error(&rho) <= 1e-12);
        prop_assert!((rho.trace() - c(1.0)).norm() <= 1e-12);
        prop_assert!(hermitian_spectral(&rho).unwrap().eigenvalues[0] >= -1e-10);
    }

    #[test]
    fn channels_are_trace_preserving_and_completely_positive(
        b in field(), beta in 0.05f64..3.0, omega0 in -2.0f64..2.0, alpha in -1.5f64..1.5,
        t in 0.0f64..40.0, s in spin(),
    ) {
        let lat = LatticeSpec::new(6.0, 3, s).unwrap();
        let env = CellEnvironment::with_field(lat, beta, b);
        let set = build_sectors(&env, &AtomParams::isotropic(omega0, alpha)).unwrap();
        let ch = channel_tomography(t, &set);
        prop_assert!(ch.trace_error() <= 1e-12);
        prop_assert!(ch.hermiticity_error() <= 1e-12);
        prop_assert!(ch.choi_min_eigenvalue().unwrap() >= -1e-10);
        let pair = pair_state(&ch);
        let cval = concurrence(&pair.rho4).unwrap();
        prop_assert!((0.0..=1.0).contains(&cval));
    }

    #[test]
    fn concurrence_ignores_local_unitaries(
        h1 in prop::array::uniform4(-1.0f64..1.0), h2 in prop::array::uniform4(-1.0f64..1.0),
        p in 0.0f64..1.0, tilt in 0.0f64..1.0,
    ) {
        // a Werner-like family with a population imbalance, so the state is generic
        let mut rho = cellbath::entanglement::bell_phi() * c(p);
        let rest = (1.0 - p) / 4.0;
        for (k, w) in [1.0 + tilt, 1.0, 1.0, 1.0 - tilt].iter().enumerate() {
            rho[(k, k)] += c(rest * w);
        }
        let u = kron(&evolve_unitary(&hermitian2(h1), 1.0).unwrap(), &evolve_unitary(&hermitian2(h2), 1.0).unwrap());
        let moved = &u * &rho * u.adjoint();
        prop_assert!(max_abs(&(&moved - moved.adjoint())) <= 1e-12);
        prop_assert!((concurrence(&moved).unwrap() - concurrence(&rho).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn gap_solution_is_aligned_and_bounded(
        h in field(), temp in 0.2f64..12.0, s in spin(),
    ) {
        let lat = LatticeSpec::simple_cubic(s);
        let hf = FieldVector::from(h);
        let sol = solve_gap(&lat, hf, ThermalPoint::new(temp).unwrap(), SolverOptions::default()).unwrap();
        prop_assert!(sol.residual <= 1e-12);
        prop_assert!(sol.m <= s.value() + 1e-12);
        prop_assert!(alignment_error(&sol, hf, &lat) <= 1e-9);
    }
}
