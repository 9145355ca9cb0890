use cellbath::dephasing::DephasingFactor;
use cellbath::entanglement::pair_state;
use cellbath::linalg::{c, max_abs, CMatrix, C64};
use cellbath::mean_field::CellEnvironment;
use cellbath::model::{uniform_grid, AtomParams, FieldVector, LatticeSpec, ThermalPoint};
use cellbath::oracle::{full_evolve, pair_evolve, FullCellModel, PairModel};
use cellbath::spin::SpinMagnitude;
use cellbath::transitions::{build_sectors, channel_tomography, evolve_atom};

fn plus_state() -> CMatrix {
    CMatrix::from_element(2, 2, c(0.5))
}

fn generic_state() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.35), C64::new(0.25, -0.3), C64::new(0.25, 0.3), c(0.65)])
}

fn resolved(eta: usize, s: SpinMagnitude, h: FieldVector, temp: f64) -> CellEnvironment {
    let lat = LatticeSpec::simple_cubic(s).with_eta(eta).unwrap();
    CellEnvironment::resolve(lat, h, ThermalPoint::new(temp).unwrap()).unwrap()
}

#[test]
fn dephasing_factor_matches_full_cell() {
    let atom = AtomParams::ising(2.0, 1.0);
    let cases = [
        (1, SpinMagnitude::HALF),
        (2, SpinMagnitude::HALF),
        (3, SpinMagnitude::HALF),
        (4, SpinMagnitude::HALF),
        (1, SpinMagnitude::ONE),
        (2, SpinMagnitude::ONE),
    ];
    for h in [FieldVector::along_z(0.5), FieldVector::new(0.3, -0.2, 0.4)] {
        for &(eta, s) in &cases {
            let env = resolved(eta, s, h, 2.0);
            let factor = DephasingFactor::new(&env, &atom).unwrap();
            let model = FullCellModel::new(&env, &atom).unwrap();
            let mut worst: f64 = 0.0;
            for t in uniform_grid(50.0, 501) {
                let rho = full_evolve(&model, &plus_state(), t).unwrap();
                let ratio = rho[(0, 1)] / c(0.5) * C64::from_polar(1.0, atom.omega0 * t);
                worst = worst.max((ratio - factor.cell(t)).norm());
            }
            assert!(worst <= 1e-10, "eta={eta} s={s} h={h:?}: {worst:e}");
        }
    }
}

#[test]
fn sector_engine_matches_full_cell() {
    let inv = 1.0 / 3f64.sqrt();
    let fields = [
        FieldVector::along_z(0.5),
        FieldVector::along_x(0.5),
        FieldVector::new(0.5 * inv, 0.5 * inv, 0.5 * inv),
    ];
    for &(eta, s) in &[
        (2, SpinMagnitude::HALF),
        (4, SpinMagnitude::HALF),
        (2, SpinMagnitude::ONE),
    ] {
        for h in fields {
            for omega0 in [0.0, 1.0, 2.0] {
                let atom = AtomParams::isotropic(omega0, 1.0);
                let env = resolved(eta, s, h, 2.5);
                let set = build_sectors(&env, &atom).unwrap();
                let model = FullCellModel::new(&env, &atom).unwrap();
                for t in uniform_grid(30.0, 61) {
                    let a = evolve_atom(&generic_state(), t, &set).unwrap();
                    let b = full_evolve(&model, &generic_state(), t).unwrap();
                    assert!(max_abs(&(a - b)) <= 1e-10, "eta={eta} s={s} h={h:?} w0={omega0} t={t}");
                }
            }
        }
    }
}

#[test]
fn paramagnetic_cell_matches_full_cell() {
    let atom = AtomParams::isotropic(1.0, 0.8);
    let env = resolved(3, SpinMagnitude::HALF, FieldVector::zero(), 4.0);
    assert_eq!(env.b_norm(), 0.0);
    let set = build_sectors(&env, &atom).unwrap();
    let model = FullCellModel::new(&env, &atom).unwrap();
    for t in uniform_grid(20.0, 21) {
        let a = evolve_atom(&generic_state(), t, &set).unwrap();
        let b = full_evolve(&model, &generic_state(), t).unwrap();
        assert!(max_abs(&(a - b)) <= 1e-10);
    }
}

#[test]
fn pair_channel_matches_two_cell_oracle() {
    for (h, omega0) in [
        (FieldVector::along_z(0.5), 2.0),
        (FieldVector::new(0.2, 0.4, -0.1), 0.7),
    ] {
        let atom = AtomParams::isotropic(omega0, 1.0);
        let env = resolved(2, SpinMagnitude::HALF, h, 2.0);
        let set = build_sectors(&env, &atom).unwrap();
        let model = PairModel::new(&env, &atom).unwrap();
        for t in uniform_grid(25.0, 51) {
            let route = pair_state(&channel_tomography(t, &set)).rho4;
            let brute = pair_evolve(&model, t);
            assert!(max_abs(&(route - brute)) <= 1e-10, "t={t}");
        }
    }
}
