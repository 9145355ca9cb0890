//! Population dynamics for isotropic coupling `alpha S0·Σ Si`.
//!
//! Isotropic coupling commutes with the Casimir of the total cell spin
//! `J = Σ Si`, so the cell splits into `nu(j)` identical copies of a spin-`j`
//! multiplet and each copy evolves with the atom under a block of dimension
//! `2(2j + 1)`:
//!
//! `H_j = w0 S0z ⊗ 1 - 1 ⊗ b·J + alpha S0·J`.
//!
//! The block evolution (the sector engine) is exact for any field direction.
//! The closed forms for a field along z or x are two-level Rabi sums over
//! `(j, l)` and are kept as fast paths.

use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_spectral, hermiticity_error, identity, kron, max_abs, partial_trace, sinc, CMatrix,
    SpectralDecomposition, C64, I,
};
use crate::mean_field::CellEnvironment;
use crate::model::{AtomParams, EXCITED, GROUND};
use crate::spin::{multiplicity_oracle, sector_spins, spin_matrices, SpinMagnitude};

/// Largest `2 eta S` (twice the top sector spin) the engine accepts.
pub const MAX_TWICE_TOP_SPIN: usize = 24;

#[derive(Debug, Clone)]
pub struct SectorBlock {
    pub j: SpinMagnitude,
    /// Number of spin-`j` multiplets in the cell.
    pub weight: u64,
    /// `H_j` on atom ⊗ spin-`j`, atom index first.
    pub hamiltonian: CMatrix,
    /// `exp(beta (b·J - |b| eta S))`, the thermal weight shifted so that its
    /// largest eigenvalue over all sectors is 1.
    pub bath_thermal: CMatrix,
    spectral: SpectralDecomposition,
}

impl SectorBlock {
    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn propagator(&self, t: f64) -> CMatrix {
        self.spectral.map(|e| C64::from_polar(1.0, -t * e))
    }
}

/// All sectors of one cell together with the normalisation
/// `z_tilde = Σ nu(j) tr bath_thermal(j)`. The unshifted partition function
/// is `z_tilde * exp(log_scale)`.
#[derive(Debug, Clone)]
pub struct SectorSet {
    pub blocks: Vec<SectorBlock>,
    pub z_tilde: f64,
    pub log_scale: f64,
}

fn require_isotropic(atom: &AtomParams) -> Result<()> {
    if !atom.is_isotropic() {
        return Err(Error::Precondition(
            "the sector engine needs alpha = gamma = lambda; use the full-cell oracle for \
             anisotropic couplings"
                .into(),
        ));
    }
    Ok(())
}

pub fn build_sectors(env: &CellEnvironment, atom: &AtomParams) -> Result<SectorSet> {
    require_isotropic(atom)?;
    if !atom.is_finite() {
        return Err(Error::InvalidInput("atom parameters must be finite".into()));
    }
    let lat = &env.lattice;
    let twice_top = lat.eta * lat.spin.twice() as usize;
    if twice_top > MAX_TWICE_TOP_SPIN {
        return Err(Error::DimensionCap {
            dim: twice_top,
            cap: MAX_TWICE_TOP_SPIN,
        });
    }
    let atom_ops = spin_matrices(SpinMagnitude::HALF);
    let log_scale = env.beta * env.b_norm() * lat.spin.value() * lat.eta as f64;
    let mut blocks = Vec::new();
    let mut z_tilde = 0.0;
    for j in sector_spins(lat.eta, lat.spin) {
        let weight = multiplicity_oracle(j, lat.eta, lat.spin);
        if weight == 0 {
            continue;
        }
        let ops = spin_matrices(j);
        let d = j.dim();
        let field = ops.dot(env.b);
        let mut h = kron(&atom_ops.sz, &identity(d)) * c(atom.omega0) - kron(&identity(2), &field);
        for (a, s) in atom_ops.components().iter().zip(ops.components()) {
            h += kron(a, s) * c(atom.alpha);
        }
        let sd_field = hermitian_spectral(&field)?;
        let bath_thermal = sd_field.map(|e| c((env.beta * e - log_scale).exp()));
        z_tilde += weight as f64 * bath_thermal.trace().re;
        let spectral = hermitian_spectral(&h)?;
        blocks.push(SectorBlock {
            j,
            weight,
            hamiltonian: h,
            bath_thermal,
            spectral,
        });
    }
    Ok(SectorSet {
        blocks,
        z_tilde,
        log_scale,
    })
}

impl SectorSet {
    /// The reduced map `rho0 -> rho(t)`, applied to any 2x2 operator.
    pub fn apply(&self, op: &CMatrix, t: f64) -> CMatrix {
        let mut out = CMatrix::zeros(2, 2);
        for block in &self.blocks {
            let u = block.propagator(t);
            let joint = &u * kron(op, &block.bath_thermal) * u.adjoint();
            out += partial_trace(&joint, &[2, block.bath_thermal.nrows()], &[0]) * c(block.weight as f64);
        }
        out / c(self.z_tilde)
    }

    /// Total weighted dimension `Σ nu(j) 2(2j + 1)`.
    pub fn weighted_dim(&self) -> u64 {
        self.blocks.iter().map(|b| b.weight * b.dim() as u64).sum()
    }
}

pub(crate) fn check_density(rho: &CMatrix, n: usize) -> Result<()> {
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::InvalidInput(format!("density matrix must be {n}x{n}")));
    }
    let dev = hermiticity_error(rho);
    if dev > 1e-12 {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: 1e-12,
        });
    }
    if (rho.trace() - c(1.0)).norm() > 1e-12 {
        return Err(Error::InvalidInput("density matrix must have unit trace".into()));
    }
    if hermitian_spectral(rho)?.eigenvalues[0] < -1e-10 {
        return Err(Error::InvalidInput("density matrix must be positive".into()));
    }
    Ok(())
}

/// `rho(t) = (1/z_tilde) Σ_j nu(j) tr_j[U_j (rho0 ⊗ W_j) U_j†]`.
pub fn evolve_atom(rho0: &CMatrix, t: f64, sectors: &SectorSet) -> Result<CMatrix> {
    check_density(rho0, 2)?;
    Ok(sectors.apply(rho0, t))
}

/// Linear map on the atom's operator space in the basis
/// `{|e><e|, |e><g|, |g><e|, |g><g|}`, with operator `|a><b|` stored at
/// vector index `2a + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomChannel {
    pub t: f64,
    pub map16: CMatrix,
}

pub(crate) fn unit(a: usize, b: usize) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(a, b)] = c(1.0);
    m
}

impl AtomChannel {
    pub fn identity(t: f64) -> Self {
        AtomChannel { t, map16: identity(4) }
    }

    pub fn apply(&self, op: &CMatrix) -> CMatrix {
        let v = nalgebra::DVector::from_fn(4, |k, _| op[(k / 2, k % 2)]);
        let w = &self.map16 * v;
        CMatrix::from_fn(2, 2, |a, b| w[2 * a + b])
    }

    /// Image of the basis operator `|a><b|`.
    pub fn image(&self, a: usize, b: usize) -> CMatrix {
        let col = self.map16.column(2 * a + b);
        CMatrix::from_fn(2, 2, |r, s| col[2 * r + s])
    }

    /// `Σ_ab |a><b| ⊗ E(|a><b|)`.
    pub fn choi(&self) -> CMatrix {
        CMatrix::from_fn(4, 4, |r, s| self.map16[(2 * (r % 2) + s % 2, 2 * (r / 2) + s / 2)])
    }

    /// Largest deviation of `tr E(|a><b|)` from `δ_ab`.
    pub fn trace_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((self.image(a, b).trace() - c(target)).norm());
            }
        }
        worst
    }

    /// Largest deviation of `E(A†)` from `E(A)†` over the basis.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max(max_abs(&(self.image(b, a) - self.image(a, b).adjoint())));
            }
        }
        worst
    }

    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_spectral(&self.choi())?.eigenvalues[0])
    }
}

/// Reconstructs the channel at time `t` from the images of
/// `|e><e|`, `|g><g|`, `X = |e><g| + |g><e|` and `Y = -i|e><g| + i|g><e|`.
pub fn channel_tomography(t: f64, sectors: &SectorSet) -> AtomChannel {
    let ee = sectors.apply(&unit(EXCITED, EXCITED), t);
    let gg = sectors.apply(&unit(GROUND, GROUND), t);
    let x = unit(EXCITED, GROUND) + unit(GROUND, EXCITED);
    let y = unit(EXCITED, GROUND) * (-I) + unit(GROUND, EXCITED) * I;
    let ex = sectors.apply(&x, t);
    let ey = sectors.apply(&y, t);
    let eg = (&ex + &ey * I) * c(0.5);
    let ge = (&ex - &ey * I) * c(0.5);
    let mut map16 = CMatrix::zeros(4, 4);
    for (col, img) in [(0, &ee), (1, &eg), (2, &ge), (3, &gg)] {
        for r in 0..2 {
            for s in 0..2 {
                map16[(2 * r + s, col)] = img[(r, s)];
            }
        }
    }
    AtomChannel { t, map16 }
}

/// One term of the closed-form sums: sector spin `j`, bath level `l` along
/// the field, and its normalised thermal probability.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Level {
    pub j: f64,
    pub l: f64,
    pub p: f64,
}

/// Levels for a field `B` along a fixed axis, `p ∝ nu(j) exp(beta B l)`.
pub(crate) fn levels(env: &CellEnvironment, field: f64) -> Vec<Level> {
    let lat = &env.lattice;
    let shift = field.abs() * lat.spin.value() * lat.eta as f64;
    let mut out = Vec::new();
    for j in sector_spins(lat.eta, lat.spin) {
        let nu = multiplicity_oracle(j, lat.eta, lat.spin) as f64;
        let jv = j.value();
        for k in 0..j.dim() {
            let l = -jv + k as f64;
            out.push(Level {
                j: jv,
                l,
                p: nu * (env.beta * (field * l - shift)).exp(),
            });
        }
    }
    let z: f64 = out.iter().map(|lv| lv.p).sum();
    for lv in &mut out {
        lv.p /= z;
    }
    out
}

/// Detunings and discriminants of the two Rabi doublets that touch level
/// `(j, l)`: `d± = B + w0 + alpha (l ± 1/2)` and
/// `M± = alpha² (j(j+1) - l(l ± 1)) + d±²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MDiscriminant {
    pub d_plus: f64,
    pub d_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub m_plus: f64,
    pub m_minus: f64,
}

pub fn discriminant(j: f64, l: f64, field: f64, omega0: f64, alpha: f64) -> MDiscriminant {
    let casimir = j * (j + 1.0);
    let c_plus = (casimir - l * (l + 1.0)).max(0.0);
    let c_minus = (casimir - l * (l - 1.0)).max(0.0);
    let d_plus = field + omega0 + alpha * (l + 0.5);
    let d_minus = field + omega0 + alpha * (l - 0.5);
    MDiscriminant {
        d_plus,
        d_minus,
        c_plus,
        c_minus,
        m_plus: alpha * alpha * c_plus + d_plus * d_plus,
        m_minus: alpha * alpha * c_minus + d_minus * d_minus,
    }
}

/// `cos(t√M/2) - i (d/√M) sin(t√M/2)`.
pub(crate) fn rabi_amplitude(t: f64, d: f64, m: f64) -> C64 {
    let half = 0.5 * t * m.sqrt();
    C64::new(half.cos(), -0.5 * t * d * sinc(half))
}

/// `k² sin²(t√M/2)/M` with `k² = M - d²`.
pub(crate) fn rabi_flip(t: f64, k2: f64, m: f64) -> f64 {
    let s = 0.5 * t * sinc(0.5 * t * m.sqrt());
    k2 * s * s
}

fn field_component(env: &CellEnvironment, axis: usize, what: &str) -> Result<f64> {
    if !env.b_along(axis) {
        return Err(Error::Precondition(format!(
            "{what} needs the field along {}; use the sector engine",
            ["x", "y", "z"][axis]
        )));
    }
    Ok(env.b[axis])
}

/// Excited population at time `t` for an atom starting in `|g>` with the
/// field along z.
pub fn excited_population_z(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<f64> {
    require_isotropic(atom)?;
    let field = field_component(env, 2, "the z-field population formula")?;
    let a2 = atom.alpha * atom.alpha;
    Ok(levels(env, field)
        .iter()
        .map(|lv| {
            let md = discriminant(lv.j, lv.l, field, atom.omega0, atom.alpha);
            lv.p * rabi_flip(t, a2 * md.c_minus, md.m_minus)
        })
        .sum())
}

/// The same sum with `sin²(t√M-/2)/√M-` in place of `/M-`, as printed.
pub fn printed_excited_population_z(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<f64> {
    require_isotropic(atom)?;
    let field = field_component(env, 2, "the z-field population formula")?;
    let a2 = atom.alpha * atom.alpha;
    Ok(levels(env, field)
        .iter()
        .map(|lv| {
            let md = discriminant(lv.j, lv.l, field, atom.omega0, atom.alpha);
            if md.m_minus == 0.0 {
                return 0.0;
            }
            let s = (0.5 * t * md.m_minus.sqrt()).sin();
            lv.p * a2 * md.c_minus * s * s / md.m_minus.sqrt()
        })
        .sum())
}

fn psi_sum(t: f64, env: &CellEnvironment, field: f64, omega0: f64, alpha: f64) -> C64 {
    let phase = C64::from_polar(1.0, t * field);
    levels(env, field)
        .iter()
        .map(|lv| {
            let md = discriminant(lv.j, lv.l, field, omega0, alpha);
            phase * lv.p * rabi_amplitude(t, md.d_plus, md.m_plus) * rabi_amplitude(t, md.d_minus, md.m_minus)
        })
        .sum()
}

/// Coherence factor for a field along z: `rho_eg(t) = G(t) rho_eg(0)`.
pub fn coherence_factor_z(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<C64> {
    require_isotropic(atom)?;
    let field = field_component(env, 2, "the z-field coherence formula")?;
    Ok(psi_sum(t, env, field, atom.omega0, atom.alpha))
}

/// `Psi(t)` for a field along x and degenerate atomic levels; an atom that
/// starts in `|g>` has `rho11 = (1 - Re Psi)/2`.
pub fn psi_factor(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<C64> {
    require_isotropic(atom)?;
    if atom.omega0 != 0.0 {
        return Err(Error::Precondition("the x-field formula needs omega0 = 0".into()));
    }
    let field = field_component(env, 0, "the x-field formula")?;
    Ok(psi_sum(t, env, field, 0.0, atom.alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{uniform_grid, FieldVector, LatticeSpec, ThermalPoint};
    use crate::spin::multiplicity;

    fn env_z(s: SpinMagnitude, t: f64) -> CellEnvironment {
        CellEnvironment::resolve(
            LatticeSpec::simple_cubic(s),
            FieldVector::along_z(0.5),
            ThermalPoint::new(t).unwrap(),
        )
        .unwrap()
    }

    fn env_x(s: SpinMagnitude, t: f64) -> CellEnvironment {
        CellEnvironment::resolve(
            LatticeSpec::simple_cubic(s),
            FieldVector::along_x(0.5),
            ThermalPoint::new(t).unwrap(),
        )
        .unwrap()
    }

    fn ground() -> CMatrix {
        unit(GROUND, GROUND)
    }

    #[test]
    fn sector_layout_for_spin_half_cell() {
        let set = build_sectors(&env_z(SpinMagnitude::HALF, 2.0), &AtomParams::isotropic(2.0, 1.0)).unwrap();
        let dims: Vec<usize> = set.blocks.iter().map(|b| b.dim()).collect();
        let weights: Vec<u64> = set.blocks.iter().map(|b| b.weight).collect();
        assert_eq!(dims, vec![18, 14, 10, 6, 2]);
        assert_eq!(weights, vec![1, 7, 20, 28, 14]);
        assert_eq!(set.weighted_dim(), 512);
        for b in &set.blocks {
            assert!(hermiticity_error(&b.hamiltonian) <= 1e-12);
            assert_eq!(b.weight, multiplicity(b.j, 8, SpinMagnitude::HALF));
        }
    }

    #[test]
    fn partition_matches_product_of_single_spins() {
        let env = CellEnvironment::with_field(
            LatticeSpec::new(6.0, 5, SpinMagnitude::ONE).unwrap(),
            0.7,
            [0.3, -0.4, 0.9],
        );
        let set = build_sectors(&env, &AtomParams::isotropic(1.0, 0.5)).unwrap();
        let y = env.beta * env.b_norm();
        let single = 1.0 + 2.0 * y.cosh();
        let expected = 5.0 * single.ln();
        assert!(((set.z_tilde.ln() + set.log_scale) - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_anisotropic_and_oversized() {
        let env = env_z(SpinMagnitude::HALF, 2.0);
        assert!(matches!(
            build_sectors(&env, &AtomParams::ising(2.0, 1.0)),
            Err(Error::Precondition(_))
        ));
        let big = CellEnvironment::with_field(
            LatticeSpec::new(6.0, 13, SpinMagnitude::ONE).unwrap(),
            0.5,
            [0.0, 0.0, 1.0],
        );
        assert!(matches!(
            build_sectors(&big, &AtomParams::isotropic(2.0, 1.0)),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn identity_at_zero_and_frozen_without_coupling() {
        let env = env_z(SpinMagnitude::HALF, 2.0);
        let rho0 = CMatrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.2, 0.1), C64::new(0.2, -0.1), c(0.3)]);
        let set = build_sectors(&env, &AtomParams::isotropic(2.0, 1.0)).unwrap();
        assert!(max_abs(&(evolve_atom(&rho0, 0.0, &set).unwrap() - &rho0)) < 1e-13);
        let free = build_sectors(&env, &AtomParams::isotropic(2.0, 0.0)).unwrap();
        for &t in &[0.7, 5.0, 31.0] {
            let rho = evolve_atom(&rho0, t, &free).unwrap();
            assert!((rho[(0, 0)] - c(0.7)).norm() < 1e-12);
            let phase = C64::from_polar(1.0, -2.0 * t);
            assert!((rho[(0, 1)] - rho0[(0, 1)] * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn output_is_a_state() {
        let env = CellEnvironment::with_field(
            LatticeSpec::new(6.0, 4, SpinMagnitude::ONE).unwrap(),
            0.4,
            [0.5, 0.2, -0.7],
        );
        let set = build_sectors(&env, &AtomParams::isotropic(1.3, 0.8)).unwrap();
        let rho0 = CMatrix::from_row_slice(2, 2, &[c(0.4), C64::new(0.3, 0.2), C64::new(0.3, -0.2), c(0.6)]);
        for t in uniform_grid(40.0, 41) {
            let rho = evolve_atom(&rho0, t, &set).unwrap();
            assert!(hermiticity_error(&rho) <= 1e-12);
            assert!((rho.trace() - c(1.0)).norm() <= 1e-12);
            assert!(hermitian_spectral(&rho).unwrap().eigenvalues[0] >= -1e-10);
        }
    }

    #[test]
    fn z_field_keeps_ground_state_diagonal() {
        let env = env_z(SpinMagnitude::HALF, 2.0);
        let set = build_sectors(&env, &AtomParams::isotropic(2.0, 1.0)).unwrap();
        for t in uniform_grid(50.0, 101) {
            let rho = evolve_atom(&ground(), t, &set).unwrap();
            assert!(rho[(0, 1)].norm() < 1e-13);
        }
    }

    #[test]
    fn z_population_fast_path_matches_engine() {
        let atom = AtomParams::isotropic(2.0, 1.0);
        for (s, temp) in [(SpinMagnitude::HALF, 2.0), (SpinMagnitude::ONE, 5.0)] {
            let env = env_z(s, temp);
            let set = build_sectors(&env, &atom).unwrap();
            let mut peak: f64 = 0.0;
            for t in uniform_grid(50.0, 201) {
                let engine = evolve_atom(&ground(), t, &set).unwrap()[(0, 0)].re;
                let fast = excited_population_z(t, &env, &atom).unwrap();
                assert!((engine - fast).abs() <= 1e-10, "t={t}");
                peak = peak.max(fast);
            }
            assert!(peak < 0.5);
        }
        let env = env_z(SpinMagnitude::HALF, 2.0);
        assert_eq!(excited_population_z(0.0, &env, &atom).unwrap(), 0.0);
        let free = AtomParams::isotropic(2.0, 0.0);
        assert_eq!(excited_population_z(13.0, &env, &free).unwrap(), 0.0);
    }

    #[test]
    fn z_coherence_factor_matches_engine() {
        let atom = AtomParams::isotropic(2.0, 1.0);
        let env = env_z(SpinMagnitude::HALF, 2.5);
        let set = build_sectors(&env, &atom).unwrap();
        let coh = unit(EXCITED, GROUND);
        for t in uniform_grid(30.0, 61) {
            let engine = set.apply(&coh, t)[(0, 1)];
            let fast = coherence_factor_z(t, &env, &atom).unwrap();
            assert!((engine - fast).norm() <= 1e-10, "t={t}");
        }
    }

    #[test]
    fn x_field_psi_matches_engine() {
        let atom = AtomParams::isotropic(0.0, 1.0);
        for (s, temp) in [(SpinMagnitude::HALF, 2.0), (SpinMagnitude::ONE, 7.0)] {
            let env = env_x(s, temp);
            let set = build_sectors(&env, &atom).unwrap();
            assert!((psi_factor(0.0, &env, &atom).unwrap() - c(1.0)).norm() < 1e-14);
            for t in uniform_grid(50.0, 101) {
                let engine = evolve_atom(&ground(), t, &set).unwrap()[(0, 0)].re;
                let fast = 0.5 * (1.0 - psi_factor(t, &env, &atom).unwrap().re);
                assert!((engine - fast).abs() <= 1e-10, "t={t}");
            }
        }
    }

    #[test]
    fn fast_paths_reject_wrong_geometry() {
        let atom = AtomParams::isotropic(2.0, 1.0);
        let ex = env_x(SpinMagnitude::HALF, 2.0);
        assert!(excited_population_z(1.0, &ex, &atom).is_err());
        assert!(psi_factor(1.0, &ex, &atom).is_err());
        let ez = env_z(SpinMagnitude::HALF, 2.0);
        assert!(psi_factor(1.0, &ez, &AtomParams::isotropic(0.0, 1.0)).is_err());
    }

    #[test]
    fn high_temperature_x_field_equilibrates() {
        let atom = AtomParams::isotropic(0.0, 1.0);
        let env = env_x(SpinMagnitude::ONE, 7.0);
        let grid = uniform_grid(200.0, 2001);
        let mean: f64 = grid
            .iter()
            .map(|&t| 0.5 * (1.0 - psi_factor(t, &env, &atom).unwrap().re))
            .sum::<f64>()
            / grid.len() as f64;
        assert!((mean - 0.5).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn rotation_from_z_to_x_preserves_populations() {
        // rotation by -pi/2 about y takes x to z; the atom state rotates with it
        let atom = AtomParams::isotropic(0.0, 0.9);
        let lat = LatticeSpec::new(6.0, 4, SpinMagnitude::HALF).unwrap();
        let ex = CellEnvironment::with_field(lat, 0.5, [1.3, 0.0, 0.0]);
        let ez = CellEnvironment::with_field(lat, 0.5, [0.0, 0.0, 1.3]);
        let sx = build_sectors(&ex, &atom).unwrap();
        let sz = build_sectors(&ez, &atom).unwrap();
        let rot = {
            let h = (0.5f64).sqrt();
            CMatrix::from_row_slice(2, 2, &[c(h), c(h), c(-h), c(h)])
        };
        let rho0 = ground();
        let rho0_rot = &rot * &rho0 * rot.adjoint();
        for t in uniform_grid(20.0, 41) {
            let a = evolve_atom(&rho0, t, &sx).unwrap();
            let b = rot.adjoint() * evolve_atom(&rho0_rot, t, &sz).unwrap() * &rot;
            assert!(max_abs(&(a - b)) <= 1e-10, "t={t}");
        }
    }

    #[test]
    fn channel_properties() {
        let env = CellEnvironment::with_field(
            LatticeSpec::new(6.0, 3, SpinMagnitude::ONE).unwrap(),
            0.6,
            [0.2, 0.5, 0.4],
        );
        let set = build_sectors(&env, &AtomParams::isotropic(1.0, 1.1)).unwrap();
        let id = channel_tomography(0.0, &set);
        assert!(max_abs(&(&id.map16 - identity(4))) < 1e-13);
        let rho0 = CMatrix::from_row_slice(2, 2, &[c(0.25), C64::new(0.1, -0.3), C64::new(0.1, 0.3), c(0.75)]);
        for t in uniform_grid(15.0, 16) {
            let ch = channel_tomography(t, &set);
            assert!(ch.trace_error() <= 1e-12);
            assert!(ch.hermiticity_error() <= 1e-12);
            assert!(ch.choi_min_eigenvalue().unwrap() >= -1e-10);
            assert!(max_abs(&(ch.apply(&rho0) - evolve_atom(&rho0, t, &set).unwrap())) <= 1e-12);
        }
    }

    #[test]
    fn uncoupled_channel_is_a_phase() {
        let env = env_z(SpinMagnitude::HALF, 2.0);
        let set = build_sectors(&env, &AtomParams::isotropic(2.0, 0.0)).unwrap();
        let t = 1.7;
        let ch = channel_tomography(t, &set);
        let eg = ch.image(EXCITED, GROUND);
        assert!((eg[(0, 1)] - C64::from_polar(1.0, -2.0 * t)).norm() < 1e-12);
        assert!(max_abs(&(ch.image(EXCITED, EXCITED) - unit(EXCITED, EXCITED))) < 1e-12);
    }

    #[test]
    fn channel_reproduces_fast_population() {
        let atom = AtomParams::isotropic(2.0, 1.0);
        let env = env_z(SpinMagnitude::HALF, 2.0);
        let set = build_sectors(&env, &atom).unwrap();
        for t in uniform_grid(50.0, 51) {
            let ch = channel_tomography(t, &set);
            let p = ch.apply(&ground())[(0, 0)].re;
            assert!((p - excited_population_z(t, &env, &atom).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn printed_denominator_differs() {
        let atom = AtomParams::isotropic(2.0, 1.0);
        let env = env_z(SpinMagnitude::HALF, 2.0);
        let worst = uniform_grid(50.0, 201)
            .iter()
            .map(|&t| {
                (printed_excited_population_z(t, &env, &atom).unwrap() - excited_population_z(t, &env, &atom).unwrap())
                    .abs()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }
}
