//! Brute-force reference evolution in the full product space of the atom(s)
//! and every cell spin, with no collective-spin shortcuts.
//!
//! Every cell spin sits in the same molecular field `b` but may couple to
//! the atom with its own `(alpha_i, gamma_i, lambda_i)`.

use crate::entanglement::bell_phi;
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_spectral, identity, kron, partial_trace, thermal_state, CMatrix, SpectralDecomposition, C64,
};
use crate::mean_field::{free_energy, CellEnvironment};
use crate::model::{bath_operator, cell_generator, AtomParams, FieldVector, LatticeSpec, ThermalPoint};
use crate::spin::{spin_matrices, SpinMagnitude, SpinOperatorSet};
use crate::transitions::check_density;

/// Largest product-space dimension the oracle will diagonalise.
pub const DIMENSION_CAP: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteCoupling {
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl From<&AtomParams> for SiteCoupling {
    fn from(a: &AtomParams) -> Self {
        SiteCoupling {
            alpha: a.alpha,
            gamma: a.gamma,
            lambda: a.lambda,
        }
    }
}

/// `op` acting on factor `k` of a product space with local dimensions `dims`.
fn embed(op: &CMatrix, k: usize, dims: &[usize]) -> CMatrix {
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    kron(&kron(&identity(left), op), &identity(right))
}

fn embed_pair(a: &CMatrix, ka: usize, b: &CMatrix, kb: usize, dims: &[usize]) -> CMatrix {
    embed(a, ka, dims) * embed(b, kb, dims)
}

fn check_dim(dims: &[usize]) -> Result<usize> {
    let dim = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match dim {
        Some(d) if d <= DIMENSION_CAP => Ok(d),
        _ => Err(Error::DimensionCap {
            dim: dim.unwrap_or(usize::MAX),
            cap: DIMENSION_CAP,
        }),
    }
}

/// Adds one atom (factor `atom`) and its cell (factors `sites[i]`) to `h`.
fn add_cell(
    h: &mut CMatrix,
    dims: &[usize],
    atom: usize,
    sites: &[usize],
    omega0: f64,
    couplings: &[SiteCoupling],
    env: &CellEnvironment,
    atom_ops: &SpinOperatorSet,
    ops: &SpinOperatorSet,
) {
    *h += embed(&atom_ops.sz, atom, dims) * c(omega0);
    let free = cell_generator(env.b, ops);
    for (&k, cp) in sites.iter().zip(couplings) {
        *h += embed(&free, k, dims);
        for (g, (a, s)) in [cp.alpha, cp.gamma, cp.lambda]
            .iter()
            .zip(atom_ops.components().iter().zip(ops.components()))
        {
            if *g != 0.0 {
                *h += embed_pair(a, atom, s, k, dims) * c(*g);
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Propagation {
    spectral: SpectralDecomposition,
}

impl Propagation {
    /// `U(t) rho U(t)†` via the eigenbasis of the Hamiltonian.
    fn evolve(&self, rho: &CMatrix, t: f64) -> CMatrix {
        let v = &self.spectral.eigenvectors;
        let e = &self.spectral.eigenvalues;
        let mut inner = v.adjoint() * rho * v;
        for r in 0..inner.nrows() {
            for s in 0..inner.ncols() {
                inner[(r, s)] *= C64::from_polar(1.0, -t * (e[r] - e[s]));
            }
        }
        v * inner * v.adjoint()
    }
}

/// One atom and the full `eta`-spin cell.
#[derive(Debug, Clone)]
pub struct FullCellModel {
    pub eta: usize,
    pub s: SpinMagnitude,
    pub dims: Vec<usize>,
    pub hamiltonian: CMatrix,
    /// Product of per-site thermal states `exp(beta b·S_i)/tr`.
    pub bath_state: CMatrix,
    prop: Propagation,
}

impl FullCellModel {
    /// Every site couples with the atom's `(alpha, gamma, lambda)`.
    pub fn new(env: &CellEnvironment, atom: &AtomParams) -> Result<Self> {
        let sites = vec![SiteCoupling::from(atom); env.lattice.eta];
        Self::with_sites(env, atom.omega0, &sites)
    }

    pub fn with_sites(env: &CellEnvironment, omega0: f64, sites: &[SiteCoupling]) -> Result<Self> {
        let lat = &env.lattice;
        if sites.len() != lat.eta {
            return Err(Error::InvalidInput(format!(
                "expected {} site couplings, got {}",
                lat.eta,
                sites.len()
            )));
        }
        let d = lat.spin.dim();
        let mut dims = vec![2];
        dims.extend(std::iter::repeat_n(d, lat.eta));
        let dim = check_dim(&dims)?;
        let atom_ops = spin_matrices(SpinMagnitude::HALF);
        let ops = spin_matrices(lat.spin);
        let mut h = CMatrix::zeros(dim, dim);
        let site_idx: Vec<usize> = (1..=lat.eta).collect();
        add_cell(&mut h, &dims, 0, &site_idx, omega0, sites, env, &atom_ops, &ops);
        let single = thermal_state(&bath_operator(env.b, &ops), env.beta)?;
        let bath_state = (1..lat.eta).fold(single.clone(), |acc, _| kron(&acc, &single));
        let spectral = hermitian_spectral(&h)?;
        Ok(FullCellModel {
            eta: lat.eta,
            s: lat.spin,
            dims,
            hamiltonian: h,
            bath_state,
            prop: Propagation { spectral },
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Joint atom-cell state at time `t`.
    pub fn evolve_joint(&self, rho_atom_0: &CMatrix, t: f64) -> CMatrix {
        self.prop.evolve(&kron(rho_atom_0, &self.bath_state), t)
    }
}

/// `tr_cell[U(t) (rho0 ⊗ rho_B) U(t)†]`.
pub fn full_evolve(model: &FullCellModel, rho_atom_0: &CMatrix, t: f64) -> Result<CMatrix> {
    check_density(rho_atom_0, 2)?;
    Ok(partial_trace(&model.evolve_joint(rho_atom_0, t), &model.dims, &[0]))
}

/// Reduced state of the cell alone at time `t`.
pub fn cell_state(model: &FullCellModel, rho_atom_0: &CMatrix, t: f64) -> CMatrix {
    let keep: Vec<usize> = (1..model.dims.len()).collect();
    partial_trace(&model.evolve_joint(rho_atom_0, t), &model.dims, &keep)
}

/// Two atoms, each with its own disjoint cell of `eta` spins.
/// Factor order: atom 1, atom 2, cell 1 sites, cell 2 sites.
#[derive(Debug, Clone)]
pub struct PairModel {
    pub eta: usize,
    pub dims: Vec<usize>,
    pub hamiltonian: CMatrix,
    pub bath_state: CMatrix,
    prop: Propagation,
}

impl PairModel {
    pub fn new(env: &CellEnvironment, atom: &AtomParams) -> Result<Self> {
        let lat = &env.lattice;
        let d = lat.spin.dim();
        let mut dims = vec![2, 2];
        dims.extend(std::iter::repeat_n(d, 2 * lat.eta));
        let dim = check_dim(&dims)?;
        let atom_ops = spin_matrices(SpinMagnitude::HALF);
        let ops = spin_matrices(lat.spin);
        let sites = vec![SiteCoupling::from(atom); lat.eta];
        let first: Vec<usize> = (2..2 + lat.eta).collect();
        let second: Vec<usize> = (2 + lat.eta..2 + 2 * lat.eta).collect();
        let mut h = CMatrix::zeros(dim, dim);
        add_cell(&mut h, &dims, 0, &first, atom.omega0, &sites, env, &atom_ops, &ops);
        add_cell(&mut h, &dims, 1, &second, atom.omega0, &sites, env, &atom_ops, &ops);
        let single = thermal_state(&bath_operator(env.b, &ops), env.beta)?;
        let bath_state = (1..2 * lat.eta).fold(single.clone(), |acc, _| kron(&acc, &single));
        let spectral = hermitian_spectral(&h)?;
        Ok(PairModel {
            eta: lat.eta,
            dims,
            hamiltonian: h,
            bath_state,
            prop: Propagation { spectral },
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }
}

/// Two-atom state at time `t` starting from `(|gg> + |ee>)/√2`.
pub fn pair_evolve(model: &PairModel, t: f64) -> CMatrix {
    let joint = model.prop.evolve(&kron(&bell_phi(), &model.bath_state), t);
    partial_trace(&joint, &model.dims, &[0, 1])
}

/// Magnitude of the order parameter that minimises the free energy along
/// the field direction (along z for `h = 0`): a scan over `n_grid` points of
/// `[0, S]` refined by golden-section search.
pub fn grid_minimize_free_energy(lat: &LatticeSpec, h: FieldVector, t: ThermalPoint, n_grid: usize) -> Result<f64> {
    if n_grid < 41 {
        return Err(Error::InvalidInput(
            "the free-energy scan needs at least 41 points".into(),
        ));
    }
    let hn = h.norm();
    let dir = if hn > 0.0 {
        [h.hx / hn, h.hy / hn, h.hz / hn]
    } else {
        [0.0, 0.0, 1.0]
    };
    let s = lat.spin.value();
    let f = |m: f64| free_energy([m * dir[0], m * dir[1], m * dir[2]], h, t, lat);
    let step = s / (n_grid - 1) as f64;
    let best = (0..n_grid)
        .map(|k| (k, f(k as f64 * step)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut lo = (best as f64 - 1.0).max(0.0) * step;
    let mut hi = ((best + 1) as f64 * step).min(s);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-9 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let m = 0.5 * (lo + hi);
    // the interval ends are candidates too; the golden search only sees the interior
    Ok([0.0, s, m]
        .into_iter()
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .filter(|&e| f(e) < f(m))
        .unwrap_or(m))
}
