//! Parameter types shared by every module, and the sign conventions.
//!
//! Units throughout: `J = k_B = hbar = 1`. Temperatures and fields are in
//! units of `J`, times in units of `1/J`.
//!
//! Conventions, fixed here and nowhere else:
//!
//! * atom basis index 0 is the excited state `|e>`, index 1 the ground state
//!   `|g>`, so `S0z = diag(1/2, -1/2)` and `rho12 = <e|rho|g>`;
//! * a cell spin evolves under `-b·S` (the mean-field molecular field lowers
//!   the energy of spins aligned with `b`);
//! * the cell starts in `exp(+beta b·S)/tr`, i.e. the Gibbs state of that
//!   generator.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spin::{SpinMagnitude, SpinOperatorSet};

pub type Vec3 = [f64; 3];

pub const EXCITED: usize = 0;
pub const GROUND: usize = 1;

pub(crate) fn norm3(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Operator whose exponential `exp(+beta H_b)` weights the cell: `H_b = b·S`.
pub fn bath_operator(b: Vec3, ops: &SpinOperatorSet) -> CMatrix {
    ops.dot(b)
}

/// Free generator of one cell spin, `-b·S`.
pub fn cell_generator(b: Vec3, ops: &SpinOperatorSet) -> CMatrix {
    -ops.dot(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    /// Sum of the exchange couplings over neighbour vectors (6 for the
    /// nearest-neighbour simple cubic lattice).
    pub coupling_sum: f64,
    /// Number of lattice spins in the atom's cell.
    pub eta: usize,
    pub spin: SpinMagnitude,
}

impl LatticeSpec {
    pub fn new(coupling_sum: f64, eta: usize, spin: SpinMagnitude) -> Result<Self> {
        if !(coupling_sum.is_finite() && coupling_sum > 0.0) {
            return Err(Error::InvalidInput(format!(
                "coupling sum must be positive, got {coupling_sum}"
            )));
        }
        if eta == 0 {
            return Err(Error::InvalidInput("cell size must be at least 1".into()));
        }
        if spin.twice() == 0 {
            return Err(Error::InvalidInput("lattice spin must be positive".into()));
        }
        Ok(LatticeSpec {
            coupling_sum,
            eta,
            spin,
        })
    }

    pub fn simple_cubic(spin: SpinMagnitude) -> Self {
        LatticeSpec {
            coupling_sum: 6.0,
            eta: 8,
            spin,
        }
    }

    pub fn with_eta(self, eta: usize) -> Result<Self> {
        Self::new(self.coupling_sum, eta, self.spin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldVector {
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl FieldVector {
    pub const fn new(hx: f64, hy: f64, hz: f64) -> Self {
        FieldVector { hx, hy, hz }
    }

    pub const fn zero() -> Self {
        FieldVector::new(0.0, 0.0, 0.0)
    }

    pub fn along_z(hz: f64) -> Self {
        FieldVector::new(0.0, 0.0, hz)
    }

    pub fn along_x(hx: f64) -> Self {
        FieldVector::new(hx, 0.0, 0.0)
    }

    pub fn to_array(self) -> Vec3 {
        [self.hx, self.hy, self.hz]
    }

    pub fn norm(self) -> f64 {
        norm3(self.to_array())
    }

    pub fn is_finite(self) -> bool {
        self.hx.is_finite() && self.hy.is_finite() && self.hz.is_finite()
    }
}

impl From<Vec3> for FieldVector {
    fn from(v: Vec3) -> Self {
        FieldVector::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    temperature: f64,
}

impl ThermalPoint {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(Error::InvalidInput(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        Ok(ThermalPoint { temperature })
    }

    pub fn temperature(self) -> f64 {
        self.temperature
    }

    pub fn beta(self) -> f64 {
        1.0 / self.temperature
    }
}

/// Transition energy of the atom and its couplings to each cell spin
/// (`alpha Sx Sx + gamma Sy Sy + lambda Sz Sz`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    pub omega0: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl AtomParams {
    pub fn new(omega0: f64, alpha: f64, gamma: f64, lambda: f64) -> Self {
        AtomParams {
            omega0,
            alpha,
            gamma,
            lambda,
        }
    }

    /// Longitudinal coupling only.
    pub fn ising(omega0: f64, lambda: f64) -> Self {
        AtomParams::new(omega0, 0.0, 0.0, lambda)
    }

    pub fn isotropic(omega0: f64, coupling: f64) -> Self {
        AtomParams::new(omega0, coupling, coupling, coupling)
    }

    pub fn is_ising(&self) -> bool {
        self.alpha == 0.0 && self.gamma == 0.0
    }

    pub fn is_isotropic(&self) -> bool {
        let scale = self.alpha.abs().max(1.0);
        (self.alpha - self.gamma).abs() <= 1e-12 * scale && (self.alpha - self.lambda).abs() <= 1e-12 * scale
    }

    pub fn is_finite(&self) -> bool {
        [self.omega0, self.alpha, self.gamma, self.lambda]
            .iter()
            .all(|x| x.is_finite())
    }
}

/// `n` evenly spaced times on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("time grid is empty".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}
