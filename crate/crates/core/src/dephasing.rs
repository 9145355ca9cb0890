//! Pure dephasing under longitudinal (Ising) coupling `lambda S0z Σ Siz`.
//!
//! Populations are frozen and the coherence picks up one factor per cell
//! spin: `rho12(t) = rho12(0) exp(-i w0 t) F(t)^eta` with
//! `F(t) = tr[exp(+i t H-) rho_b exp(-i t H+)]`, `H± = b·S ± (lambda/2) Sz`
//! and `rho_b = exp(beta b·S)/tr`. The trace is evaluated spectrally for any
//! lattice spin; the spin-1/2 and spin-1 operator expansions are kept as
//! separate functions for cross-checks.

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_spectral, identity, thermal_from_spectral, CMatrix, C64, I};
use crate::mean_field::CellEnvironment;
use crate::model::{bath_operator, check_grid, norm3, AtomParams, Vec3};
use crate::spin::{spin_matrices, SpinMagnitude};

/// Floor on `|F|` below which the dephasing rate is reported as missing.
pub const RATE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ConditionalHamiltonians {
    pub plus: CMatrix,
    pub minus: CMatrix,
    pub bath: CMatrix,
}

/// `H_b = b·S` and `H± = b·S ± (lambda/2) Sz`.
///
/// With the cell generator `-b·S`, the cell evolves under `-H-` while the
/// atom is excited and under `-H+` while it is in the ground state.
pub fn conditional_hamiltonians(b: Vec3, lambda: f64, s: SpinMagnitude) -> ConditionalHamiltonians {
    let ops = spin_matrices(s);
    let bath = bath_operator(b, &ops);
    let shift = &ops.sz * c(0.5 * lambda);
    ConditionalHamiltonians {
        plus: &bath + &shift,
        minus: &bath - &shift,
        bath,
    }
}

/// `(|b + (lambda/2) z|, |b - (lambda/2) z|)`.
pub fn lambda_pm(b: Vec3, lambda: f64) -> (f64, f64) {
    let up = [b[0], b[1], b[2] + 0.5 * lambda];
    let dn = [b[0], b[1], b[2] - 0.5 * lambda];
    (norm3(up), norm3(dn))
}

/// `Λ±` exactly as printed, `sqrt(Λ² + λ²/4 ± λ(2mΣJ/|h| + 1))`, where the
/// last term lacks the field component that makes it an energy squared.
/// NaN when `h = 0` or the radicand is negative.
pub fn printed_lambda_pm(env: &CellEnvironment, lambda: f64) -> (f64, f64) {
    let hn = env.field.norm();
    let m = env.solution.map(|s| s.m).unwrap_or(0.0);
    let two_m_sj = 2.0 * m * env.lattice.coupling_sum;
    let big = two_m_sj + hn;
    let cross = lambda * (two_m_sj / hn + 1.0);
    let base = big * big + 0.25 * lambda * lambda;
    ((base + cross).sqrt(), (base - cross).sqrt())
}

fn require_ising(atom: &AtomParams) -> Result<()> {
    if !atom.is_ising() {
        return Err(Error::Precondition(
            "dephasing factors need alpha = gamma = 0; use the sector engine in `transitions` \
             (or the full-cell oracle) for transverse couplings"
                .into(),
        ));
    }
    Ok(())
}

/// Per-spin dephasing factor with the spectral data precomputed, so that
/// each time point costs `O(d²)` for `d = 2S + 1`.
#[derive(Debug, Clone)]
pub struct DephasingFactor {
    eta: usize,
    eig_minus: Vec<f64>,
    eig_plus: Vec<f64>,
    /// `(V-† rho_b V+)_{ab} (V+† V-)_{ba}`
    weights: Vec<C64>,
}

impl DephasingFactor {
    pub fn new(env: &CellEnvironment, atom: &AtomParams) -> Result<Self> {
        require_ising(atom)?;
        let hs = conditional_hamiltonians(env.b, atom.lambda, env.lattice.spin);
        let sd_bath = hermitian_spectral(&hs.bath)?;
        let rho_b = thermal_from_spectral(&sd_bath, env.beta);
        let sd_minus = hermitian_spectral(&hs.minus)?;
        let sd_plus = hermitian_spectral(&hs.plus)?;
        let left = sd_minus.eigenvectors.adjoint() * &rho_b * &sd_plus.eigenvectors;
        let overlap = sd_plus.eigenvectors.adjoint() * &sd_minus.eigenvectors;
        let d = left.nrows();
        let mut weights = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                weights.push(left[(a, b)] * overlap[(b, a)]);
            }
        }
        Ok(DephasingFactor {
            eta: env.lattice.eta,
            eig_minus: sd_minus.eigenvalues,
            eig_plus: sd_plus.eigenvalues,
            weights,
        })
    }

    /// `F(t)` for a single cell spin.
    pub fn single(&self, t: f64) -> C64 {
        let d = self.eig_plus.len();
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                let phase = t * (self.eig_minus[a] - self.eig_plus[b]);
                acc += self.weights[a * d + b] * C64::from_polar(1.0, phase);
            }
        }
        acc
    }

    /// `F(t)^eta`.
    pub fn cell(&self, t: f64) -> C64 {
        self.single(t).powu(self.eta as u32)
    }

    /// `eta * ln|F(t)|`, i.e. `ln|F^eta|` without underflow.
    pub fn ln_abs_cell(&self, t: f64) -> f64 {
        self.eta as f64 * self.single(t).norm().ln()
    }

    pub fn eta(&self) -> usize {
        self.eta
    }
}

pub fn dephasing_factor(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<C64> {
    Ok(DephasingFactor::new(env, atom)?.single(t))
}

/// Spin-1/2 operator form:
/// `tr[(cos(tΛ-/2) + (2i/Λ-) sin(tΛ-/2) H-)(cosh(βΛ/2) + (2/Λ) sinh(βΛ/2) H_b)
///     (cos(tΛ+/2) - (2i/Λ+) sin(tΛ+/2) H+)] / (2 cosh(βΛ/2))`
/// with `Λ = |b|` and `Λ±` from [`lambda_pm`].
pub fn spin_half_factor(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<C64> {
    require_ising(atom)?;
    if env.lattice.spin != SpinMagnitude::HALF {
        return Err(Error::Precondition("spin-1/2 closed form needs S = 1/2".into()));
    }
    let hs = conditional_hamiltonians(env.b, atom.lambda, SpinMagnitude::HALF);
    let (lp, lm) = lambda_pm(env.b, atom.lambda);
    let lam = env.b_norm();
    let id = identity(2);
    let half_beta = 0.5 * env.beta * lam;
    // (2/Λ) sin(tΛ/2) = t sinc(tΛ/2), and likewise for sinh
    let left = &id * c((0.5 * t * lm).cos()) + &hs.minus * (I * t * crate::linalg::sinc(0.5 * t * lm));
    let middle = &id * c(half_beta.cosh()) + &hs.bath * c(env.beta * crate::linalg::sinhc(half_beta));
    let right = &id * c((0.5 * t * lp).cos()) - &hs.plus * (I * t * crate::linalg::sinc(0.5 * t * lp));
    Ok((left * middle * right).trace() / c(2.0 * half_beta.cosh()))
}

/// Spin-1 operator expansion transcribed as printed:
/// `tr[(1 + (cos(tΛ-) - 1) H-/Λ- + i sin(tΛ-) H-²/Λ-²)
///     (1 + (cosh(βΛ) - 1) H_b/Λ + sinh(βΛ) H_b²/Λ²)
///     (1 + (cos(tΛ+) - 1) H+/Λ+ - i sin(tΛ+) H+²/Λ+²)] / (1 + 2 cosh(βΛ))`.
///
/// The powers of `H` sit on the wrong trigonometric factors compared with
/// `exp(iθH) = 1 + i sin(θΛ) H/Λ + (cos(θΛ) - 1) H²/Λ²`, so this does not
/// reproduce [`DephasingFactor`]; the verify report quantifies the gap.
pub fn printed_spin_one_factor(t: f64, env: &CellEnvironment, atom: &AtomParams) -> Result<C64> {
    require_ising(atom)?;
    if env.lattice.spin != SpinMagnitude::ONE {
        return Err(Error::Precondition("spin-1 expansion needs S = 1".into()));
    }
    let hs = conditional_hamiltonians(env.b, atom.lambda, SpinMagnitude::ONE);
    let (lp, lm) = lambda_pm(env.b, atom.lambda);
    let lam = env.b_norm();
    let id = identity(3);
    let bl = env.beta * lam;
    let h2 = |h: &CMatrix| h * h;
    let left = &id + &hs.minus * c(((t * lm).cos() - 1.0) / lm) + h2(&hs.minus) * (I * (t * lm).sin() / (lm * lm));
    let middle = &id + &hs.bath * c((bl.cosh() - 1.0) / lam) + h2(&hs.bath) * c(bl.sinh() / (lam * lam));
    let right = &id + &hs.plus * c(((t * lp).cos() - 1.0) / lp) - h2(&hs.plus) * (I * (t * lp).sin() / (lp * lp));
    Ok((left * middle * right).trace() / c(1.0 + 2.0 * bl.cosh()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingResult {
    pub times: Vec<f64>,
    /// Per-spin factor `F(t)`.
    pub f_values: Vec<C64>,
    /// `F(t)^eta`.
    pub f_eta: Vec<C64>,
    /// `rho12(t) = <e|rho(t)|g>`.
    pub coherence: Vec<C64>,
    /// Bloch vector `(r1, r2, r3)`.
    pub bloch: Vec<[f64; 3]>,
    /// Dephasing rate; `None` where `|F|` is below [`RATE_FLOOR`].
    pub kappa: Vec<Option<f64>>,
}

fn rate_at(factor: &DephasingFactor, t: f64, step: f64) -> Option<f64> {
    let floor = RATE_FLOOR.ln();
    let here = factor.single(t).norm().ln();
    let up = factor.single(t + step).norm().ln();
    let dn = factor.single(t - step).norm().ln();
    if here < floor || up < floor || dn < floor {
        return None;
    }
    let eta = factor.eta() as f64;
    Some(-eta * (up - dn) / (2.0 * step))
}

fn grid_steps(grid: &[f64]) -> Vec<f64> {
    (0..grid.len())
        .map(|k| {
            if k + 1 < grid.len() {
                grid[k + 1] - grid[k]
            } else if k > 0 {
                grid[k] - grid[k - 1]
            } else {
                1e-3
            }
        })
        .collect()
}

/// `kappa(t) = -d ln|F^eta| / dt` by central differences whose step is the
/// local grid spacing.
pub fn dephasing_rate(grid: &[f64], env: &CellEnvironment, atom: &AtomParams) -> Result<Vec<Option<f64>>> {
    check_grid(grid)?;
    let factor = DephasingFactor::new(env, atom)?;
    Ok(grid
        .iter()
        .zip(grid_steps(grid))
        .map(|(&t, step)| rate_at(&factor, t, step))
        .collect())
}

/// Coherence, Bloch vector and dephasing rate along `grid` for the initial
/// atom state `rho0` (2x2, excited state first).
pub fn coherence_series(
    grid: &[f64],
    rho0: &CMatrix,
    env: &CellEnvironment,
    atom: &AtomParams,
) -> Result<DephasingResult> {
    check_grid(grid)?;
    if rho0.nrows() != 2 || rho0.ncols() != 2 {
        return Err(Error::InvalidInput("initial atom state must be 2x2".into()));
    }
    let factor = DephasingFactor::new(env, atom)?;
    let rho12_0 = rho0[(0, 1)];
    let r3 = (rho0[(0, 0)] - rho0[(1, 1)]).re;
    let n = grid.len();
    let mut out = DephasingResult {
        times: grid.to_vec(),
        f_values: Vec::with_capacity(n),
        f_eta: Vec::with_capacity(n),
        coherence: Vec::with_capacity(n),
        bloch: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
    };
    for (&t, step) in grid.iter().zip(grid_steps(grid)) {
        let f = factor.single(t);
        let fe = f.powu(factor.eta() as u32);
        let rho12 = rho12_0 * C64::from_polar(1.0, -atom.omega0 * t) * fe;
        out.f_values.push(f);
        out.f_eta.push(fe);
        out.coherence.push(rho12);
        out.bloch.push([2.0 * rho12.re, -2.0 * rho12.im, r3]);
        out.kappa.push(rate_at(&factor, t, step));
    }
    Ok(out)
}
