//! Self-consistent order parameter of the mean-field lattice.
//!
//! Each lattice spin sees the molecular field `b = 2 m ΣJ + h`, so the
//! single-spin partition function is `sinh((2S+1)y/2) / sinh(y/2)` with
//! `y = beta |b|`. Its log-derivative gives the magnitude of the thermal
//! spin, and the order parameter is the fixed point `m = (b/|b|) B(beta |b|)`.

use crate::error::{Error, Result};
use crate::model::{cross3, norm3, FieldVector, LatticeSpec, ThermalPoint, Vec3};
use crate::spin::SpinMagnitude;

/// Below this value of `beta*Lambda` the Brillouin-type function is evaluated
/// from its Taylor series.
pub const SERIES_CROSSOVER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            damping: 0.5,
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution {
    pub m_vec: Vec3,
    pub m: f64,
    /// `|2 m_vec ΣJ + h|`.
    pub lambda_norm: f64,
    pub beta: f64,
    /// `|m_vec - (b/|b|) B(beta |b|)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Langevin function `coth(x) - 1/x`.
fn langevin(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * 2.0 / 93555.0))))
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}

/// Thermal spin magnitude `(S+1/2) coth((S+1/2) y) - (1/2) coth(y/2)`,
/// `y = beta * lambda_norm`.
pub fn gap_rhs(lambda_norm: f64, beta: f64, s: SpinMagnitude) -> f64 {
    let y = beta * lambda_norm;
    let sv = s.value();
    let g = sv + 0.5;
    if y < SERIES_CROSSOVER {
        let y2 = y * y;
        let g2 = g * g;
        let c1 = (g2 - 0.25) / 3.0;
        let c3 = (g2 * g2 - 1.0 / 16.0) / 45.0;
        let c5 = 2.0 * (g2 * g2 * g2 - 1.0 / 64.0) / 945.0;
        return y * (c1 - y2 * (c3 - y2 * c5));
    }
    if y < 1.0 {
        // the 1/y poles of the two coth terms cancel exactly
        (g * langevin(g * y) - 0.5 * langevin(0.5 * y)).clamp(0.0, sv)
    } else {
        // coth(x) = 1 + 2/(e^{2x} - 1): saturation written as S minus a tail
        (sv + 2.0 * g / (2.0 * g * y).exp_m1() - 1.0 / y.exp_m1()).clamp(0.0, sv)
    }
}

/// The self-consistency right-hand side transcribed term by term from the
/// printed vector gap equations. Kept for the verify report only.
pub fn printed_gap_rhs(lambda_norm: f64, beta: f64, s: SpinMagnitude) -> f64 {
    let sv = s.value();
    let l = lambda_norm;
    let half = 0.5 * beta;
    let bracket = sv * (beta * l * sv).cosh() - (1.0 / (half * l).tanh()) * (half * sv * l).sinh();
    let num =
        (half * (sv + 1.0) * l).cosh() * bracket + (1.0 + sv) * (half * sv * l).sinh() * (half * (sv + 1.0) * l).sinh();
    num / (half * (1.0 + 2.0 * sv) * l).sinh()
}

/// `ln[ sinh((2S+1) y/2) / sinh(y/2) ]`, the log of one spin's partition sum.
pub fn ln_spin_partition(y: f64, s: SpinMagnitude) -> f64 {
    let y = y.abs();
    if y < SERIES_CROSSOVER {
        return (s.dim() as f64).ln() + s.casimir() * y * y / 6.0;
    }
    ln_sinh(0.5 * (2.0 * s.value() + 1.0) * y) - ln_sinh(0.5 * y)
}

fn ln_sinh(x: f64) -> f64 {
    if x > 1.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

pub fn curie_temperature(lat: &LatticeSpec) -> f64 {
    2.0 * lat.spin.casimir() * lat.coupling_sum / 3.0
}

/// Temperature at which the zero-field gap equation stops admitting a
/// nonzero root, located by bisection on the sign of `B(2 m0 ΣJ / T) - m0`
/// at a small trial magnitude `m0`. Independent of [`curie_temperature`].
pub fn onset_temperature(lat: &LatticeSpec) -> f64 {
    let m0 = 1e-4 * lat.spin.value();
    let ordered = |t: f64| gap_rhs(2.0 * m0 * lat.coupling_sum, 1.0 / t, lat.spin) > m0;
    let mut lo = 1e-3 * lat.coupling_sum;
    let mut hi = lat.coupling_sum;
    while ordered(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ordered(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn molecular_field(m_vec: Vec3, h: Vec3, coupling_sum: f64) -> Vec3 {
    [
        2.0 * coupling_sum * m_vec[0] + h[0],
        2.0 * coupling_sum * m_vec[1] + h[1],
        2.0 * coupling_sum * m_vec[2] + h[2],
    ]
}

/// Undamped image of `m_vec` under the gap map.
fn gap_map(m_vec: Vec3, h: Vec3, beta: f64, lat: &LatticeSpec) -> (Vec3, f64) {
    let b = molecular_field(m_vec, h, lat.coupling_sum);
    let lam = norm3(b);
    if lam == 0.0 {
        return ([0.0; 3], 0.0);
    }
    let mag = gap_rhs(lam, beta, lat.spin) / lam;
    ([b[0] * mag, b[1] * mag, b[2] * mag], lam)
}

/// Damped fixed-point iteration of the vector gap equation.
///
/// The zero-field ordered branch is taken along `+z`. For `h = 0` at or above
/// the Curie temperature the paramagnetic root `m = 0` is returned directly.
pub fn solve_gap(lat: &LatticeSpec, h: FieldVector, t: ThermalPoint, opts: SolverOptions) -> Result<MeanFieldSolution> {
    if !h.is_finite() {
        return Err(Error::InvalidInput("field components must be finite".into()));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) || !(opts.tolerance > 0.0) {
        return Err(Error::InvalidInput(
            "damping must lie in (0, 1] and tolerance must be positive".into(),
        ));
    }
    let beta = t.beta();
    let hv = h.to_array();
    let hn = h.norm();
    let s = lat.spin.value();

    if hn == 0.0 && t.temperature() >= curie_temperature(lat) {
        return Ok(MeanFieldSolution {
            m_vec: [0.0; 3],
            m: 0.0,
            lambda_norm: 0.0,
            beta,
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let mut m_vec = if hn > 0.0 {
        [s * hv[0] / hn, s * hv[1] / hn, s * hv[2] / hn]
    } else {
        [0.0, 0.0, s]
    };
    let d = opts.damping;
    let mut residual = f64::INFINITY;
    for it in 0..=opts.max_iterations {
        let (target, lam) = gap_map(m_vec, hv, beta, lat);
        residual = norm3([target[0] - m_vec[0], target[1] - m_vec[1], target[2] - m_vec[2]]);
        if residual <= opts.tolerance {
            return Ok(MeanFieldSolution {
                m_vec,
                m: norm3(m_vec),
                lambda_norm: lam,
                beta,
                residual,
                iterations: it,
                converged: true,
            });
        }
        for k in 0..3 {
            m_vec[k] = (1.0 - d) * m_vec[k] + d * target[k];
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Free energy per spin, `ΣJ m² - T ln[sinh((2S+1)βΛ/2)/sinh(βΛ/2)]`.
pub fn free_energy(m_vec: Vec3, h: FieldVector, t: ThermalPoint, lat: &LatticeSpec) -> f64 {
    let b = molecular_field(m_vec, h.to_array(), lat.coupling_sum);
    let y = t.beta() * norm3(b);
    let m2 = m_vec.iter().map(|x| x * x).sum::<f64>();
    lat.coupling_sum * m2 - t.temperature() * ln_spin_partition(y, lat.spin)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveField {
    pub b: Vec3,
    /// Set when both the order parameter and the applied field vanish, so
    /// the cell spins evolve freely.
    pub free: bool,
}

impl EffectiveField {
    pub fn norm(&self) -> f64 {
        norm3(self.b)
    }
}

/// Molecular field `b = 2 m_vec ΣJ + h` seen by every cell spin.
pub fn effective_field(sol: &MeanFieldSolution, h: FieldVector, lat: &LatticeSpec) -> EffectiveField {
    let b = molecular_field(sol.m_vec, h.to_array(), lat.coupling_sum);
    EffectiveField {
        b,
        free: sol.m == 0.0 && h.norm() == 0.0,
    }
}

/// Partition function of the atom's cell, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPartition {
    /// `-beta * eta * ΣJ * m²`
    pub ln_prefactor: f64,
    /// `eta * ln[sinh((2S+1)βΛ/2)/sinh(βΛ/2)]`, the bath-trace normaliser.
    pub ln_bracket: f64,
}

impl CellPartition {
    pub fn bracket(&self) -> f64 {
        self.ln_bracket.exp()
    }

    pub fn value(&self) -> f64 {
        (self.ln_prefactor + self.ln_bracket).exp()
    }
}

pub fn cell_partition(sol: &MeanFieldSolution, h: FieldVector, t: ThermalPoint, lat: &LatticeSpec) -> CellPartition {
    let b = effective_field(sol, h, lat);
    let y = t.beta() * b.norm();
    CellPartition {
        ln_prefactor: -t.beta() * lat.eta as f64 * lat.coupling_sum * sol.m * sol.m,
        ln_bracket: lat.eta as f64 * ln_spin_partition(y, lat.spin),
    }
}

/// Single-spin bracket in the printed form
/// `1 + 2 cosh(β(S+1)Λ/2) sinh(βSΛ/2) / sinh(βΛ/2)`.
pub fn printed_spin_bracket(lambda_norm: f64, beta: f64, s: SpinMagnitude) -> f64 {
    let sv = s.value();
    let x = 0.5 * beta * lambda_norm;
    if x == 0.0 {
        return s.dim() as f64;
    }
    1.0 + 2.0 * ((sv + 1.0) * x).cosh() * (sv * x).sinh() / x.sinh()
}

/// Everything the reduced dynamics needs about the cell: its size and spin,
/// the inverse temperature and the molecular field `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellEnvironment {
    pub lattice: LatticeSpec,
    pub beta: f64,
    pub b: Vec3,
    pub field: FieldVector,
    pub solution: Option<MeanFieldSolution>,
}

impl CellEnvironment {
    /// Solves the gap equation with default options and builds the cell's
    /// molecular field.
    pub fn resolve(lat: LatticeSpec, h: FieldVector, t: ThermalPoint) -> Result<Self> {
        let sol = solve_gap(&lat, h, t, SolverOptions::default())?;
        let b = effective_field(&sol, h, &lat).b;
        Ok(CellEnvironment {
            lattice: lat,
            beta: t.beta(),
            b,
            field: h,
            solution: Some(sol),
        })
    }

    /// A cell in a prescribed molecular field, bypassing the gap equation.
    pub fn with_field(lat: LatticeSpec, beta: f64, b: Vec3) -> Self {
        CellEnvironment {
            lattice: lat,
            beta,
            b,
            field: FieldVector::from(b),
            solution: None,
        }
    }

    pub fn b_norm(&self) -> f64 {
        norm3(self.b)
    }

    /// True when `b` has no component outside the given axis (0, 1, 2).
    pub fn b_along(&self, axis: usize) -> bool {
        let scale = self.b_norm().max(1.0);
        (0..3).filter(|&k| k != axis).all(|k| self.b[k].abs() <= 1e-12 * scale)
    }
}

/// `|m_vec × b|`, which vanishes at a converged point.
pub fn alignment_error(sol: &MeanFieldSolution, h: FieldVector, lat: &LatticeSpec) -> f64 {
    norm3(cross3(sol.m_vec, effective_field(sol, h, lat).b))
}
