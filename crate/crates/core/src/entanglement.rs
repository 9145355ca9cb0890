//! Two atoms in separate, non-adjacent cells.
//!
//! Each atom sees only its own cell, so the pair evolves under `E_t ⊗ E_t`
//! with `E_t` the single-atom channel from [`crate::transitions`]. The pair
//! starts in `(|gg> + |ee>)/√2`; entanglement is measured by the Wootters
//! concurrence.

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_spectral, kron, psd_sqrt, sinc, CMatrix, C64, I};
use crate::mean_field::CellEnvironment;
use crate::model::{check_grid, AtomParams};
use crate::transitions::{
    channel_tomography, coherence_factor_z, discriminant, levels, psi_factor, AtomChannel, SectorSet,
};

/// Concurrence at or below this value counts as zero.
pub const DEATH_THRESHOLD: f64 = 1e-12;
/// Concurrence above this value after a death interval counts as revival.
pub const REVIVAL_THRESHOLD: f64 = 0.01;

/// Two-atom state in the basis `{|ee>, |eg>, |ge>, |gg>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub t: f64,
    pub rho4: CMatrix,
}

impl PairState {
    pub fn concurrence(&self) -> Result<f64> {
        concurrence(&self.rho4)
    }
}

pub fn bell_phi() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (r, s) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, s)] = c(0.5);
    }
    m
}

/// `(E1 ⊗ E2)(rho4)`.
pub fn apply_product(first: &AtomChannel, second: &AtomChannel, rho4: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            let left = first.image(a, b);
            for cc in 0..2 {
                for d in 0..2 {
                    let coef = rho4[(2 * a + cc, 2 * b + d)];
                    if coef != C64::new(0.0, 0.0) {
                        out += kron(&left, &second.image(cc, d)) * coef;
                    }
                }
            }
        }
    }
    out
}

pub fn pair_state(channel: &AtomChannel) -> PairState {
    PairState {
        t: channel.t,
        rho4: apply_product(channel, channel, &bell_phi()),
    }
}

fn sigma_yy() -> CMatrix {
    let sy = CMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)]);
    kron(&sy, &sy)
}

/// Wootters concurrence `max(0, √ν1 - √ν2 - √ν3 - √ν4)`, with `ν` the
/// eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)` obtained from the Hermitian
/// matrix `√ρ (σy⊗σy) ρ* (σy⊗σy) √ρ`.
pub fn concurrence(rho4: &CMatrix) -> Result<f64> {
    if rho4.nrows() != 4 || rho4.ncols() != 4 {
        return Err(Error::InvalidInput("concurrence needs a 4x4 state".into()));
    }
    let root = psd_sqrt(rho4)?;
    let yy = sigma_yy();
    let flipped = &yy * rho4.map(|z| z.conj()) * &yy;
    let r = &root * flipped * &root;
    let r = (&r + r.adjoint()) * c(0.5);
    let mut nu: Vec<f64> = hermitian_spectral(&r)?
        .eigenvalues
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    nu.sort_by(|a, b| b.total_cmp(a));
    Ok((nu[0] - nu[1] - nu[2] - nu[3]).clamp(0.0, 1.0))
}

/// Maximal run of grid nodes with zero concurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeathInterval {
    pub start: f64,
    pub end: f64,
    /// First time after `end` where the concurrence exceeds
    /// [`REVIVAL_THRESHOLD`].
    pub revival: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSeries {
    pub grid: Vec<f64>,
    pub c: Vec<f64>,
    pub death_intervals: Vec<DeathInterval>,
}

impl ConcurrenceSeries {
    pub fn has_death_and_revival(&self) -> bool {
        self.death_intervals.iter().any(|d| d.revival.is_some())
    }
}

/// Runs of at least two consecutive nodes with `c <= DEATH_THRESHOLD`.
pub fn detect_death_revival(grid: &[f64], values: &[f64]) -> Vec<DeathInterval> {
    let mut out = Vec::new();
    let n = grid.len().min(values.len());
    let mut k = 0;
    while k < n {
        if values[k] > DEATH_THRESHOLD {
            k += 1;
            continue;
        }
        let first = k;
        while k < n && values[k] <= DEATH_THRESHOLD {
            k += 1;
        }
        if k - first >= 2 {
            let revival = (k..n).find(|&i| values[i] > REVIVAL_THRESHOLD).map(|i| grid[i]);
            out.push(DeathInterval {
                start: grid[first],
                end: grid[k - 1],
                revival,
            });
        }
    }
    out
}

pub fn concurrence_series(grid: &[f64], sectors: &SectorSet) -> Result<ConcurrenceSeries> {
    check_grid(grid)?;
    let values = grid
        .iter()
        .map(|&t| pair_state(&channel_tomography(t, sectors)).concurrence())
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConcurrenceSeries {
        death_intervals: detect_death_revival(grid, &values),
        grid: grid.to_vec(),
        c: values,
    })
}

/// Which version of the closed-form pair expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transcription {
    /// As printed: the `d²/M` term of `Ξ±` enters with a minus sign and its
    /// numerator omits `w0`.
    Printed,
    /// Rederived from the two-level Rabi problem of each `(j, l)` level.
    Corrected,
}

fn xi_along(t: f64, env: &CellEnvironment, atom: &AtomParams, field: f64, form: Transcription) -> (f64, f64) {
    let mut sum_plus = 0.0;
    let mut sum_minus = 0.0;
    for lv in levels(env, field) {
        let md = discriminant(lv.j, lv.l, field, atom.omega0, atom.alpha);
        let term = |d: f64, bare: f64, m: f64| {
            let half = 0.5 * t * m.sqrt();
            let cos2 = half.cos().powi(2);
            let s = 0.5 * t * sinc(half);
            match form {
                Transcription::Corrected => cos2 + d * d * s * s,
                Transcription::Printed => cos2 - bare * bare * s * s,
            }
        };
        sum_plus += lv.p * term(md.d_plus, md.d_plus - atom.omega0, md.m_plus);
        sum_minus += lv.p * term(md.d_minus, md.d_minus - atom.omega0, md.m_minus);
    }
    (-1.0 + 2.0 * sum_plus, 1.0 - 2.0 * sum_minus)
}

fn require_z(env: &CellEnvironment, atom: &AtomParams) -> Result<f64> {
    if !atom.is_isotropic() {
        return Err(Error::Precondition("closed pair forms need isotropic coupling".into()));
    }
    if !env.b_along(2) {
        return Err(Error::Precondition("this closed form needs the field along z".into()));
    }
    Ok(env.b[2])
}

/// `(Ξ+, Ξ-)` for a field along z. In the corrected form `Ξ+` is `<σz>` of
/// an atom started in `|e>` and `Ξ-` that of an atom started in `|g>`.
pub fn xi_factors(t: f64, env: &CellEnvironment, atom: &AtomParams, form: Transcription) -> Result<(f64, f64)> {
    let field = require_z(env, atom)?;
    Ok(xi_along(t, env, atom, field, form))
}

/// Pair state from closed forms with the field along z.
///
/// `Printed` fills the printed layout (diagonal `1/4 + Ξ+²/4`,
/// `1/4 + Ξ+Ξ-/4`, `1/4 + Ξ+Ξ-/4`, `1/4 + Ξ-²/4`, corners `G²/2`), whose
/// trace is `1 + (Ξ+ + Ξ-)²/4`. `Corrected` is the exact phase-covariant
/// result with `a = (1+Ξ+)/2`, `c = (1+Ξ-)/2`.
pub fn closed_form_pair_z(t: f64, env: &CellEnvironment, atom: &AtomParams, form: Transcription) -> Result<PairState> {
    let field = require_z(env, atom)?;
    let (xp, xm) = xi_along(t, env, atom, field, form);
    let g = coherence_factor_z(t, env, atom)?;
    let mut rho = CMatrix::zeros(4, 4);
    match form {
        Transcription::Printed => {
            rho[(0, 0)] = c(0.25 + 0.25 * xp * xp);
            rho[(1, 1)] = c(0.25 + 0.25 * xp * xm);
            rho[(2, 2)] = c(0.25 + 0.25 * xp * xm);
            rho[(3, 3)] = c(0.25 + 0.25 * xm * xm);
        }
        Transcription::Corrected => {
            let a = 0.5 * (1.0 + xp);
            let cc = 0.5 * (1.0 + xm);
            let mixed = 0.5 * (a * (1.0 - a) + cc * (1.0 - cc));
            rho[(0, 0)] = c(0.5 * (a * a + cc * cc));
            rho[(1, 1)] = c(mixed);
            rho[(2, 2)] = c(mixed);
            rho[(3, 3)] = c(0.5 * ((1.0 - a).powi(2) + (1.0 - cc).powi(2)));
        }
    }
    rho[(0, 3)] = g * g * 0.5;
    rho[(3, 0)] = (g * g).conj() * 0.5;
    Ok(PairState { t, rho4: rho })
}

/// The printed pair state for a field along x with `w0 = 0`, built from
/// `Psi`, `Ξ±` (with the x component of the field) and `Δ = Ξ+² - Ξ-²`.
/// `Re Psi²` and `Im Psi²` are read as parts of `Psi²`.
pub fn closed_form_pair_x(t: f64, env: &CellEnvironment, atom: &AtomParams, form: Transcription) -> Result<PairState> {
    if !env.b_along(0) {
        return Err(Error::Precondition("this closed form needs the field along x".into()));
    }
    let psi = psi_factor(t, env, atom)?;
    let (xp, xm) = xi_along(t, env, atom, env.b[0], form);
    let p2 = psi * psi;
    let delta = xp * xp - xm * xm;
    let xx = xp * xp * xm * xm;
    let lo = C64::new(delta, -4.0 * p2.im) / 16.0;
    let hi = lo.conj();
    let d_out = c(0.25 * (1.0 + p2.re));
    let d_in = c(0.25 * (1.0 - p2.re));
    let outer = c(0.25 * (xx + p2.re));
    let inner = c(0.25 * (xx - p2.re));
    #[rustfmt::skip]
    let rho = CMatrix::from_row_slice(4, 4, &[
        d_out, lo,    lo,    outer,
        hi,    d_in,  inner, hi,
        hi,    inner, d_in,  hi,
        outer, lo,    lo,    d_out,
    ]);
    Ok(PairState { t, rho4: rho })
}
