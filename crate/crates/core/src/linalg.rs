//! Dense complex linear algebra for the small Hermitian problems in this crate.
//!
//! Every generator here is at most a few hundred states wide, so everything
//! goes through a full spectral decomposition: exponentials, thermal states
//! and square roots are all `V f(E) V†`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Accepted deviation from Hermiticity, relative to `max(1, |m|_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(E) V†`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let w = f(e);
            for r in 0..scaled.nrows() {
                scaled[(r, k)] *= w;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(c)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

pub fn hermitian_spectral(m: &CMatrix) -> Result<SpectralDecomposition> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "spectral decomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let tolerance = HERMITIAN_TOL * max_abs(m).max(1.0);
    let deviation = hermiticity_error(m);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let n = sym.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: sym,
        });
    }
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// `exp(-i t h)`.
pub fn evolve_unitary(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let sd = hermitian_spectral(h)?;
    Ok(sd.map(|e| C64::from_polar(1.0, -e * t)))
}

/// Gibbs state `exp(+beta h) / tr exp(+beta h)`.
///
/// The weight carries a positive exponent: `h` is the bath operator `b·S`
/// and the cell spins align with `b`.
pub fn thermal_state(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    let sd = hermitian_spectral(h)?;
    Ok(thermal_from_spectral(&sd, beta))
}

pub(crate) fn thermal_from_spectral(sd: &SpectralDecomposition, beta: f64) -> CMatrix {
    let shift = sd.max_eigenvalue();
    let z: f64 = sd.eigenvalues.iter().map(|&e| (beta * (e - shift)).exp()).sum();
    sd.map(|e| c((beta * (e - shift)).exp() / z))
}

/// Square root of a positive semidefinite Hermitian matrix; small negative
/// eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let sd = hermitian_spectral(m)?;
    Ok(sd.map(|e| c(e.max(0.0).sqrt())))
}

/// Reduced matrix on the factors listed in `keep` (in ascending order) of a
/// tensor product with local dimensions `dims`.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "partial_trace: dimension mismatch");
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // strides of each factor in the full row-major index
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offset = |sub: usize, factors: &[usize]| -> usize {
        let mut rem = sub;
        let mut idx = 0;
        for &f in factors.iter().rev() {
            idx += (rem % dims[f]) * strides[f];
            rem /= dims[f];
        }
        idx
    };
    let kept_offsets: Vec<usize> = (0..kept_dim).map(|a| offset(a, keep)).collect();
    let traced_offsets: Vec<usize> = (0..traced_dim).map(|a| offset(a, &traced)).collect();

    CMatrix::from_fn(kept_dim, kept_dim, |a, b| {
        traced_offsets
            .iter()
            .map(|&t| m[(kept_offsets[a] + t, kept_offsets[b] + t)])
            .sum()
    })
}

/// `sin(x)/x`, stable at the origin.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sinh(x)/x`, stable at the origin.
pub(crate) fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        // small LCG so the tests do not depend on rand's stream
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let a = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        (&a + a.adjoint()).scale(0.5)
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0), c(-1.0)]));
        let sd = hermitian_spectral(&m).unwrap();
        assert_eq!(sd.eigenvalues, vec![-1.0, 2.0]);
    }

    #[test]
    fn pauli_x_half() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.5), c(0.5), c(0.0)]);
        let sd = hermitian_spectral(&m).unwrap();
        assert!((sd.eigenvalues[0] + 0.5).abs() < 1e-15);
        assert!((sd.eigenvalues[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_17_reconstructs() {
        let m = random_hermitian(17, 7);
        let sd = hermitian_spectral(&m).unwrap();
        assert!(max_abs(&(sd.reconstruct() - &m)) <= 1e-12 * max_abs(&m).max(1.0));
        let vv = sd.eigenvectors.adjoint() * &sd.eigenvectors;
        assert!(max_abs(&(vv - identity(17))) <= 1e-12);
        assert!(sd.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(hermitian_spectral(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn unitary_at_zero_time_is_identity() {
        let h = random_hermitian(5, 3);
        let u = evolve_unitary(&h, 0.0).unwrap();
        assert!(max_abs(&(u - identity(5))) < 1e-14);
    }

    #[test]
    fn diagonal_two_level_evolution() {
        let w = 1.7;
        let t = 0.9;
        let h = CMatrix::from_row_slice(2, 2, &[c(w / 2.0), c(0.0), c(0.0), c(-w / 2.0)]);
        let u = evolve_unitary(&h, t).unwrap();
        assert!((u[(0, 0)] - C64::from_polar(1.0, -w * t / 2.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - C64::from_polar(1.0, w * t / 2.0)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn forward_backward_is_identity() {
        let h = random_hermitian(9, 11);
        let u = evolve_unitary(&h, 2.3).unwrap();
        let v = evolve_unitary(&h, -2.3).unwrap();
        assert!(max_abs(&(u * v - identity(9))) <= 1e-12);
    }

    #[test]
    fn group_property() {
        let h = random_hermitian(6, 5);
        let u1 = evolve_unitary(&h, 0.7).unwrap();
        let u2 = evolve_unitary(&h, 1.9).unwrap();
        let u12 = evolve_unitary(&h, 2.6).unwrap();
        assert!(max_abs(&(u1 * u2 - u12)) <= 1e-11);
    }

    #[test]
    fn thermal_two_level_gibbs() {
        let (b, beta) = (1.3, 0.8);
        let h = CMatrix::from_row_slice(2, 2, &[c(b / 2.0), c(0.0), c(0.0), c(-b / 2.0)]);
        let rho = thermal_state(&h, beta).unwrap();
        let z = 2.0 * (beta * b / 2.0).cosh();
        assert!((rho[(0, 0)].re - (beta * b / 2.0).exp() / z).abs() < 1e-15);
        assert!((rho[(1, 1)].re - (-beta * b / 2.0).exp() / z).abs() < 1e-15);
    }

    #[test]
    fn thermal_high_temperature_is_maximally_mixed() {
        let h = random_hermitian(4, 2);
        let rho = thermal_state(&h, 1e-12).unwrap();
        assert!(max_abs(&(rho - identity(4).scale(0.25))) <= 1e-10);
    }

    #[test]
    fn thermal_unit_trace_and_commutes() {
        for seed in 0..5 {
            let h = random_hermitian(7, seed);
            let rho = thermal_state(&h, 1.4).unwrap();
            assert!((trace(&rho) - c(1.0)).norm() <= 1e-14);
            assert!(max_abs(&(&rho * &h - &h * &rho)) <= 1e-12);
            let sd = hermitian_spectral(&rho).unwrap();
            assert!(sd.eigenvalues[0] > -1e-14);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = random_hermitian(2, 1);
        let b = random_hermitian(3, 2);
        let d = random_hermitian(2, 4);
        let ab = kron(&kron(&a, &b), &d);
        let keep_first = partial_trace(&ab, &[2, 3, 2], &[0]);
        let expected = &a * (trace(&b) * trace(&d));
        assert!(max_abs(&(keep_first - expected)) < 1e-13);
        let keep_outer = partial_trace(&ab, &[2, 3, 2], &[0, 2]);
        let expected = kron(&a, &d) * trace(&b);
        assert!(max_abs(&(keep_outer - expected)) < 1e-13);
    }
}
