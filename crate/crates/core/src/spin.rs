//! Spin matrices and the multiplet counting of the unit cell.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};

/// A spin quantum number stored as `2S` so that half-integers stay exact.
///
/// Zero is representable because collective sectors include `j = 0`; lattice
/// spins are required to be positive where they enter a [`LatticeSpec`].
///
/// [`LatticeSpec`]: crate::model::LatticeSpec
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinMagnitude {
    twice: u32,
}

impl SpinMagnitude {
    pub const ZERO: SpinMagnitude = SpinMagnitude { twice: 0 };
    pub const HALF: SpinMagnitude = SpinMagnitude { twice: 1 };
    pub const ONE: SpinMagnitude = SpinMagnitude { twice: 2 };
    pub const THREE_HALVES: SpinMagnitude = SpinMagnitude { twice: 3 };

    pub const fn from_twice(twice: u32) -> Self {
        SpinMagnitude { twice }
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `2S + 1`.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    pub const fn is_half_integer(self) -> bool {
        self.twice % 2 == 1
    }

    /// `S(S+1)`.
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }
}

impl fmt::Display for SpinMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_integer() {
            write!(f, "{}/2", self.twice)
        } else {
            write!(f, "{}", self.twice / 2)
        }
    }
}

impl FromStr for SpinMagnitude {
    type Err = Error;

    /// Accepts `1/2`, `3/2`, `1`, `0.5`, `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("not a spin magnitude: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            let den: u32 = den.trim().parse().map_err(|_| bad())?;
            return match den {
                1 => Ok(Self::from_twice(2 * num)),
                2 => Ok(Self::from_twice(num)),
                _ => Err(bad()),
            };
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        let twice = 2.0 * x;
        if !(0.0..=1e6).contains(&twice) || (twice - twice.round()).abs() > 1e-9 {
            return Err(bad());
        }
        Ok(Self::from_twice(twice.round() as u32))
    }
}

/// The three spin component matrices in the basis `m = S, S-1, ..., -S`.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl SpinOperatorSet {
    pub fn dimension(&self) -> usize {
        self.sz.nrows()
    }

    /// `v·S` for a real 3-vector.
    pub fn dot(&self, v: [f64; 3]) -> CMatrix {
        &self.sx * c(v[0]) + &self.sy * c(v[1]) + &self.sz * c(v[2])
    }

    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }
}

pub fn spin_matrices(s: SpinMagnitude) -> SpinOperatorSet {
    let n = s.dim();
    let sv = s.value();
    let mut raise = CMatrix::zeros(n, n);
    // row k holds m = S - k; S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>
    for k in 1..n {
        let m = sv - k as f64;
        raise[(k - 1, k)] = c((sv * (sv + 1.0) - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let sx = (&raise + &lower).scale(0.5);
    let sy = (&raise - &lower) * C64::new(0.0, -0.5);
    let sz = CMatrix::from_fn(n, n, |r, col| if r == col { c(sv - r as f64) } else { c(0.0) });
    SpinOperatorSet { sx, sy, sz }
}

/// Total spins `j` reachable by coupling `eta` copies of spin `s`, from
/// `eta*s` down to 0 or 1/2.
pub fn sector_spins(eta: usize, s: SpinMagnitude) -> Vec<SpinMagnitude> {
    let top = eta as u32 * s.twice();
    (0..=top).rev().step_by(2).map(SpinMagnitude::from_twice).collect()
}

fn admissible(j: SpinMagnitude, eta: usize, s: SpinMagnitude) -> bool {
    let top = eta as u32 * s.twice();
    j.twice() <= top && (top - j.twice()).is_multiple_of(2)
}

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// Evaluates the closed-form multinomial sum for the number of spin-`j`
/// multiplets in the `eta`-fold product of spin `s`.
///
/// The sum runs over the occupations `L_k` (each `0..=eta`) of the levels
/// `m = -S+k`, `k = 2..=2S`. The remaining spins sit in the two lowest levels
/// with counts `a` and `b`, and each term is
/// `eta!/prod(L_k!) * (b + 1 - a) / ((b+1)! a!)` with `1/n! = 0` for `n < 0`.
/// Returns 0 when `j` and `eta*s` differ in parity or `j > eta*s`.
pub fn multiplicity(j: SpinMagnitude, eta: usize, s: SpinMagnitude) -> u64 {
    let total = deg_sum(j, eta, s, false);
    debug_assert!(total.1 == 0, "multiplicity sum not divisible");
    total.0 as u64
}

/// The same multinomial sum read with the ratio and the factorial bracket
/// kept apart, so that terms with `b = -1` (where `1/b!` vanishes but the
/// ratio divides by zero) are dropped. Used by the verify report.
pub fn multiplicity_split_reading(j: SpinMagnitude, eta: usize, s: SpinMagnitude) -> f64 {
    let (q, r) = deg_sum(j, eta, s, true);
    q as f64 + r as f64 / (eta as f64 + 1.0)
}

/// Returns the sum as quotient and remainder of division by `eta + 1`.
fn deg_sum(j: SpinMagnitude, eta: usize, s: SpinMagnitude, split: bool) -> (i128, i128) {
    if !admissible(j, eta, s) || s.twice() == 0 {
        return (0, 0);
    }
    let eta_i = eta as i128;
    let ts = s.twice() as i128;
    let tj = j.twice() as i128;
    // S*eta + j and (1 - S)*eta - j are integers by the parity condition
    let base_b = (eta_i * ts + tj) / 2;
    let base_a = (2 * eta_i - eta_i * ts - tj) / 2;
    let n_vars = (s.twice() - 1) as usize;

    // (eta+1) * term = (eta+1)!/(prod L! a! (b+1)!) * numerator
    let eta1_fact = factorial(eta as u32 + 1);
    let mut acc: i128 = 0;
    let mut occ = vec![0i128; n_vars];
    loop {
        let mut sum_kl = 0;
        let mut sum_k1l = 0;
        let mut sum_2k1l = 0;
        let mut denom_l: i128 = 1;
        for (idx, &l) in occ.iter().enumerate() {
            let k = idx as i128 + 2;
            sum_kl += k * l;
            sum_k1l += (k - 1) * l;
            sum_2k1l += (2 * k - 1) * l;
            denom_l *= factorial(l as u32);
        }
        let b = base_b - sum_kl;
        let a = base_a + sum_k1l;
        let numerator = (ts - 1) * eta_i + tj + 1 - sum_2k1l;
        let skip = a < 0 || b + 1 < 0 || (split && b < 0);
        if !skip {
            let denom = denom_l * factorial(a as u32) * factorial((b + 1) as u32);
            acc += eta1_fact / denom * numerator;
        }

        // odometer over 0..=eta for each occupation
        let mut pos = 0;
        loop {
            if pos == n_vars {
                return (acc.div_euclid(eta_i + 1), acc.rem_euclid(eta_i + 1));
            }
            occ[pos] += 1;
            if occ[pos] <= eta_i {
                break;
            }
            occ[pos] = 0;
            pos += 1;
        }
    }
}

/// Number of spin-`j` multiplets from weight counting: with `n(M)` the
/// number of product states of total projection `M`, returns `n(j) - n(j+1)`.
pub fn multiplicity_oracle(j: SpinMagnitude, eta: usize, s: SpinMagnitude) -> u64 {
    if !admissible(j, eta, s) {
        return 0;
    }
    let counts = weight_counts(eta, s);
    // counts[i] is n(M) with 2M = i - eta*2S
    let top = eta * s.twice() as usize;
    let idx = top + j.twice() as usize;
    let upper = counts.get(idx + 2).copied().unwrap_or(0);
    counts[idx] - upper
}

/// Distribution of total doubled projection over the `eta`-fold product,
/// indexed by `2M + eta*2S`.
pub fn weight_counts(eta: usize, s: SpinMagnitude) -> Vec<u64> {
    let ts = s.twice() as usize;
    let mut counts = vec![1u64];
    for _ in 0..eta {
        let mut next = vec![0u64; counts.len() + 2 * ts];
        for (i, &n) in counts.iter().enumerate() {
            // single-spin doubled projections -2S, -2S+2, ..., 2S shift by 0..=2*2S
            for step in 0..=ts {
                next[i + 2 * step] += n;
            }
        }
        counts = next;
    }
    counts
}
