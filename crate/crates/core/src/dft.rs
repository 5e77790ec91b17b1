//! Single-copy Fourier data of a cyclic state.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::prob::StandardState;
use crate::scalar::Real;

/// Relative tolerance for membership in the maximizer set `S`.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Moduli at or below `ZERO_SNAP_ULPS * M * eps` are exact zeros perturbed
/// by rounding and are snapped to zero.
pub(crate) const ZERO_SNAP_ULPS: f64 = 8.0;

/// `e^{2 pi i j / M}` for `j = 0..M`, with the exact values at the quarter
/// points so that real DFT coefficients stay exactly real.
pub(crate) fn roots_of_unity<T: Real>(m: usize) -> Vec<Complex<T>> {
    (0..m)
        .map(|j| {
            if 4 * j % m == 0 {
                match 4 * j / m {
                    0 => Complex::new(T::one(), T::zero()),
                    1 => Complex::new(T::zero(), T::one()),
                    2 => Complex::new(-T::one(), T::zero()),
                    _ => Complex::new(T::zero(), -T::one()),
                }
            } else {
                let angle = T::TAU() * T::of_usize(j) / T::of_usize(m);
                Complex::new(angle.cos(), angle.sin())
            }
        })
        .collect()
}

/// `z_n = sum_m e^{2 pi i n m / M} p_m` for `n = 0..M`.
///
/// Only `n <= M/2` is summed; the upper half is filled by conjugation so
/// `r_{M-n} = r_n` holds bit-for-bit.
pub fn dft<T: Real>(p: &[T]) -> Vec<Complex<T>> {
    let m = p.len();
    let roots = roots_of_unity::<T>(m);
    let mut z = vec![Complex::new(T::zero(), T::zero()); m];
    if m == 0 {
        return z;
    }
    z[0] = Complex::new(T::one(), T::zero());
    for n in 1..=m / 2 {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, &pj) in p.iter().enumerate() {
            acc = acc + roots[(n * j) % m] * pj;
        }
        if 2 * n == m {
            acc.im = T::zero();
        }
        z[n] = acc;
        z[m - n] = acc.conj();
    }
    z
}

/// Inverse of [`dft`]: `p_k = (1/M) sum_n e^{-2 pi i k n / M} z_n`.
pub fn inverse_dft<T: Real>(z: &[Complex<T>]) -> Vec<T> {
    let m = z.len();
    let roots = roots_of_unity::<T>(m);
    let scale = T::one() / T::of_usize(m);
    (0..m)
        .map(|k| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (n, zn) in z.iter().enumerate() {
                acc = acc + roots[(m - (k * n) % m) % m] * *zn;
            }
            acc.re * scale
        })
        .collect()
}

/// Fourier profile `z_n = r_n e^{i theta_n}` with the maximizer data that
/// drive the cyclic asymptotics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile<T> {
    pub order: usize,
    pub z: Vec<Complex<T>>,
    pub r: Vec<T>,
    pub theta: Vec<T>,
    pub r_max: T,
    /// Indices `n in 1..M` attaining `r_max` (empty iff `r_max == 0`).
    pub maximizers: Vec<usize>,
    /// `D = sum_{s in S} (M - s) / M`.
    pub degeneracy: T,
    /// Largest modulus among `n not in S`, zero when there is none.
    pub second_modulus: T,
}

impl<T: Real> SpectralProfile<T> {
    /// Build the profile of an arbitrary length-`M` probability vector.
    pub fn from_probs(p: &[T]) -> Result<Self> {
        let m = p.len();
        if m < 2 {
            return Err(Error::InvalidGroup("cyclic order M must be >= 2".into()));
        }
        let mut z = dft(p);
        let snap = T::of(ZERO_SNAP_ULPS) * T::of_usize(m) * T::eps();
        let mut r: Vec<T> = z.iter().map(|zn| zn.norm()).collect();
        for n in 1..m {
            if r[n] <= snap {
                r[n] = T::zero();
                z[n] = Complex::new(T::zero(), T::zero());
            }
        }
        let theta = z
            .iter()
            .map(|zn| {
                let a = zn.im.atan2(zn.re);
                if a < T::zero() {
                    a + T::TAU()
                } else {
                    a
                }
            })
            .collect();
        let r_max = r[1..].iter().copied().fold(T::zero(), T::max);
        let threshold = r_max * (T::one() - T::of(TIE_TOLERANCE));
        let maximizers: Vec<usize> =
            if r_max > T::zero() { (1..m).filter(|&n| r[n] >= threshold).collect() } else { Vec::new() };
        let degeneracy = T::of_usize(maximizers.iter().map(|&s| m - s).sum::<usize>()) / T::of_usize(m);
        let second_modulus = (1..m).filter(|n| !maximizers.contains(n)).map(|n| r[n]).fold(T::zero(), T::max);
        Ok(SpectralProfile { order: m, z, r, theta, r_max, maximizers, degeneracy, second_modulus })
    }

    /// `|S|`.
    pub fn multiplicity(&self) -> usize {
        self.maximizers.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.r_max == T::zero()
    }

    /// `(r / r_max)^N` bounding the neglected terms of the asymptotic
    /// deficit expansions, with `r = max(second_modulus, r_max^2)`; the
    /// `r_max^2` floor covers the cubic and higher Taylor terms.
    pub fn subdominant_ratio(&self, copies: usize) -> T {
        if self.is_degenerate() {
            return T::zero();
        }
        let r = self.second_modulus.max(self.r_max * self.r_max);
        (r / self.r_max).powf(T::of_usize(copies))
    }
}

/// Profile of a cyclic standard state.
pub fn dft_profile<T: Real>(state: &StandardState<T>) -> Result<SpectralProfile<T>> {
    state.cyclic_order()?;
    SpectralProfile::from_probs(state.probs())
}
