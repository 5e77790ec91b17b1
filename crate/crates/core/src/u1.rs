//! Phase-reference (U(1)) pipeline: number-total distributions of `N`
//! copies, their entropy, and the mutual information of the covariant
//! phase measurement.

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::prob::{shannon_entropy, variance_of, CopyDistribution, StandardState};
use crate::scalar::{self, Real};

/// Default cap on the number of copy-distribution coefficients.
pub const DEFAULT_COEFFICIENT_CAP: usize = 1 << 20;

/// Copy counts above this use square-and-multiply instead of iterated convolution.
const SQUARING_THRESHOLD: usize = 64;

/// Products of lengths above this are convolved through the FFT.
const DIRECT_CONVOLUTION_LIMIT: usize = 1 << 14;

/// Smallest default quadrature grid.
const MIN_DEFAULT_GRID: usize = 1 << 12;

/// Number variance `sum n^2 p_n - (sum n p_n)^2`.
pub fn number_variance<T: Real>(state: &StandardState<T>) -> Result<T> {
    state.u1_cutoff()?;
    Ok(variance_of(state.probs()).max(T::zero()))
}

/// Linear convolution of two non-negative vectors.
pub fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().saturating_mul(b.len()) <= DIRECT_CONVOLUTION_LIMIT {
        let mut out = vec![T::zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == T::zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = out[i + j] + x * y;
            }
        }
        out
    } else {
        fft_convolve(a, b)
    }
}

fn fft_convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let zero = Complex::new(T::zero(), T::zero());
    let mut fa = vec![zero; size];
    let mut fb = vec![zero; size];
    for (slot, &x) in fa.iter_mut().zip(a) {
        slot.re = x;
    }
    for (slot, &y) in fb.iter_mut().zip(b) {
        slot.re = y;
    }
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * *y;
    }
    inverse.process(&mut fa);
    let scale = T::one() / T::of_usize(size);
    // Round-off can push vanishing tails slightly negative.
    fa[..len].iter().map(|v| (v.re * scale).max(T::zero())).collect()
}

fn guard_length(d: usize, copies: usize, cap: usize) -> Result<usize> {
    let requested = (copies as u128) * (d.saturating_sub(1) as u128) + 1;
    if requested > cap as u128 {
        return Err(Error::ResourceLimit { what: "u1 copy distribution length", requested, cap: cap as u128 });
    }
    Ok(requested as usize)
}

/// Distribution of the total number over `N` copies, with the default cap.
pub fn copy_distribution_u1<T: Real>(state: &StandardState<T>, copies: usize) -> Result<CopyDistribution<T>> {
    copy_distribution_u1_capped(state, copies, DEFAULT_COEFFICIENT_CAP)
}

/// Distribution of the total number over `N` copies: the `N`-fold linear
/// self-convolution of `p`, of length `N(d-1)+1`.
pub fn copy_distribution_u1_capped<T: Real>(
    state: &StandardState<T>,
    copies: usize,
    cap: usize,
) -> Result<CopyDistribution<T>> {
    let d = state.u1_cutoff()?;
    if copies == 0 {
        return Err(Error::InvalidConfig("number of copies must be >= 1".into()));
    }
    let len = guard_length(d, copies, cap)?;
    let p = state.probs();
    let c = if copies <= SQUARING_THRESHOLD {
        let mut acc = p.to_vec();
        for _ in 1..copies {
            acc = convolve(&acc, p);
        }
        acc
    } else {
        let mut result: Option<Vec<T>> = None;
        let mut base = p.to_vec();
        let mut n = copies;
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => convolve(&r, &base),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = convolve(&base, &base);
        }
        result.expect("copies >= 1")
    };
    debug_assert_eq!(c.len(), len);
    Ok(CopyDistribution { group: state.group(), copies, c })
}

/// Discretized normal approximation with mean `N sum n p_n` and variance
/// `N V`, renormalized over `0..=N(d-1)`.
pub fn gaussian_copy_distribution<T: Real>(state: &StandardState<T>, copies: usize) -> Result<CopyDistribution<T>> {
    let d = state.u1_cutoff()?;
    if copies == 0 {
        return Err(Error::InvalidConfig("number of copies must be >= 1".into()));
    }
    if let Some(index) = state.probs().iter().position(|&p| p <= T::zero()) {
        return Err(Error::GappedSpectrum { index });
    }
    let variance = number_variance(state)?;
    if variance <= T::zero() {
        return Err(Error::ZeroVariance);
    }
    let len = guard_length(d, copies, DEFAULT_COEFFICIENT_CAP)?;
    let n = T::of_usize(copies);
    let mean1: T = state.probs().iter().enumerate().map(|(k, &p)| T::of_usize(k) * p).sum();
    let mean = n * mean1;
    let var = n * variance;
    let two = T::of(2.0);
    let raw: Vec<T> = (0..len)
        .map(|k| {
            let x = T::of_usize(k) - mean;
            (-(x * x) / (two * var)).exp()
        })
        .collect();
    let total = scalar::sum(&raw);
    let c = raw.into_iter().map(|x| x / total).collect();
    Ok(CopyDistribution { group: state.group(), copies, c })
}

/// U(1)-asymmetry of `N` copies, `H({c_n})` in bits.
pub fn u1_asymmetry<T: Real>(state: &StandardState<T>, copies: usize) -> Result<T> {
    Ok(copy_distribution_u1(state, copies)?.entropy())
}

/// Uniform periodic trapezoid rule on `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub grid_points: usize,
}

impl QuadratureSpec {
    pub fn new(grid_points: usize) -> Result<Self> {
        if grid_points == 0 || !grid_points.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(grid_points));
        }
        Ok(QuadratureSpec { grid_points })
    }

    /// Smallest power of two `>= max(8 * len, 4096)`.
    pub fn for_len(len: usize) -> Self {
        QuadratureSpec { grid_points: (8 * len).max(MIN_DEFAULT_GRID).next_power_of_two() }
    }

    /// Default grid for `N` copies of `state`.
    pub fn default_for<T: Real>(state: &StandardState<T>, copies: usize) -> Self {
        Self::for_len(copies * state.len().saturating_sub(1) + 1)
    }

    fn check(&self, len: usize) -> Result<()> {
        if !self.grid_points.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo(self.grid_points));
        }
        if self.grid_points < 8 * len {
            return Err(Error::GridTooCoarse { grid: self.grid_points, required: 8 * len });
        }
        Ok(())
    }
}

/// `2 pi f(phi_j) = |sum_m sqrt(c_m) e^{i m phi_j}|^2` on the quadrature grid.
fn scaled_kernel<T: Real>(c: &[T], quad: &QuadratureSpec) -> Result<Vec<T>> {
    quad.check(c.len())?;
    let k = quad.grid_points;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); k];
    for (slot, &cm) in buf.iter_mut().zip(c) {
        slot.re = cm.max(T::zero()).sqrt();
    }
    // The forward transform evaluates the conjugate sum; the modulus is unchanged.
    FftPlanner::<T>::new().plan_fft_forward(k).process(&mut buf);
    Ok(buf.iter().map(|v| v.norm_sqr().max(T::zero())).collect())
}

/// Density `f(phi)` of the phase error `phi = theta - theta'` under the
/// covariant measurement, sampled at `phi_j = 2 pi j / K`.
pub fn phase_error_density<T: Real>(c: &[T], quad: &QuadratureSpec) -> Result<Vec<T>> {
    let inv_two_pi = T::one() / T::TAU();
    Ok(scaled_kernel(c, quad)?.into_iter().map(|g| g * inv_two_pi).collect())
}

/// Mutual information (bits) between the hidden phase and the outcome of
/// the covariant phase measurement, given the copy distribution.
///
/// `I = int f log2(2 pi f) dphi`, evaluated by the periodic trapezoid rule.
pub fn covariant_mutual_info_from_copies<T: Real>(c: &[T], quad: &QuadratureSpec) -> Result<T> {
    let g = scaled_kernel(c, quad)?;
    let total = scalar::sum_map(&g, |x| if x > T::zero() { x * x.log2() } else { T::zero() });
    Ok((total / T::of_usize(quad.grid_points)).max(T::zero()))
}

/// Covariant-measurement mutual information for `N` copies.
pub fn covariant_mutual_info_u1<T: Real>(state: &StandardState<T>, copies: usize, quad: &QuadratureSpec) -> Result<T> {
    let dist = copy_distribution_u1(state, copies)?;
    covariant_mutual_info_from_copies(&dist.c, quad)
}

/// The regularized linearized asymmetry `4 pi V`.
pub fn regularized_asymmetry_u1<T: Real>(state: &StandardState<T>) -> Result<T> {
    Ok(T::of(4.0) * T::PI() * number_variance(state)?)
}

/// Large-`N` limits of `2^{2H}/N` and `2^{2I}/N` under the Gaussian
/// approximation: `2 pi e V` and `8 pi V / e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianLimits<T> {
    pub lin_asymmetry: T,
    pub lin_mutual_info: T,
}

pub fn gaussian_limits_u1<T: Real>(state: &StandardState<T>) -> Result<GaussianLimits<T>> {
    let v = number_variance(state)?;
    let e = T::E();
    Ok(GaussianLimits { lin_asymmetry: T::TAU() * e * v, lin_mutual_info: T::of(8.0) * T::PI() * v / e })
}

/// `2^{2x} / N`, evaluated as `2^{2x - log2 N}` so large `x` does not overflow.
pub fn linearize_per_copy<T: Real>(bits: T, copies: usize) -> T {
    (T::of(2.0) * bits - T::of_usize(copies).log2()).exp2()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct U1RatePoint<T> {
    pub copies: usize,
    pub asymmetry_bits: T,
    pub mutual_info_bits: T,
    pub lin_asymmetry_per_copy: T,
    pub lin_mi_per_copy: T,
    pub variance_target: T,
    pub grid_points: usize,
}

/// Evaluate each `N` independently (in parallel); output order follows `copies`.
///
/// `grid` fixes the quadrature size for every point; `None` picks the
/// default grid per `N`.
pub fn u1_rate_series<T: Real>(
    state: &StandardState<T>,
    copies: &[usize],
    grid: Option<usize>,
) -> Result<Vec<U1RatePoint<T>>> {
    let target = regularized_asymmetry_u1(state)?;
    copies
        .par_iter()
        .map(|&n| {
            let dist = copy_distribution_u1(state, n)?;
            let quad = match grid {
                Some(k) => QuadratureSpec::new(k)?,
                None => QuadratureSpec::for_len(dist.c.len()),
            };
            let h = shannon_entropy(&dist.c);
            let i = covariant_mutual_info_from_copies(&dist.c, &quad)?;
            Ok(U1RatePoint {
                copies: n,
                asymmetry_bits: h,
                mutual_info_bits: i,
                lin_asymmetry_per_copy: linearize_per_copy(h, n),
                lin_mi_per_copy: linearize_per_copy(i, n),
                variance_target: target,
                grid_points: quad.grid_points,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{validate_state, GroupSpec};

    fn u1(p: &[f64]) -> StandardState<f64> {
        validate_state(p, GroupSpec::u1(p.len())).unwrap()
    }

    #[test]
    fn number_variance_examples() {
        assert!((number_variance(&u1(&[0.5, 0.5])).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(number_variance(&u1(&[1.0])).unwrap(), 0.0);
        assert_eq!(number_variance(&u1(&[1.0, 0.0, 0.0])).unwrap(), 0.0);
        let third = 1.0 / 3.0;
        assert!((number_variance(&u1(&[third, third, third])).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn copy_distribution_examples() {
        let c = copy_distribution_u1(&u1(&[0.5, 0.5]), 2).unwrap().c;
        assert_eq!(c, vec![0.25, 0.5, 0.25]);
        let p = [0.2, 0.5, 0.3];
        assert_eq!(copy_distribution_u1(&u1(&p), 1).unwrap().c, p.to_vec());
        let third = 1.0 / 3.0;
        let c = copy_distribution_u1(&u1(&[third, third, third]), 2).unwrap().c;
        // 9 ordered pairs grouped by total: 1, 2, 3, 2, 1.
        for (got, want) in c.iter().zip([1.0, 2.0, 3.0, 2.0, 1.0]) {
            assert!((got - want / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn squaring_path_matches_binomial() {
        let n = 200usize;
        let c = copy_distribution_u1(&u1(&[0.5, 0.5]), n).unwrap().c;
        assert_eq!(c.len(), n + 1);
        // binomial(200, k) / 2^200 via log-gamma free recurrence
        let mut expected = vec![0.0f64; n + 1];
        expected[0] = 0.5f64.powi(n as i32);
        for k in 1..=n {
            expected[k] = expected[k - 1] * (n - k + 1) as f64 / k as f64;
        }
        for (a, b) in c.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn resource_limit() {
        let s = u1(&[0.5, 0.5]);
        assert!(matches!(
            copy_distribution_u1_capped(&s, 100, 50),
            Err(Error::ResourceLimit { requested: 101, cap: 50, .. })
        ));
        assert!(matches!(copy_distribution_u1(&s, 1 << 21), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn gaussian_close_to_exact() {
        let s = u1(&[0.5, 0.5]);
        let n = 100;
        let g = gaussian_copy_distribution(&s, n).unwrap();
        let e = copy_distribution_u1(&s, n).unwrap();
        let dev = g.c.iter().zip(&e.c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev <= 10.0 / n as f64);
        assert!((g.mean() - 50.0).abs() <= 0.5);
        assert!((g.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_refuses_gapped_and_flat() {
        assert!(matches!(
            gaussian_copy_distribution(&u1(&[0.5, 0.0, 0.5]), 10),
            Err(Error::GappedSpectrum { index: 1 })
        ));
        assert!(matches!(gaussian_copy_distribution(&u1(&[1.0]), 10), Err(Error::ZeroVariance)));
    }

    #[test]
    fn asymmetry_examples() {
        let s = u1(&[0.5, 0.5]);
        assert!((u1_asymmetry(&s, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((u1_asymmetry(&s, 2).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn asymmetry_follows_gaussian_entropy() {
        // H -> 1/2 log2(2 pi e N V); scipy.stats.binom gives 7.04709557801 at N = 4096.
        let h = u1_asymmetry(&u1(&[0.5, 0.5]), 4096).unwrap();
        assert!((h - 7.047_095_578_011).abs() < 1e-9);
        let lead = 0.5 * (std::f64::consts::TAU * std::f64::consts::E * 0.25 * 4096.0).log2();
        assert!((h - lead).abs() < 1e-3);
    }

    #[test]
    fn mutual_info_trivial_and_analytic() {
        let q = QuadratureSpec::new(1 << 12).unwrap();
        assert_eq!(covariant_mutual_info_u1(&u1(&[1.0, 0.0]), 1, &q).unwrap(), 0.0);
        let i = covariant_mutual_info_u1(&u1(&[0.5, 0.5]), 1, &q).unwrap();
        let exact = 1.0 / std::f64::consts::LN_2 - 1.0;
        assert!((i - exact).abs() < 1e-8, "{i} vs {exact}");
    }

    #[test]
    fn mutual_info_follows_gaussian_limit() {
        // numpy FFT at K = 2^18 gives 5.6044001992 at N = 1024.
        let s = u1(&[0.5, 0.5]);
        let i = covariant_mutual_info_u1(&s, 1024, &QuadratureSpec::new(1 << 16).unwrap()).unwrap();
        assert!((i - 5.604_400_199_2).abs() < 1e-8, "{i}");
        let h = u1_asymmetry(&s, 1024).unwrap();
        // Gap tends to log2(e/2).
        assert!((h - i - (std::f64::consts::E / 2.0).log2()).abs() < 1e-3);
    }

    #[test]
    fn grid_validation() {
        let s = u1(&[0.5, 0.5]);
        assert!(matches!(QuadratureSpec::new(1000), Err(Error::GridNotPowerOfTwo(1000))));
        assert!(matches!(
            covariant_mutual_info_u1(&s, 100, &QuadratureSpec::new(512).unwrap()),
            Err(Error::GridTooCoarse { grid: 512, required: 808 })
        ));
        assert_eq!(QuadratureSpec::for_len(1025).grid_points, 1 << 14);
        assert_eq!(QuadratureSpec::for_len(2).grid_points, 1 << 12);
    }

    #[test]
    fn phase_density_normalized() {
        let c = copy_distribution_u1(&u1(&[0.2, 0.5, 0.3]), 10).unwrap().c;
        let q = QuadratureSpec::for_len(c.len());
        let f = phase_error_density(&c, &q).unwrap();
        assert!(f.iter().all(|&x| x >= 0.0));
        let integral: f64 = f.iter().sum::<f64>() * std::f64::consts::TAU / q.grid_points as f64;
        assert!((integral - 1.0).abs() < 1e-8);
    }

    #[test]
    fn regularized_asymmetry_examples() {
        use std::f64::consts::PI;
        assert!((regularized_asymmetry_u1(&u1(&[0.5, 0.5])).unwrap() - PI).abs() < 1e-15);
        assert_eq!(regularized_asymmetry_u1(&u1(&[1.0, 0.0])).unwrap(), 0.0);
        let third = 1.0 / 3.0;
        assert!((regularized_asymmetry_u1(&u1(&[third, third, third])).unwrap() - 8.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rate_series_converges_to_gaussian_limits() {
        let s = u1(&[0.5, 0.5]);
        let limits = gaussian_limits_u1(&s).unwrap();
        let pts = u1_rate_series(&s, &[256, 1024, 4096], Some(1 << 16)).unwrap();
        assert_eq!(pts.iter().map(|p| p.copies).collect::<Vec<_>>(), vec![256, 1024, 4096]);
        let last = &pts[2];
        assert!((last.lin_asymmetry_per_copy / limits.lin_asymmetry - 1.0).abs() < 1e-4);
        assert!((last.lin_mi_per_copy / limits.lin_mutual_info - 1.0).abs() < 1e-4);
        let errs: Vec<f64> = pts.iter().map(|p| (p.lin_mi_per_copy - limits.lin_mutual_info).abs()).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(pts.iter().all(|p| p.variance_target == std::f64::consts::PI));
    }

    #[test]
    fn zero_resource_state_rate_points() {
        let pts = u1_rate_series(&u1(&[1.0, 0.0]), &[1, 4, 16], None).unwrap();
        for p in pts {
            assert!((p.lin_asymmetry_per_copy - 1.0 / p.copies as f64).abs() < 1e-15);
            assert!((p.lin_mi_per_copy - 1.0 / p.copies as f64).abs() < 1e-15);
            assert_eq!(p.variance_target, 0.0);
        }
    }

    #[test]
    fn rejects_cyclic_state() {
        let s = validate_state(&[0.5f64, 0.5], GroupSpec::cyclic(2)).unwrap();
        assert!(matches!(number_variance(&s), Err(Error::WrongGroup { expected: "u1" })));
    }
}
