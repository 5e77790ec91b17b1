//! Standard-form states, copy distributions and the entropy functionals
//! shared by the U(1) and cyclic pipelines. All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Real};

/// Input normalization tolerance; inputs within this of 1 are rescaled.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-6;

/// Symmetry group of the missing reference frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    /// Phase reference with photon-number cutoff `d` (labels `0..d`).
    U1 { d: usize },
    /// Cyclic group of order `M`.
    Cyclic {
        #[serde(rename = "M")]
        m: usize,
    },
}

impl GroupSpec {
    pub fn u1(d: usize) -> Self {
        GroupSpec::U1 { d }
    }

    pub fn cyclic(m: usize) -> Self {
        GroupSpec::Cyclic { m }
    }

    /// Number of single-copy irrep labels.
    pub fn labels(&self) -> usize {
        match *self {
            GroupSpec::U1 { d } => d,
            GroupSpec::Cyclic { m } => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::U1 { d: 0 } => Err(Error::InvalidGroup("u1 cutoff d must be >= 1".into())),
            GroupSpec::Cyclic { m } if m < 2 => Err(Error::InvalidGroup("cyclic order M must be >= 2".into())),
            _ => Ok(()),
        }
    }
}

/// Pure resource state in standard form, `sum_k sqrt(p_k) |k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardState<T> {
    group: GroupSpec,
    probs: Vec<T>,
}

impl<T: Real> StandardState<T> {
    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Order `M` if this is a cyclic state.
    pub fn cyclic_order(&self) -> Result<usize> {
        match self.group {
            GroupSpec::Cyclic { m } => Ok(m),
            GroupSpec::U1 { .. } => Err(Error::WrongGroup { expected: "cyclic" }),
        }
    }

    /// Cutoff `d` if this is a U(1) state.
    pub fn u1_cutoff(&self) -> Result<usize> {
        match self.group {
            GroupSpec::U1 { d } => Ok(d),
            GroupSpec::Cyclic { .. } => Err(Error::WrongGroup { expected: "u1" }),
        }
    }

    /// Relabel `k -> k + shift (mod M)`. For U(1) states the shift instead
    /// prepends `shift` empty number levels.
    pub fn shifted(&self, shift: usize) -> Self {
        match self.group {
            GroupSpec::Cyclic { m } => {
                let mut probs = vec![T::zero(); m];
                for (k, &p) in self.probs.iter().enumerate() {
                    probs[(k + shift) % m] = p;
                }
                StandardState { group: self.group, probs }
            }
            GroupSpec::U1 { d } => {
                let mut probs = vec![T::zero(); shift];
                probs.extend_from_slice(&self.probs);
                StandardState { group: GroupSpec::U1 { d: d + shift }, probs }
            }
        }
    }

    /// Convert to another precision.
    pub fn cast<U: Real>(&self) -> StandardState<U> {
        StandardState { group: self.group, probs: self.probs.iter().map(|p| U::of(p.to_f64_lossy())).collect() }
    }
}

/// Validate a raw probability vector against a group, rescaling when the
/// sum is within [`INPUT_SUM_TOLERANCE`] of one.
pub fn validate_state<T: Real>(raw: &[T], group: GroupSpec) -> Result<StandardState<T>> {
    group.validate()?;
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }
    if raw.len() != group.labels() {
        return Err(Error::WrongLength { expected: group.labels(), got: raw.len() });
    }
    for (index, &p) in raw.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if p < T::zero() {
            return Err(Error::NegativeProbability { index, value: p.to_f64_lossy() });
        }
    }
    let total = scalar::sum(raw);
    if (total - T::one()).abs() > T::of(INPUT_SUM_TOLERANCE) {
        return Err(Error::SumOutOfTolerance { sum: total.to_f64_lossy() });
    }
    let probs = raw.iter().map(|&p| p / total).collect();
    Ok(StandardState { group, probs })
}

/// Irrep-label distribution of `N` copies.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyDistribution<T> {
    pub group: GroupSpec,
    pub copies: usize,
    pub c: Vec<T>,
}

impl<T: Real> CopyDistribution<T> {
    pub fn entropy(&self) -> T {
        shannon_entropy(&self.c)
    }

    pub fn total(&self) -> T {
        scalar::sum(&self.c)
    }

    pub fn mean(&self) -> T {
        scalar::sum(&self.c.iter().enumerate().map(|(n, &c)| T::of_usize(n) * c).collect::<Vec<_>>())
    }

    pub fn variance(&self) -> T {
        variance_of(&self.c)
    }
}

/// Variance of the index under the distribution `c` (mean-centred, so no
/// cancellation between the two moments).
pub(crate) fn variance_of<T: Real>(c: &[T]) -> T {
    let mean: T = scalar::sum(&c.iter().enumerate().map(|(n, &p)| T::of_usize(n) * p).collect::<Vec<_>>());
    scalar::sum(
        &c.iter()
            .enumerate()
            .map(|(n, &p)| {
                let dev = T::of_usize(n) - mean;
                dev * dev * p
            })
            .collect::<Vec<_>>(),
    )
}

/// Deviations of a cyclic distribution from uniform: `c_k = (1 + delta_k) / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationVector<T> {
    deltas: Vec<T>,
}

impl<T: Real> DeviationVector<T> {
    /// Checks `delta_k >= -1` and that the deviations sum to zero within
    /// `1e-10` (scaled by the largest deviation, and never tighter than the
    /// scalar's own rounding).
    pub fn new(deltas: Vec<T>) -> Result<Self> {
        if deltas.len() < 2 {
            return Err(Error::WrongLength { expected: 2, got: deltas.len() });
        }
        let mut scale = T::one();
        for (index, &d) in deltas.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if d < -T::one() {
                return Err(Error::DeltaOutOfRange { index, value: d.to_f64_lossy() });
            }
            scale = scale.max(d.abs());
        }
        let total = scalar::sum(&deltas);
        if total.abs() > T::of(1e-10).max(T::of(64.0) * T::eps()) * scale {
            return Err(Error::DeviationSum { sum: total.to_f64_lossy() });
        }
        Ok(DeviationVector { deltas })
    }

    /// Build from a probability vector, `delta_k = M c_k - 1`.
    pub fn from_probs(c: &[T]) -> Result<Self> {
        let m = T::of_usize(c.len());
        Self::new(c.iter().map(|&ck| (m * ck - T::one()).max(-T::one())).collect())
    }

    pub fn order(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[T] {
        &self.deltas
    }

    pub fn probs(&self) -> Vec<T> {
        let m = T::of_usize(self.deltas.len());
        self.deltas.iter().map(|&d| (T::one() + d) / m).collect()
    }
}

/// `p log2 p` with the `0 log 0 = 0` convention.
pub(crate) fn plogp<T: Real>(p: T) -> T {
    if p > T::zero() {
        p * p.log2()
    } else {
        T::zero()
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy<T: Real>(p: &[T]) -> T {
    -scalar::sum_map(p, plogp)
}

/// `(1 + x) ln(1 + x) - x`, accurate for small `|x|`.
///
/// Non-negative on `[-1, inf)`; the series branch is `sum_{n>=2} (-x)^n / (n (n-1))`.
pub fn xlogx_excess<T: Real>(x: T) -> T {
    if x <= -T::one() {
        return T::one();
    }
    if x.abs() < T::of(0.02) {
        let mut total = T::zero();
        let mut power = x * x;
        let mut n = 2usize;
        loop {
            let term = power / T::of_usize(n * (n - 1));
            total = total + term;
            if term.abs() <= total.abs() * T::eps() * T::of(0.25) || n > 40 {
                break;
            }
            power = -power * x;
            n += 1;
        }
        total
    } else {
        (T::one() + x) * x.ln_1p() - x
    }
}

/// `log2 M - H((1 + delta_k) / M)`, evaluated term-by-term without forming
/// the difference of two nearly equal numbers.
pub fn entropy_deficit<T: Real>(dev: &DeviationVector<T>) -> T {
    let m = T::of_usize(dev.order());
    let total = scalar::sum_map(dev.deltas(), xlogx_excess);
    (total / (m * T::LN_2())).max(T::zero())
}

/// `-sum_k c_k log2 sigma_k`, the relative entropy between a pure state with
/// twirl `diag(c)` and the invariant state `diag(sigma)`.
pub fn relative_entropy_diag<T: Real>(c: &[T], sigma: &[T]) -> Result<T> {
    if c.len() != sigma.len() {
        return Err(Error::LengthMismatch { left: c.len(), right: sigma.len() });
    }
    let mut terms = Vec::with_capacity(c.len());
    for (index, (&ck, &sk)) in c.iter().zip(sigma).enumerate() {
        if ck > T::zero() {
            if sk <= T::zero() {
                return Err(Error::SupportMismatch { index });
            }
            terms.push(-ck * sk.log2());
        }
    }
    Ok(scalar::sum(&terms))
}
