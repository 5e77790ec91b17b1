//! Cyclic-group (`Z_M`) pipeline.
//!
//! Copy distributions come from the single-copy DFT raised to the `N`-th
//! power, `c_k = (1 + delta_k) / M`, and every "distance from `log2 M`"
//! quantity is computed directly from the deviations `delta_k` so that
//! deficits of order `r_max^{2N}` survive down to the underflow limit.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dft::{dft_profile, roots_of_unity, SpectralProfile, ZERO_SNAP_ULPS};
use crate::error::{Error, Result};
use crate::prob::{entropy_deficit, validate_state, CopyDistribution, DeviationVector, GroupSpec, StandardState};
use crate::scalar::{self, Real};

/// Enumeration guard for the brute-force multinomial oracle.
pub const ORACLE_STRING_CAP: u128 = 10_000_000;

/// Gap values at or above `-GAP_CLAMP` are reported as non-negative.
pub const GAP_CLAMP: f64 = 1e-10;

/// Trials per independently seeded block in [`search_superadditive`].
pub const SEARCH_BLOCK: usize = 256;

/// A rate in bits per copy, or the sentinel for a perfectly
/// distinguishable orbit (`r_max = 0`). Serializes as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rate<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Rate<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Rate::Finite(x) => Some(x),
            Rate::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Rate::Infinite)
    }

    /// `-2 log2 r`, infinite at `r = 0`.
    pub fn from_modulus(r: T) -> Self {
        if r > T::zero() {
            Rate::Finite(-T::of(2.0) * r.log2())
        } else {
            Rate::Infinite
        }
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rate::Infinite, Rate::Infinite) => Ordering::Equal,
            (Rate::Infinite, _) => Ordering::Greater,
            (_, Rate::Infinite) => Ordering::Less,
            (Rate::Finite(a), Rate::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
        }
    }
}

impl<T: Real> fmt::Display for Rate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Finite(x) => write!(f, "{x}"),
            Rate::Infinite => f.write_str("inf"),
        }
    }
}

impl<T: Real> Serialize for Rate<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Finite(x) => serializer.serialize_f64(x.to_f64_lossy()),
            Rate::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// A value in bits together with its distance from `log2 M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitsWithDeficit<T> {
    pub bits: T,
    pub deficit_bits: T,
}

/// `N`-copy distribution together with its deviation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicCopies<T> {
    pub distribution: CopyDistribution<T>,
    pub deviations: DeviationVector<T>,
}

/// `(r e^{i theta})^N` in polar form.
fn complex_power<T: Real>(z: Complex<T>, copies: usize) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let n = T::of_usize(copies);
    Complex::from_polar(r.powf(n), z.im.atan2(z.re) * n)
}

/// `delta_k = sum_{n=1}^{M-1} e^{-2 pi i k n / M} z_n^N` straight from the
/// spectral profile.
fn deviations_from_profile<T: Real>(profile: &SpectralProfile<T>, copies: usize) -> Result<DeviationVector<T>> {
    let m = profile.order;
    let roots = roots_of_unity::<T>(m);
    let powers: Vec<Complex<T>> = profile.z.iter().map(|&z| complex_power(z, copies)).collect();
    let snap = T::of(ZERO_SNAP_ULPS) * T::of_usize(m) * T::eps();
    let deltas = (0..m)
        .map(|k| {
            let mut acc = T::zero();
            for (n, w) in powers.iter().enumerate().skip(1) {
                let root = roots[(m - (k * n) % m) % m];
                acc = acc + (root * *w).re;
            }
            // An empty residue class comes back as rounding noise above -1,
            // which the square roots of the covariant measurement amplify.
            if acc <= snap - T::one() {
                -T::one()
            } else {
                acc
            }
        })
        .collect();
    DeviationVector::new(deltas)
}

fn require_copies(copies: usize) -> Result<()> {
    if copies == 0 {
        Err(Error::InvalidConfig("number of copies must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `N`-copy residue distribution via the DFT.
pub fn copy_distribution_zm<T: Real>(state: &StandardState<T>, copies: usize) -> Result<CyclicCopies<T>> {
    require_copies(copies)?;
    let profile = dft_profile(state)?;
    let deviations = deviations_from_profile(&profile, copies)?;
    let distribution = CopyDistribution { group: state.group(), copies, c: deviations.probs() };
    Ok(CyclicCopies { distribution, deviations })
}

fn string_count(m: usize, copies: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..copies {
        total = total.saturating_mul(m as u128);
        if total > ORACLE_STRING_CAP {
            return total;
        }
    }
    total
}

fn oracle_guard(m: usize, copies: usize) -> Result<()> {
    let strings = string_count(m, copies);
    if strings > ORACLE_STRING_CAP {
        return Err(Error::ResourceLimit { what: "M^N index strings", requested: strings, cap: ORACLE_STRING_CAP });
    }
    Ok(())
}

/// Brute-force oracle: dynamic programming over (position, residue), i.e.
/// the multinomial sum with the label total reduced mod `M`. Guarded at
/// `M^N <= 10^7` so it stays a drop-in for full enumeration.
pub fn multinomial_oracle_zm<T: Real>(state: &StandardState<T>, copies: usize) -> Result<CopyDistribution<T>> {
    let m = state.cyclic_order()?;
    require_copies(copies)?;
    oracle_guard(m, copies)?;
    let p = state.probs();
    let mut dist = vec![T::zero(); m];
    dist[0] = T::one();
    for _ in 0..copies {
        let mut next = vec![T::zero(); m];
        for (k, &dk) in dist.iter().enumerate() {
            for (j, &pj) in p.iter().enumerate() {
                next[(k + j) % m] = next[(k + j) % m] + dk * pj;
            }
        }
        dist = next;
    }
    Ok(CopyDistribution { group: state.group(), copies, c: dist })
}

/// Full enumeration of all `M^N` index strings `m_1..m_N`, accumulating
/// `p_{m_1} ... p_{m_N}` at residue `sum m_i mod M`.
pub fn enumerate_copy_distribution_zm<T: Real>(state: &StandardState<T>, copies: usize) -> Result<CopyDistribution<T>> {
    let m = state.cyclic_order()?;
    require_copies(copies)?;
    oracle_guard(m, copies)?;
    let p = state.probs();
    let mut c = vec![T::zero(); m];
    let mut digits = vec![0usize; copies];
    loop {
        let mut weight = T::one();
        let mut residue = 0usize;
        for &dgt in &digits {
            weight = weight * p[dgt];
            residue += dgt;
        }
        c[residue % m] = c[residue % m] + weight;
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == copies {
                return Ok(CopyDistribution { group: state.group(), copies, c });
            }
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `Z_M`-asymmetry of `N` copies: `H({c_k})` and `log2 M - H`.
pub fn zm_asymmetry<T: Real>(state: &StandardState<T>, copies: usize) -> Result<BitsWithDeficit<T>> {
    let m = state.cyclic_order()?;
    let copies = copy_distribution_zm(state, copies)?;
    let deficit = entropy_deficit(&copies.deviations);
    Ok(BitsWithDeficit { bits: T::of_usize(m).log2() - deficit, deficit_bits: deficit })
}

/// Row `q_d = p(y | x)` at offset `d = (x - y) mod M` of the covariant
/// measurement's channel. `q_0` is returned as `1 - eps` with `eps`
/// (the off-diagonal mass) reported separately for accuracy.
fn covariant_row<T: Real>(deviations: &DeviationVector<T>) -> (Vec<T>, T) {
    let deltas = deviations.deltas();
    let m = deltas.len();
    let roots = roots_of_unity::<T>(m);
    // sqrt(M c_k) - 1 without cancellation
    let s: Vec<T> = deltas.iter().map(|&d| d / ((T::one() + d).sqrt() + T::one())).collect();
    let mf = T::of_usize(m);
    let mut row = vec![T::zero(); m];
    for (d, slot) in row.iter_mut().enumerate().skip(1) {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, &sk) in s.iter().enumerate() {
            acc = acc + roots[(k * d) % m] * sk;
        }
        *slot = acc.norm_sqr() / (mf * mf);
    }
    let off_diagonal = scalar::sum(&row[1..]);
    row[0] = T::one() - off_diagonal;
    (row, off_diagonal)
}

/// Conditional table `p(y | x)` of the covariant (Fourier-basis)
/// measurement; circulant in `x - y`.
pub fn conditional_table_zm<T: Real>(state: &StandardState<T>, copies: usize) -> Result<Vec<Vec<T>>> {
    let m = state.cyclic_order()?;
    let cc = copy_distribution_zm(state, copies)?;
    let (row, _) = covariant_row(&cc.deviations);
    Ok((0..m).map(|x| (0..m).map(|y| row[(x + m - y) % m]).collect()).collect())
}

/// Mutual information of the covariant measurement and its deficit
/// `log2 M - I`, which equals the entropy of a channel row.
pub fn covariant_mutual_info_zm<T: Real>(state: &StandardState<T>, copies: usize) -> Result<BitsWithDeficit<T>> {
    let m = state.cyclic_order()?;
    let cc = copy_distribution_zm(state, copies)?;
    Ok(mutual_info_from_deviations(m, &cc.deviations))
}

fn mutual_info_from_deviations<T: Real>(m: usize, deviations: &DeviationVector<T>) -> BitsWithDeficit<T> {
    let (row, eps) = covariant_row(deviations);
    let ln_off: T = row[1..].iter().map(|&q| if q > T::zero() { -q * q.ln() } else { T::zero() }).sum();
    let ln_diag = if row[0] > T::zero() { -(T::one() - eps) * (-eps).ln_1p() } else { T::zero() };
    let deficit = ((ln_off + ln_diag) / T::LN_2()).max(T::zero());
    BitsWithDeficit { bits: T::of_usize(m).log2() - deficit, deficit_bits: deficit }
}

/// Leading-order deficit predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticDeficits<T> {
    /// `r_max^{2N} |S| / (2 ln 2)`.
    pub asymmetry: T,
    /// `r_max^{2N} (|S| / (4 ln 2) + D (1 - N log2 r_max))`.
    pub mutual_info: T,
    /// `log2` of the two predictions, finite even when they underflow.
    pub log2_asymmetry: T,
    pub log2_mutual_info: T,
    /// `(r / r_max)^N`, the size of the neglected relative corrections.
    pub subdominant_ratio: T,
}

pub fn asymptotic_deficits<T: Real>(profile: &SpectralProfile<T>, copies: usize) -> Result<AsymptoticDeficits<T>> {
    if profile.is_degenerate() {
        return Err(Error::DegenerateProfile);
    }
    let n = T::of_usize(copies);
    let s = T::of_usize(profile.multiplicity());
    let log_r = profile.r_max.log2();
    let log_scale = T::of(2.0) * n * log_r;
    let asym_coef = s / (T::of(2.0) * T::LN_2());
    let mi_coef = s / (T::of(4.0) * T::LN_2()) + profile.degeneracy * (T::one() - n * log_r);
    let log2_asymmetry = log_scale + asym_coef.log2();
    let log2_mutual_info = log_scale + mi_coef.log2();
    Ok(AsymptoticDeficits {
        asymmetry: log2_asymmetry.exp2(),
        mutual_info: log2_mutual_info.exp2(),
        log2_asymmetry,
        log2_mutual_info,
        subdominant_ratio: profile.subdominant_ratio(copies),
    })
}

/// Alignment rate `-2 log2 r_max`.
pub fn alignment_rate_zm<T: Real>(state: &StandardState<T>) -> Result<Rate<T>> {
    Ok(Rate::from_modulus(dft_profile(state)?.r_max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ZmRatePoint<T> {
    pub copies: usize,
    pub asymmetry_bits: T,
    pub asymmetry_deficit_bits: T,
    pub mi_bits: T,
    pub mi_deficit_bits: T,
    pub predicted_asym_deficit: T,
    pub predicted_mi_deficit: T,
    /// `-log2(log2 M - H) / N`.
    pub lin_asym_per_copy: Rate<T>,
    /// `-log2(log2 M - I) / N`.
    pub lin_mi_per_copy: Rate<T>,
    pub rate_target: Rate<T>,
    pub subdominant_ratio: T,
    /// Deficits would underflow; values come from the asymptotic expansion.
    pub extrapolated: bool,
}

/// `r_max^{2N}` below this is treated as beyond the reach of direct evaluation.
fn extrapolation_log2_threshold<T: Real>() -> T {
    (T::min_positive_value() / T::eps()).log2()
}

fn lin_from_deficit<T: Real>(deficit: T, copies: usize) -> Rate<T> {
    if deficit > T::zero() {
        Rate::Finite(-deficit.log2() / T::of_usize(copies))
    } else {
        Rate::Infinite
    }
}

/// Rate point for one `N`.
pub fn zm_rate_point<T: Real>(state: &StandardState<T>, copies: usize) -> Result<ZmRatePoint<T>> {
    let m = state.cyclic_order()?;
    require_copies(copies)?;
    let profile = dft_profile(state)?;
    let log2_m = T::of_usize(m).log2();
    let n = T::of_usize(copies);
    let rate_target = Rate::from_modulus(profile.r_max);
    if profile.is_degenerate() {
        return Ok(ZmRatePoint {
            copies,
            asymmetry_bits: log2_m,
            asymmetry_deficit_bits: T::zero(),
            mi_bits: log2_m,
            mi_deficit_bits: T::zero(),
            predicted_asym_deficit: T::zero(),
            predicted_mi_deficit: T::zero(),
            lin_asym_per_copy: Rate::Infinite,
            lin_mi_per_copy: Rate::Infinite,
            rate_target,
            subdominant_ratio: T::zero(),
            extrapolated: false,
        });
    }
    let pred = asymptotic_deficits(&profile, copies)?;
    let beyond = T::of(2.0) * n * profile.r_max.log2() < extrapolation_log2_threshold::<T>();
    if !beyond {
        let deviations = deviations_from_profile(&profile, copies)?;
        let asym_deficit = entropy_deficit(&deviations);
        let mi = mutual_info_from_deviations(m, &deviations);
        if asym_deficit > T::zero() && mi.deficit_bits > T::zero() {
            return Ok(ZmRatePoint {
                copies,
                asymmetry_bits: log2_m - asym_deficit,
                asymmetry_deficit_bits: asym_deficit,
                mi_bits: mi.bits,
                mi_deficit_bits: mi.deficit_bits,
                predicted_asym_deficit: pred.asymmetry,
                predicted_mi_deficit: pred.mutual_info,
                lin_asym_per_copy: lin_from_deficit(asym_deficit, copies),
                lin_mi_per_copy: lin_from_deficit(mi.deficit_bits, copies),
                rate_target,
                subdominant_ratio: pred.subdominant_ratio,
                extrapolated: false,
            });
        }
    }
    Ok(ZmRatePoint {
        copies,
        asymmetry_bits: log2_m - pred.asymmetry,
        asymmetry_deficit_bits: pred.asymmetry,
        mi_bits: log2_m - pred.mutual_info,
        mi_deficit_bits: pred.mutual_info,
        predicted_asym_deficit: pred.asymmetry,
        predicted_mi_deficit: pred.mutual_info,
        lin_asym_per_copy: Rate::Finite(-pred.log2_asymmetry / n),
        lin_mi_per_copy: Rate::Finite(-pred.log2_mutual_info / n),
        rate_target,
        subdominant_ratio: pred.subdominant_ratio,
        extrapolated: true,
    })
}

/// Rate points for each `N`, evaluated in parallel, order preserved.
pub fn zm_rate_series<T: Real>(state: &StandardState<T>, copies: &[usize]) -> Result<Vec<ZmRatePoint<T>>> {
    copies.par_iter().map(|&n| zm_rate_point(state, n)).collect()
}

/// Result of composing two cyclic resources.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionResult<T> {
    pub composed: StandardState<T>,
    /// `|omega_n|` of the composed state, from its own DFT.
    pub omega_moduli: Vec<T>,
    pub rate_a: Rate<T>,
    pub rate_b: Rate<T>,
    pub rate_composed: Rate<T>,
    /// `R(a (x) b) - R(a) - R(b)`; `None` when a factor's rate is infinite.
    pub gap_bits: Option<Rate<T>>,
}

fn same_cyclic<T: Real>(a: &StandardState<T>, b: &StandardState<T>) -> Result<usize> {
    let m = a.cyclic_order()?;
    if b.group() != GroupSpec::cyclic(m) {
        return Err(Error::GroupMismatch);
    }
    Ok(m)
}

/// Cyclic convolution `c_k = sum_{k1 + k2 = k mod M} p_{k1} q_{k2}`.
pub fn cyclic_convolve<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    let m = p.len();
    let mut c = vec![T::zero(); m];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            c[(i + j) % m] = c[(i + j) % m] + pi * qj;
        }
    }
    c
}

fn clamp_gap<T: Real>(gap: T) -> T {
    if gap < T::zero() && gap >= -T::of(GAP_CLAMP) {
        T::zero()
    } else {
        gap
    }
}

fn gap_from_rates<T: Real>(ra: Rate<T>, rb: Rate<T>, rab: Rate<T>) -> Option<Rate<T>> {
    match (ra, rb, rab) {
        (Rate::Finite(a), Rate::Finite(b), Rate::Finite(ab)) => Some(Rate::Finite(clamp_gap(ab - a - b))),
        (Rate::Finite(_), Rate::Finite(_), Rate::Infinite) => Some(Rate::Infinite),
        _ => None,
    }
}

pub fn tensor_compose<T: Real>(a: &StandardState<T>, b: &StandardState<T>) -> Result<CompositionResult<T>> {
    let m = same_cyclic(a, b)?;
    let composed = validate_state(&cyclic_convolve(a.probs(), b.probs()), GroupSpec::cyclic(m))?;
    let pa = dft_profile(a)?;
    let pb = dft_profile(b)?;
    let pc = dft_profile(&composed)?;
    let rate_a = Rate::from_modulus(pa.r_max);
    let rate_b = Rate::from_modulus(pb.r_max);
    let rate_composed = Rate::from_modulus(pc.r_max);
    Ok(CompositionResult {
        omega_moduli: pc.r.clone(),
        gap_bits: gap_from_rates(rate_a, rate_b, rate_composed),
        composed,
        rate_a,
        rate_b,
        rate_composed,
    })
}

/// `-2 log2 max_n (r_n l_n) + 2 log2 (r_max l_max) >= 0`, from the factor
/// profiles.
pub fn superadditivity_gap<T: Real>(a: &StandardState<T>, b: &StandardState<T>) -> Result<Rate<T>> {
    same_cyclic(a, b)?;
    let pa = dft_profile(a)?;
    let pb = dft_profile(b)?;
    gap_from_profiles(&pa, &pb)
}

fn gap_from_profiles<T: Real>(pa: &SpectralProfile<T>, pb: &SpectralProfile<T>) -> Result<Rate<T>> {
    if pa.is_degenerate() || pb.is_degenerate() {
        return Err(Error::DegenerateProfile);
    }
    let joint = pa.r[1..].iter().zip(&pb.r[1..]).map(|(&r, &l)| r * l).fold(T::zero(), T::max);
    if joint == T::zero() {
        return Ok(Rate::Infinite);
    }
    let two = T::of(2.0);
    Ok(Rate::Finite(clamp_gap(-two * joint.log2() + two * (pa.r_max * pb.r_max).log2())))
}

/// Best witness pair found by [`search_superadditive`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub a: StandardState<T>,
    pub b: StandardState<T>,
    pub gap_bits: Rate<T>,
    pub trials: usize,
    pub seed: u64,
}

/// Uniform draw from the probability simplex (normalized exponentials).
pub fn random_simplex_state<T: Real, R: rand::Rng>(m: usize, rng: &mut R) -> StandardState<T> {
    loop {
        let raw: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 {
            let probs: Vec<T> = raw.iter().map(|x| T::of(x / total)).collect();
            if let Ok(s) = validate_state(&probs, GroupSpec::cyclic(m)) {
                return s;
            }
        }
    }
}

fn lex_cmp<T: Real>(x: &[T], y: &[T]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        match a.partial_cmp(b).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    x.len().cmp(&y.len())
}

/// `true` if `(gap, a, b)` should replace the incumbent: larger gap, ties
/// broken by the lexicographically smallest witness.
fn better<T: Real>(
    cand: &(Rate<T>, StandardState<T>, StandardState<T>),
    inc: &(Rate<T>, StandardState<T>, StandardState<T>),
) -> bool {
    match cand.0.total_cmp(&inc.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => {
            let ord = lex_cmp(cand.1.probs(), inc.1.probs()).then_with(|| lex_cmp(cand.2.probs(), inc.2.probs()));
            ord == Ordering::Less
        }
    }
}

/// Randomized search for superadditive pairs over `Z_M`.
///
/// Trials are split into blocks of [`SEARCH_BLOCK`]; block `j` draws from
/// a ChaCha8 stream seeded with `seed + j`, so the result depends only on
/// `(M, trials, seed)` and not on how many threads run the blocks.
pub fn search_superadditive<T: Real>(m: usize, trials: usize, seed: u64) -> Result<SearchResult<T>> {
    GroupSpec::cyclic(m).validate()?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let blocks = trials.div_ceil(SEARCH_BLOCK);
    let per_block: Vec<(Rate<T>, StandardState<T>, StandardState<T>)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(block as u64));
            let count = SEARCH_BLOCK.min(trials - block * SEARCH_BLOCK);
            let mut best: Option<(Rate<T>, StandardState<T>, StandardState<T>)> = None;
            for _ in 0..count {
                let a = random_simplex_state::<T, _>(m, &mut rng);
                let b = random_simplex_state::<T, _>(m, &mut rng);
                let (Ok(pa), Ok(pb)) = (dft_profile(&a), dft_profile(&b)) else { continue };
                let Ok(gap) = gap_from_profiles(&pa, &pb) else { continue };
                let cand = (gap, a, b);
                if best.as_ref().is_none_or(|inc| better(&cand, inc)) {
                    best = Some(cand);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut iter = per_block.into_iter();
    let mut best = iter.next().ok_or(Error::DegenerateProfile)?;
    for cand in iter {
        if better(&cand, &best) {
            best = cand;
        }
    }
    Ok(SearchResult { a: best.1, b: best.2, gap_bits: best.0, trials, seed })
}
