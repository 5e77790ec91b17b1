//! Accessible information for the `Z_M` orbit ensemble: arbitrary-POVM
//! mutual information and a projected gradient ascent over POVMs used to
//! cross-check the covariant (Fourier-basis) measurement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclic::copy_distribution_zm;
use crate::dft::roots_of_unity;
use crate::error::{Error, Result};
use crate::prob::StandardState;

/// Effects may have eigenvalues down to this before they count as non-PSD.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Entrywise tolerance on `sum_y E_y = I`.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-9;

const TINY_PROBABILITY: f64 = 1e-300;

/// Orbit `{T(x) |psi>^N : x in Z_M}` with uniform prior.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub order: usize,
    /// `sqrt(c_k)` of the `N`-copy distribution.
    pub amplitudes: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
}

impl EnsembleSpec {
    pub fn prior(&self) -> f64 {
        1.0 / self.order as f64
    }

    /// `<psi(x)|psi(y)>`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let m = self.order;
        DMatrix::from_fn(m, m, |x, y| self.states[x].dotc(&self.states[y]))
    }

    /// Holevo quantity `S(average state)` in bits (each member is pure),
    /// from the eigenvalues of the averaged density matrix.
    pub fn holevo_quantity(&self) -> f64 {
        let m = self.order;
        let mut rho = DMatrix::<Complex64>::zeros(m, m);
        for s in &self.states {
            rho += s * s.adjoint();
        }
        rho /= Complex64::new(m as f64, 0.0);
        let eig = rho.symmetric_eigen();
        -eig.eigenvalues.iter().map(|&l| if l > 0.0 { l * l.log2() } else { 0.0 }).sum::<f64>()
    }
}

/// Build the orbit ensemble of `N` copies of a cyclic state.
pub fn ensemble_states(state: &StandardState<f64>, copies: usize) -> Result<EnsembleSpec> {
    let m = state.cyclic_order()?;
    let c = copy_distribution_zm(state, copies)?.distribution.c;
    let amplitudes: Vec<f64> = c.iter().map(|&ck| ck.max(0.0).sqrt()).collect();
    let roots = roots_of_unity::<f64>(m);
    let states = (0..m).map(|x| DVector::from_fn(m, |k, _| roots[(k * x) % m] * amplitudes[k])).collect();
    Ok(EnsembleSpec { order: m, amplitudes, states })
}

/// A finite POVM `{E_y}` on the `M`-dimensional effective space.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSpec {
    pub effects: Vec<DMatrix<Complex64>>,
}

impl PovmSpec {
    /// Checks shapes, PSD-ness within [`PSD_TOLERANCE`], and completeness
    /// within [`COMPLETENESS_TOLERANCE`].
    pub fn new(effects: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let povm = PovmSpec { effects };
        povm.validate()?;
        Ok(povm)
    }

    pub fn dimension(&self) -> usize {
        self.effects.first().map_or(0, |e| e.nrows())
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dimension();
        if self.effects.is_empty() || dim == 0 {
            return Err(Error::InvalidPovm("no effects".into()));
        }
        let mut total = DMatrix::<Complex64>::zeros(dim, dim);
        for (y, e) in self.effects.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.nrows().max(e.ncols()) });
            }
            let herm = hermitian_part(e);
            if (e - &herm).iter().any(|v| v.norm() > COMPLETENESS_TOLERANCE) {
                return Err(Error::InvalidPovm(format!("effect {y} is not Hermitian")));
            }
            let min_eig = herm.symmetric_eigen().eigenvalues.min();
            if min_eig < -PSD_TOLERANCE {
                return Err(Error::InvalidPovm(format!("effect {y} has eigenvalue {min_eig}")));
            }
            total += e;
        }
        let identity = DMatrix::<Complex64>::identity(dim, dim);
        let worst = (total - identity).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if worst > COMPLETENESS_TOLERANCE {
            return Err(Error::InvalidPovm(format!("effects sum to identity only within {worst}")));
        }
        Ok(())
    }
}

fn hermitian_part(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Fourier-basis measurement `E_y = |e_y><e_y|`,
/// `|e_y> = M^{-1/2} sum_k e^{2 pi i k y / M} |k>`.
pub fn covariant_povm(m: usize) -> Result<PovmSpec> {
    if m < 2 {
        return Err(Error::InvalidGroup("cyclic order M must be >= 2".into()));
    }
    let roots = roots_of_unity::<f64>(m);
    let norm = 1.0 / (m as f64).sqrt();
    let effects = (0..m)
        .map(|y| {
            let e = DVector::from_fn(m, |k, _| roots[(k * y) % m] * norm);
            &e * e.adjoint()
        })
        .collect();
    Ok(PovmSpec { effects })
}

/// Channel `p(y | x) = <psi(x)| E_y |psi(x)>` as an `M x K` row-stochastic table.
pub fn channel_matrix(ens: &EnsembleSpec, povm: &PovmSpec) -> Result<Vec<Vec<f64>>> {
    if povm.dimension() != ens.order {
        return Err(Error::DimensionMismatch { expected: ens.order, got: povm.dimension() });
    }
    Ok(ens.states.iter().map(|psi| povm.effects.iter().map(|e| psi.dotc(&(e * psi)).re.max(0.0)).collect()).collect())
}

/// Mutual information (bits) of a joint distribution given as a table of
/// non-negative weights; the table need not be normalized.
pub fn joint_mutual_info(joint: &[Vec<f64>]) -> f64 {
    let total: f64 = joint.iter().flatten().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let cols = joint.first().map_or(0, |r| r.len());
    let row_sums: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / total).collect();
    let col_sums: Vec<f64> = (0..cols).map(|y| joint.iter().map(|r| r[y]).sum::<f64>() / total).collect();
    let mut info = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (y, &w) in row.iter().enumerate() {
            let pxy = w / total;
            if pxy > 0.0 {
                info += pxy * (pxy / (row_sums[x] * col_sums[y])).log2();
            }
        }
    }
    info.max(0.0)
}

/// Classical mutual information of a prior pushed through a channel.
pub fn classical_mutual_info(prior: &[f64], channel: &[Vec<f64>]) -> f64 {
    let joint: Vec<Vec<f64>> =
        prior.iter().zip(channel).map(|(&px, row)| row.iter().map(|&p| px * p).collect()).collect();
    joint_mutual_info(&joint)
}

/// `I(X:Y)` in bits for the orbit ensemble measured with `povm`.
pub fn mutual_info_of_povm(ens: &EnsembleSpec, povm: &PovmSpec) -> Result<f64> {
    let channel = channel_matrix(ens, povm)?;
    let prior = vec![ens.prior(); ens.order];
    Ok(classical_mutual_info(&prior, &channel))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Number of outcomes `K`; `None` means `M`.
    pub outcomes: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_size: f64,
    /// Convergence: `|delta I| < tolerance` for `patience` consecutive accepted steps.
    pub tolerance: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            outcomes: None,
            restarts: 5,
            max_iters: 2000,
            step_size: 0.1,
            tolerance: 1e-10,
            patience: 10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self, m: usize) -> Result<usize> {
        let k = self.outcomes.unwrap_or(m);
        if k < m {
            return Err(Error::InvalidConfig(format!("need at least M = {m} outcomes, got {k}")));
        }
        if self.restarts == 0 || self.max_iters == 0 || self.patience == 0 {
            return Err(Error::InvalidConfig("restarts, max_iters and patience must be positive".into()));
        }
        if self.step_size.is_nan() || self.step_size <= 0.0 || self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("step size and tolerance must be positive".into()));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub povm: PovmSpec,
    pub mutual_info_bits: f64,
    /// Objective after every accepted step, starting from the initial point.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub povm: PovmSpec,
    pub mutual_info_bits: f64,
    pub trace: Vec<f64>,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    /// `false` when the best restart hit `max_iters` first.
    pub converged: bool,
}

fn eigen_function(a: &DMatrix<Complex64>, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
    let eig = hermitian_part(a).symmetric_eigen();
    let vals = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(f(l), 0.0)));
    &eig.eigenvectors * vals * eig.eigenvectors.adjoint()
}

/// Clip negative eigenvalues.
fn project_psd(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    eigen_function(a, |l| l.max(0.0))
}

/// `E_y <- A^{-1/2} E_y A^{-1/2}` with `A = sum_y E_y`.
fn restore_completeness(effects: Vec<DMatrix<Complex64>>) -> Option<Vec<DMatrix<Complex64>>> {
    let dim = effects[0].nrows();
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for e in &effects {
        total += e;
    }
    let total = hermitian_part(&total);
    if total.clone().symmetric_eigen().eigenvalues.min() < 1e-12 {
        return None;
    }
    let inv_sqrt = eigen_function(&total, |l| 1.0 / l.sqrt());
    Some(effects.iter().map(|e| hermitian_part(&(&inv_sqrt * e * &inv_sqrt))).collect())
}

/// Natural-log gradient `G_y = sum_x p_x rho_x ln(p(y|x) / p(y))`.
fn gradient(ens: &EnsembleSpec, povm: &PovmSpec) -> Result<Vec<DMatrix<Complex64>>> {
    let channel = channel_matrix(ens, povm)?;
    let px = ens.prior();
    let k = povm.outcomes();
    let py: Vec<f64> = (0..k).map(|y| channel.iter().map(|row| px * row[y]).sum()).collect();
    Ok((0..k)
        .map(|y| {
            let mut g = DMatrix::<Complex64>::zeros(ens.order, ens.order);
            for (x, psi) in ens.states.iter().enumerate() {
                let ratio = channel[x][y].max(TINY_PROBABILITY) / py[y].max(TINY_PROBABILITY);
                g += psi * psi.adjoint() * Complex64::new(px * ratio.ln(), 0.0);
            }
            g
        })
        .collect())
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix.
fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn initial_povm(m: usize, k: usize, restart: usize, seed: u64) -> Result<PovmSpec> {
    let base = covariant_povm(m)?.effects;
    // Extra outcomes share the covariant projectors evenly.
    let effects: Vec<DMatrix<Complex64>> = (0..k)
        .map(|y| {
            let share = (k - y % m).div_ceil(m);
            &base[y % m] * Complex64::new(1.0 / share as f64, 0.0)
        })
        .collect();
    if restart == 0 {
        return Ok(PovmSpec { effects });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
    let u = haar_unitary(m, &mut rng);
    let ud = u.adjoint();
    Ok(PovmSpec { effects: effects.iter().map(|e| hermitian_part(&(&u * e * &ud))).collect() })
}

/// One ascent run from a given starting POVM.
pub fn ascend(ens: &EnsembleSpec, start: PovmSpec, cfg: &OptimizerConfig) -> Result<RestartOutcome> {
    let mut povm = start;
    let mut value = mutual_info_of_povm(ens, &povm)?;
    let mut trace = vec![value];
    let mut step = cfg.step_size;
    let mut calm = 0usize;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let grad = gradient(ens, &povm)?;
        let moved: Vec<DMatrix<Complex64>> =
            povm.effects.iter().zip(&grad).map(|(e, g)| project_psd(&(e + g * Complex64::new(step, 0.0)))).collect();
        let candidate = restore_completeness(moved).map(|effects| PovmSpec { effects });
        let accepted = match candidate {
            Some(cand) => {
                let cand_value = mutual_info_of_povm(ens, &cand)?;
                if cand_value >= value {
                    let change = cand_value - value;
                    povm = cand;
                    value = cand_value;
                    trace.push(value);
                    calm = if change.abs() < cfg.tolerance { calm + 1 } else { 0 };
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        if !accepted {
            step *= 0.5;
        }
        if calm >= cfg.patience || step < 1e-14 {
            converged = true;
            break;
        }
    }
    Ok(RestartOutcome { povm, mutual_info_bits: value, trace, iterations, converged })
}

/// Maximize `I(X:Y)` over `K`-outcome POVMs. Restart 0 starts at the
/// covariant measurement; restart `j > 0` starts at a Haar-random rotation
/// of it seeded with `seed + j`. The best restart wins, ties to the lowest index.
pub fn optimize_povm(ens: &EnsembleSpec, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    let k = cfg.validate(ens.order)?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|j| ascend(ens, initial_povm(ens.order, k, j, cfg.seed)?, cfg))
        .collect::<Result<_>>()?;
    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.mutual_info_bits).collect();
    let mut best = 0;
    for (j, v) in restart_values.iter().enumerate() {
        if *v > restart_values[best] {
            best = j;
        }
    }
    let winner = outcomes.into_iter().nth(best).expect("restarts >= 1");
    Ok(OptimizationResult {
        povm: winner.povm,
        mutual_info_bits: winner.mutual_info_bits,
        trace: winner.trace,
        best_restart: best,
        restart_values,
        converged: winner.converged,
    })
}
