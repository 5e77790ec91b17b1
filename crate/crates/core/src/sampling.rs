//! Monte-Carlo simulation of the alignment game: Alice picks `x` uniformly,
//! prepares `T(x)|psi>^N`, Bob measures and records `y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::povm::{channel_matrix, ensemble_states, joint_mutual_info, PovmSpec};
use crate::prob::StandardState;

/// Shots per independently seeded block; fixed so results do not depend on
/// the worker count.
pub const SHOTS_PER_BLOCK: u64 = 1 << 16;
/// Upper bound on shots accepted by [`simulate_protocol`].
pub const MAX_SHOTS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleRecord {
    #[serde(rename = "M")]
    pub order: usize,
    pub shots: u64,
    /// `counts[x][y]`.
    pub counts: Vec<Vec<u64>>,
    pub seed: u64,
    pub blocks: u64,
}

impl SampleRecord {
    /// Rows `x,y,count` for every cell, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,count\n");
        for (x, row) in self.counts.iter().enumerate() {
            for (y, c) in row.iter().enumerate() {
                out.push_str(&format!("{x},{y},{c}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MutualInfoEstimate {
    pub plugin_bits: f64,
    /// Plug-in minus the first-order (Miller-Madow) bias.
    pub corrected_bits: f64,
}

fn inverse_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Sampled joint counts for `shots` rounds of the game.
pub fn simulate_protocol(
    state: &StandardState<f64>,
    copies: usize,
    povm: &PovmSpec,
    shots: u64,
    seed: u64,
) -> Result<SampleRecord> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be positive".into()));
    }
    if shots > MAX_SHOTS {
        return Err(Error::ResourceLimit { what: "shots", requested: shots as u128, cap: MAX_SHOTS as u128 });
    }
    povm.validate()?;
    let ens = ensemble_states(state, copies)?;
    let channel = channel_matrix(&ens, povm)?;
    let m = ens.order;
    let k = povm.outcomes();
    let cdfs: Vec<Vec<f64>> = channel
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            let mut acc = 0.0;
            row.iter()
                .map(|p| {
                    acc += p / total;
                    acc
                })
                .collect()
        })
        .collect();
    let blocks = shots.div_ceil(SHOTS_PER_BLOCK);
    let partials: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b));
            let n = SHOTS_PER_BLOCK.min(shots - b * SHOTS_PER_BLOCK);
            let mut local = vec![0u64; m * k];
            for _ in 0..n {
                let x = rng.random_range(0..m);
                let y = inverse_cdf(&cdfs[x], rng.random::<f64>());
                local[x * k + y] += 1;
            }
            local
        })
        .collect();
    let mut flat = vec![0u64; m * k];
    for part in &partials {
        for (t, v) in flat.iter_mut().zip(part) {
            *t += v;
        }
    }
    let counts = flat.chunks(k).map(|r| r.to_vec()).collect();
    Ok(SampleRecord { order: m, shots, counts, seed, blocks })
}

/// Plug-in mutual information of the empirical joint distribution together
/// with its bias-corrected value.
pub fn plugin_mi(record: &SampleRecord) -> MutualInfoEstimate {
    let joint: Vec<Vec<f64>> = record.counts.iter().map(|r| r.iter().map(|&c| c as f64).collect()).collect();
    let plugin = joint_mutual_info(&joint);
    let cells = record.counts.iter().flatten().filter(|&&c| c > 0).count() as f64;
    let rows = record.counts.iter().filter(|r| r.iter().any(|&c| c > 0)).count() as f64;
    let cols_n = record.counts.first().map_or(0, |r| r.len());
    let cols = (0..cols_n).filter(|&y| record.counts.iter().any(|r| r[y] > 0)).count() as f64;
    let bias = (cells - rows - cols + 1.0) / (2.0 * record.shots as f64 * std::f64::consts::LN_2);
    MutualInfoEstimate { plugin_bits: plugin, corrected_bits: plugin - bias }
}

/// Pearson chi-square of the counts against `shots * p(x) p(y|x)`.
pub fn chi_square(record: &SampleRecord, channel: &[Vec<f64>]) -> f64 {
    let px = 1.0 / record.order as f64;
    let n = record.shots as f64;
    let mut stat = 0.0;
    for (row, probs) in record.counts.iter().zip(channel) {
        for (&c, &p) in row.iter().zip(probs) {
            let expected = n * px * p;
            if expected > 0.0 {
                let d = c as f64 - expected;
                stat += d * d / expected;
            }
        }
    }
    stat
}
