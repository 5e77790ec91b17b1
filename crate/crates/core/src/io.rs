//! JSON formats for states, witness pairs and POVMs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::PovmSpec;
use crate::prob::{validate_state, GroupSpec, StandardState};

/// `{"group": {...}, "probs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub group: GroupSpec,
    pub probs: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &StandardState<f64>) -> Self {
        StateFile { group: state.group(), probs: state.probs().to_vec() }
    }

    pub fn into_state(self) -> Result<StandardState<f64>> {
        validate_state(&self.probs, self.group)
    }
}

pub fn parse_state(json: &str) -> Result<StandardState<f64>> {
    let file: StateFile = serde_json::from_str(json).map_err(|e| Error::InvalidConfig(format!("state file: {e}")))?;
    file.into_state()
}

pub fn state_to_json(state: &StandardState<f64>) -> String {
    serde_json::to_string(&StateFile::from_state(state)).expect("plain data serializes")
}

/// A superadditive pair with its gap in bits (`"inf"` when unbounded).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessFile {
    pub a: StateFile,
    pub b: StateFile,
    pub gap_bits: crate::Rate<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// Effects as row-major matrices of `{"re", "im"}` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub dimension: usize,
    pub effects: Vec<Vec<ComplexEntry>>,
}

impl PovmFile {
    pub fn from_povm(povm: &PovmSpec) -> Self {
        let dim = povm.dimension();
        let effects = povm
            .effects
            .iter()
            .map(|e| {
                (0..dim)
                    .flat_map(|i| (0..dim).map(move |j| (i, j)))
                    .map(|(i, j)| ComplexEntry { re: e[(i, j)].re, im: e[(i, j)].im })
                    .collect()
            })
            .collect();
        PovmFile { dimension: dim, effects }
    }

    pub fn into_povm(self) -> Result<PovmSpec> {
        let dim = self.dimension;
        let mut effects = Vec::with_capacity(self.effects.len());
        for entries in &self.effects {
            if entries.len() != dim * dim {
                return Err(Error::WrongLength { expected: dim * dim, got: entries.len() });
            }
            effects.push(DMatrix::from_row_iterator(dim, dim, entries.iter().map(|c| Complex64::new(c.re, c.im))));
        }
        PovmSpec::new(effects)
    }
}

pub fn parse_povm(json: &str) -> Result<PovmSpec> {
    let file: PovmFile = serde_json::from_str(json).map_err(|e| Error::InvalidConfig(format!("povm file: {e}")))?;
    file.into_povm()
}
