use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::band::FrequencyBand;
use crate::error::{Error, Result};
use crate::ssmodel::{matrix_from_rows, rows};

/// Binary patterns selecting the free entries of `(Â, B̂, Ĉ, D̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMask {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl StructureMask {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let mask = Self { a, b, c, d };
        for (name, m) in mask.parts() {
            if m.iter().any(|x| *x != 0.0 && *x != 1.0) {
                return Err(Error::InvalidMask(format!("{name} has entries other than 0 and 1")));
            }
        }
        let nr = mask.a.nrows();
        let (p, m) = mask.d.shape();
        if mask.a.ncols() != nr || mask.b.shape() != (nr, m) || mask.c.shape() != (p, nr) {
            return Err(Error::InvalidMask(format!(
                "inconsistent shapes A {:?}, B {:?}, C {:?}, D {:?}",
                mask.a.shape(),
                mask.b.shape(),
                mask.c.shape(),
                mask.d.shape()
            )));
        }
        Ok(mask)
    }

    /// Every entry free.
    pub fn full(states: usize, inputs: usize, outputs: usize) -> Self {
        Self {
            a: DMatrix::from_element(states, states, 1.0),
            b: DMatrix::from_element(states, inputs, 1.0),
            c: DMatrix::from_element(outputs, states, 1.0),
            d: DMatrix::from_element(outputs, inputs, 1.0),
        }
    }

    /// `Â, B̂, Ĉ` free and `D̂` held at its initial value.
    pub fn without_feedthrough(states: usize, inputs: usize, outputs: usize) -> Self {
        let mut mask = Self::full(states, inputs, outputs);
        mask.d.fill(0.0);
        mask
    }

    /// Clears the `D̂` mask when the band is unbounded, where `D̂` must equal `D`.
    pub fn for_band(mut self, band: &FrequencyBand) -> Self {
        if band.is_unbounded() {
            self.d.fill(0.0);
        }
        self
    }

    pub fn parts(&self) -> [(&'static str, &DMatrix<f64>); 4] {
        [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d)]
    }

    /// Number of free entries.
    pub fn free_count(&self) -> usize {
        self.parts()
            .iter()
            .map(|(_, m)| m.iter().filter(|x| **x == 1.0).count())
            .sum()
    }

    pub fn check_shape(&self, states: usize, inputs: usize, outputs: usize) -> Result<()> {
        let expected = [
            (states, states),
            (states, inputs),
            (outputs, states),
            (outputs, inputs),
        ];
        for ((name, m), shape) in self.parts().iter().zip(expected) {
            if m.shape() != shape {
                return Err(Error::InvalidMask(format!(
                    "{name} mask is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(())
    }

    pub fn read_json(text: &str, source: &str) -> Result<Self> {
        let file: MaskFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("{source} line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let nr = file.a.len();
        let p = file.d.len();
        let m = file.d.first().map_or(0, Vec::len);
        Self::new(
            matrix_from_rows(&file.a, nr, nr, "A", source)?,
            matrix_from_rows(&file.b, nr, m, "B", source)?,
            matrix_from_rows(&file.c, p, nr, "C", source)?,
            matrix_from_rows(&file.d, p, m, "D", source)?,
        )
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::read_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MaskFile {
            a: rows(&self.a),
            b: rows(&self.b),
            c: rows(&self.c),
            d: rows(&self.d),
        })
        .expect("mask serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct MaskFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
}
