//! JSON wire formats: matrices as row-major `[re, im]` pair lists, channels
//! as weighted Kraus terms, Choi blocks as a matrix plus its leg dimensions.

use crate::channel::{ChoiMatrix, KrausMap};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn of(m: &ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::InvalidInput(format!(
                "matrix data has {} entries, expected {}x{} = {}",
                self.data.len(),
                self.rows,
                self.cols,
                self.rows * self.cols
            )));
        }
        ComplexMatrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub weight: [f64; 2],
    pub kraus: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub terms: Vec<TermJson>,
}

impl ChannelJson {
    pub fn of(m: &KrausMap) -> Self {
        ChannelJson {
            in_dim: m.in_dim(),
            out_dim: m.out_dim(),
            terms: m
                .terms()
                .iter()
                .map(|(w, k)| TermJson {
                    weight: [w.re, w.im],
                    kraus: MatrixJson::of(k),
                })
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<KrausMap> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((Complex64::new(t.weight[0], t.weight[1]), t.kraus.to_matrix()?)))
            .collect::<Result<Vec<_>>>()?;
        KrausMap::new(self.in_dim, self.out_dim, terms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChoiJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub matrix: MatrixJson,
}

impl ChoiJson {
    pub fn of(j: &ChoiMatrix) -> Self {
        ChoiJson {
            in_dim: j.in_dim(),
            out_dim: j.out_dim(),
            matrix: MatrixJson::of(j.matrix()),
        }
    }

    pub fn to_choi(&self) -> Result<ChoiMatrix> {
        ChoiMatrix::new(self.in_dim, self.out_dim, self.matrix.to_matrix()?)
    }
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    parsed.to_matrix()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::of(m)).expect("matrix serializes")
}

pub fn channel_from_json(text: &str) -> Result<KrausMap> {
    let parsed: ChannelJson =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    parsed.to_map()
}

pub fn channel_to_json(m: &KrausMap) -> String {
    serde_json::to_string_pretty(&ChannelJson::of(m)).expect("channel serializes")
}

pub fn choi_from_json(text: &str) -> Result<ChoiMatrix> {
    let parsed: ChoiJson =
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    parsed.to_choi()
}

pub fn choi_to_json(j: &ChoiMatrix) -> String {
    serde_json::to_string_pretty(&ChoiJson::of(j)).expect("choi serializes")
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Prefixes parse failures with the offending file name.
fn at_path<T>(path: &Path, parsed: Result<T>) -> Result<T> {
    parsed.map_err(|e| match e {
        Error::Json(msg) => Error::Json(format!("{}: {msg}", path.display())),
        Error::InvalidInput(msg) => Error::InvalidInput(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    at_path(path, matrix_from_json(&read_text(path)?))
}

pub fn read_channel(path: &Path) -> Result<KrausMap> {
    at_path(path, channel_from_json(&read_text(path)?))
}

pub fn read_choi(path: &Path) -> Result<ChoiMatrix> {
    at_path(path, choi_from_json(&read_text(path)?))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_channel(path: &Path, m: &KrausMap) -> Result<()> {
    std::fs::write(path, channel_to_json(m))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
