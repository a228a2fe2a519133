//! Instance files: JSON documents or bare CSV matrices.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use conelcp_core::{Matrix, SimplicialCone, Vector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("{0}")]
    Shape(String),
    #[error("invalid cone: {0}")]
    Cone(conelcp_core::Error),
}

#[derive(Deserialize)]
struct ConeRepr {
    generators: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRepr {
    matrix: Matrix,
    q: Option<Vector>,
    cone: Option<ConeRepr>,
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
}

/// A parsed problem instance.
#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub matrix: Matrix,
    pub q: Option<Vector>,
    pub cone: Option<SimplicialCone>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

/// Generator output; the same layout `InstanceFile` reads.
#[derive(Serialize)]
pub struct GeneratedInstance<'a> {
    pub matrix: &'a Matrix,
    pub seed: u64,
}

impl InstanceFile {
    pub fn from_matrix(matrix: Matrix) -> Self {
        InstanceFile {
            matrix,
            q: None,
            cone: None,
            seed: None,
            samples: None,
            tol: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// JSON when the first non-blank byte is `{`, CSV otherwise.
    pub fn parse(text: &str) -> Result<Self, InputError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            parse_csv(text).map(Self::from_matrix)
        }
    }

    fn parse_json(text: &str) -> Result<Self, InputError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        // A bare matrix document is accepted as an instance on its own.
        if value.get("rows").is_some() {
            return Ok(Self::from_matrix(serde_json::from_value(value)?));
        }
        let repr: InstanceRepr = serde_json::from_value(value)?;
        let m = repr.matrix.dim();
        if let Some(q) = &repr.q {
            if q.dim() != m {
                return Err(InputError::Shape(format!(
                    "q has {} entries, the matrix is {m}x{m}",
                    q.dim()
                )));
            }
        }
        let cone = match repr.cone {
            None => None,
            Some(c) => {
                let generators = Matrix::from_rows(c.generators).map_err(InputError::Cone)?;
                if generators.dim() != m {
                    return Err(InputError::Shape(format!(
                        "cone has {} generators, the matrix is {m}x{m}",
                        generators.dim()
                    )));
                }
                Some(SimplicialCone::from_generators(generators).map_err(InputError::Cone)?)
            }
        };
        if let Some(tol) = repr.tol {
            check_tol(tol).map_err(InputError::Shape)?;
        }
        Ok(InstanceFile {
            matrix: repr.matrix,
            q: repr.q,
            cone,
            seed: repr.seed,
            samples: repr.samples,
            tol: repr.tol,
        })
    }
}

pub fn check_tol(tol: f64) -> Result<(), String> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(format!("tolerance must be positive and finite, got {tol}"))
    }
}

/// `m` lines of `m` comma-separated decimals; blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<Matrix, InputError> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                let cell = cell.trim();
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    Ok(_) => Err(InputError::Csv {
                        line: k + 1,
                        reason: format!("non-finite value `{cell}`"),
                    }),
                    Err(_) => Err(InputError::Csv {
                        line: k + 1,
                        reason: format!("not a number: `{cell}`"),
                    }),
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Matrix::from_rows(rows).map_err(|e| InputError::Shape(e.to_string()))
}

/// Raw bytes of `path`, or of standard input for `-`.
pub fn read_source(path: &Path) -> Result<Vec<u8>, InputError> {
    let io_err = |source| InputError::Io {
        path: path.display().to_string(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(io_err)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(io_err)
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load(path: &Path) -> Result<(InstanceFile, String), InputError> {
    let bytes = read_source(path)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| InputError::Shape("input is not valid UTF-8".into()))?;
    Ok((InstanceFile::parse(&text)?, digest(&bytes)))
}
