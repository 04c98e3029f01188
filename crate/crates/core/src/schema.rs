//! JSON input schemas shared by the command-line front end and the fuzz
//! targets.
//!
//! ```text
//! torus:    {"type": [d1, ..., dn], "tau": [[{"re": x, "im": y}, ...], ...]}
//! subtorus: {"sublattice": [[int, ...], ...]}          columns, lattice coordinates
//! curve:    {"f": [[c, ...], ...], "p": [[c, ...], ...],
//!            "domain_radius": x, "mults": [[t_re, t_im, m], ...]}
//! ```
//!
//! `tau` is listed row by row and `f[j]`, `p[j]` are the `t^j` coefficients.
//! Unknown fields are rejected everywhere.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::torus::{make_subtorus, make_torus, PolarizationType, PolarizedTorus, Subtorus, TorusError};
use crate::tube::{CurveSpec, TubeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("input shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Curve(#[from] TubeError),
}

impl From<serde_json::Error> for SchemaError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        SchemaError::Json { line: e.line(), column: e.column(), message }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        ComplexJson { re: c.re, im: c.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusInput {
    #[serde(rename = "type")]
    pub polarization_type: Vec<u64>,
    pub tau: Vec<Vec<ComplexJson>>,
}

impl TorusInput {
    pub fn from_torus(torus: &PolarizedTorus) -> Self {
        let tau = torus.period().tau();
        Self {
            polarization_type: torus.polarization_type().divisors().to_vec(),
            tau: (0..tau.nrows()).map(|i| (0..tau.ncols()).map(|j| tau[(i, j)].into()).collect()).collect(),
        }
    }

    /// The period matrix as a dense matrix; rows must all have the same length.
    pub fn tau_matrix(&self) -> Result<DMatrix<Complex64>, SchemaError> {
        let rows = self.tau.len();
        let cols = self.tau.first().map_or(0, Vec::len);
        if let Some((i, r)) = self.tau.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(SchemaError::Shape(format!("tau row {i} has {} entries, row 0 has {cols}", r.len())));
        }
        Ok(DMatrix::from_fn(rows, cols, |i, j| self.tau[i][j].into()))
    }

    pub fn build(&self) -> Result<PolarizedTorus, SchemaError> {
        let ptype = PolarizationType::new(self.polarization_type.clone())?;
        Ok(make_torus(ptype, self.tau_matrix()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtorusInput {
    pub sublattice: Vec<Vec<i64>>,
}

impl SubtorusInput {
    pub fn build(&self, torus: &PolarizedTorus) -> Result<Subtorus, SchemaError> {
        Ok(make_subtorus(torus, &self.sublattice)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveInput {
    #[serde(default)]
    pub f: Vec<Vec<ComplexJson>>,
    pub p: Vec<Vec<ComplexJson>>,
    pub domain_radius: f64,
    #[serde(default)]
    pub mults: Vec<[f64; 3]>,
}

fn coeffs(v: &[Vec<ComplexJson>]) -> Vec<Vec<Complex64>> {
    v.iter().map(|c| c.iter().map(|&z| z.into()).collect()).collect()
}

impl CurveInput {
    pub fn mults(&self) -> Result<Vec<(Complex64, u32)>, SchemaError> {
        self.mults
            .iter()
            .enumerate()
            .map(|(i, &[re, im, m])| {
                if !(m >= 0.0 && m.fract() == 0.0 && m <= u32::MAX as f64) {
                    return Err(SchemaError::Shape(format!(
                        "mults[{i}]: multiplicity {m} is not a non-negative integer"
                    )));
                }
                Ok((Complex64::new(re, im), m as u32))
            })
            .collect()
    }

    pub fn build(&self) -> Result<CurveSpec, SchemaError> {
        Ok(CurveSpec::new(coeffs(&self.f), coeffs(&self.p), self.domain_radius, self.mults()?)?)
    }

    /// The coefficients of `γ = (f, p)` as one vector polynomial. A missing
    /// `f` contributes nothing.
    pub fn gamma(&self) -> Result<Vec<Vec<Complex64>>, SchemaError> {
        let (f, p) = (coeffs(&self.f), coeffs(&self.p));
        let fd = f.first().map_or(0, Vec::len);
        let pd = p.first().map_or(0, Vec::len);
        if let Some((i, c)) = f.iter().enumerate().find(|(_, c)| c.len() != fd) {
            return Err(SchemaError::Shape(format!("f[{i}] has length {}, expected {fd}", c.len())));
        }
        if let Some((i, c)) = p.iter().enumerate().find(|(_, c)| c.len() != pd) {
            return Err(SchemaError::Shape(format!("p[{i}] has length {}, expected {pd}", c.len())));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok((0..f.len().max(p.len()))
            .map(|j| {
                let mut c = f.get(j).cloned().unwrap_or_else(|| vec![zero; fd]);
                c.extend(p.get(j).cloned().unwrap_or_else(|| vec![zero; pd]));
                c
            })
            .collect())
    }
}

pub fn parse_torus(text: &str) -> Result<TorusInput, SchemaError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_subtorus(text: &str) -> Result<SubtorusInput, SchemaError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_curve(text: &str) -> Result<CurveInput, SchemaError> {
    Ok(serde_json::from_str(text)?)
}

/// A single curve object or an array of them.
pub fn parse_curves(text: &str) -> Result<Vec<CurveInput>, SchemaError> {
    if text.trim_start().starts_with('[') {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(vec![parse_curve(text)?])
    }
}
