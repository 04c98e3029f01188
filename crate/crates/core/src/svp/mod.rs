//! Exact shortest vectors of lattices given by their Gram matrix, and the
//! (relative) Buser–Sarnak invariants built on top of them.
//!
//! The search is LLL reduction followed by Fincke–Pohst enumeration with the
//! shortest reduced basis vector as initial radius. Two arithmetic modes exist:
//! plain double precision with a relative guard band on the radius, and an exact
//! mode for rational Gram matrices where enumeration still runs in floating
//! point but every surviving candidate is compared with exact rationals.

mod brute;
mod enumerate;
mod lll;

pub use brute::{brute_force_sv, default_box};
pub use enumerate::shortest_vector_with;
pub use lll::{lll_reduce, LllOutput};

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::intlin::{IntLinError, IntMatrix};
use crate::torus::{PolarizedTorus, Subtorus};

/// Largest dimension accepted by [`shortest_vector`].
pub const DEFAULT_DIM_CAP: usize = 24;
/// Largest dimension accepted by [`brute_force_sv`].
pub const BRUTE_FORCE_DIM_CAP: usize = 8;
/// Relative guard band on the enumeration radius in floating-point mode.
pub const RADIUS_GUARD: f64 = 1e-10;
/// Default Lovász parameter.
pub const DEFAULT_DELTA: f64 = 0.99;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvpError {
    #[error("lattice dimension {dim} exceeds the cap {cap}; pass a larger cap or reduce the problem")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("empty lattice has no nonzero vector")]
    Empty,
    #[error("gram matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("ragged gram matrix")]
    Ragged,
    #[error("LLL lost positive definiteness at index {index} (b* = {value:e}); retry in exact mode")]
    LllBreakdown { index: usize, value: f64 },
    #[error("delta must lie in (0.25, 1), got {0}")]
    BadDelta(f64),
    #[error("enumeration radius underflow")]
    RadiusUnderflow,
    #[error("brute-force box of {points:e} points is too large")]
    BoxTooLarge { points: f64 },
    #[error("subtorus of full dimension has no proper relative invariant")]
    NotProperSubtorus,
    #[error("integer overflow in lattice coordinates")]
    Overflow,
}

impl From<IntLinError> for SvpError {
    fn from(_: IntLinError) -> Self {
        SvpError::Overflow
    }
}

/// Rational Gram matrix stored as `scaled / denom` with integer entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactGram {
    pub scaled: IntMatrix,
    pub denom: i128,
}

impl ExactGram {
    pub fn norm_sq(&self, x: &[i128]) -> Option<Ratio<i128>> {
        let n = x.len();
        let mut acc: i128 = 0;
        for i in 0..n {
            let mut row: i128 = 0;
            for j in 0..n {
                row = row.checked_add(self.scaled[i][j].checked_mul(x[j])?)?;
            }
            acc = acc.checked_add(row.checked_mul(x[i])?)?;
        }
        Some(Ratio::new(acc, self.denom))
    }

    /// `Tᵀ G T`, exactly.
    pub fn congruent(&self, t: &IntMatrix) -> Option<ExactGram> {
        let n = t.len();
        let k = t.first().map_or(0, Vec::len);
        let mut out = vec![vec![0i128; k]; k];
        for a in 0..k {
            for b in a..k {
                let mut acc: i128 = 0;
                for i in 0..n {
                    if t[i][a] == 0 {
                        continue;
                    }
                    let mut row: i128 = 0;
                    for j in 0..n {
                        row = row.checked_add(self.scaled[i][j].checked_mul(t[j][b])?)?;
                    }
                    acc = acc.checked_add(t[i][a].checked_mul(row)?)?;
                }
                out[a][b] = acc;
                out[b][a] = acc;
            }
        }
        Some(ExactGram { scaled: out, denom: self.denom })
    }
}

/// Positive definite quadratic form on `Z^dim`.
#[derive(Debug, Clone)]
pub struct GramLattice {
    gram: DMatrix<f64>,
    exact: Option<ExactGram>,
}

impl GramLattice {
    pub fn new(gram: DMatrix<f64>) -> Result<Self, SvpError> {
        if !gram.is_square() {
            return Err(SvpError::Ragged);
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(SvpError::NotPositiveDefinite);
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let defect = (&gram - gram.transpose()).amax() / scale;
        if defect > 1e-9 {
            return Err(SvpError::NotSymmetric(defect));
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        if gram.nrows() > 0 && gram.clone().cholesky().is_none() {
            return Err(SvpError::NotPositiveDefinite);
        }
        Ok(Self { gram, exact: None })
    }

    /// Integer Gram matrix; enables exact mode.
    pub fn from_integer(rows: &[Vec<i64>]) -> Result<Self, SvpError> {
        let ratios: Vec<Vec<Ratio<i128>>> =
            rows.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(x as i128)).collect()).collect();
        Self::from_rational(&ratios)
    }

    /// Rational Gram matrix; enables exact mode.
    pub fn from_rational(rows: &[Vec<Ratio<i128>>]) -> Result<Self, SvpError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SvpError::Ragged);
        }
        let mut denom: i128 = 1;
        for r in rows.iter().flatten() {
            denom = num_integer::lcm(denom, *r.denom());
            if denom > (1i128 << 62) {
                return Err(SvpError::Overflow);
            }
        }
        let scaled = rows.iter().map(|r| r.iter().map(|x| (x * denom).to_integer()).collect()).collect::<IntMatrix>();
        for i in 0..n {
            for j in 0..i {
                if scaled[i][j] != scaled[j][i] {
                    return Err(SvpError::NotSymmetric(1.0));
                }
            }
        }
        let gram = DMatrix::from_fn(n, n, |i, j| Ratio::new(scaled[i][j], denom).to_f64().unwrap_or(f64::NAN));
        let mut lat = Self::new(gram)?;
        lat.exact = Some(ExactGram { scaled, denom });
        Ok(lat)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn exact(&self) -> Option<&ExactGram> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The form `c · G`; exact data is dropped since `c` is real.
    pub fn scaled(&self, c: f64) -> Result<Self, SvpError> {
        Self::new(&self.gram * c)
    }

    /// The form in the basis given by the columns of `t`: `Tᵀ G T`.
    pub fn congruent(&self, t: &IntMatrix) -> Result<Self, SvpError> {
        let n = self.dim();
        let k = t.first().map_or(0, Vec::len);
        let tf = DMatrix::from_fn(n, k, |i, j| t[i][j] as f64);
        let gram = tf.transpose() * &self.gram * &tf;
        let exact = match &self.exact {
            Some(e) => Some(e.congruent(t).ok_or(SvpError::Overflow)?),
            None => None,
        };
        let mut lat = Self::new(gram)?;
        if let Some(e) = exact {
            lat.gram = DMatrix::from_fn(k, k, |i, j| Ratio::new(e.scaled[i][j], e.denom).to_f64().unwrap_or(f64::NAN));
            lat.exact = Some(e);
        }
        Ok(lat)
    }

    pub fn norm_sq(&self, x: &[i64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.gram[(i, j)] * x[j] as f64;
            }
            acc += row * x[i] as f64;
        }
        acc
    }

    pub fn exact_norm_sq(&self, x: &[i64]) -> Option<Ratio<i128>> {
        let xi: Vec<i128> = x.iter().map(|&v| v as i128).collect();
        self.exact.as_ref()?.norm_sq(&xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SvpAlgorithm {
    LllFinckePohst,
    BruteForce,
}

#[derive(Debug, Clone, Serialize)]
pub struct SvpMethod {
    pub algorithm: SvpAlgorithm,
    pub nodes_visited: u64,
    /// Squared length of the shortest basis vector the search started from.
    pub initial_radius_sq: f64,
    pub exact_mode: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SvpResult {
    pub length_sq: f64,
    /// Exact minimum as `(numerator, denominator)` in exact mode.
    #[serde(serialize_with = "serialize_ratio")]
    pub exact_length_sq: Option<Ratio<i128>>,
    pub witness: Vec<i64>,
    pub method: SvpMethod,
}

fn serialize_ratio<S: serde::Serializer>(r: &Option<Ratio<i128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&(r.numer().to_string(), r.denom().to_string())),
        None => s.serialize_none(),
    }
}

/// Shortest nonzero vector with the default dimension cap and `δ = 0.99`.
pub fn shortest_vector(lat: &GramLattice) -> Result<SvpResult, SvpError> {
    shortest_vector_with(lat, DEFAULT_DIM_CAP, DEFAULT_DELTA)
}

/// `m(A, L)`: the squared length of a shortest nonzero lattice vector in the
/// polarization metric. The witness is in lattice coordinates.
pub fn buser_sarnak(torus: &PolarizedTorus) -> Result<SvpResult, SvpError> {
    shortest_vector(&GramLattice::new(torus.gram().clone())?)
}

/// Gram matrix of the projected lattice `q_{F⊥}(Λ) ≅ Λ / Λ_S` in the basis
/// given by [`Subtorus::completion`].
pub fn projected_gram(sub: &Subtorus) -> DMatrix<f64> {
    let torus = sub.parent();
    let n2 = 2 * torus.dim();
    let comp = sub.completion();
    let r = comp.first().map_or(0, Vec::len);
    let c = DMatrix::from_fn(n2, r, |i, j| comp[i][j] as f64);
    let q = sub.proj_perp() * torus.real_basis() * c;
    let g = q.transpose() * torus.metric() * &q;
    (&g + g.transpose()) * 0.5
}

/// `m(T, S, ω) = min over λ ∈ Λ \ Λ_S of |q_{F⊥}(λ)|²`, computed as the
/// minimum of the projected lattice. The witness is a preimage in `Λ`,
/// in lattice coordinates.
pub fn relative_buser_sarnak(sub: &Subtorus) -> Result<SvpResult, SvpError> {
    if sub.codim() == 0 {
        return Err(SvpError::NotProperSubtorus);
    }
    let lat = GramLattice::new(projected_gram(sub))?;
    let mut res = shortest_vector(&lat)?;
    let comp = sub.completion();
    let mut witness = Vec::with_capacity(comp.len());
    for row in comp {
        let mut acc: i128 = 0;
        for (a, &y) in row.iter().zip(&res.witness) {
            acc = acc.checked_add(a.checked_mul(y as i128).ok_or(SvpError::Overflow)?).ok_or(SvpError::Overflow)?;
        }
        witness.push(i64::try_from(acc).map_err(|_| SvpError::Overflow)?);
    }
    res.witness = witness;
    Ok(res)
}
