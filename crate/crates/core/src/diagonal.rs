//! The self-product `A × A` with the product polarization and its diagonal.
//!
//! The product is put back into canonical form by interleaving coordinates:
//! base coordinate `i` of factor `a ∈ {0, 1}` becomes product coordinate
//! `2i + a`. The product type is then `(d_1, d_1, d_2, d_2, …)`, which is again
//! a divisibility chain, and the period matrix is block diagonal up to that
//! permutation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::svp::{buser_sarnak, relative_buser_sarnak, SvpError};
use crate::torus::{make_subtorus, make_torus, PolarizationType, PolarizedTorus, Subtorus, TorusError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagonalError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Svp(#[from] SvpError),
    #[error("lattice vector has {found} coordinates, expected {expected}")]
    BadCoordinates { found: usize, expected: usize },
    #[error("projection onto the normal space disagrees with the closed form: {numeric} vs {closed_form}")]
    ClosedFormMismatch { numeric: f64, closed_form: f64 },
}

/// `(A × A, p₁*L ⊗ p₂*L)` together with its diagonal subtorus.
#[derive(Debug, Clone)]
pub struct ProductTorus {
    base: PolarizedTorus,
    product: PolarizedTorus,
    diagonal: Subtorus,
}

impl ProductTorus {
    pub fn base(&self) -> &PolarizedTorus {
        &self.base
    }

    pub fn product(&self) -> &PolarizedTorus {
        &self.product
    }

    pub fn diagonal(&self) -> &Subtorus {
        &self.diagonal
    }

    /// Product lattice coordinates of `(λ₁, λ₂)` given base lattice coordinates.
    pub fn embed(&self, lam1: &[i64], lam2: &[i64]) -> Result<Vec<i64>, DiagonalError> {
        let n = self.base.dim();
        for lam in [lam1, lam2] {
            if lam.len() != 2 * n {
                return Err(DiagonalError::BadCoordinates { found: lam.len(), expected: 2 * n });
            }
        }
        Ok(embed(n, lam1, lam2))
    }
}

fn embed(n: usize, lam1: &[i64], lam2: &[i64]) -> Vec<i64> {
    let big = 2 * n;
    let mut out = vec![0i64; 2 * big];
    for (a, lam) in [lam1, lam2].into_iter().enumerate() {
        for i in 0..n {
            out[2 * i + a] = lam[i];
            out[big + 2 * i + a] = lam[n + i];
        }
    }
    out
}

pub fn product_with_diagonal(torus: &PolarizedTorus) -> Result<ProductTorus, DiagonalError> {
    let n = torus.dim();
    let tau = torus.period().tau();
    let big = 2 * n;
    let ptau =
        DMatrix::from_fn(big, big, |r, c| if r % 2 == c % 2 { tau[(r / 2, c / 2)] } else { Complex64::new(0.0, 0.0) });
    let d: Vec<u64> = torus.polarization_type().divisors().iter().flat_map(|&x| [x, x]).collect();
    let product = make_torus(PolarizationType::new(d)?, ptau)?;

    let diag_cols: Vec<Vec<i64>> = (0..2 * n)
        .map(|g| {
            let mut e = vec![0i64; 2 * n];
            e[g] = 1;
            embed(n, &e, &e)
        })
        .collect();
    let diagonal = make_subtorus(&product, &diag_cols)?;
    Ok(ProductTorus { base: torus.clone(), product, diagonal })
}

/// `|q_{F⊥}(λ₁, λ₂)|²`, computed through the generic subtorus projection and
/// checked against the closed form `|λ₁ − λ₂|² / 2` and against the explicit
/// projection `((λ₁−λ₂)/2, (λ₂−λ₁)/2)`.
pub fn projection_length_sq(prod: &ProductTorus, lam1: &[i64], lam2: &[i64]) -> Result<f64, DiagonalError> {
    let x = prod.embed(lam1, lam2)?;
    let numeric = prod.diagonal.perp_norm_sq(&x);

    let diff: Vec<i64> = lam1.iter().zip(lam2).map(|(a, b)| a - b).collect();
    let closed_form = prod.base.norm_sq(&diff) / 2.0;

    let scale = 1.0 + prod.base.norm_sq(lam1) + prod.base.norm_sq(lam2);
    if (numeric - closed_form).abs() > 1e-12 * scale {
        return Err(DiagonalError::ClosedFormMismatch { numeric, closed_form });
    }

    // vector-level cross-check: q(λ₁, λ₂) = ((λ₁−λ₂)/2, (λ₂−λ₁)/2)
    let projected = prod.diagonal.proj_perp() * prod.product.lattice_vector(&x);
    let half = prod.base.lattice_vector(&diff) * 0.5;
    let explicit = interleave(prod.base.dim(), &half, &(-&half));
    let defect = (&projected - &explicit).norm();
    if defect > 1e-12 * scale.sqrt() * (1.0 + prod.product.real_basis().amax()) {
        return Err(DiagonalError::ClosedFormMismatch { numeric: projected.norm(), closed_form: explicit.norm() });
    }
    Ok(numeric)
}

/// Real coordinates of `(u, v) ∈ C^n × C^n` in the interleaved product frame.
fn interleave(n: usize, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let big = 2 * n;
    let mut out = DVector::zeros(2 * big);
    for (a, w) in [u, v].into_iter().enumerate() {
        for i in 0..n {
            out[2 * i + a] = w[i];
            out[big + 2 * i + a] = w[n + i];
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalIdentity {
    /// Relative invariant of the diagonal in the product.
    pub lhs: f64,
    /// Half the invariant of the base.
    pub rhs: f64,
    pub rel_err: f64,
    pub lhs_witness: Vec<i64>,
    pub rhs_witness: Vec<i64>,
}

/// Compares `m(A × A, Δ, ω)` with `m(A, L) / 2`.
pub fn lemma31_check(torus: &PolarizedTorus) -> Result<DiagonalIdentity, DiagonalError> {
    let prod = product_with_diagonal(torus)?;
    let rel = relative_buser_sarnak(&prod.diagonal)?;
    let abs = buser_sarnak(torus)?;
    let rhs = abs.length_sq / 2.0;
    Ok(DiagonalIdentity {
        lhs: rel.length_sq,
        rhs,
        rel_err: (rel.length_sq - rhs).abs() / rhs,
        lhs_witness: rel.witness,
        rhs_witness: abs.witness,
    })
}
