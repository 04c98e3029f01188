//! Polarized complex tori in canonical form.
//!
//! A torus of type `D = diag(d_1, …, d_n)` with period matrix `τ` (symmetric,
//! `Im τ > 0`) is `C^n / Λ` with `Λ = D·Z^n ⊕ τ·Z^n`. The polarization is the
//! Hermitian form `H(u, v) = uᵀ (Im τ)⁻¹ v̄`; its real part is the flat metric
//! and its imaginary part is the integral alternating pairing on `Λ`.
//!
//! Lattice coordinates always refer to the basis ordered as
//! `(d_1 e_1, …, d_n e_n, τ e_1, …, τ e_n)`.
//!
//! Real coordinates on `C^n` are `(Re z_1, …, Re z_n, Im z_1, …, Im z_n)`; in
//! them `Re H` is `diag(Y⁻¹, Y⁻¹)` with `Y = Im τ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::intlin::{smith_normal_form, IntLinError, IntMatrix};

/// Residual below which symmetry and integrality checks accept.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("polarization type: {0}")]
    InvalidType(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("period matrix symmetry violated: max |tau_ij - tau_ji| = {residual:e}")]
    NotSymmetric { residual: f64 },
    #[error("imaginary part of period matrix is not positive definite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("polarization pairing is not integral on the lattice: defect {defect:e}")]
    PairingNotIntegral { defect: f64 },
    #[error("recovered polarization type {recovered:?} differs from declared {declared:?}")]
    TypeMismatch { declared: Vec<u64>, recovered: Vec<u64> },
    #[error("h0 = prod d_i does not fit in 64 bits")]
    H0Overflow,
    #[error("sublattice: {0}")]
    BadSublattice(String),
    #[error("sublattice is not saturated: lattice vector {witness:?} lies in its span but not in it")]
    NotSaturated { witness: Vec<i64> },
    #[error("real span of the sublattice is not a complex subspace: defect {defect:e}")]
    NotComplex { defect: f64 },
    #[error(transparent)]
    Integer(#[from] IntLinError),
}

/// Polarization type `d_1 | d_2 | … | d_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolarizationType(Vec<u64>);

impl PolarizationType {
    pub fn new(d: Vec<u64>) -> Result<Self, TorusError> {
        if let Some(reason) = type_violation(&d) {
            return Err(TorusError::InvalidType(reason));
        }
        Ok(Self(d))
    }

    pub fn divisors(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `h⁰(A, L) = ∏ d_i`, if it fits in `u64`.
    pub fn h0(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))
    }

    pub fn h0_big(&self) -> BigUint {
        self.0.iter().map(|&d| BigUint::from(d)).product()
    }

    /// Self-intersection `L^n = n! · h⁰`.
    pub fn self_intersection(&self) -> BigUint {
        let fact: BigUint = (1..=self.0.len() as u64).map(BigUint::from).product();
        fact * self.h0_big()
    }

    /// The type `level · D`.
    pub fn scaled(&self, level: u64) -> Option<Self> {
        let d = self.0.iter().map(|&x| x.checked_mul(level)).collect::<Option<Vec<_>>>()?;
        Some(Self(d))
    }
}

fn type_violation(d: &[u64]) -> Option<String> {
    if d.is_empty() {
        return Some("dimension n must be at least 1".into());
    }
    if let Some(i) = d.iter().position(|&x| x == 0) {
        return Some(format!("d_{} = 0, every divisor must be at least 1", i + 1));
    }
    for (i, w) in d.windows(2).enumerate() {
        if w[1] % w[0] != 0 {
            return Some(format!(
                "divisibility chain broken: d_{} = {} does not divide d_{} = {}",
                i + 1,
                w[0],
                i + 2,
                w[1]
            ));
        }
    }
    None
}

/// Symmetric `n × n` period matrix with positive definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    tau: DMatrix<Complex64>,
}

impl PeriodMatrix {
    pub fn new(tau: DMatrix<Complex64>) -> Result<Self, TorusError> {
        if !tau.is_square() || tau.nrows() == 0 {
            return Err(TorusError::DimensionMismatch(format!(
                "period matrix must be square and non-empty, got {}x{}",
                tau.nrows(),
                tau.ncols()
            )));
        }
        if !tau.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(TorusError::DimensionMismatch("period matrix has non-finite entries".into()));
        }
        let residual = symmetry_defect(&tau);
        if residual > RESIDUAL_TOL {
            return Err(TorusError::NotSymmetric { residual });
        }
        let min_eigenvalue = min_eigenvalue(&imag_part(&tau));
        if !(min_eigenvalue > 0.0) {
            return Err(TorusError::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self { tau })
    }

    pub fn dim(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    pub fn imag(&self) -> DMatrix<f64> {
        imag_part(&self.tau)
    }
}

fn symmetry_defect(tau: &DMatrix<Complex64>) -> f64 {
    let n = tau.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((tau[(i, j)] - tau[(j, i)]).norm());
        }
    }
    worst
}

fn imag_part(tau: &DMatrix<Complex64>) -> DMatrix<f64> {
    let y = tau.map(|z| z.im);
    (&y + y.transpose()) * 0.5
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// A polarized torus with all derived metric data.
#[derive(Debug, Clone)]
pub struct PolarizedTorus {
    ptype: PolarizationType,
    period: PeriodMatrix,
    /// `n × 2n`, columns are the lattice generators in `C^n`.
    lattice_basis: DMatrix<Complex64>,
    /// `2n × 2n`, columns are the lattice generators in real coordinates.
    real_basis: DMatrix<f64>,
    /// `(Im τ)⁻¹`.
    hermitian: DMatrix<f64>,
    /// `Re H` in real coordinates, `diag(Y⁻¹, Y⁻¹)`.
    metric: DMatrix<f64>,
    gram: DMatrix<f64>,
    pairing: IntMatrix,
    h0: u64,
    ln: BigUint,
}

impl PolarizedTorus {
    pub fn dim(&self) -> usize {
        self.ptype.dim()
    }

    pub fn polarization_type(&self) -> &PolarizationType {
        &self.ptype
    }

    pub fn period(&self) -> &PeriodMatrix {
        &self.period
    }

    pub fn lattice_basis(&self) -> &DMatrix<Complex64> {
        &self.lattice_basis
    }

    pub fn real_basis(&self) -> &DMatrix<f64> {
        &self.real_basis
    }

    /// The matrix of `H` in the standard coordinates of `C^n`.
    pub fn hermitian(&self) -> &DMatrix<f64> {
        &self.hermitian
    }

    /// `Re H` as a real inner product on `R^{2n}`.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    /// `gram[i][j] = Re H(λ_i, λ_j)`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `Im H(λ_i, λ_j)` rounded to integers.
    pub fn pairing(&self) -> &IntMatrix {
        &self.pairing
    }

    pub fn h0(&self) -> u64 {
        self.h0
    }

    pub fn self_intersection(&self) -> &BigUint {
        &self.ln
    }

    /// Real coordinates of the lattice vector with integer coordinates `x`.
    pub fn lattice_vector(&self, x: &[i64]) -> DVector<f64> {
        let coeffs = DVector::from_iterator(x.len(), x.iter().map(|&v| v as f64));
        &self.real_basis * coeffs
    }

    /// Squared `Re H` length of a lattice vector given in lattice coordinates.
    pub fn norm_sq(&self, x: &[i64]) -> f64 {
        let v = DVector::from_iterator(x.len(), x.iter().map(|&v| v as f64));
        (v.transpose() * &self.gram * &v)[(0, 0)]
    }

    /// Full invariant report for this (already accepted) torus.
    pub fn validate(&self) -> ValidationReport {
        validate(self.ptype.divisors(), self.period.tau())
    }
}

/// Hermitian form value `uᵀ M v̄` for a real symmetric `M`.
pub fn hermitian_product(m: &DMatrix<f64>, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    let mc = m.map(|x| Complex64::new(x, 0.0));
    (u.transpose() * mc * v.map(|z| z.conj()))[(0, 0)]
}

/// Builds the canonical torus for `ptype` and `tau`, rejecting any invariant violation.
pub fn make_torus(ptype: PolarizationType, tau: DMatrix<Complex64>) -> Result<PolarizedTorus, TorusError> {
    let n = ptype.dim();
    if tau.nrows() != n || tau.ncols() != n {
        return Err(TorusError::DimensionMismatch(format!(
            "type has length {n} but period matrix is {}x{}",
            tau.nrows(),
            tau.ncols()
        )));
    }
    let period = PeriodMatrix::new(tau)?;
    let h0 = ptype.h0().ok_or(TorusError::H0Overflow)?;
    let ln = ptype.self_intersection();

    let y = period.imag();
    let hermitian = y.clone().try_inverse().ok_or(TorusError::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
    let hermitian = (&hermitian + hermitian.transpose()) * 0.5;

    let mut lattice_basis = DMatrix::<Complex64>::zeros(n, 2 * n);
    for j in 0..n {
        lattice_basis[(j, j)] = Complex64::new(ptype.divisors()[j] as f64, 0.0);
        for i in 0..n {
            lattice_basis[(i, n + j)] = period.tau()[(i, j)];
        }
    }
    let mut real_basis = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        for i in 0..n {
            real_basis[(i, j)] = lattice_basis[(i, j)].re;
            real_basis[(n + i, j)] = lattice_basis[(i, j)].im;
        }
    }
    let mut metric = DMatrix::<f64>::zeros(2 * n, 2 * n);
    metric.view_mut((0, 0), (n, n)).copy_from(&hermitian);
    metric.view_mut((n, n), (n, n)).copy_from(&hermitian);

    let (gram, imag) = gram_and_pairing(&hermitian, &lattice_basis);
    let defect = integrality_defect(&imag);
    if defect > RESIDUAL_TOL {
        return Err(TorusError::PairingNotIntegral { defect });
    }
    let pairing = round_matrix(&imag);
    let recovered = recover_type(&pairing)?;
    if recovered != ptype.divisors() {
        return Err(TorusError::TypeMismatch { declared: ptype.divisors().to_vec(), recovered });
    }
    let min_gram = min_eigenvalue(&gram);
    if !(min_gram > 0.0) {
        return Err(TorusError::NotPositiveDefinite { min_eigenvalue: min_gram });
    }

    Ok(PolarizedTorus { ptype, period, lattice_basis, real_basis, hermitian, metric, gram, pairing, h0, ln })
}

fn gram_and_pairing(hermitian: &DMatrix<f64>, basis: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let hc = hermitian.map(|x| Complex64::new(x, 0.0));
    // h[i][j] = λ_iᵀ M conj(λ_j)
    let h = basis.transpose() * hc * basis.map(|z| z.conj());
    let re = h.map(|z| z.re);
    let im = h.map(|z| z.im);
    ((&re + re.transpose()) * 0.5, (&im - im.transpose()) * 0.5)
}

fn integrality_defect(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| (x - x.round()).abs()).fold(0.0, f64::max)
}

fn round_matrix(m: &DMatrix<f64>) -> IntMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].round() as i128).collect()).collect()
}

/// Recovers `(d_1, …, d_n)` from the elementary divisors of the pairing,
/// which must come in equal pairs.
fn recover_type(pairing: &IntMatrix) -> Result<Vec<u64>, TorusError> {
    let size = pairing.len();
    let snf = smith_normal_form(pairing, size)?;
    let inv = &snf.invariants;
    let mut d = Vec::with_capacity(size / 2);
    for pair in inv.chunks(2) {
        if pair.len() != 2 || pair[0] != pair[1] || pair[0] <= 0 {
            return Err(TorusError::InvalidType(format!(
                "elementary divisors {inv:?} of the pairing do not come in positive pairs"
            )));
        }
        d.push(u64::try_from(pair[0]).map_err(|_| TorusError::H0Overflow)?);
    }
    Ok(d)
}

/// Exact Pfaffian of an integer alternating matrix.
pub fn pfaffian(m: &IntMatrix) -> Option<Ratio<i128>> {
    let n = m.len();
    if n % 2 == 1 {
        return Some(Ratio::zero());
    }
    let mut a: Vec<Vec<Ratio<i128>>> = m.iter().map(|r| r.iter().map(|&x| Ratio::from_integer(x)).collect()).collect();
    let mut pf = Ratio::<i128>::one();
    let mut k = 0;
    while k < n {
        let Some(p) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return Some(Ratio::zero());
        };
        if p != k + 1 {
            a.swap(p, k + 1);
            for row in a.iter_mut() {
                row.swap(p, k + 1);
            }
            pf = -pf;
        }
        let pivot = a[k][k + 1];
        pf = pf.checked_mul(&pivot)?;
        // a[i] -= c·a[k+1] + e·a[k], likewise for columns
        for i in k + 2..n {
            let c = a[k][i].checked_div(&pivot)?;
            let e = a[k + 1][i].checked_div(&a[k + 1][k])?;
            for col in 0..n {
                let sub = a[k + 1][col].checked_mul(&c)?.checked_add(&a[k][col].checked_mul(&e)?)?;
                a[i][col] = a[i][col].checked_sub(&sub)?;
            }
            for row in 0..n {
                let sub = a[row][k + 1].checked_mul(&c)?.checked_add(&a[row][k].checked_mul(&e)?)?;
                a[row][i] = a[row][i].checked_sub(&sub)?;
            }
        }
        k += 2;
    }
    Some(pf)
}

/// One checked invariant with its numeric residual.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub invariant: &'static str,
    pub passed: bool,
    pub residual: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub recovered_type: Option<Vec<u64>>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, invariant: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.invariant == invariant)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Checks every torus invariant on raw input. Never fails; later checks that
/// depend on failed earlier ones are reported as failed with an explanation.
pub fn validate(d: &[u64], tau: &DMatrix<Complex64>) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |invariant, passed, residual, detail: String| {
        checks.push(Check { invariant, passed, residual, detail });
    };

    let type_reason = type_violation(d);
    push(
        "polarization_type",
        type_reason.is_none(),
        None,
        type_reason.unwrap_or_else(|| format!("divisibility chain {d:?} holds")),
    );

    let n = d.len();
    let dims_ok = tau.nrows() == n && tau.ncols() == n && n > 0;
    push("dimensions", dims_ok, None, format!("type length {n}, period matrix {}x{}", tau.nrows(), tau.ncols()));

    let square = tau.is_square() && tau.nrows() > 0;
    let finite = tau.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let sym = if square && finite { symmetry_defect(tau) } else { f64::NAN };
    let sym_ok = sym <= RESIDUAL_TOL;
    push("symmetry", sym_ok, Some(sym), format!("max |tau_ij - tau_ji| = {sym:e}"));

    let min_eig = if square && finite { min_eigenvalue(&imag_part(tau)) } else { f64::NAN };
    let pd_ok = min_eig > 0.0;
    push("imag_positive_definite", pd_ok, Some(min_eig), format!("min eigenvalue of Im tau = {min_eig:e}"));

    let mut recovered_type = None;
    if dims_ok && sym_ok && pd_ok && finite {
        let y = imag_part(tau);
        let hermitian = y.try_inverse().unwrap_or_else(|| DMatrix::zeros(n, n));
        let hermitian = (&hermitian + hermitian.transpose()) * 0.5;
        let mut basis = DMatrix::<Complex64>::zeros(n, 2 * n);
        for j in 0..n {
            basis[(j, j)] = Complex64::new(d[j] as f64, 0.0);
            for i in 0..n {
                basis[(i, n + j)] = tau[(i, j)];
            }
        }
        let (gram, imag) = gram_and_pairing(&hermitian, &basis);
        let defect = integrality_defect(&imag);
        let int_ok = defect <= RESIDUAL_TOL;
        push(
            "pairing_integral",
            int_ok,
            Some(defect),
            format!("max distance of Im H entries to integers = {defect:e}"),
        );

        let rec = recover_type(&round_matrix(&imag));
        let (rec_ok, detail) = match &rec {
            Ok(r) if r.as_slice() == d => (true, format!("elementary divisors recover {r:?}")),
            Ok(r) => (false, format!("elementary divisors recover {r:?}, declared {d:?}")),
            Err(e) => (false, e.to_string()),
        };
        push("type_recovered", int_ok && rec_ok, None, detail);
        recovered_type = rec.ok();

        let pf = pfaffian(&round_matrix(&imag)).map(|p| p.to_integer().unsigned_abs());
        let h0 = d.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x as u128));
        push("pfaffian", int_ok && pf.is_some() && pf == h0, None, format!("|pf(Im H)| = {pf:?}, prod d_i = {h0:?}"));

        let gmin = min_eigenvalue(&gram);
        push("gram_positive_definite", gmin > 0.0, Some(gmin), format!("min eigenvalue of gram = {gmin:e}"));
    } else {
        for inv in ["pairing_integral", "type_recovered", "pfaffian", "gram_positive_definite"] {
            push(inv, false, None, "not evaluated: an earlier invariant failed".into());
        }
    }

    ValidationReport { checks, recovered_type }
}

/// Compact complex subtorus `S = F / Λ_S` with `Λ_S = Λ ∩ F`.
#[derive(Debug, Clone)]
pub struct Subtorus {
    parent: PolarizedTorus,
    k: usize,
    sublattice: IntMatrix,
    f_basis: Vec<DVector<Complex64>>,
    f_real: DMatrix<f64>,
    proj_perp: DMatrix<f64>,
    completion: IntMatrix,
}

impl Subtorus {
    pub fn parent(&self) -> &PolarizedTorus {
        &self.parent
    }

    /// Complex dimension of `S`.
    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn codim(&self) -> usize {
        self.parent.dim() - self.k
    }

    /// `2n × 2k` lattice coordinates of the generators of `Λ_S`.
    pub fn sublattice(&self) -> &IntMatrix {
        &self.sublattice
    }

    /// Complex basis of `F`.
    pub fn f_basis(&self) -> &[DVector<Complex64>] {
        &self.f_basis
    }

    /// Real span of `F` as `2n × 2k` real coordinates.
    pub fn f_real(&self) -> &DMatrix<f64> {
        &self.f_real
    }

    /// Orthogonal projection onto `F⊥` in real coordinates.
    pub fn proj_perp(&self) -> &DMatrix<f64> {
        &self.proj_perp
    }

    /// `2n × 2(n-k)` lattice coordinates completing `Λ_S` to a basis of `Λ`.
    pub fn completion(&self) -> &IntMatrix {
        &self.completion
    }

    /// Squared distance from `F` of a lattice vector in lattice coordinates.
    pub fn perp_norm_sq(&self, x: &[i64]) -> f64 {
        let v = &self.proj_perp * self.parent.lattice_vector(x);
        (v.transpose() * self.parent.metric() * &v)[(0, 0)]
    }
}

/// Multiplication by `i` in real coordinates.
pub(crate) fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(n + i, i)] = 1.0;
        j[(i, n + i)] = -1.0;
    }
    j
}

/// Builds the subtorus spanned by the given lattice vectors (columns of
/// `sublattice`, in lattice coordinates, each of length `2n`).
pub fn make_subtorus(torus: &PolarizedTorus, sublattice: &[Vec<i64>]) -> Result<Subtorus, TorusError> {
    let n = torus.dim();
    let cols = sublattice.len();
    if let Some((i, c)) = sublattice.iter().enumerate().find(|(_, c)| c.len() != 2 * n) {
        return Err(TorusError::BadSublattice(format!("column {i} has {} coordinates, expected {}", c.len(), 2 * n)));
    }
    if cols % 2 == 1 {
        return Err(TorusError::NotComplex { defect: f64::INFINITY });
    }
    if cols > 2 * n {
        return Err(TorusError::BadSublattice(format!("{cols} generators exceed lattice rank {}", 2 * n)));
    }
    let k = cols / 2;

    // Row-major 2n × 2k integer matrix.
    let m: IntMatrix = (0..2 * n).map(|i| sublattice.iter().map(|c| c[i] as i128).collect()).collect();
    let snf = smith_normal_form(&m, cols)?;
    if snf.rank() != cols {
        return Err(TorusError::BadSublattice(format!(
            "generators are linearly dependent (rank {} < {cols})",
            snf.rank()
        )));
    }
    if let Some(t) = snf.invariants.iter().position(|&s| s != 1) {
        let witness = (0..2 * n)
            .map(|i| i64::try_from(snf.left_inv[i][t]))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| TorusError::Integer(IntLinError::Overflow))?;
        return Err(TorusError::NotSaturated { witness });
    }
    let completion: IntMatrix = snf.left_inv.iter().map(|row| row[cols..].to_vec()).collect();

    let metric = torus.metric();
    let f_real = torus.real_basis() * DMatrix::from_fn(2 * n, cols, |i, j| m[i][j] as f64);
    let proj_perp = if cols == 0 {
        DMatrix::identity(2 * n, 2 * n)
    } else {
        let vg = f_real.transpose() * metric;
        let inner = &vg * &f_real;
        let inv = inner.try_inverse().ok_or_else(|| TorusError::BadSublattice("singular span".into()))?;
        DMatrix::identity(2 * n, 2 * n) - &f_real * inv * vg
    };

    if cols > 0 {
        let jf = complex_structure(n) * &f_real;
        let defect = (&proj_perp * &jf).norm() / f_real.norm();
        if defect > RESIDUAL_TOL {
            return Err(TorusError::NotComplex { defect });
        }
    }

    let f_basis = complex_basis(&f_real, n, k);

    Ok(Subtorus { parent: torus.clone(), k, sublattice: m, f_basis, f_real, proj_perp, completion })
}

/// Greedy complex basis of the complex span of real vectors.
fn complex_basis(f_real: &DMatrix<f64>, n: usize, k: usize) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(k);
    let mut ortho: Vec<DVector<Complex64>> = Vec::with_capacity(k);
    for col in f_real.column_iter() {
        if basis.len() == k {
            break;
        }
        let v = DVector::from_fn(n, |i, _| Complex64::new(col[i], col[n + i]));
        let mut w = v.clone();
        for q in &ortho {
            let c = q.dotc(&w);
            w -= q * c;
        }
        let norm = w.norm();
        if norm > 1e-9 * v.norm().max(1.0) {
            ortho.push(w / Complex64::new(norm, 0.0));
            basis.push(v);
        }
    }
    basis
}
