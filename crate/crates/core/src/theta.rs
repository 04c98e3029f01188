//! Theta functions with characteristics spanning `H⁰(A, L^ℓ)`.
//!
//! For a torus with period matrix `(D, τ)` and level `ℓ`, the basis element
//! indexed by `a ∈ ∏ Z/(ℓ d_i)` is
//!
//! ```text
//! θ_a(z) = ϑ[c, 0](ℓz, ℓτ) = Σ_{l ∈ Zⁿ} exp(πi (l+c)ᵀ ℓτ (l+c) + 2πi (l+c)ᵀ ℓz),   c_i = a_i / (ℓ d_i).
//! ```
//!
//! Every `θ_a` satisfies `θ_a(z + d_j e_j) = θ_a(z)` and
//! `θ_a(z + τ e_j) = exp(−πi ℓ τ_jj − 2πi ℓ z_j) θ_a(z)`, so they are sections
//! of the same line bundle; more generally
//! `θ_a(z + τm) = exp(−πi ℓ mᵀτm − 2πi ℓ mᵀz) θ_a(z)` for `m ∈ Zⁿ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::torus::{min_eigenvalue, PolarizedTorus};

pub const MAX_DIM: usize = 2;
pub const MIN_IMAG_EIGENVALUE: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("theta bases are only built for dimension ≤ {MAX_DIM}, got {0}")]
    DimensionTooLarge(usize),
    #[error("level must be 1 or 2, got {0}")]
    BadLevel(u32),
    #[error("Im τ is nearly singular (smallest eigenvalue {0:e})")]
    NearlySingular(f64),
    #[error("truncation tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("basis index {index} out of range for {size} sections")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("point has {found} coordinates, expected {expected}")]
    BadPoint { found: usize, expected: usize },
}

#[derive(Debug, Clone)]
pub struct ThetaBasis {
    torus: PolarizedTorus,
    level: u32,
    /// Numerators `a`; the characteristic is `a_i / (level · d_i)`.
    characteristics: Vec<Vec<u64>>,
    truncation: i64,
}

/// Summation half-width so that the neglected terms are below `tol` relative
/// to the dominant one for points whose imaginary part lies within one period
/// of the fundamental cell.
pub fn truncation_for(lambda_min: f64, level: u32, tol: f64) -> i64 {
    let core = (-tol.ln() / (PI * lambda_min * level as f64)).sqrt();
    (3.0 + core).ceil() as i64
}

pub fn theta_basis(torus: &PolarizedTorus, level: u32, tol: f64) -> Result<ThetaBasis, ThetaError> {
    let n = torus.dim();
    if n > MAX_DIM {
        return Err(ThetaError::DimensionTooLarge(n));
    }
    if !(level == 1 || level == 2) {
        return Err(ThetaError::BadLevel(level));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(ThetaError::BadTolerance(tol));
    }
    let lam = min_eigenvalue(&torus.period().imag());
    if !(lam >= MIN_IMAG_EIGENVALUE) {
        return Err(ThetaError::NearlySingular(lam));
    }
    let moduli: Vec<u64> = torus.polarization_type().divisors().iter().map(|&d| d * level as u64).collect();
    let mut characteristics = vec![Vec::new()];
    for &m in &moduli {
        characteristics = characteristics
            .into_iter()
            .flat_map(|prefix: Vec<u64>| {
                (0..m).map(move |a| {
                    let mut v = prefix.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    Ok(ThetaBasis { torus: torus.clone(), level, characteristics, truncation: truncation_for(lam, level, tol) })
}

impl ThetaBasis {
    pub fn len(&self) -> usize {
        self.characteristics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characteristics.is_empty()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn torus(&self) -> &PolarizedTorus {
        &self.torus
    }

    pub fn characteristics(&self) -> &[Vec<u64>] {
        &self.characteristics
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn with_truncation(mut self, k: i64) -> Self {
        self.truncation = k.max(1);
        self
    }

    /// Index of the characteristic `-a mod (level · d)`.
    pub fn negated_index(&self, index: usize) -> usize {
        let a = &self.characteristics[index];
        let moduli: Vec<u64> = self.moduli();
        let neg: Vec<u64> = a.iter().zip(&moduli).map(|(&x, &m)| (m - x % m) % m).collect();
        self.index_of(&neg)
    }

    fn moduli(&self) -> Vec<u64> {
        self.torus.polarization_type().divisors().iter().map(|&d| d * self.level as u64).collect()
    }

    fn index_of(&self, a: &[u64]) -> usize {
        a.iter().zip(self.moduli()).fold(0usize, |acc, (&x, m)| acc * m as usize + x as usize)
    }

    fn characteristic(&self, index: usize) -> Vec<f64> {
        self.characteristics[index].iter().zip(self.moduli()).map(|(&a, m)| a as f64 / m as f64).collect()
    }

    fn check(&self, index: usize, z: &[Complex64]) -> Result<(), ThetaError> {
        if index >= self.len() {
            return Err(ThetaError::IndexOutOfRange { index, size: self.len() });
        }
        if z.len() != self.torus.dim() {
            return Err(ThetaError::BadPoint { found: z.len(), expected: self.torus.dim() });
        }
        Ok(())
    }

    /// The truncated series at `z` without any reduction.
    pub fn evaluate_series(&self, index: usize, z: &[Complex64]) -> Result<Complex64, ThetaError> {
        self.check(index, z)?;
        Ok(self.series(&self.characteristic(index), z))
    }

    fn series(&self, c: &[f64], z: &[Complex64]) -> Complex64 {
        let n = c.len();
        let tau = self.torus.period().tau();
        let l = self.level as f64;
        let k = self.truncation;
        let mut idx = vec![-k; n];
        let mut sum = Complex64::new(0.0, 0.0);
        loop {
            let w: Vec<f64> = idx.iter().zip(c).map(|(&i, &ci)| i as f64 + ci).collect();
            let mut e = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    e += tau[(i, j)] * (w[i] * w[j]);
                }
                e += 2.0 * z[i] * w[i];
            }
            sum += (Complex64::new(0.0, PI * l) * e).exp();
            let mut p = 0;
            loop {
                if p == n {
                    return sum;
                }
                idx[p] += 1;
                if idx[p] <= k {
                    break;
                }
                idx[p] = -k;
                p += 1;
            }
        }
    }

    /// `θ_index(z)`. The point is first moved into the fundamental cell; the
    /// value is then recovered through the automorphy factor.
    pub fn evaluate(&self, index: usize, z: &[Complex64]) -> Result<Complex64, ThetaError> {
        self.check(index, z)?;
        let (z0, log_factor) = self.reduce(z);
        Ok(self.series(&self.characteristic(index), &z0) * log_factor.exp())
    }

    /// All basis values at `z`, sharing one reduction.
    pub fn evaluate_all(&self, z: &[Complex64]) -> Result<Vec<Complex64>, ThetaError> {
        self.check(0, z)?;
        let (z0, log_factor) = self.reduce(z);
        let f = log_factor.exp();
        Ok((0..self.len()).map(|i| self.series(&self.characteristic(i), &z0) * f).collect())
    }

    /// Returns `z0` and `log φ` with `θ(z) = φ · θ(z0)` for every basis element.
    fn reduce(&self, z: &[Complex64]) -> (Vec<Complex64>, Complex64) {
        let n = z.len();
        let tau = self.torus.period().tau();
        let y_inv = self.torus.hermitian();
        let im = DVector::from_iterator(n, z.iter().map(|w| w.im));
        let m: Vec<f64> = (y_inv * im).iter().map(|x| x.round()).collect();
        // z = z1 + τm
        let z1: Vec<Complex64> = (0..n).map(|i| z[i] - (0..n).map(|j| tau[(i, j)] * m[j]).sum::<Complex64>()).collect();
        let mut mtm = Complex64::new(0.0, 0.0);
        let mut mz = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                mtm += tau[(i, j)] * (m[i] * m[j]);
            }
            mz += z1[i] * m[i];
        }
        let l = self.level as f64;
        let log_factor = Complex64::new(0.0, -PI * l) * (mtm + 2.0 * mz);
        let d = self.torus.polarization_type().divisors();
        let z0 = z1
            .iter()
            .zip(d)
            .map(|(w, &di)| {
                let di = di as f64;
                Complex64::new(w.re - di * (w.re / di).round(), w.im)
            })
            .collect();
        (z0, log_factor)
    }

    /// Evaluation matrix with rows indexed by points and columns by sections.
    pub fn evaluation_matrix(&self, points: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>, ThetaError> {
        let mut m = DMatrix::zeros(points.len(), self.len());
        for (r, z) in points.iter().enumerate() {
            for (c, v) in self.evaluate_all(z)?.into_iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{make_torus, PolarizationType};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn torus(d: &[u64], tau: DMatrix<Complex64>) -> PolarizedTorus {
        make_torus(PolarizationType::new(d.to_vec()).unwrap(), tau).unwrap()
    }

    fn square(d: u64) -> PolarizedTorus {
        torus(&[d], DMatrix::from_element(1, 1, c(0.0, 1.0)))
    }

    fn skew2(d: &[u64]) -> PolarizedTorus {
        torus(d, DMatrix::from_row_slice(2, 2, &[c(0.2, 1.1), c(0.1, 0.3), c(0.1, 0.3), c(-0.15, 0.9)]))
    }

    fn random_point(rng: &mut ChaCha8Rng, t: &PolarizedTorus) -> Vec<Complex64> {
        let n = t.dim();
        let tau = t.period().tau();
        let d = t.polarization_type().divisors();
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        (0..n).map(|i| d[i] as f64 * u[i] + (0..n).map(|j| tau[(i, j)] * v[j]).sum::<Complex64>()).collect()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn counting() {
        assert_eq!(theta_basis(&square(3), 1, DEFAULT_TOL).unwrap().len(), 3);
        assert_eq!(theta_basis(&square(3), 2, DEFAULT_TOL).unwrap().len(), 6);
        assert_eq!(theta_basis(&skew2(&[1, 3]), 2, DEFAULT_TOL).unwrap().len(), 12);
        let b = theta_basis(&square(3), 1, DEFAULT_TOL).unwrap();
        assert_eq!(b.characteristics(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn refusals() {
        let t3 = torus(&[1, 1, 1], DMatrix::from_diagonal(&DVector::from_element(3, c(0.0, 1.0))));
        assert!(matches!(theta_basis(&t3, 1, DEFAULT_TOL), Err(ThetaError::DimensionTooLarge(3))));
        assert!(matches!(theta_basis(&square(1), 3, DEFAULT_TOL), Err(ThetaError::BadLevel(3))));
        let thin = torus(&[1], DMatrix::from_element(1, 1, c(0.0, 1e-7)));
        assert!(matches!(theta_basis(&thin, 1, DEFAULT_TOL), Err(ThetaError::NearlySingular(_))));
        let b = theta_basis(&square(1), 1, DEFAULT_TOL).unwrap();
        assert!(b.evaluate(1, &[c(0.0, 0.0)]).is_err());
        assert!(b.evaluate(0, &[]).is_err());
    }

    #[test]
    fn classical_zero() {
        let b = theta_basis(&square(1), 1, DEFAULT_TOL).unwrap();
        assert!(b.evaluate(0, &[c(0.5, 0.5)]).unwrap().norm() < 1e-8);
        assert!(b.evaluate_series(0, &[c(0.5, 0.5)]).unwrap().norm() < 1e-8);
        assert!(b.evaluate(0, &[c(0.0, 0.0)]).unwrap().norm() > 0.5);
    }

    #[test]
    fn quasi_periodicity_of_raw_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for t in [square(3), square(2), skew2(&[1, 3]), skew2(&[2, 2])] {
            let n = t.dim();
            let tau = t.period().tau().clone();
            let d = t.polarization_type().divisors().to_vec();
            for level in [1, 2] {
                let b = theta_basis(&t, level, DEFAULT_TOL).unwrap();
                let l = level as f64;
                for _ in 0..20 {
                    let z = random_point(&mut rng, &t);
                    for j in 0..n {
                        let mut zd = z.clone();
                        zd[j] += d[j] as f64;
                        let mut zt = z.clone();
                        for i in 0..n {
                            zt[i] += tau[(i, j)];
                        }
                        let factor = (Complex64::new(0.0, -PI * l) * (tau[(j, j)] + 2.0 * z[j])).exp();
                        for k in 0..b.len() {
                            let v = b.evaluate_series(k, &z).unwrap();
                            assert!(rel(b.evaluate_series(k, &zd).unwrap(), v) < 1e-8);
                            assert!(rel(b.evaluate_series(k, &zt).unwrap(), factor * v) < 1e-8);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = skew2(&[1, 2]);
        let b = theta_basis(&t, 2, DEFAULT_TOL).unwrap();
        let wide = b.clone().with_truncation(b.truncation() + 4);
        for _ in 0..20 {
            let mut z = random_point(&mut rng, &t);
            z[0] += c(1.0, 0.7);
            z[1] += c(-2.0, -0.6);
            for k in 0..b.len() {
                assert!(rel(b.evaluate(k, &z).unwrap(), wide.evaluate_series(k, &z).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn parity_permutes_characteristics() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for t in [square(3), skew2(&[1, 3])] {
            for level in [1, 2] {
                let b = theta_basis(&t, level, DEFAULT_TOL).unwrap();
                for _ in 0..10 {
                    let z = random_point(&mut rng, &t);
                    let mz: Vec<Complex64> = z.iter().map(|w| -w).collect();
                    for k in 0..b.len() {
                        let lhs = b.evaluate_series(k, &mz).unwrap();
                        let rhs = b.evaluate_series(b.negated_index(k), &z).unwrap();
                        assert!(rel(lhs, rhs) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn truncation_converged() {
        let b = theta_basis(&skew2(&[1, 3]), 1, DEFAULT_TOL).unwrap();
        let doubled = b.clone().with_truncation(2 * b.truncation());
        let z = [c(0.3, 0.2), c(-0.4, 0.1)];
        for k in 0..b.len() {
            assert!(rel(b.evaluate(k, &z).unwrap(), doubled.evaluate(k, &z).unwrap()) < 1e-14);
        }
    }
}
