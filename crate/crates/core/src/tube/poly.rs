//! Polynomials `C → C^m` stored as coefficient vectors indexed by power.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct VecPoly {
    dim: usize,
    /// `coeffs[j][i]` is the `t^j` coefficient of component `i`; trailing zero
    /// coefficients are trimmed.
    coeffs: Vec<Vec<Complex64>>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl VecPoly {
    pub fn new(dim: usize, mut coeffs: Vec<Vec<Complex64>>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.len() == dim));
        while coeffs.last().is_some_and(|c| c.iter().all(|z| *z == zero())) {
            coeffs.pop();
        }
        Self { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: Complex64) -> Vec<Complex64> {
        let mut acc = vec![zero(); self.dim];
        for c in self.coeffs.iter().rev() {
            for (a, ci) in acc.iter_mut().zip(c) {
                *a = *a * t + ci;
            }
        }
        acc
    }

    pub fn norm_sq_at(&self, t: Complex64) -> f64 {
        self.eval(t).iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn derivative(&self) -> Self {
        let coeffs =
            self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c.iter().map(|z| z * j as f64).collect()).collect();
        Self::new(self.dim, coeffs)
    }

    /// Coefficients of `s ↦ P(c + s)`, i.e. `P^{(j)}(c) / j!`.
    pub fn taylor_at(&self, c: Complex64) -> Vec<Vec<Complex64>> {
        let mut b = self.coeffs.clone();
        let d = b.len();
        for k in 0..d {
            for j in (k..d - 1).rev() {
                let (lo, hi) = b.split_at_mut(j + 1);
                for (x, y) in lo[j].iter_mut().zip(&hi[0]) {
                    *x += c * y;
                }
            }
        }
        b
    }

    /// Norms of the Taylor coefficients at `c`.
    pub fn taylor_norms(&self, c: Complex64) -> Vec<f64> {
        self.taylor_at(c).iter().map(|v| norm(v)).collect()
    }

    /// `Σ_j ‖a_j‖ ρ^j`, a bound for `‖P‖` on the disc of radius `ρ` about 0.
    pub fn majorant(&self, rho: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * rho + norm(c))
    }

    /// Vanishing order at `c`: index of the first Taylor coefficient whose norm
    /// exceeds `rel_tol` times the majorant on a unit-or-larger disc about the origin.
    pub fn order_at(&self, c: Complex64, rel_tol: f64) -> usize {
        let scale = self.majorant(c.norm().max(1.0)).max(f64::MIN_POSITIVE);
        self.taylor_norms(c).iter().position(|&x| x > rel_tol * scale).unwrap_or(self.coeffs.len())
    }

    /// The scalar polynomial `Σ_i w_i P_i`.
    pub fn combine(&self, w: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.coeffs.iter().map(|c| c.iter().zip(w).map(|(a, b)| a * b).sum()).collect();
        while out.last().is_some_and(|z| *z == zero()) {
            out.pop();
        }
        out
    }
}

/// All complex roots of a scalar polynomial (coefficients by increasing
/// power), from the eigenvalues of its companion matrix followed by a few
/// Newton steps.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|z| *z == zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let d = c.len() - 1;
    let lead = c[d];
    let comp = DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            zero()
        }
    });
    let eig = comp.schur().eigenvalues().map(|v| v.iter().copied().collect::<Vec<_>>()).unwrap_or_default();
    eig.into_iter().map(|z| polish(&c, z)).collect()
}

fn polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (mut p, mut dp) = (zero(), zero());
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        // only keep steps that do not increase the residual
        let pn = c.iter().rev().fold(zero(), |acc, a| acc * next + a);
        if pn.norm() > p.norm() {
            break;
        }
        z = next;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}
