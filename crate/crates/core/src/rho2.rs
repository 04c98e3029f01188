//! Numerical rank of the multiplication map `Sym² H⁰(L) → H⁰(L²)`.
//!
//! Products `θ_i θ_j` of level-1 sections are sampled at random points of the
//! torus together with the level-2 basis. Expressing the products in the
//! level-2 basis by least squares gives the matrix of the map, whose singular
//! values decide surjectivity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::theta::{theta_basis, ThetaBasis, ThetaError, DEFAULT_TOL};
use crate::torus::PolarizedTorus;

pub const RANK_THRESHOLD: f64 = 1e-8;
pub const MAX_CONDITION: f64 = 1e8;
pub const MAX_RESIDUAL: f64 = 1e-6;
pub const MAX_RETRIES: u64 = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Rho2Error {
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("need at least {min} samples, got {found}")]
    TooFewSamples { min: usize, found: usize },
    #[error("level-2 evaluation matrix stayed ill-conditioned (condition {condition:e}) after {attempts} seeds")]
    IllConditioned { condition: f64, attempts: u64 },
    #[error("products are not level-2 sections: least-squares residual {0:e}")]
    ResidualTooLarge(f64),
    #[error("singular value decomposition failed")]
    Svd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho2Options {
    /// Defaults to `4 · dim_target`.
    pub samples: Option<usize>,
    pub seed: u64,
    pub tol: f64,
    /// Multiplies the truncation chosen from `tol`.
    pub truncation_factor: i64,
}

impl Default for Rho2Options {
    fn default() -> Self {
        Self { samples: None, seed: 0, tol: DEFAULT_TOL, truncation_factor: 1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Rho2Report {
    pub dim_sym2: usize,
    pub dim_target: usize,
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    pub surjective: bool,
    pub verdict: &'static str,
    pub sample_count: usize,
    pub seed_used: u64,
    pub residual: f64,
    pub condition_number: f64,
    pub truncation: [i64; 2],
}

pub struct Rho2Matrices {
    /// Rows: sample points; columns: `θ_i θ_j` for `i ≤ j`.
    pub products: DMatrix<Complex64>,
    /// Rows: sample points; columns: level-2 basis.
    pub target: DMatrix<Complex64>,
}

fn bases(torus: &PolarizedTorus, opts: &Rho2Options) -> Result<(ThetaBasis, ThetaBasis), Rho2Error> {
    let f = opts.truncation_factor.max(1);
    let b1 = theta_basis(torus, 1, opts.tol)?;
    let b2 = theta_basis(torus, 2, opts.tol)?;
    let (k1, k2) = (b1.truncation() * f, b2.truncation() * f);
    Ok((b1.with_truncation(k1), b2.with_truncation(k2)))
}

fn sample_points(torus: &PolarizedTorus, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let n = torus.dim();
    let tau = torus.period().tau();
    let d = torus.polarization_type().divisors();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            (0..n).map(|i| d[i] as f64 * u[i] + (0..n).map(|j| tau[(i, j)] * v[j]).sum::<Complex64>()).collect()
        })
        .collect()
}

fn build(b1: &ThetaBasis, b2: &ThetaBasis, points: &[Vec<Complex64>]) -> Result<Rho2Matrices, Rho2Error> {
    let h = b1.len();
    let mut products = DMatrix::zeros(points.len(), h * (h + 1) / 2);
    let mut target = b2.evaluation_matrix(points)?;
    for (r, z) in points.iter().enumerate() {
        let v = b1.evaluate_all(z)?;
        let scale = target.row(r).iter().map(|x| x.norm()).fold(0.0, f64::max);
        let s = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let mut col = 0;
        for i in 0..h {
            for j in i..h {
                products[(r, col)] = v[i] * v[j] * s;
                col += 1;
            }
        }
        target.row_mut(r).scale_mut(s);
    }
    Ok(Rho2Matrices { products, target })
}

fn dims(torus: &PolarizedTorus) -> (usize, usize) {
    let h0 = torus.polarization_type().divisors().iter().product::<u64>() as usize;
    (h0 * (h0 + 1) / 2, (1usize << torus.dim()) * h0)
}

fn sample_count(torus: &PolarizedTorus, opts: &Rho2Options) -> Result<usize, Rho2Error> {
    let (_, target) = dims(torus);
    let samples = opts.samples.unwrap_or(4 * target);
    if samples < 2 * target {
        return Err(Rho2Error::TooFewSamples { min: 2 * target, found: samples });
    }
    Ok(samples)
}

/// The row-scaled sample matrices for one seed.
pub fn rho2_matrix(torus: &PolarizedTorus, opts: &Rho2Options) -> Result<Rho2Matrices, Rho2Error> {
    let samples = sample_count(torus, opts)?;
    let (b1, b2) = bases(torus, opts)?;
    build(&b1, &b2, &sample_points(torus, samples, opts.seed))
}

pub fn rho2_rank(torus: &PolarizedTorus, opts: &Rho2Options) -> Result<Rho2Report, Rho2Error> {
    let samples = sample_count(torus, opts)?;
    let (dim_sym2, dim_target) = dims(torus);
    let (b1, b2) = bases(torus, opts)?;
    let mut worst = 0.0f64;
    for attempt in 0..MAX_RETRIES {
        let seed = opts.seed.wrapping_add(attempt);
        let m = build(&b1, &b2, &sample_points(torus, samples, seed))?;
        let svd = m.target.clone().svd(true, true);
        let sv = &svd.singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            worst = worst.max(condition);
            continue;
        }
        let coeffs = svd.solve(&m.products, 0.0).map_err(|_| Rho2Error::Svd)?;
        let residual = (&m.target * &coeffs - &m.products).norm() / m.products.norm().max(f64::MIN_POSITIVE);
        if !(residual < MAX_RESIDUAL) {
            return Err(Rho2Error::ResidualTooLarge(residual));
        }
        let mut singular_values: Vec<f64> = coeffs.singular_values().iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let top = singular_values.first().copied().unwrap_or(0.0);
        let numerical_rank = singular_values.iter().filter(|&&s| s > RANK_THRESHOLD * top).count();
        let surjective = numerical_rank == dim_target;
        return Ok(Rho2Report {
            dim_sym2,
            dim_target,
            singular_values,
            numerical_rank,
            surjective,
            verdict: if surjective { "surjective" } else { "not surjective at working precision" },
            sample_count: samples,
            seed_used: seed,
            residual,
            condition_number: condition,
            truncation: [b1.truncation(), b2.truncation()],
        });
    }
    Err(Rho2Error::IllConditioned { condition: worst, attempts: MAX_RETRIES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{evaluate, MSource, Verdict};
    use crate::torus::{make_torus, PolarizationType};
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn elliptic(d: u64, tau: Complex64) -> PolarizedTorus {
        make_torus(PolarizationType::new(vec![d]).unwrap(), DMatrix::from_element(1, 1, tau)).unwrap()
    }

    fn square2(d: &[u64]) -> PolarizedTorus {
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, 1.0), c(0.0, 1.0)]));
        make_torus(PolarizationType::new(d.to_vec()).unwrap(), tau).unwrap()
    }

    #[test]
    fn elliptic_verdicts() {
        let r2 = rho2_rank(&elliptic(2, c(0.0, 1.0)), &Rho2Options::default()).unwrap();
        assert_eq!((r2.dim_sym2, r2.dim_target), (3, 4));
        assert!(r2.numerical_rank <= 3 && !r2.surjective);
        assert_eq!(r2.verdict, "not surjective at working precision");
        let r3 = rho2_rank(&elliptic(3, c(0.0, 1.0)), &Rho2Options::default()).unwrap();
        assert_eq!((r3.numerical_rank, r3.surjective), (6, true));
        let r3b = rho2_rank(&elliptic(3, c(0.31, 1.27)), &Rho2Options::default()).unwrap();
        assert!(r3b.surjective);
        let r4 = rho2_rank(&elliptic(4, c(0.0, 1.0)), &Rho2Options::default()).unwrap();
        assert_eq!((r4.numerical_rank, r4.surjective), (8, true));
        assert!(r4.residual < MAX_RESIDUAL);
    }

    #[test]
    fn surface_verdicts() {
        let a = rho2_rank(&square2(&[1, 3]), &Rho2Options::default()).unwrap();
        assert_eq!((a.dim_sym2, a.dim_target), (6, 12));
        assert!(!a.surjective);
        let b = rho2_rank(&square2(&[3, 3]), &Rho2Options::default()).unwrap();
        assert_eq!((b.numerical_rank, b.surjective), (36, true));
    }

    #[test]
    fn matrix_shape_and_determinism() {
        let t = elliptic(2, c(0.0, 1.0));
        let m = rho2_matrix(&t, &Rho2Options::default()).unwrap();
        assert_eq!(m.products.ncols(), 3);
        assert_eq!(m.target.ncols(), 4);
        assert_eq!(m.products.nrows(), 16);
        let again = rho2_matrix(&t, &Rho2Options::default()).unwrap();
        assert_eq!(m.products, again.products);
        assert!(matches!(
            rho2_matrix(&t, &Rho2Options { samples: Some(7), ..Default::default() }),
            Err(Rho2Error::TooFewSamples { min: 8, found: 7 })
        ));
    }

    #[test]
    fn truncation_doubling_is_stable() {
        let t = elliptic(3, c(0.0, 1.0));
        let base = rho2_rank(&t, &Rho2Options::default()).unwrap();
        let doubled = rho2_rank(&t, &Rho2Options { truncation_factor: 2, ..Default::default() }).unwrap();
        for (a, b) in base.singular_values.iter().zip(&doubled.singular_values) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn criterion_implies_surjective() {
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        for d in 4u64..=5 {
            let t = elliptic(d, w * d as f64);
            let crit = evaluate(t.polarization_type(), MSource::Computed(&t)).unwrap();
            assert_eq!(crit.verdict, Verdict::CriterionMet);
            assert!(rho2_rank(&t, &Rho2Options::default()).unwrap().surjective);
        }
    }
}
