//! Areas of holomorphic curves inside geodesic tubes around subtori.
//!
//! Curves are polynomial maps `γ = (f, p)` written in orthonormal coordinates
//! of `F ⊕ F⊥`, where `F` is the tangent space of the subtorus. Inside a tube
//! of radius `r ≤ √m/2` the tube is a product, so membership only depends on
//! `‖p(t)‖`.

pub mod poly;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::svp::{relative_buser_sarnak, SvpError};
use crate::torus::Subtorus;
use poly::{roots, VecPoly};
use quadrature::{integrate, Region};
pub use quadrature::{QuadratureOptions, QuadratureResult};

/// Relative tolerance for deciding that a Taylor coefficient vanishes.
const ORDER_TOL: f64 = 1e-10;
/// Residual below which a root of the generic combination is a common zero.
const COMMON_ZERO_TOL: f64 = 1e-8;
/// Distance within which a common zero is matched to a declared point. Roots
/// of multiplicity `m` are only located to about `ε^{1/m}`.
const MATCH_TOL: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TubeError {
    #[error(transparent)]
    Svp(#[from] SvpError),
    #[error("tube radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("tube radius {r} exceeds the injectivity bound {max}")]
    RadiusTooLarge { r: f64, max: f64 },
    #[error("domain radius must be positive and finite, got {0}")]
    BadDomain(f64),
    #[error("coefficient {index} of the {part} component has length {found}, expected {expected}")]
    DimensionMismatch { part: &'static str, index: usize, found: usize, expected: usize },
    #[error("coefficient {index} of the {part} component is not finite")]
    NonFinite { part: &'static str, index: usize },
    #[error("the normal component is identically zero, so the curve lies in the subtorus")]
    LiesInSubtorus,
    #[error("declared multiplicity {declared} at t = {t} but the normal component vanishes to order {actual}")]
    MultiplicityMismatch { t: Complex64, declared: u32, actual: usize },
    #[error("intersection point t = {t} is declared more than once")]
    DuplicatePoint { t: Complex64 },
    #[error("intersection point t = {t} lies outside the parameter domain")]
    PointOutsideDomain { t: Complex64 },
    #[error("the curve is singular at t = {t} where it meets the subtorus with multiplicity {m}")]
    DegenerateIntersection { t: Complex64, m: u32 },
    #[error("the curve meets the subtorus at t ≈ {t}, which is not declared")]
    UndeclaredIntersection { t: Complex64 },
    #[error("the curve must pass through the origin")]
    NotThroughOrigin,
    #[error("the curve is constant")]
    Constant,
}

/// Geodesic tube of radius `r` around a proper subtorus.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    sub: Subtorus,
    r: f64,
    relative_invariant: f64,
}

impl TubeSpec {
    /// Fails unless `0 < r ≤ √m/2`, with `m` the relative invariant of `sub`.
    pub fn new(sub: Subtorus, r: f64) -> Result<Self, TubeError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(TubeError::BadRadius(r));
        }
        let m = relative_buser_sarnak(&sub)?.length_sq;
        let max = m.sqrt() / 2.0;
        if r > max + 1e-12 {
            return Err(TubeError::RadiusTooLarge { r, max });
        }
        Ok(Self { sub, r, relative_invariant: m })
    }

    pub fn subtorus(&self) -> &Subtorus {
        &self.sub
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn relative_invariant(&self) -> f64 {
        self.relative_invariant
    }

    pub fn max_radius(&self) -> f64 {
        self.relative_invariant.sqrt() / 2.0
    }
}

/// Polynomial curve `t ↦ (f(t), p(t))` on the disc `|t| < domain_radius`, with
/// the parameter points where it meets the subtorus and their multiplicities.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    f: VecPoly,
    p: VecPoly,
    domain_radius: f64,
    mults: Vec<(Complex64, u32)>,
}

fn to_poly(part: &'static str, coeffs: Vec<Vec<Complex64>>, dim: Option<usize>) -> Result<VecPoly, TubeError> {
    let dim = dim.or_else(|| coeffs.first().map(Vec::len)).unwrap_or(0);
    for (index, c) in coeffs.iter().enumerate() {
        if c.len() != dim {
            return Err(TubeError::DimensionMismatch { part, index, found: c.len(), expected: dim });
        }
        if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TubeError::NonFinite { part, index });
        }
    }
    Ok(VecPoly::new(dim, coeffs))
}

impl CurveSpec {
    /// `f[j]` and `p[j]` are the `t^j` coefficients of the tangential and normal
    /// components. An empty `f` is the zero map into `F`.
    pub fn new(
        f: Vec<Vec<Complex64>>,
        p: Vec<Vec<Complex64>>,
        domain_radius: f64,
        mults: Vec<(Complex64, u32)>,
    ) -> Result<Self, TubeError> {
        if !(domain_radius > 0.0 && domain_radius.is_finite()) {
            return Err(TubeError::BadDomain(domain_radius));
        }
        let f = to_poly("tangential", f, None)?;
        let p = to_poly("normal", p, None)?;
        if p.is_zero() {
            return Err(TubeError::LiesInSubtorus);
        }
        for (i, (t, _)) in mults.iter().enumerate() {
            if !t.re.is_finite() || !t.im.is_finite() || t.norm() >= domain_radius {
                return Err(TubeError::PointOutsideDomain { t: *t });
            }
            if mults[..i].iter().any(|(s, _)| (s - t).norm() <= MATCH_TOL * domain_radius.max(1.0)) {
                return Err(TubeError::DuplicatePoint { t: *t });
            }
        }
        Ok(Self { f, p, domain_radius, mults })
    }

    pub fn tangential(&self) -> &VecPoly {
        &self.f
    }

    pub fn normal(&self) -> &VecPoly {
        &self.p
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn declared(&self) -> &[(Complex64, u32)] {
        &self.mults
    }

    fn check_dims(&self, tube: &TubeSpec) -> Result<(), TubeError> {
        let k = tube.sub.dim();
        let c = tube.sub.codim();
        if !self.f.is_zero() && self.f.dim() != k {
            return Err(TubeError::DimensionMismatch {
                part: "tangential",
                index: 0,
                found: self.f.dim(),
                expected: k,
            });
        }
        if self.p.dim() != c {
            return Err(TubeError::DimensionMismatch { part: "normal", index: 0, found: self.p.dim(), expected: c });
        }
        Ok(())
    }
}

/// `∫ ‖γ′(t)‖² dA` over `{|t| < R : ‖p(t)‖ < r}`.
pub fn curve_area_in_tube(
    tube: &TubeSpec,
    curve: &CurveSpec,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, TubeError> {
    curve.check_dims(tube)?;
    let region = Region {
        level: &curve.p,
        r: tube.r,
        domain_radius: curve.domain_radius,
        speed: vec![curve.f.derivative(), curve.p.derivative()],
    };
    Ok(integrate(&region, opts))
}

/// Total intersection number with the exceptional divisor: the sum of the
/// declared multiplicities, after checking each against the vanishing order of
/// the normal component and checking that no common zero in the domain is
/// left undeclared.
pub fn exceptional_intersection(curve: &CurveSpec) -> Result<u32, TubeError> {
    let p = &curve.p;
    let df = curve.f.derivative();
    for &(t, m) in &curve.mults {
        let actual = p.order_at(t, ORDER_TOL);
        if m == 0 || actual != m as usize {
            return Err(TubeError::MultiplicityMismatch { t, declared: m, actual });
        }
        if m >= 2 && (df.is_zero() || df.order_at(t, ORDER_TOL) > 0) {
            return Err(TubeError::DegenerateIntersection { t, m });
        }
    }

    let radius = curve.domain_radius;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let psi = loop {
        let w: Vec<Complex64> = (0..p.dim())
            .map(|_| Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let psi = p.combine(&w);
        if !psi.is_empty() {
            break psi;
        }
    };
    for t in roots(&psi) {
        if t.norm() >= radius {
            continue;
        }
        let scale = p.majorant(t.norm().max(1.0));
        if p.norm_sq_at(t).sqrt() > COMMON_ZERO_TOL * scale {
            continue;
        }
        if !curve.mults.iter().any(|(s, _)| (s - t).norm() <= MATCH_TOL * radius.max(1.0)) {
            return Err(TubeError::UndeclaredIntersection { t });
        }
    }
    Ok(curve.mults.iter().map(|&(_, m)| m).sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub volume: f64,
    pub bound: f64,
    pub slack: f64,
    pub quadrature_error_estimate: f64,
    pub intersection_number: u32,
    pub converged: bool,
    /// `slack ≥ −quadrature_error_estimate`.
    pub holds: bool,
}

impl VolumeReport {
    fn new(volume: f64, err: f64, intersection_number: u32, r: f64, converged: bool) -> Self {
        let bound = PI * r * r * intersection_number as f64;
        let slack = volume - bound;
        Self {
            volume,
            bound,
            slack,
            quadrature_error_estimate: err,
            intersection_number,
            converged,
            holds: slack >= -err,
        }
    }
}

/// Area of the curve inside the tube against `π r² · (Ṽ·E)`.
pub fn prop23_check(tube: &TubeSpec, curve: &CurveSpec) -> Result<VolumeReport, TubeError> {
    prop23_check_union(tube, std::slice::from_ref(curve))
}

/// The same comparison for a union of curves; both sides are additive.
pub fn prop23_check_union(tube: &TubeSpec, curves: &[CurveSpec]) -> Result<VolumeReport, TubeError> {
    prop23_check_union_with(tube, curves, &QuadratureOptions::default())
}

pub fn prop23_check_union_with(
    tube: &TubeSpec,
    curves: &[CurveSpec],
    opts: &QuadratureOptions,
) -> Result<VolumeReport, TubeError> {
    let (mut vol, mut err, mut mult, mut converged) = (0.0, 0.0, 0u32, true);
    for curve in curves {
        mult += exceptional_intersection(curve)?;
        let q = curve_area_in_tube(tube, curve, opts)?;
        vol += q.value;
        err += q.error_estimate;
        converged &= q.converged;
    }
    Ok(VolumeReport::new(vol, err, mult, tube.r, converged))
}

#[derive(Debug, Clone, Serialize)]
pub struct FedererReport {
    pub area: f64,
    pub bound: f64,
    pub multiplicity: u32,
    pub quadrature_error_estimate: f64,
    pub converged: bool,
    pub holds: bool,
}

/// Area of a polynomial curve through the origin inside the ball of radius
/// `r`, against `μ π r²` with `μ` its vanishing order at 0.
pub fn federer_check(gamma: Vec<Vec<Complex64>>, r: f64, domain_radius: f64) -> Result<FedererReport, TubeError> {
    federer_check_with(gamma, r, domain_radius, &QuadratureOptions::default())
}

pub fn federer_check_with(
    gamma: Vec<Vec<Complex64>>,
    r: f64,
    domain_radius: f64,
    opts: &QuadratureOptions,
) -> Result<FedererReport, TubeError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(TubeError::BadRadius(r));
    }
    if !(domain_radius > 0.0 && domain_radius.is_finite()) {
        return Err(TubeError::BadDomain(domain_radius));
    }
    let g = to_poly("curve", gamma, None)?;
    if g.degree() == 0 {
        return Err(TubeError::Constant);
    }
    let mu = g.order_at(Complex64::new(0.0, 0.0), ORDER_TOL);
    if mu == 0 {
        return Err(TubeError::NotThroughOrigin);
    }
    let region = Region { level: &g, r, domain_radius, speed: vec![g.derivative()] };
    let q = integrate(&region, opts);
    let bound = mu as f64 * PI * r * r;
    Ok(FedererReport {
        area: q.value,
        bound,
        multiplicity: mu as u32,
        quadrature_error_estimate: q.error_estimate,
        converged: q.converged,
        holds: q.value >= bound - q.error_estimate,
    })
}
