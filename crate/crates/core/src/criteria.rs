//! Seshadri-type positivity criteria for projective normality and the
//! comparison of the resulting bound on `h⁰` with the classical `2^n n!`.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::svp::{buser_sarnak, SvpError};
use crate::torus::{PolarizationType, PolarizedTorus};

/// Relative slack allowed when comparing `n` with `(π/8)·m` in floating point.
pub const NEF_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("invariant must be positive and finite, got {0}")]
    BadInvariant(f64),
    #[error("torus has type {found:?} but the criteria were requested for {expected:?}")]
    TypeMismatch { expected: Vec<u64>, found: Vec<u64> },
    #[error(transparent)]
    Svp(#[from] SvpError),
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Bauer's value `(2 Lⁿ)^{1/n} / π` for the invariant of a well-chosen torus
/// with self-intersection `Lⁿ`.
pub fn bauer_m(n: u32, ln: f64) -> Result<f64, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    if !(ln > 0.0 && ln.is_finite()) {
        return Err(CriteriaError::BadInvariant(ln));
    }
    Ok(((2.0f64.ln() + ln.ln()) / n as f64).exp() / PI)
}

fn bauer_m_big(n: u32, ln: &BigUint) -> f64 {
    ((2.0f64.ln() + ln_big(ln)) / n as f64).exp() / PI
}

pub fn seshadri_lower_bound(m: f64) -> Result<f64, CriteriaError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(CriteriaError::BadInvariant(m));
    }
    Ok(PI / 8.0 * m)
}

/// `n ≤ (π/8)·m`, with ties up to [`NEF_TIE_TOL`] counted as nef.
pub fn nef_check(n: u32, m: f64) -> Result<bool, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    let lb = seshadri_lower_bound(m)?;
    Ok(n as f64 <= lb * (1.0 + NEF_TIE_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BigCheck {
    pub ok: bool,
    #[serde(serialize_with = "as_decimal")]
    pub intersection_number: BigInt,
}

/// `(2n)!/(n!)² · Lⁿ · (Lⁿ − (2n)ⁿ)`, the top self-intersection of
/// `π*L − nE` on the blown-up self-product; big iff it is positive.
pub fn big_check(n: u32, ln: &BigUint) -> Result<BigCheck, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    let binom = factorial(2 * n) / (factorial(n) * factorial(n));
    let threshold = BigUint::from(2 * n).pow(n);
    let ln_i = BigInt::from(ln.clone());
    let number = BigInt::from(binom) * &ln_i * (&ln_i - BigInt::from(threshold));
    Ok(BigCheck { ok: number.is_positive(), intersection_number: number })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityBound {
    #[serde(serialize_with = "as_decimal")]
    pub exact: BigRational,
    /// Least integer `h⁰` meeting the bound.
    #[serde(serialize_with = "as_decimal")]
    pub min_h0: BigInt,
}

/// `8ⁿ nⁿ / (2 · n!)`.
pub fn normality_bound(n: u32) -> Result<NormalityBound, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    let num = BigInt::from(8u32).pow(n) * BigInt::from(n).pow(n);
    let den = BigInt::from(2u32) * BigInt::from(factorial(n));
    let exact = BigRational::new(num, den);
    let min_h0 = exact.ceil().to_integer();
    Ok(NormalityBound { exact, min_h0 })
}

/// `2ⁿ · n!`; the classical criterion asks for `h⁰` strictly above it.
pub fn iyer_bound(n: u32) -> Result<BigUint, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    Ok(BigUint::from(2u32).pow(n) * factorial(n))
}

#[derive(Debug, Clone, Copy)]
pub enum MSource<'a> {
    /// Bauer's existence value for the given `Lⁿ`.
    Bauer,
    /// The invariant computed from an explicit torus.
    Computed(&'a PolarizedTorus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CriterionMet,
    CriterionNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub n: u32,
    #[serde(rename = "type")]
    pub polarization_type: Vec<u64>,
    #[serde(serialize_with = "as_decimal")]
    pub h0: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub ln: BigUint,
    pub m_source: &'static str,
    pub m_value: f64,
    pub seshadri_lb: f64,
    pub nef_ok: bool,
    pub big_ok: bool,
    #[serde(serialize_with = "as_decimal")]
    pub intersection_number: BigInt,
    pub normality_bound_ok: bool,
    pub iyer_bound_ok: bool,
    pub verdict: Verdict,
}

/// Runs the full criterion for a polarization type. `criterion_met` means the
/// sufficient condition holds; `criterion_not_met` says nothing about the
/// converse.
pub fn evaluate(ptype: &PolarizationType, source: MSource<'_>) -> Result<CriteriaReport, CriteriaError> {
    let n = ptype.dim() as u32;
    if n == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    let h0 = ptype.h0_big();
    let ln = ptype.self_intersection();
    let (m_source, m_value) = match source {
        MSource::Bauer => ("bauer", bauer_m_big(n, &ln)),
        MSource::Computed(torus) => {
            if torus.polarization_type() != ptype {
                return Err(CriteriaError::TypeMismatch {
                    expected: ptype.divisors().to_vec(),
                    found: torus.polarization_type().divisors().to_vec(),
                });
            }
            ("computed", buser_sarnak(torus)?.length_sq)
        }
    };
    let seshadri_lb = seshadri_lower_bound(m_value)?;
    let nef_ok = nef_check(n, m_value)?;
    let big = big_check(n, &ln)?;
    let pb = normality_bound(n)?;
    let normality_bound_ok = BigRational::from_integer(BigInt::from(h0.clone())) >= pb.exact;
    let iyer_bound_ok = h0 > iyer_bound(n)?;
    let verdict = if nef_ok && big.ok { Verdict::CriterionMet } else { Verdict::CriterionNotMet };
    Ok(CriteriaReport {
        n,
        polarization_type: ptype.divisors().to_vec(),
        h0,
        ln,
        m_source,
        m_value,
        seshadri_lb,
        nef_ok,
        big_ok: big.ok,
        intersection_number: big.intersection_number,
        normality_bound_ok,
        iyer_bound_ok,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsRow {
    pub n: u32,
    #[serde(serialize_with = "as_decimal")]
    pub normality_bound: BigRational,
    #[serde(serialize_with = "as_decimal")]
    pub normality_min_h0: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub iyer_bound: BigUint,
    /// `normality_bound / iyer_bound`, rounded to `f64`.
    pub ratio: f64,
    pub normality_smaller: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsTable {
    pub rows: Vec<BoundsRow>,
    /// Least `n` with `normality_bound(n) < iyer_bound(n)`, if any row has it.
    pub crossover: Option<u32>,
}

pub fn bounds_table(n_max: u32) -> Result<BoundsTable, CriteriaError> {
    if n_max == 0 {
        return Err(CriteriaError::ZeroDimension);
    }
    let rows = (1..=n_max)
        .map(|n| {
            let pb = normality_bound(n)?;
            let ib = iyer_bound(n)?;
            let ratio_exact = &pb.exact / BigRational::from_integer(BigInt::from(ib.clone()));
            Ok(BoundsRow {
                n,
                normality_smaller: ratio_exact < BigRational::one(),
                ratio: ratio_to_f64(&ratio_exact),
                normality_bound: pb.exact,
                normality_min_h0: pb.min_h0,
                iyer_bound: ib,
            })
        })
        .collect::<Result<Vec<_>, CriteriaError>>()?;
    let crossover = rows.iter().find(|r| r.normality_smaller).map(|r| r.n);
    Ok(BoundsTable { rows, crossover })
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer().magnitude(), r.denom().magnitude());
    let v = (ln_big(num) - ln_big(den)).exp();
    if r.is_negative() {
        -v
    } else {
        v
    }
}

/// Integers and reduced fractions as decimal strings (`"p"` or `"p/q"`).
fn as_decimal<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl BoundsTable {
    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>3}  {:>40}  {:>40}  {:>12}  {}\n",
            "n", "normality_bound", "iyer_bound", "ratio", "normality_smaller"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>3}  {:>40}  {:>40}  {:>12.6e}  {}\n",
                r.n, r.normality_min_h0, r.iyer_bound, r.ratio, r.normality_smaller
            ));
        }
        match self.crossover {
            Some(n) => out.push_str(&format!("crossover: n = {n}\n")),
            None => out.push_str("crossover: none in range\n"),
        }
        out
    }
}
