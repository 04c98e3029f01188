//! Sorting library errors into input validation failures (exit 2) and
//! internal failures (exit 1).

use std::fmt;

use abelpn::criteria::CriteriaError;
use abelpn::diagonal::DiagonalError;
use abelpn::intlin::IntLinError;
use abelpn::rho2::Rho2Error;
use abelpn::schema::SchemaError;
use abelpn::svp::SvpError;
use abelpn::theta::ThetaError;
use abelpn::torus::TorusError;
use abelpn::tube::TubeError;

/// The input violates a named invariant.
#[derive(Debug)]
pub struct Invalid {
    pub invariant: &'static str,
    pub message: String,
    /// Line and column of a JSON syntax error.
    pub position: Option<(usize, usize)>,
}

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.message)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(invariant: &'static str, message: impl fmt::Display) -> anyhow::Error {
    Invalid { invariant, message: message.to_string(), position: None }.into()
}

fn internal(e: impl std::error::Error + Send + Sync + 'static) -> anyhow::Error {
    anyhow::Error::new(e)
}

pub fn schema(e: SchemaError) -> anyhow::Error {
    match e {
        SchemaError::Json { line, column, .. } => {
            Invalid { invariant: "json_syntax", message: e.to_string(), position: Some((line, column)) }.into()
        }
        SchemaError::Shape(_) => invalid("input_shape", e),
        SchemaError::Torus(t) => torus(t),
        SchemaError::Curve(c) => tube(c),
    }
}

pub fn torus(e: TorusError) -> anyhow::Error {
    let name = match &e {
        TorusError::InvalidType(_) => "polarization_type",
        TorusError::DimensionMismatch(_) => "dimensions",
        TorusError::NotSymmetric { .. } => "symmetry",
        TorusError::NotPositiveDefinite { .. } => "imag_positive_definite",
        TorusError::PairingNotIntegral { .. } => "pairing_integral",
        TorusError::TypeMismatch { .. } => "type_recovered",
        TorusError::H0Overflow => "h0_range",
        TorusError::BadSublattice(_) => "sublattice_shape",
        TorusError::NotSaturated { .. } => "sublattice_saturated",
        TorusError::NotComplex { .. } => "sublattice_complex",
        TorusError::Integer(IntLinError::Ragged { .. }) => "input_shape",
        TorusError::Integer(IntLinError::Overflow) => "integer_range",
    };
    invalid(name, e)
}

pub fn svp(e: SvpError) -> anyhow::Error {
    let name = match &e {
        SvpError::DimensionTooLarge { .. } => "svp_dimension",
        SvpError::Empty => "lattice_nonempty",
        SvpError::NotSymmetric(_) | SvpError::Ragged => "gram_shape",
        SvpError::NotPositiveDefinite => "gram_positive_definite",
        SvpError::NotProperSubtorus => "proper_subtorus",
        SvpError::BadDelta(_) => "lll_delta",
        SvpError::LllBreakdown { .. }
        | SvpError::RadiusUnderflow
        | SvpError::BoxTooLarge { .. }
        | SvpError::Overflow => return internal(e),
    };
    invalid(name, e)
}

pub fn diagonal(e: DiagonalError) -> anyhow::Error {
    match e {
        DiagonalError::Torus(t) => torus(t),
        DiagonalError::Svp(s) => svp(s),
        other => internal(other),
    }
}

pub fn tube(e: TubeError) -> anyhow::Error {
    if let TubeError::Svp(s) = e {
        return svp(s);
    }
    let name = match &e {
        TubeError::Svp(_) => "svp",
        TubeError::BadRadius(_) => "radius_positive",
        TubeError::RadiusTooLarge { .. } => "radius_within_injectivity",
        TubeError::BadDomain(_) => "domain_radius_positive",
        TubeError::DimensionMismatch { .. } => "curve_dimensions",
        TubeError::NonFinite { .. } => "curve_finite",
        TubeError::LiesInSubtorus => "curve_not_in_subtorus",
        TubeError::MultiplicityMismatch { .. } => "multiplicity_consistent",
        TubeError::DuplicatePoint { .. } => "points_distinct",
        TubeError::PointOutsideDomain { .. } => "point_in_domain",
        TubeError::DegenerateIntersection { .. } => "curve_nonsingular_at_intersection",
        TubeError::UndeclaredIntersection { .. } => "intersections_declared",
        TubeError::NotThroughOrigin => "curve_through_origin",
        TubeError::Constant => "curve_nonconstant",
    };
    invalid(name, e)
}

pub fn criteria(e: CriteriaError) -> anyhow::Error {
    if let CriteriaError::Svp(s) = e {
        return svp(s);
    }
    let name = match &e {
        CriteriaError::ZeroDimension => "dimensions",
        CriteriaError::BadInvariant(_) => "invariant_positive",
        CriteriaError::TypeMismatch { .. } => "type_matches_torus",
        CriteriaError::Svp(_) => "svp",
    };
    invalid(name, e)
}

pub fn theta(e: ThetaError) -> anyhow::Error {
    let name = match &e {
        ThetaError::DimensionTooLarge(_) => "theta_dimension",
        ThetaError::BadLevel(_) => "theta_level",
        ThetaError::NearlySingular(_) => "imag_well_conditioned",
        ThetaError::BadTolerance(_) => "theta_tolerance",
        ThetaError::IndexOutOfRange { .. } | ThetaError::BadPoint { .. } => return internal(e),
    };
    invalid(name, e)
}

pub fn rho2(e: Rho2Error) -> anyhow::Error {
    match e {
        Rho2Error::Theta(t) => theta(t),
        Rho2Error::TooFewSamples { .. } => invalid("sample_count", e),
        other => internal(other),
    }
}
