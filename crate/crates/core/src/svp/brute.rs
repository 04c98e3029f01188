use num_rational::Ratio;
use num_traits::ToPrimitive;

use super::{GramLattice, SvpAlgorithm, SvpError, SvpMethod, SvpResult, BRUTE_FORCE_DIM_CAP};

const MAX_POINTS: f64 = 5e8;

/// Half-width of a coordinate box that contains every vector at least as
/// short as the shortest basis vector: `|x_i|² ≤ R · (G⁻¹)_ii` with
/// `R = min_i G_ii`.
pub fn default_box(lat: &GramLattice) -> Result<u32, SvpError> {
    let g = lat.gram();
    let n = g.nrows();
    let inv = g.clone().try_inverse().ok_or(SvpError::NotPositiveDefinite)?;
    let r = (0..n).map(|i| g[(i, i)]).fold(f64::INFINITY, f64::min);
    let mut b = 1.0f64;
    for i in 0..n {
        b = b.max((r * inv[(i, i)] * (1.0 + 1e-9)).sqrt().floor());
    }
    if b > 1e6 {
        return Err(SvpError::BoxTooLarge { points: f64::INFINITY });
    }
    Ok(b as u32)
}

/// Exhaustive minimum of `xᵀGx` over nonzero `x` with `|x_i| ≤ box`. Uses exact
/// integer arithmetic when the lattice carries an exact Gram matrix.
pub fn brute_force_sv(lat: &GramLattice, half_width: Option<u32>) -> Result<SvpResult, SvpError> {
    let n = lat.dim();
    if n == 0 {
        return Err(SvpError::Empty);
    }
    if n > BRUTE_FORCE_DIM_CAP {
        return Err(SvpError::DimensionTooLarge { dim: n, cap: BRUTE_FORCE_DIM_CAP });
    }
    let bw = match half_width {
        Some(b) => b.max(1),
        None => default_box(lat)?,
    } as i64;
    let points = ((2 * bw + 1) as f64).powi(n as i32);
    if points > MAX_POINTS {
        return Err(SvpError::BoxTooLarge { points });
    }

    let g = lat.gram();
    let exact = lat.exact();
    let mut x = vec![-bw; n];
    // G·x, maintained incrementally
    let mut gx_f: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g[(i, j)] * x[j] as f64).sum()).collect();
    let mut gx_i: Vec<i128> = match exact {
        Some(e) => (0..n).map(|i| (0..n).map(|j| e.scaled[i][j] * x[j] as i128).sum()).collect(),
        None => Vec::new(),
    };

    let mut best_f = f64::INFINITY;
    let mut best_i: Option<i128> = None;
    let mut best_x: Vec<i64> = Vec::new();
    let mut visited: u64 = 0;
    loop {
        visited += 1;
        // count each ±x pair once: first nonzero coordinate positive
        if x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            match exact {
                Some(_) => {
                    let mut s: i128 = 0;
                    for i in 0..n {
                        s = s
                            .checked_add(gx_i[i].checked_mul(x[i] as i128).ok_or(SvpError::Overflow)?)
                            .ok_or(SvpError::Overflow)?;
                    }
                    if best_i.is_none_or(|b| s < b) {
                        best_i = Some(s);
                        best_x.clone_from(&x);
                    }
                }
                None => {
                    let s: f64 = (0..n).map(|i| gx_f[i] * x[i] as f64).sum();
                    if s < best_f {
                        best_f = s;
                        best_x.clone_from(&x);
                    }
                }
            }
        }
        // odometer step, coordinate n-1 fastest so that the scan is lexicographic
        let mut i = n;
        loop {
            if i == 0 {
                return finish(lat, best_f, best_i, best_x, visited, bw);
            }
            i -= 1;
            let step = if x[i] == bw { -2 * bw } else { 1 };
            x[i] += step;
            for r in 0..n {
                gx_f[r] += g[(r, i)] * step as f64;
            }
            if let Some(e) = exact {
                for r in 0..n {
                    gx_i[r] += e.scaled[r][i] * step as i128;
                }
            }
            if step == 1 {
                break;
            }
        }
    }
}

fn finish(
    lat: &GramLattice,
    best_f: f64,
    best_i: Option<i128>,
    witness: Vec<i64>,
    visited: u64,
    bw: i64,
) -> Result<SvpResult, SvpError> {
    let (length_sq, exact_length_sq) = match (lat.exact(), best_i) {
        (Some(e), Some(s)) => {
            let r = Ratio::new(s, e.denom);
            (r.to_f64().unwrap_or(f64::NAN), Some(r))
        }
        _ => (lat.norm_sq(&witness), None),
    };
    if witness.is_empty() || !best_f.is_finite() && best_i.is_none() {
        return Err(SvpError::Empty);
    }
    Ok(SvpResult {
        length_sq,
        exact_length_sq,
        witness,
        method: SvpMethod {
            algorithm: SvpAlgorithm::BruteForce,
            nodes_visited: visited,
            initial_radius_sq: (bw * bw) as f64,
            exact_mode: lat.is_exact(),
        },
    })
}
