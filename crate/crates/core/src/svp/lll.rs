use nalgebra::DMatrix;

use super::{GramLattice, SvpError};
use crate::intlin::{identity, IntMatrix};

const MAX_SWAPS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct LllOutput {
    pub reduced: GramLattice,
    /// Unimodular; column `j` holds the coordinates of reduced basis vector `j`.
    pub transform: IntMatrix,
}

struct Gso {
    mu: Vec<Vec<f64>>,
    b: Vec<f64>,
}

fn gso(g: &DMatrix<f64>) -> Result<Gso, SvpError> {
    let n = g.nrows();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[(i, j)];
            for l in 0..j {
                s -= mu[i][l] * mu[j][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[(i, i)];
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(SvpError::LllBreakdown { index: i, value: s });
        }
        b[i] = s;
    }
    Ok(Gso { mu, b })
}

fn recompute(g0: &DMatrix<f64>, t: &IntMatrix) -> DMatrix<f64> {
    let n = t.len();
    let tf = DMatrix::from_fn(n, n, |i, j| t[i][j] as f64);
    let g = tf.transpose() * g0 * &tf;
    (&g + g.transpose()) * 0.5
}

fn col_sub(t: &mut IntMatrix, k: usize, j: usize, q: i128) -> Result<(), SvpError> {
    for row in t.iter_mut() {
        row[k] = q.checked_mul(row[j]).and_then(|p| row[k].checked_sub(p)).ok_or(SvpError::Overflow)?;
    }
    Ok(())
}

/// LLL reduction of a Gram matrix with Lovász parameter `delta ∈ (0.25, 1)`.
pub fn lll_reduce(lat: &GramLattice, delta: f64) -> Result<LllOutput, SvpError> {
    if !(delta > 0.25 && delta < 1.0) {
        return Err(SvpError::BadDelta(delta));
    }
    let n = lat.dim();
    let g0 = lat.gram();
    let mut t = identity(n);
    if n <= 1 {
        return Ok(LllOutput { reduced: lat.clone(), transform: t });
    }
    let mut g = g0.clone();
    let mut d = gso(&g)?;
    let mut k = 1;
    let mut swaps = 0usize;
    while k < n {
        // size reduction of b_k
        let mut changed = false;
        for j in (0..k).rev() {
            let q = d.mu[k][j].round();
            if q != 0.0 {
                if q.abs() > 1e15 {
                    return Err(SvpError::Overflow);
                }
                col_sub(&mut t, k, j, q as i128)?;
                for l in 0..j {
                    d.mu[k][l] -= q * d.mu[j][l];
                }
                d.mu[k][j] -= q;
                changed = true;
            }
        }
        if changed {
            g = recompute(g0, &t);
            d = gso(&g)?;
        }
        let mu = d.mu[k][k - 1];
        if d.b[k] >= (delta - mu * mu) * d.b[k - 1] {
            k += 1;
        } else {
            for row in t.iter_mut() {
                row.swap(k, k - 1);
            }
            g = recompute(g0, &t);
            d = gso(&g)?;
            k = (k - 1).max(1);
            swaps += 1;
            if swaps > MAX_SWAPS {
                return Err(SvpError::LllBreakdown { index: k, value: f64::NAN });
            }
        }
    }
    let reduced = lat.congruent(&t)?;
    Ok(LllOutput { reduced, transform: t })
}

#[cfg(test)]
/// Checks size reduction `|μ_ij| ≤ 1/2` and the Lovász condition.
pub(crate) fn is_lll_reduced(g: &DMatrix<f64>, delta: f64) -> bool {
    let Ok(d) = gso(g) else { return false };
    let n = g.nrows();
    for i in 1..n {
        for j in 0..i {
            if d.mu[i][j].abs() > 0.5 + 1e-9 {
                return false;
            }
        }
        let mu = d.mu[i][i - 1];
        if d.b[i] < (delta - mu * mu) * d.b[i - 1] * (1.0 - 1e-9) {
            return false;
        }
    }
    true
}

/// Gram–Schmidt data used by the enumeration: `(μ, b*)`.
pub(crate) fn gso_data(g: &DMatrix<f64>) -> Result<(Vec<Vec<f64>>, Vec<f64>), SvpError> {
    let d = gso(g)?;
    Ok((d.mu, d.b))
}
