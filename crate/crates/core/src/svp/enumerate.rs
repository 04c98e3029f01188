use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::ToPrimitive;

use super::lll::{gso_data, lll_reduce};
use super::{GramLattice, SvpAlgorithm, SvpError, SvpMethod, SvpResult, RADIUS_GUARD};

/// Extra relative slack for candidates kept for exact comparison.
const EXACT_GUARD: f64 = 1e-8;

struct Search<'a> {
    mu: &'a [Vec<f64>],
    b: &'a [f64],
    reduced: &'a GramLattice,
    y: Vec<i64>,
    bound: f64,
    guard: f64,
    best: f64,
    candidates: Vec<(f64, Vec<i64>)>,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, level: usize, partial: f64, free_sign: bool) -> Result<(), SvpError> {
        let n = self.y.len();
        let bl = self.b[level];
        if !(bl > 0.0) {
            return Err(SvpError::RadiusUnderflow);
        }
        let mut c = 0.0;
        for j in level + 1..n {
            c -= self.mu[j][level] * self.y[j] as f64;
        }
        let slack = (self.bound - partial).max(0.0);
        let r = (slack / bl).sqrt();
        let mut lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        if !free_sign {
            // every higher coordinate is zero: fix the sign of the first nonzero one
            lo = lo.max(0);
        }
        for x in lo..=hi {
            let t = partial + bl * (x as f64 - c).powi(2);
            if t > self.bound {
                continue;
            }
            self.y[level] = x;
            self.nodes += 1;
            if level == 0 {
                if free_sign || x != 0 {
                    self.record();
                }
            } else {
                self.run(level - 1, t, free_sign || x != 0)?;
            }
        }
        self.y[level] = 0;
        Ok(())
    }

    fn record(&mut self) {
        let len = self.reduced.norm_sq(&self.y);
        if len <= self.bound {
            self.candidates.push((len, self.y.clone()));
            if len < self.best {
                self.best = len;
                self.bound = self.bound.min(len * (1.0 + self.guard));
            }
        }
    }
}

fn canonical(mut v: Vec<i64>) -> Vec<i64> {
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

fn to_original(t: &[Vec<i128>], y: &[i64]) -> Result<Vec<i64>, SvpError> {
    t.iter()
        .map(|row| {
            let mut acc: i128 = 0;
            for (a, &b) in row.iter().zip(y) {
                acc = a.checked_mul(b as i128).and_then(|p| acc.checked_add(p)).ok_or(SvpError::Overflow)?;
            }
            i64::try_from(acc).map_err(|_| SvpError::Overflow)
        })
        .collect()
}

/// LLL followed by Fincke–Pohst enumeration. `cap` bounds the dimension.
pub fn shortest_vector_with(lat: &GramLattice, cap: usize, delta: f64) -> Result<SvpResult, SvpError> {
    let n = lat.dim();
    if n == 0 {
        return Err(SvpError::Empty);
    }
    if n > cap {
        return Err(SvpError::DimensionTooLarge { dim: n, cap });
    }
    let lll = lll_reduce(lat, delta)?;
    let g = lll.reduced.gram();
    let (mu, b) = gso_data(g)?;
    let initial = (0..n).map(|i| g[(i, i)]).fold(f64::INFINITY, f64::min);
    let guard = if lat.is_exact() { EXACT_GUARD } else { RADIUS_GUARD };

    let mut search = Search {
        mu: &mu,
        b: &b,
        reduced: &lll.reduced,
        y: vec![0; n],
        bound: initial * (1.0 + guard),
        guard,
        best: f64::INFINITY,
        candidates: Vec::new(),
        nodes: 0,
    };
    search.run(n - 1, 0.0, false)?;
    let (best, nodes) = (search.best, search.nodes);
    if !best.is_finite() {
        // the shortest basis vector is always inside the initial radius
        return Err(SvpError::RadiusUnderflow);
    }

    let cutoff = best * (1.0 + guard);
    let mut pool = Vec::new();
    for (len, y) in search.candidates.into_iter().filter(|(len, _)| *len <= cutoff) {
        let w = canonical(to_original(&lll.transform, &y)?);
        pool.push((len, w));
    }

    let (length_sq, exact_length_sq, witness) = match lat.exact() {
        Some(exact) => {
            let mut scored = Vec::with_capacity(pool.len());
            for (_, w) in pool {
                let wi: Vec<i128> = w.iter().map(|&x| x as i128).collect();
                let e = exact.norm_sq(&wi).ok_or(SvpError::Overflow)?;
                scored.push((e, w));
            }
            let (e, w) = scored
                .into_iter()
                .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
                .ok_or(SvpError::RadiusUnderflow)?;
            (e.to_f64().unwrap_or(f64::NAN), Some(e), w)
        }
        None => {
            let mut scored: Vec<(f64, Vec<i64>)> = pool.into_iter().map(|(_, w)| (lat.norm_sq(&w), w)).collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then_with(|| a.1.cmp(&b.1)));
            let (l, w) = scored.into_iter().next().ok_or(SvpError::RadiusUnderflow)?;
            (l, None::<Ratio<i128>>, w)
        }
    };

    Ok(SvpResult {
        length_sq,
        exact_length_sq,
        witness,
        method: SvpMethod {
            algorithm: SvpAlgorithm::LllFinckePohst,
            nodes_visited: nodes,
            initial_radius_sq: initial,
            exact_mode: lat.is_exact(),
        },
    })
}
