//! Adaptive cubature of `‖γ′(t)‖²` over `{|t| < R, ‖p(t)‖ < r}`.
//!
//! The square `[-R, R]²` is refined recursively. A cell is classified with a
//! Taylor majorant of `p` about its centre: cells that lie entirely inside the
//! region get a tensor Gauss–Legendre rule, which is exact for the polynomial
//! integrand; cells entirely outside contribute nothing. Cells cut by the
//! boundary use a segment rule at two orders, and the difference serves as the
//! error estimate. The segment rule puts Gauss nodes on the outer axis and
//! integrates over the inside intervals of each inner segment, located by
//! bisection; the axes are chosen so that the boundary is a graph over the
//! outer one.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;

use super::poly::VecPoly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureOptions {
    pub tol_abs: f64,
    pub min_depth: u32,
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { tol_abs: 1e-7, min_depth: 3, max_depth: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub interior_cells: u64,
    pub boundary_cells: u64,
}

const LOW_ORDER: usize = 6;
const HIGH_ORDER: usize = 12;
const SAMPLES_PER_SEGMENT: usize = 8;

struct Rule {
    nodes: Vec<(f64, f64)>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("rule order is positive"));
        Self { nodes: gl.as_node_weight_pairs().to_vec() }
    }

    fn apply(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.nodes.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
    }
}

pub(crate) struct Region<'a> {
    /// Component whose norm defines the region.
    pub level: &'a VecPoly,
    pub r: f64,
    pub domain_radius: f64,
    /// Derivatives whose squared norms are summed to give the integrand.
    pub speed: Vec<VecPoly>,
}

enum Class {
    Inside,
    Outside,
    Boundary,
}

impl Region<'_> {
    fn integrand(&self, t: Complex64) -> f64 {
        self.speed.iter().map(|p| p.norm_sq_at(t)).sum()
    }

    fn phi(&self, t: Complex64) -> f64 {
        (self.r * self.r - self.level.norm_sq_at(t)).min(self.domain_radius.powi(2) - t.norm_sqr())
    }

    fn classify(&self, c: Complex64, h: f64) -> Class {
        let reach = h * std::f64::consts::SQRT_2;
        let disc = if c.norm() + reach < self.domain_radius {
            Class::Inside
        } else if c.norm() - reach >= self.domain_radius {
            Class::Outside
        } else {
            Class::Boundary
        };
        if matches!(disc, Class::Outside) {
            return Class::Outside;
        }
        let t = self.level.taylor_norms(c);
        let centre = t.first().copied().unwrap_or(0.0);
        let spread = t.iter().skip(1).rev().fold(0.0, |acc, a| acc * reach + a) * reach;
        if centre - spread >= self.r {
            Class::Outside
        } else if centre + spread < self.r && matches!(disc, Class::Inside) {
            Class::Inside
        } else {
            Class::Boundary
        }
    }

    /// Whether the boundary near `c` is closer to vertical than horizontal, in
    /// which case the inner segments should run horizontally so that the
    /// boundary is a graph over the outer variable.
    fn transpose_at(&self, c: Complex64) -> bool {
        let level = self.r * self.r - self.level.norm_sq_at(c);
        let disc = self.domain_radius.powi(2) - c.norm_sqr();
        let (gx, gy) = if level <= disc {
            let v = self.level.eval(c);
            let dv = self.level.derivative().eval(c);
            let g: Complex64 = v.iter().zip(&dv).map(|(a, b)| a.conj() * b).sum();
            (g.re, -g.im)
        } else {
            (c.re, c.im)
        };
        gx.abs() > gy.abs()
    }

    /// Integral over the inside part of the segment at `outer` with the inner
    /// variable in `[lo, hi]`.
    fn segment(&self, transpose: bool, outer: f64, lo: f64, hi: f64, rule: &Rule) -> f64 {
        let at = |inner: f64| if transpose { Complex64::new(inner, outer) } else { Complex64::new(outer, inner) };
        let phi = |v: f64| self.phi(at(v));
        let mut cuts = vec![lo];
        cuts.extend(sign_changes(phi, lo, hi));
        cuts.push(hi);
        cuts.windows(2)
            .filter(|w| w[1] > w[0] && phi(0.5 * (w[0] + w[1])) > 0.0)
            .map(|w| rule.apply(w[0], w[1], |v| self.integrand(at(v))))
            .sum()
    }

    /// Outer integral of the segment integrals, split where the boundary
    /// crosses the two inner edges of the cell so that every piece is smooth.
    fn segment_rule(&self, c: Complex64, h: f64, transpose: bool, rule: &Rule) -> f64 {
        let (o, i) = if transpose { (c.im, c.re) } else { (c.re, c.im) };
        let at = |outer: f64, inner: f64| {
            if transpose {
                Complex64::new(inner, outer)
            } else {
                Complex64::new(outer, inner)
            }
        };
        let mut cuts = vec![o - h];
        for edge in [i - h, i + h] {
            cuts.extend(sign_changes(|x| self.phi(at(x, edge)), o - h, o + h));
        }
        cuts.push(o + h);
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| rule.apply(w[0], w[1], |x| self.segment(transpose, x, i - h, i + h, rule)))
            .sum()
    }

    fn tensor(&self, c: Complex64, h: f64, rule: &Rule) -> f64 {
        rule.apply(c.re - h, c.re + h, |x| rule.apply(c.im - h, c.im + h, |y| self.integrand(Complex64::new(x, y))))
    }
}

/// Sign changes of `phi` on `[lo, hi]` seen on a uniform sample, each refined
/// by bisection.
fn sign_changes(phi: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let dv = (hi - lo) / SAMPLES_PER_SEGMENT as f64;
    let mut out = Vec::new();
    let mut prev = (lo, phi(lo));
    for k in 1..=SAMPLES_PER_SEGMENT {
        let v = if k == SAMPLES_PER_SEGMENT { hi } else { lo + k as f64 * dv };
        let f = phi(v);
        if (prev.1 > 0.0) != (f > 0.0) {
            out.push(bisect(&phi, prev.0, v, prev.1 > 0.0));
        }
        prev = (v, f);
    }
    out
}

fn bisect(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64, a_inside: bool) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (phi(m) > 0.0) == a_inside {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Integrates the region's integrand over its sublevel set.
///
/// After a uniform refinement to `min_depth`, the boundary cell with the
/// largest error estimate is split until the total estimate drops below
/// `tol_abs` or every remaining candidate sits at `max_depth`. Ties are broken
/// by creation order and the final sum runs over cells in creation order, so
/// the result is reproducible.
pub(crate) fn integrate(region: &Region<'_>, opts: &QuadratureOptions) -> QuadratureResult {
    let degree = region.level.degree().max(region.speed.iter().map(|p| p.degree()).max().unwrap_or(0));
    let rules =
        Rules { tensor: Rule::new((degree + 1).max(8)), low: Rule::new(LOW_ORDER), high: Rule::new(HIGH_ORDER) };

    let mut res =
        QuadratureResult { value: 0.0, error_estimate: 0.0, converged: true, interior_cells: 0, boundary_cells: 0 };
    let mut cells: Vec<Cell> = Vec::new();
    let mut heap: BinaryHeap<(Estimate, Reverse<usize>)> = BinaryHeap::new();
    let mut total_est = 0.0;

    let mut pending = vec![(Complex64::new(0.0, 0.0), region.domain_radius, 0u32)];
    while let Some((c, h, depth)) = pending.pop() {
        if depth < opts.min_depth && !matches!(region.classify(c, h), Class::Outside) {
            push_children(&mut pending, c, h, depth);
            continue;
        }
        if let Some(cell) = evaluate(region, &rules, c, h, depth) {
            add_cell(cell, &mut cells, &mut heap, &mut total_est);
        }
    }

    while total_est > opts.tol_abs {
        let Some((_, Reverse(idx))) = heap.pop() else { break };
        let cell = cells[idx];
        if cell.depth >= opts.max_depth {
            continue;
        }
        cells[idx].active = false;
        total_est -= cell.est;
        let mut children = Vec::with_capacity(4);
        push_children(&mut children, cell.c, cell.h, cell.depth);
        for (c, h, depth) in children.into_iter().rev() {
            if let Some(child) = evaluate(region, &rules, c, h, depth) {
                add_cell(child, &mut cells, &mut heap, &mut total_est);
            }
        }
    }

    for cell in cells.iter().filter(|c| c.active) {
        res.value += cell.value;
        res.error_estimate += cell.est;
        if cell.boundary {
            res.boundary_cells += 1;
        } else {
            res.interior_cells += 1;
        }
    }
    res.converged = res.error_estimate <= opts.tol_abs;
    res
}

struct Rules {
    tensor: Rule,
    low: Rule,
    high: Rule,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    c: Complex64,
    h: f64,
    depth: u32,
    value: f64,
    est: f64,
    boundary: bool,
    active: bool,
}

/// Heap key ordered by `f64::total_cmp`.
#[derive(Debug, Clone, Copy)]
struct Estimate(f64);

impl PartialEq for Estimate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Estimate {}

impl PartialOrd for Estimate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Estimate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn evaluate(region: &Region<'_>, rules: &Rules, c: Complex64, h: f64, depth: u32) -> Option<Cell> {
    let (value, est, boundary) = match region.classify(c, h) {
        Class::Outside => return None,
        Class::Inside => (region.tensor(c, h, &rules.tensor), 0.0, false),
        Class::Boundary => {
            let transpose = region.transpose_at(c);
            let hi = region.segment_rule(c, h, transpose, &rules.high);
            let lo = region.segment_rule(c, h, transpose, &rules.low);
            (hi, (hi - lo).abs(), true)
        }
    };
    Some(Cell { c, h, depth, value, est, boundary, active: true })
}

fn add_cell(cell: Cell, cells: &mut Vec<Cell>, heap: &mut BinaryHeap<(Estimate, Reverse<usize>)>, total: &mut f64) {
    if cell.boundary {
        heap.push((Estimate(cell.est), Reverse(cells.len())));
        *total += cell.est;
    }
    cells.push(cell);
}

fn push_children(stack: &mut Vec<(Complex64, f64, u32)>, c: Complex64, h: f64, depth: u32) {
    let q = 0.5 * h;
    for (dx, dy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        stack.push((c + Complex64::new(dx * q, dy * q), q, depth + 1));
    }
}
