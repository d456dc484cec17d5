//! Deterministic optimizers: global 1-D minimization, concave maximization
//! over a 2-D polytope, and lower-convex-envelope evaluation on a simplex.

use crate::{Error, Result};

mod envelope;
mod simplex_lp;

pub use envelope::{
    envelope_channel_ascent, lower_convex_envelope, EnvelopeProblem, EnvelopeSolution,
};

/// Default number of cells in the dense 1-D scan.
pub const DEFAULT_GRID_1D: usize = 512;

/// A closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Domain(format!("empty or invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[lo, hi]`, to bracket width `tol`.
fn golden_min(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut best = (lo, f(lo));
    for x in [hi, 0.5 * (lo + hi)] {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        }
        let (x, v) = if fa < fb { (a, fa) } else { (b, fb) };
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Global 1-D minimization: dense scan over `grid` cells, then golden-section
/// refinement around the best three grid cells. Infinite values of `f` mark
/// infeasible points and are skipped. Deterministic for fixed resolution.
pub fn minimize_1d_with_grid(
    mut f: impl FnMut(f64) -> f64,
    domain: Interval,
    tol: f64,
    grid: usize,
) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")));
    }
    let grid = grid.max(2);
    if domain.width() == 0.0 {
        let v = f(domain.lo);
        if !v.is_finite() {
            return Err(Error::Infeasible("objective undefined on point domain".into()));
        }
        return Ok((domain.lo, v));
    }
    let step = domain.width() / grid as f64;
    let mut values = Vec::with_capacity(grid + 1);
    for i in 0..=grid {
        let x = if i == grid { domain.hi } else { domain.lo + i as f64 * step };
        values.push((x, f(x)));
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i].1.is_finite()).collect();
    if order.is_empty() {
        return Err(Error::Infeasible("objective infeasible on the whole grid".into()));
    }
    order.sort_by(|&i, &j| values[i].1.partial_cmp(&values[j].1).unwrap().then(i.cmp(&j)));

    let mut best = values[order[0]];
    for &i in order.iter().take(3) {
        let lo = values[i.saturating_sub(1)].0;
        let hi = values[(i + 1).min(grid)].0;
        let cand = golden_min(&mut f, lo, hi, tol);
        if cand.1.is_finite() && cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// [`minimize_1d_with_grid`] at the default resolution.
pub fn minimize_1d(f: impl FnMut(f64) -> f64, domain: Interval, tol: f64) -> Result<(f64, f64)> {
    minimize_1d_with_grid(f, domain, tol, DEFAULT_GRID_1D)
}

/// A half-plane `a x + b y <= c`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Intersection of half-planes over two free variables. Must be bounded.
#[derive(Debug, Clone, Default)]
pub struct Polytope2D {
    pub constraints: Vec<HalfPlane>,
}

/// Feasibility slack for polytope membership.
pub const FEAS_TOL: f64 = 1e-9;

impl Polytope2D {
    pub fn new(constraints: Vec<HalfPlane>) -> Self {
        Self { constraints }
    }

    pub fn contains(&self, x: f64, y: f64, eps: f64) -> bool {
        self.constraints.iter().all(|h| h.a * x + h.b * y <= h.c + eps)
    }

    /// All vertices: pairwise constraint intersections that are feasible.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let mut out = vec![];
        let cs = &self.constraints;
        for i in 0..cs.len() {
            for j in (i + 1)..cs.len() {
                let det = cs[i].a * cs[j].b - cs[j].a * cs[i].b;
                if det.abs() < 1e-14 {
                    continue;
                }
                let x = (cs[i].c * cs[j].b - cs[j].c * cs[i].b) / det;
                let y = (cs[i].a * cs[j].c - cs[j].a * cs[i].c) / det;
                if self.contains(x, y, FEAS_TOL) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Feasible range of x for fixed y (interval from all constraints).
    fn x_range(&self, y: f64) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for h in &self.constraints {
            let rhs = h.c - h.b * y;
            if h.a.abs() < 1e-14 {
                if rhs < -FEAS_TOL {
                    return None;
                }
            } else if h.a > 0.0 {
                hi = hi.min(rhs / h.a);
            } else {
                lo = lo.max(rhs / h.a);
            }
        }
        (lo <= hi + FEAS_TOL).then(|| (lo.min(hi), hi.max(lo)))
    }

    fn y_range(&self, x: f64) -> Option<(f64, f64)> {
        let swapped = Polytope2D::new(
            self.constraints
                .iter()
                .map(|h| HalfPlane { a: h.b, b: h.a, c: h.c })
                .collect(),
        );
        swapped.x_range(x)
    }
}

/// Maximizes a concave `f` over a bounded polytope: coarse feasibility-filtered
/// grid over the vertex bounding box, then alternating exact line maximization
/// along each coordinate (the feasible segment is an interval). Concavity makes
/// every local maximum global, so the ascent limit is the optimum up to grid
/// and line-search resolution.
pub fn maximize_concave_2d(
    mut f: impl FnMut(f64, f64) -> f64,
    region: &Polytope2D,
    tol: f64,
    grid: usize,
    ascent_iters: usize,
) -> Result<((f64, f64), f64)> {
    let verts = region.vertices();
    if verts.is_empty() {
        return Err(Error::Infeasible("polytope has no feasible vertex".into()));
    }
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &verts {
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    let cx = verts.iter().map(|v| v.0).sum::<f64>() / verts.len() as f64;
    let cy = verts.iter().map(|v| v.1).sum::<f64>() / verts.len() as f64;

    let mut cands: Vec<(f64, f64)> = verts;
    cands.push((cx, cy));
    let g = grid.max(1);
    for i in 0..=g {
        for j in 0..=g {
            let x = xlo + (xhi - xlo) * i as f64 / g as f64;
            let y = ylo + (yhi - ylo) * j as f64 / g as f64;
            if region.contains(x, y, FEAS_TOL) {
                cands.push((x, y));
            }
        }
    }
    let mut best = ((f64::NAN, f64::NAN), f64::NEG_INFINITY);
    for (x, y) in cands {
        let v = f(x, y);
        if v > best.1 {
            best = ((x, y), v);
        }
    }
    let grid_best_value = best.1;

    // Alternating line maximization from the best candidate.
    let (mut x, mut y) = best.0;
    let line_tol = (tol * 1e-3).max(1e-13);
    for _ in 0..ascent_iters {
        if let Some((lo, hi)) = region.x_range(y) {
            let (nx, nv) = golden_min(&mut |t| -f(t, y), lo, hi, line_tol);
            if -nv >= best.1 {
                x = nx;
                best = ((x, y), -nv);
            }
        }
        if let Some((lo, hi)) = region.y_range(x) {
            let (ny, nv) = golden_min(&mut |t| -f(x, t), lo, hi, line_tol);
            if -nv >= best.1 {
                y = ny;
                best = ((x, y), -nv);
            }
        }
    }
    debug_assert!(best.1 >= grid_best_value);
    Ok(best)
}
