//! Scalar and small-box optimizers: golden-section maximization, bisection
//! root finding, and grid search with local refinement.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default argument tolerance for golden-section search.
pub const GOLDEN_TOL: f64 = 1e-6;
/// Default bracket tolerance for bisection.
pub const BISECT_TOL: f64 = 1e-9;
/// Default grid resolution per dimension.
pub const GRID_POINTS: usize = 64;
/// Default number of refinement passes after the initial grid.
pub const GRID_REFINE_LEVELS: usize = 3;

const MAX_GRID_DIMS: usize = 4;

/// `(sqrt(5) - 1) / 2`, the interval reduction per golden-section step.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of any of the searches in this module.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    /// Maximizer or root, one coordinate per dimension.
    pub x: Vec<f64>,
    /// Objective value at `x` (for root finding, `g(x)`).
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Final interval width (golden, bisection) or grid cell width (grid).
    pub residual: f64,
    /// Grid points whose objective was not finite.
    pub excluded: usize,
    /// Final bracket of a root search, with `g(lo)` on the same side as the
    /// initial lower endpoint.
    pub bracket: Option<(f64, f64)>,
}

impl SearchReport {
    pub fn argmax(&self) -> f64 {
        self.x[0]
    }
}

/// Number of golden-section reductions needed to shrink `width` below `tol`.
pub fn golden_steps(width: f64, tol: f64) -> usize {
    if width <= tol {
        0
    } else {
        ((width / tol).ln() / (1.0 / INV_PHI).ln()).ceil() as usize
    }
}

/// Maximizes `f` on `[lo, hi]` by golden-section search. For unimodal `f` the
/// result is within `tol` of the global maximizer.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<SearchReport> {
    if !(lo < hi && tol > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInterval { lo, hi, tol });
    }
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteObjective { x })
        }
    };

    let steps = golden_steps(hi - lo, tol);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    for _ in 0..steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    let residual = b - a;
    Ok(SearchReport {
        x: vec![x],
        value,
        evaluations: steps + 2,
        converged: residual <= tol * (1.0 + 1e-9),
        residual,
        excluded: 0,
        bracket: None,
    })
}

/// Finds a sign change of `g` on `[lo, hi]` by bisection.
pub fn bisect_root(mut g: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<SearchReport> {
    if !(lo < hi && tol > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInterval { lo, hi, tol });
    }
    let mut eval = |x: f64| {
        let y = g(x);
        if y.is_nan() {
            Err(Error::NonFiniteObjective { x })
        } else {
            Ok(y)
        }
    };
    let mut g_lo = eval(lo)?;
    let mut g_hi = eval(hi)?;
    let mut evaluations = 2;
    let endpoint = |x: f64, value: f64, evaluations: usize| SearchReport {
        x: vec![x],
        value,
        evaluations,
        converged: true,
        residual: 0.0,
        excluded: 0,
        bracket: Some((x, x)),
    };
    if g_lo.abs() <= tol {
        return Ok(endpoint(lo, g_lo, evaluations));
    }
    if g_hi.abs() <= tol {
        return Ok(endpoint(hi, g_hi, evaluations));
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { g_lo, g_hi });
    }

    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let g_mid = eval(mid)?;
        evaluations += 1;
        if g_mid == 0.0 {
            return Ok(endpoint(mid, g_mid, evaluations));
        }
        if g_mid.signum() == g_lo.signum() {
            a = mid;
            g_lo = g_mid;
        } else {
            b = mid;
            g_hi = g_mid;
        }
    }
    let (x, value) = if g_lo.abs() <= g_hi.abs() { (a, g_lo) } else { (b, g_hi) };
    Ok(SearchReport {
        x: vec![x],
        value,
        evaluations,
        converged: b - a <= tol,
        residual: b - a,
        excluded: 0,
        bracket: Some((a, b)),
    })
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included exactly.
pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |k| if k + 1 == n && n > 1 { hi } else { lo + k as f64 * step })
}

/// Grid search over a box of up to four dimensions followed by
/// `refine_levels` passes, each re-gridding the +/-1-cell neighbourhood of
/// the incumbent. Non-finite objective values are excluded and counted.
/// Ties keep the earliest point in evaluation order.
pub fn grid_max(
    mut f: impl FnMut(&[f64]) -> f64,
    bounds: &[(f64, f64)],
    points_per_dim: usize,
    refine_levels: usize,
) -> Result<SearchReport> {
    let dims = bounds.len();
    if dims == 0 || dims > MAX_GRID_DIMS {
        return Err(Error::InvalidGrid(format!(
            "{dims} dimensions (expected 1..={MAX_GRID_DIMS})"
        )));
    }
    if points_per_dim < 3 {
        return Err(Error::InvalidGrid(format!(
            "{points_per_dim} points per dimension (expected >= 3)"
        )));
    }
    if let Some(&(lo, hi)) = bounds
        .iter()
        .find(|(lo, hi)| !(lo <= hi && lo.is_finite() && hi.is_finite()))
    {
        return Err(Error::InvalidGrid(format!("bad interval [{lo}, {hi}]")));
    }

    let mut boxes: Vec<(f64, f64)> = bounds.to_vec();
    let mut best_x: Vec<f64> = bounds.iter().map(|b| b.0).collect();
    let mut best = f64::NEG_INFINITY;
    let mut evaluations = 0;
    let mut excluded = 0;
    let mut point = vec![0.0; dims];
    let mut axes: Vec<Vec<f64>> = Vec::with_capacity(dims);
    let mut residual = 0.0;

    for _ in 0..=refine_levels {
        axes.clear();
        axes.extend(
            boxes
                .iter()
                .map(|&(lo, hi)| linspace(lo, hi, points_per_dim).collect::<Vec<_>>()),
        );
        let mut index = vec![0usize; dims];
        'grid: loop {
            for d in 0..dims {
                point[d] = axes[d][index[d]];
            }
            let y = f(&point);
            evaluations += 1;
            if !y.is_finite() {
                excluded += 1;
            } else if y > best {
                best = y;
                best_x.copy_from_slice(&point);
            }
            // odometer increment, last dimension fastest
            for d in (0..dims).rev() {
                index[d] += 1;
                if index[d] < points_per_dim {
                    continue 'grid;
                }
                index[d] = 0;
            }
            break;
        }

        residual = 0.0f64;
        for (d, bx) in boxes.iter_mut().enumerate() {
            let cell = (bx.1 - bx.0) / (points_per_dim - 1) as f64;
            residual = residual.max(cell);
            let (lo, hi) = bounds[d];
            *bx = ((best_x[d] - cell).max(lo), (best_x[d] + cell).min(hi));
        }
    }

    Ok(SearchReport {
        x: best_x,
        value: best,
        evaluations,
        converged: best.is_finite(),
        residual,
        excluded,
        bracket: None,
    })
}
