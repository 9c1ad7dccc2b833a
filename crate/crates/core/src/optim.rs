//! Grid bracketing followed by golden-section refinement, for maximizing a
//! scalar function on a closed interval.

use rayon::prelude::*;

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// `n` log-spaced points from `lo` to `hi`, both included exactly.
pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Evaluates `f` on `grid` (in parallel, results in grid order).
pub(crate) fn scan<F>(f: &F, grid: &[f64]) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

/// Maximizes `f` over `[grid[0], grid[last]]`: picks the best grid point,
/// then runs golden-section search between its two neighbours.
///
/// The endpoints of the domain are candidates in their own right, so a
/// maximizer pushed against a boundary is returned exactly at the boundary.
pub(crate) fn maximize<F>(f: &F, grid: &[f64], tol: f64, max_iter: usize) -> Result<Maximum>
where
    F: Fn(f64) -> f64 + Sync,
{
    let values = scan(f, grid);
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > values[b] { i } else { b });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];

    let (gx, gv, iterations) = golden_section(f, lo, hi, tol, max_iter)?;
    let mut result = Maximum {
        x: gx,
        value: gv,
        iterations,
        bracket: (lo, hi),
    };
    if values[best] > result.value {
        result.x = grid[best];
        result.value = values[best];
    }
    Ok(result)
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_section<F>(
    f: &F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> f64,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a > tol {
        if iterations >= max_iter {
            let (best_x, best_value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
            return Err(Error::NotConverged {
                iterations,
                best_x,
                best_value,
            });
        }
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    Ok(if f1 >= f2 {
        (x1, f1, iterations)
    } else {
        (x2, f2, iterations)
    })
}
