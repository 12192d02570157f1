//! Crossing-point threshold estimation.

use serde::{Deserialize, Serialize};

use super::fit::{fit_logistic, LogisticFit};
use super::sweeps::{pi_sweep, PointResult};
use super::{ModelConfig, PercolationError};
use crate::lattice::Dims;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub p_c: f64,
    /// `(L_i, L_j, p)` where the fitted curves for `L_i` and `L_j` cross.
    pub pairwise_crossings: Vec<(usize, usize, f64)>,
    pub spread: f64,
    /// Crossings of piecewise-linear interpolations of the raw estimates.
    pub interpolated_crossings: Vec<(usize, usize, Option<f64>)>,
    pub interpolated_p_c: Option<f64>,
    pub fits: Vec<(usize, LogisticFit)>,
    pub points: Vec<PointResult>,
}

fn check_grid(p_grid: &[f64]) -> Result<(), PercolationError> {
    if p_grid.len() < 5 {
        return Err(PercolationError::Invalid(format!("p grid needs at least 5 points, got {}", p_grid.len())));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PercolationError::Invalid("p grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Where the fitted curves of two sizes intersect.
pub fn logistic_crossing(a: &LogisticFit, b: &LogisticFit) -> Option<f64> {
    let db1 = a.b1 - b.b1;
    if db1.abs() < 1e-12 * a.b1.abs().max(b.b1.abs()).max(1.0) {
        return None;
    }
    Some((b.b0 - a.b0) / db1)
}

/// First sign change of `Π_b - Π_a` on the grid, linearly interpolated.
pub fn interpolated_crossing(grid: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    // Curves pinned together at 0 or 1 carry no crossing information.
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(_, (x, y))| !(x == y && (**x == 0.0 || **x == 1.0)))
        .map(|(&p, (x, y))| (p, y - x))
        .collect();
    for i in 1..pts.len() {
        let ((p0, d0), (p1, d1)) = (pts[i - 1], pts[i]);
        if d0 == 0.0 {
            return Some(p0);
        }
        if d0.signum() != d1.signum() && d1 != 0.0 {
            return Some(p0 + d0 / (d0 - d1) * (p1 - p0));
        }
    }
    None
}

/// Estimates the threshold from already-sampled curves. `curves` pairs each
/// size with its Π values on `p_grid`.
pub fn threshold_from_curves(
    p_grid: &[f64],
    curves: &[(usize, Vec<(u64, u64)>)],
) -> Result<(Vec<(usize, LogisticFit)>, Vec<(usize, usize, f64)>, Vec<(usize, usize, Option<f64>)>), PercolationError> {
    check_grid(p_grid)?;
    if curves.len() < 2 {
        return Err(PercolationError::Invalid("need at least two lattice sizes".into()));
    }
    let mut fits = Vec::new();
    for (l, counts) in curves {
        let pts: Vec<(f64, u64, u64)> = p_grid.iter().zip(counts).map(|(&p, &(n, k))| (p, n, k)).collect();
        let f = fit_logistic(&pts).map_err(|e| PercolationError::Fit(format!("L={l}: {e}")))?;
        fits.push((*l, f));
    }
    let (lo, hi) = (p_grid[0], p_grid[p_grid.len() - 1]);
    let mut crossings = Vec::new();
    let mut interp = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let (li, lj) = (curves[i].0, curves[j].0);
            if li == lj {
                return Err(PercolationError::Fit(format!("two datasets share L={li}; crossing undefined")));
            }
            let c = logistic_crossing(&fits[i].1, &fits[j].1)
                .ok_or_else(|| PercolationError::Fit(format!("curves for L={li} and L={lj} are parallel")))?;
            if !(lo..=hi).contains(&c) {
                return Err(PercolationError::Fit(format!(
                    "curves for L={li} and L={lj} cross at {c:.4}, outside the grid [{lo}, {hi}]"
                )));
            }
            crossings.push((li, lj, c));
            let pi = |k: usize| -> Vec<f64> { curves[k].1.iter().map(|&(n, s)| s as f64 / n as f64).collect() };
            interp.push((li, lj, interpolated_crossing(p_grid, &pi(i), &pi(j))));
        }
    }
    Ok((fits, crossings, interp))
}

/// Samples Π on `p_grid` for cubes of each size in `sizes` and locates the
/// common crossing.
pub fn find_threshold(
    base: &ModelConfig,
    sizes: &[usize],
    p_grid: &[f64],
    n_runs: u64,
    seed: u64,
) -> Result<ThresholdEstimate, PercolationError> {
    let points = threshold_points(base, sizes, p_grid, n_runs, seed)?;
    estimate_from_points(p_grid, sizes, points)
}

/// The raw Π curves behind [`find_threshold`], size by size.
pub fn threshold_points(
    base: &ModelConfig,
    sizes: &[usize],
    p_grid: &[f64],
    n_runs: u64,
    seed: u64,
) -> Result<Vec<PointResult>, PercolationError> {
    check_grid(p_grid)?;
    if sizes.len() < 2 {
        return Err(PercolationError::Invalid("need at least two lattice sizes".into()));
    }
    let mut points = Vec::new();
    for &l in sizes {
        log::info!("threshold: sampling L={l}");
        points.extend(pi_sweep(&base.with_dims(Dims::cube(l)), p_grid, n_runs, seed)?);
    }
    Ok(points)
}

/// Crossing analysis of points laid out as by [`threshold_points`].
pub fn estimate_from_points(
    p_grid: &[f64],
    sizes: &[usize],
    points: Vec<PointResult>,
) -> Result<ThresholdEstimate, PercolationError> {
    if points.len() != sizes.len() * p_grid.len() {
        return Err(PercolationError::Invalid("point count does not match sizes × grid".into()));
    }
    let curves: Vec<(usize, Vec<(u64, u64)>)> = sizes
        .iter()
        .zip(points.chunks(p_grid.len()))
        .map(|(&l, row)| (l, row.iter().map(|r| (r.stats.n_runs, r.stats.n_spanning)).collect()))
        .collect();
    let (fits, crossings, interp) = threshold_from_curves(p_grid, &curves)?;
    let p_c = crossings.iter().map(|c| c.2).sum::<f64>() / crossings.len() as f64;
    let max = crossings.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
    let min = crossings.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let found: Vec<f64> = interp.iter().filter_map(|c| c.2).collect();
    let interpolated_p_c = (found.len() == interp.len()).then(|| found.iter().sum::<f64>() / found.len() as f64);
    Ok(ThresholdEstimate {
        p_c,
        pairwise_crossings: crossings,
        spread: max - min,
        interpolated_crossings: interp,
        interpolated_p_c,
        fits,
        points,
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(l: usize, grid: &[f64]) -> (usize, Vec<(u64, u64)>) {
        let w = 3.0 * l as f64;
        let counts = grid
            .iter()
            .map(|&p| {
                let pi = 1.0 / (1.0 + (-(p - 0.3) * w).exp());
                (100_000, (pi * 100_000.0).round() as u64)
            })
            .collect();
        (l, counts)
    }

    #[test]
    fn synthetic_curves_cross_at_their_common_point() {
        let grid = linspace(0.2, 0.4, 9);
        let curves = vec![synthetic(8, &grid), synthetic(16, &grid), synthetic(24, &grid)];
        let (_, c, interp) = threshold_from_curves(&grid, &curves).unwrap();
        for (_, _, p) in c {
            assert!((p - 0.3).abs() < 1e-3, "{p}");
        }
        for (_, _, p) in interp {
            assert!((p.unwrap() - 0.3).abs() < 1e-3);
        }
    }

    #[test]
    fn saturated_ties_are_not_crossings() {
        let g = [0.1, 0.2, 0.3, 0.4, 0.5];
        let a = [0.0, 0.0, 0.3, 0.8, 1.0];
        let b = [0.0, 0.0, 0.1, 0.9, 1.0];
        let x = interpolated_crossing(&g, &a, &b).unwrap();
        assert!((x - (0.3 + 0.2 / 0.3 * 0.1)).abs() < 1e-12, "{x}");
        assert_eq!(interpolated_crossing(&g, &[0.0; 5], &[0.0; 5]), None);
    }

    #[test]
    fn identical_sizes_are_rejected() {
        let grid = linspace(0.2, 0.4, 9);
        let curves = vec![synthetic(8, &grid), synthetic(8, &grid)];
        assert!(matches!(threshold_from_curves(&grid, &curves), Err(PercolationError::Fit(_))));
    }

    #[test]
    fn short_grid_is_rejected() {
        let grid = linspace(0.2, 0.4, 4);
        let curves = vec![synthetic(8, &grid), synthetic(16, &grid)];
        assert!(threshold_from_curves(&grid, &curves).is_err());
    }
}
