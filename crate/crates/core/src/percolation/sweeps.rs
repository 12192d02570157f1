//! Parameter sweeps: Π versus p, channel length, loss rate and block count.

use serde::{Deserialize, Serialize};

use super::fit::{fit_exponential, FitResult};
use super::{estimate_pi, ModelConfig, PercolationError, RunStats};
use crate::lattice::{Dims, LossMode, LossSpec};
use crate::microcluster::ArmAssignment;

/// One sampled configuration point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub p: f64,
    pub p_loss: f64,
    pub dims: Dims,
    pub mode: LossMode,
    pub stats: RunStats,
    pub seed: u64,
}

impl PointResult {
    pub const CSV_HEADER: &'static str = "p,p_loss,lx,ly,lz,mode,n_runs,n_spanning,pi,ci_lo,ci_hi,seed";

    pub fn csv_row(&self) -> String {
        let mode = match self.mode {
            LossMode::Unheralded => "unheralded",
            LossMode::Heralded => "heralded",
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.p_loss,
            self.dims.lx,
            self.dims.ly,
            self.dims.lz,
            mode,
            self.stats.n_runs,
            self.stats.n_spanning,
            self.stats.pi_hat,
            self.stats.ci95.0,
            self.stats.ci95.1,
            self.seed
        )
    }
}

pub fn point(cfg: &ModelConfig, n_runs: u64, seed: u64) -> Result<PointResult, PercolationError> {
    let stats = estimate_pi(cfg, n_runs, seed)?;
    Ok(PointResult {
        p: cfg.gate.p_success,
        p_loss: cfg.loss.p_loss,
        dims: cfg.dims,
        mode: cfg.loss.mode,
        stats,
        seed,
    })
}

/// Π on a grid of gate success probabilities; every point reuses the same
/// run streams, so the curve is coupled across p.
pub fn pi_sweep(cfg: &ModelConfig, p_grid: &[f64], n_runs: u64, seed: u64) -> Result<Vec<PointResult>, PercolationError> {
    p_grid.iter().map(|&p| point(&cfg.with_p(p), n_runs, seed)).collect()
}

/// Π for each of the three slot pairings, same seed for all.
pub fn assignment_sweep(
    cfg: &ModelConfig,
    n_runs: u64,
    seed: u64,
) -> Result<Vec<(ArmAssignment, RunStats)>, PercolationError> {
    ArmAssignment::all_pairings()
        .into_iter()
        .map(|a| Ok((a, estimate_pi(&ModelConfig { assignment: a, ..*cfg }, n_runs, seed)?)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelResult {
    pub cross_section: usize,
    pub points: Vec<PointResult>,
    pub fit: FitResult,
    /// Extrapolated channel length (sites along x) with Π = 0.9.
    pub length_at_90: f64,
    /// Final-lattice qubits in that channel, `length · L²`.
    pub qubits_at_90: f64,
}

fn decay_fit(points: &[(f64, f64)]) -> Result<FitResult, PercolationError> {
    let tail: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 < 0.99).collect();
    if tail.len() < 3 {
        return Err(PercolationError::Fit(format!(
            "only {} points with Π < 0.99; at least 3 are needed for the decay fit",
            tail.len()
        )));
    }
    fit_exponential(&tail).map_err(PercolationError::Fit)
}

/// Π versus channel length for an `L × L` cross section, with an exponential
/// fit over the points where Π < 0.99.
pub fn channel_sweep(
    cfg: &ModelConfig,
    cross_section: usize,
    lengths: &[usize],
    n_runs: u64,
    seed: u64,
) -> Result<ChannelResult, PercolationError> {
    channel_fit(cross_section, channel_points(cfg, cross_section, lengths, n_runs, seed)?)
}

pub fn channel_points(
    cfg: &ModelConfig,
    cross_section: usize,
    lengths: &[usize],
    n_runs: u64,
    seed: u64,
) -> Result<Vec<PointResult>, PercolationError> {
    if cross_section < 2 {
        return Err(PercolationError::Invalid("channel cross section must be at least 2".into()));
    }
    let mut points = Vec::new();
    for &len in lengths {
        log::info!("channel: L={cross_section} length={len}");
        points.push(point(&cfg.with_dims(Dims::new(len, cross_section, cross_section)), n_runs, seed)?);
    }
    Ok(points)
}

pub fn channel_fit(cross_section: usize, points: Vec<PointResult>) -> Result<ChannelResult, PercolationError> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.dims.lx as f64, p.stats.pi_hat)).collect();
    let fit = decay_fit(&xy)?;
    let length_at_90 = fit.length_at(0.9);
    let area = (cross_section * cross_section) as f64;
    Ok(ChannelResult { cross_section, points, fit, length_at_90, qubits_at_90: length_at_90 * area })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSweepResult {
    pub points: Vec<PointResult>,
    /// Largest loss rate with Π ≥ 0.9, interpolated; `None` if even the first
    /// grid point is below 0.9.
    pub tolerance: Option<f64>,
    /// True when every grid point stayed at or above 0.9, so the tolerance is
    /// only a lower bound.
    pub censored: bool,
}

/// Largest `x` with `y ≥ level`, interpolating linearly at the first
/// downward crossing.
pub fn level_crossing(xs: &[f64], ys: &[f64], level: f64) -> (Option<f64>, bool) {
    if ys.is_empty() || ys[0] < level {
        return (None, false);
    }
    for i in 1..ys.len() {
        if ys[i] < level {
            let t = (ys[i - 1] - level) / (ys[i - 1] - ys[i]);
            return (Some(xs[i - 1] + t * (xs[i] - xs[i - 1])), false);
        }
    }
    (Some(xs[xs.len() - 1]), true)
}

pub fn loss_sweep(
    cfg: &ModelConfig,
    p_loss_grid: &[f64],
    mode: LossMode,
    n_runs: u64,
    seed: u64,
) -> Result<LossSweepResult, PercolationError> {
    if p_loss_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(PercolationError::Invalid("p_loss grid must be sorted ascending".into()));
    }
    let mut points = Vec::new();
    for &pl in p_loss_grid {
        log::info!("loss sweep: {mode:?} p_loss={pl}");
        let loss = LossSpec { p_loss: pl, mode, ..cfg.loss };
        points.push(point(&cfg.with_loss(loss), n_runs, seed)?);
    }
    let ys: Vec<f64> = points.iter().map(|p| p.stats.pi_hat).collect();
    let (tolerance, censored) = level_crossing(p_loss_grid, &ys, 0.9);
    Ok(LossSweepResult { points, tolerance, censored })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormalizedResult {
    pub block: usize,
    pub points: Vec<PointResult>,
    /// Decay fit of Π against block count, when enough points fall below 0.99.
    pub fit: Option<FitResult>,
    pub blocks_at_90: Option<f64>,
    /// Sites along the channel axis at Π = 0.9.
    pub sites_at_90: Option<f64>,
    /// Final-lattice qubits in the whole channel at Π = 0.9 (`k³` per block).
    pub qubits_at_90: Option<f64>,
}

/// Channel of `n_blocks` cubes of side `k` joined along x.
pub fn renormalized_channel(
    cfg: &ModelConfig,
    k: usize,
    n_blocks: &[usize],
    n_runs: u64,
    seed: u64,
) -> Result<RenormalizedResult, PercolationError> {
    if k < 2 {
        return Err(PercolationError::Invalid("block size must be at least 2".into()));
    }
    let mut points = Vec::new();
    for &n in n_blocks {
        log::info!("renormalized channel: k={k} blocks={n}");
        points.push(point(&cfg.with_dims(Dims::new(k * n, k, k)), n_runs, seed)?);
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| ((p.dims.lx / k) as f64, p.stats.pi_hat)).collect();
    let fit = decay_fit(&xy).ok();
    let blocks_at_90 = fit.map(|f| f.length_at(0.9));
    Ok(RenormalizedResult {
        block: k,
        points,
        fit,
        blocks_at_90,
        sites_at_90: blocks_at_90.map(|b| b * k as f64),
        qubits_at_90: blocks_at_90.map(|b| b * (k * k * k) as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_crossing_cases() {
        let xs = [0.0, 0.01, 0.02, 0.03];
        assert!((level_crossing(&xs, &[1.0, 0.95, 0.85, 0.5], 0.9).0.unwrap() - 0.015).abs() < 1e-12);
        assert_eq!(level_crossing(&xs, &[0.8, 0.7, 0.6, 0.5], 0.9), (None, false));
        assert_eq!(level_crossing(&xs, &[1.0, 1.0, 0.99, 0.95], 0.9), (Some(0.03), true));
    }

    #[test]
    fn too_few_tail_points_refuse_the_fit() {
        assert!(matches!(decay_fit(&[(1.0, 1.0), (2.0, 0.995), (3.0, 0.98), (4.0, 0.97)]), Err(PercolationError::Fit(_))));
    }
}
