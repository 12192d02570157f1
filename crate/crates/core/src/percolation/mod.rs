//! Spanning detection and the Monte Carlo driver.

mod calibration;
pub mod fit;
pub mod sweeps;
pub mod threshold;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fusion::GateParams;
use crate::lattice::{Dims, LatticeBuilder, LossSpec, PercolationGraph};
use crate::microcluster::ArmAssignment;
use crate::rng::run_rng;

pub use calibration::CubicBondBuilder;

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}

/// True if live sites on the `x = 0` face connect to the `x = lx - 1` face.
pub fn spans(g: &PercolationGraph) -> bool {
    let d = g.dims;
    if d.lx <= 1 {
        return true;
    }
    let n = d.sites();
    let (src, dst) = (n as u32, n as u32 + 1);
    let mut uf = UnionFind::new(n + 2);
    for b in &g.bonds {
        uf.union(b.a, b.b);
    }
    for z in 0..d.lz {
        for y in 0..d.ly {
            let row = d.lx * (y + d.ly * z);
            if g.is_live(row) {
                uf.union(row as u32, src);
            }
            if g.is_live(row + d.lx - 1) {
                uf.union((row + d.lx - 1) as u32, dst);
            }
        }
    }
    uf.connected(src, dst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    /// Microcluster sites fused into the brickwork lattice.
    #[default]
    Brickwork,
    /// Plain simple-cubic lattice with independent bonds kept with
    /// probability `p_success`; used to calibrate the estimators.
    CubicBond,
}

/// Everything that defines one Monte Carlo point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dims: Dims,
    pub gate: GateParams,
    pub loss: LossSpec,
    pub assignment: ArmAssignment,
    pub kind: LatticeKind,
}

impl ModelConfig {
    pub fn new(dims: Dims, p: f64) -> Self {
        ModelConfig {
            dims,
            gate: GateParams::with_p(p),
            loss: LossSpec::none(),
            assignment: ArmAssignment::default(),
            kind: LatticeKind::Brickwork,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.gate.p_success = p;
        self
    }

    pub fn with_dims(mut self, dims: Dims) -> Self {
        self.dims = dims;
        self
    }

    pub fn with_loss(mut self, loss: LossSpec) -> Self {
        self.loss = loss;
        self
    }

    /// Stable 64-bit FNV-1a hash of the serialized configuration.
    pub fn fingerprint(&self) -> u64 {
        let s = serde_json::to_string(self).expect("config serializes");
        s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }
}

/// Builds and tests one instance per run index.
pub enum Sampler {
    Brickwork(LatticeBuilder),
    Cubic(CubicBondBuilder),
}

impl Sampler {
    pub fn new(cfg: &ModelConfig) -> Self {
        match cfg.kind {
            LatticeKind::Brickwork => {
                Sampler::Brickwork(LatticeBuilder::new(cfg.dims, &cfg.gate, &cfg.loss, &cfg.assignment))
            }
            LatticeKind::CubicBond => Sampler::Cubic(CubicBondBuilder::new(cfg.dims, cfg.gate.p_success)),
        }
    }

    pub fn run(&self, seed: u64, run: u64) -> bool {
        let mut rng = run_rng(seed, run);
        match self {
            Sampler::Brickwork(b) => spans(&b.build(&mut rng)),
            Sampler::Cubic(c) => c.spans(&mut rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub n_runs: u64,
    pub n_spanning: u64,
    pub pi_hat: f64,
    pub ci95: (f64, f64),
    pub config_fingerprint: u64,
}

impl RunStats {
    pub fn from_counts(n_runs: u64, n_spanning: u64, fingerprint: u64) -> Self {
        let pi_hat = if n_runs == 0 { 0.0 } else { n_spanning as f64 / n_runs as f64 };
        RunStats { n_runs, n_spanning, pi_hat, ci95: wilson(n_spanning, n_runs, 1.959_963_984_540_054), config_fingerprint: fingerprint }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci95.1 - self.ci95.0) / 2.0
    }
}

/// Wilson score interval.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PercolationError {
    #[error("n_runs must be at least 1")]
    NoRuns,
    #[error("{0}")]
    Invalid(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

/// Spanning probability from `n_runs` independent instances. Run `r` draws
/// from stream `r` of `seed`, so the count does not depend on thread count.
pub fn estimate_pi(cfg: &ModelConfig, n_runs: u64, seed: u64) -> Result<RunStats, PercolationError> {
    if n_runs == 0 {
        return Err(PercolationError::NoRuns);
    }
    let sampler = Sampler::new(cfg);
    let n_spanning = (0..n_runs).into_par_iter().filter(|&r| sampler.run(seed, r)).count() as u64;
    Ok(RunStats::from_counts(n_runs, n_spanning, cfg.fingerprint()))
}
