//! Experiment configuration files.
//!
//! Configs are TOML with a strict schema. Everything except `command` and
//! `seed` has a default; [`ExperimentConfig::resolve`] fills the per-command
//! grids so that the echoed config fully describes a run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fusion::GateParams;
use crate::lattice::{Dims, LossMode, LossSpec};
use crate::microcluster::{default_assignment, ArmAssignment};
use crate::percolation::threshold::linspace;
use crate::percolation::{LatticeKind, ModelConfig};
use crate::resources::{ComputationShape, CountMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Threshold,
    Pi,
    Channel,
    Loss,
    Heralded,
    Renorm,
    Resources,
    Compare,
    OracleCheck,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Threshold => "threshold",
            Command::Pi => "pi",
            Command::Channel => "channel",
            Command::Loss => "loss",
            Command::Heralded => "heralded",
            Command::Renorm => "renorm",
            Command::Resources => "resources",
            Command::Compare => "compare",
            Command::OracleCheck => "oracle-check",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    /// Gate success probabilities.
    pub p: Option<Vec<f64>>,
    pub p_loss: Option<Vec<f64>>,
    /// Cube sizes for crossing-point runs.
    pub sizes: Option<Vec<usize>>,
    /// Channel lengths in sites.
    pub lengths: Option<Vec<usize>>,
    pub cross_sections: Option<Vec<usize>>,
    /// Block size for renormalized channels.
    pub block: Option<usize>,
    /// Block counts for renormalized channels.
    pub blocks: Option<Vec<usize>>,
    /// Block sizes searched by `compare`.
    pub k_values: Option<Vec<usize>>,
    /// Upper limit of the block-count search.
    pub max_blocks: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesSection {
    pub shape: ComputationShape,
    pub count_mode: CountMode,
    /// Competitor `L,k` table for `compare`.
    pub competitor: Option<PathBuf>,
    /// Our own `L,k` table; computed from `k_values` when absent.
    pub ours: Option<PathBuf>,
}

impl Default for ResourcesSection {
    fn default() -> Self {
        ResourcesSection {
            shape: ComputationShape { n: 1, k: 1, l: 6 },
            count_mode: CountMode::PaperCompat,
            competitor: None,
            ours: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub random_cases: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection { random_cases: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Mandatory; there is no default seed.
    pub seed: Option<u64>,
    #[serde(default = "default_runs")]
    pub n_runs: u64,
    #[serde(default)]
    pub gate: GateParams,
    #[serde(default)]
    pub loss: LossSpec,
    #[serde(default)]
    pub dims: Option<Dims>,
    #[serde(default = "default_assignment")]
    pub assignment: ArmAssignment,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub resources: ResourcesSection,
    #[serde(default)]
    pub oracle: OracleSection,
    /// Output directory; `--out` overrides it.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_runs() -> u64 {
    10_000
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config syntax: {0}")]
    Parse(String),
    #[error("{}", .0.join("; "))]
    Invalid(Vec<String>),
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file, or the config embedded in a result artifact.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&extract_embedded(&text).unwrap_or(text))
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated config has a seed")
    }

    /// Field-level range checks. Returns every problem found.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        let mut prob = |field: &str, v: f64| {
            if !(0.0..=1.0).contains(&v) {
                errs.push(format!("{field} = {v} is outside [0, 1]"));
            }
        };
        prob("gate.p_success", self.gate.p_success);
        prob("loss.p_loss", self.loss.p_loss);
        for (i, &p) in self.grids.p.iter().flatten().enumerate() {
            prob(&format!("grids.p[{i}]"), p);
        }
        for (i, &p) in self.grids.p_loss.iter().flatten().enumerate() {
            prob(&format!("grids.p_loss[{i}]"), p);
        }
        if self.seed.is_none() {
            errs.push("seed is missing: seeds are mandatory so every run is reproducible".into());
        }
        if self.n_runs == 0 {
            errs.push("n_runs must be at least 1".into());
        }
        if let Some(d) = self.dims {
            if let Err(e) = d.validate() {
                errs.push(format!("dims: {e}"));
            }
        }
        if let Err(e) = self.assignment.validate() {
            errs.push(format!("assignment: {e}"));
        }
        if let Some(g) = &self.grids.p_loss {
            if g.windows(2).any(|w| w[1] < w[0]) {
                errs.push("grids.p_loss must be sorted ascending".into());
            }
        }
        if let Some(g) = &self.grids.p {
            if self.command == Command::Threshold || self.command == Command::Calibrate {
                if g.len() < 5 {
                    errs.push(format!("grids.p needs at least 5 points for crossing fits, got {}", g.len()));
                }
                if g.windows(2).any(|w| w[1] <= w[0]) {
                    errs.push("grids.p must be strictly increasing".into());
                }
            }
        }
        for (field, list) in [
            ("grids.sizes", &self.grids.sizes),
            ("grids.lengths", &self.grids.lengths),
            ("grids.cross_sections", &self.grids.cross_sections),
            ("grids.blocks", &self.grids.blocks),
            ("grids.k_values", &self.grids.k_values),
        ] {
            if list.iter().flatten().any(|&v| v == 0) {
                errs.push(format!("{field} entries must be at least 1"));
            }
        }
        if self.grids.block.is_some_and(|k| k < 2) {
            errs.push("grids.block must be at least 2".into());
        }
        if self.grids.k_values.iter().flatten().any(|&k| k < 2) {
            errs.push("grids.k_values entries must be at least 2".into());
        }
        if self.grids.cross_sections.iter().flatten().any(|&l| l < 2) {
            errs.push("grids.cross_sections entries must be at least 2".into());
        }
        let s = self.resources.shape;
        if s.n == 0 || s.k == 0 || s.l == 0 {
            errs.push("resources.shape entries must be at least 1".into());
        }
        if self.command == Command::Compare && self.resources.competitor.is_none() {
            errs.push("resources.competitor is required for compare".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }

    /// Fills command-specific defaults.
    pub fn resolve(mut self) -> Self {
        let g = &mut self.grids;
        match self.command {
            Command::Threshold => {
                g.sizes.get_or_insert_with(|| vec![15, 20, 25]);
                g.p.get_or_insert_with(|| linspace(0.55, 0.70, 13));
            }
            Command::Calibrate => {
                g.sizes.get_or_insert_with(|| vec![16, 24, 32]);
                g.p.get_or_insert_with(|| linspace(0.236, 0.260, 9));
            }
            Command::Pi => {
                g.p.get_or_insert_with(|| vec![self.gate.p_success]);
                self.dims.get_or_insert(Dims::cube(25));
            }
            Command::Channel => {
                g.cross_sections.get_or_insert_with(|| vec![3, 4, 5, 6]);
                g.lengths.get_or_insert_with(|| vec![4, 8, 16, 32, 64, 128, 256, 512, 1024]);
            }
            Command::Loss => {
                g.p_loss.get_or_insert_with(|| linspace(0.0, 0.03, 13));
                self.dims.get_or_insert(Dims::cube(25));
                self.loss.mode = LossMode::Unheralded;
            }
            Command::Heralded => {
                g.p_loss.get_or_insert_with(|| linspace(0.0, 0.30, 16));
                self.dims.get_or_insert(Dims::cube(25));
                self.loss.mode = LossMode::Heralded;
            }
            Command::Renorm => {
                g.block.get_or_insert(6);
                g.blocks.get_or_insert_with(|| vec![1, 2, 4, 8, 16, 32, 64, 128]);
            }
            Command::Compare => {
                g.k_values.get_or_insert_with(|| vec![4, 5, 6, 7, 8]);
                g.max_blocks.get_or_insert(4096);
            }
            Command::Resources | Command::OracleCheck => {}
        }
        for v in [&mut g.p, &mut g.p_loss].into_iter().flatten() {
            for x in v.iter_mut() {
                // Keep echoed grids free of float noise from linspace.
                *x = (*x * 1e9).round() / 1e9;
            }
        }
        self
    }

    /// Monte Carlo model for this config; `dims` falls back to `fallback`.
    pub fn model(&self, fallback: Dims) -> ModelConfig {
        ModelConfig {
            dims: self.dims.unwrap_or(fallback),
            gate: self.gate,
            loss: self.loss,
            assignment: self.assignment,
            kind: if self.command == Command::Calibrate { LatticeKind::CubicBond } else { LatticeKind::Brickwork },
        }
    }
}

/// Config text embedded in an artifact: leading `# ` lines of a CSV, or the
/// `config` string of a JSON document.
pub fn extract_embedded(text: &str) -> Option<String> {
    let t = text.trim_start();
    if t.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(t).ok()?;
        return v.get("config")?.as_str().map(str::to_owned);
    }
    if t.starts_with("# ") || t.starts_with("#\n") {
        let mut out = String::new();
        for line in t.lines() {
            let Some(rest) = line.strip_prefix('#') else { break };
            out.push_str(rest.strip_prefix(' ').unwrap_or(rest));
            out.push('\n');
        }
        return Some(out);
    }
    None
}

/// `text` as `# `-prefixed comment lines.
pub fn comment_block(text: &str) -> String {
    text.lines().map(|l| if l.is_empty() { "#\n".to_string() } else { format!("# {l}\n") }).collect()
}
