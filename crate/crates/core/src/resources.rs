//! Closed-form resource accounting and the scheme comparison table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Dims;
use crate::percolation::{estimate_pi, ModelConfig, PercolationError};

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("invalid {field}: {msg}")]
    Invalid { field: &'static str, msg: String },
    #[error("competitor data line {line}: {msg}")]
    Data { line: usize, msg: String },
    #[error("competitor data file has no rows")]
    EmptyData,
    #[error(transparent)]
    Percolation(#[from] PercolationError),
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ResourceError {
    ResourceError::Invalid { field, msg: msg.into() }
}

/// `n` logical qubits, computational depth `k`, renormalized blocks of `L³` sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputationShape {
    pub n: u64,
    pub k: u64,
    pub l: u64,
}

impl ComputationShape {
    pub fn new(n: u64, k: u64, l: u64) -> Result<Self, ResourceError> {
        for (field, v) in [("n", n), ("k", k), ("L", l)] {
            if v == 0 {
                return Err(invalid(field, "must be at least 1"));
            }
        }
        Ok(ComputationShape { n, k, l })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeResources {
    pub sites: u64,
    pub ghz: u64,
    pub fusions: u64,
    pub rotators_per_fusion: u64,
    pub beamsplitters_per_fusion: u64,
}

/// Polarization rotators and polarizing beamsplitters in one boosted gate.
pub const ELEMENTS_PER_FUSION: (u64, u64) = (15, 4);

pub fn lattice_resources(shape: ComputationShape) -> LatticeResources {
    let sites = shape.n * shape.k * shape.l.pow(3);
    LatticeResources {
        sites,
        ghz: 3 * sites,
        fusions: 4 * sites,
        rotators_per_fusion: ELEMENTS_PER_FUSION.0,
        beamsplitters_per_fusion: ELEMENTS_PER_FUSION.1,
    }
}

/// A probabilistic GHZ source made deterministic by multiplexing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub ghz_size: u32,
    pub bell_pairs_per_attempt: u64,
    pub p_attempt: f64,
    pub target_confidence: f64,
}

impl SourceSpec {
    /// Two Bell pairs per attempt, success 1/2.
    pub fn ghz3() -> Self {
        SourceSpec { ghz_size: 3, bell_pairs_per_attempt: 2, p_attempt: 0.5, target_confidence: 0.999_999 }
    }

    /// Three Bell pairs per attempt, success 1/4.
    pub fn ghz4() -> Self {
        SourceSpec { ghz_size: 4, bell_pairs_per_attempt: 3, p_attempt: 0.25, target_confidence: 0.999_999 }
    }

    pub fn validate(&self) -> Result<(), ResourceError> {
        if !matches!(self.ghz_size, 3 | 4) {
            return Err(invalid("ghz_size", format!("{} (expected 3 or 4)", self.ghz_size)));
        }
        if !(self.p_attempt > 0.0 && self.p_attempt <= 1.0) {
            return Err(invalid("p_attempt", format!("{} not in (0, 1]", self.p_attempt)));
        }
        if !(self.target_confidence > 0.0 && self.target_confidence < 1.0) {
            return Err(invalid("target_confidence", format!("{} not in (0, 1)", self.target_confidence)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Smallest repeat count reaching the target confidence.
    Formula,
    /// The published repeat counts: 21 for 3-GHZ, 51 for 4-GHZ.
    PaperCompat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repeats {
    pub formula: u64,
    /// Published constant for this GHZ size, when there is one.
    pub paper_compat: Option<u64>,
}

pub fn paper_compat_repeats(ghz_size: u32) -> Option<u64> {
    match ghz_size {
        3 => Some(21),
        4 => Some(51),
        _ => None,
    }
}

/// Smallest `t` with `1 - (1 - p)^t ≥ target`.
pub fn multiplex_repeats(spec: &SourceSpec) -> Result<Repeats, ResourceError> {
    spec.validate()?;
    let q = 1.0 - spec.p_attempt;
    let miss = 1.0 - spec.target_confidence;
    let mut t = 1u64;
    if q > 0.0 {
        // Start from the logarithmic estimate and correct for rounding.
        t = ((miss.ln() / q.ln()).ceil() as u64).max(1);
        while t > 1 && q.powi((t - 1) as i32) <= miss {
            t -= 1;
        }
        while q.powi(t as i32) > miss {
            t += 1;
        }
    }
    Ok(Repeats { formula: t, paper_compat: paper_compat_repeats(spec.ghz_size) })
}

pub fn bell_pairs_per_ghz(spec: &SourceSpec, mode: CountMode) -> Result<u64, ResourceError> {
    let r = multiplex_repeats(spec)?;
    let t = match mode {
        CountMode::Formula => r.formula,
        CountMode::PaperCompat => r.paper_compat.unwrap_or(r.formula),
    };
    Ok(spec.bell_pairs_per_attempt * t)
}

/// Success probability of the best known GHZ-from-Bell-pairs strategy for
/// `n` photons.
pub fn ghz_success_prob(n: u32) -> Result<f64, ResourceError> {
    if n < 2 {
        return Err(invalid("n", format!("{n} (need at least 2 photons)")));
    }
    let half = (n - 1) / 2;
    let three_quarters = (n - 1).div_ceil(2);
    Ok(0.5f64.powi(half as i32) * 0.75f64.powi(three_quarters as i32))
}

/// Probability that the three-photon source used in the multiplexing count
/// succeeds per attempt; differs from `ghz_success_prob(3)`.
pub const GHZ3_ATTEMPT_PROB: f64 = 0.5;

/// One `(L, k)` point: the block size `k` needed to reach lattice size `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizePoint {
    pub l: u64,
    pub k: u64,
}

/// Parses `L,k` rows. A header line is allowed; `#` lines are skipped.
pub fn parse_size_points(text: &str) -> Result<Vec<SizePoint>, ResourceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(ResourceError::Data { line, msg: format!("expected 2 columns, got {}", fields.len()) });
        }
        if out.is_empty() && fields[0].eq_ignore_ascii_case("l") && fields[1].eq_ignore_ascii_case("k") {
            continue;
        }
        let num = |s: &str| -> Result<u64, ResourceError> {
            match s.parse::<u64>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(ResourceError::Data { line, msg: format!("'{s}' is not a positive integer") }),
            }
        };
        out.push(SizePoint { l: num(fields[0])?, k: num(fields[1])? });
    }
    if out.is_empty() {
        return Err(ResourceError::EmptyData);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub l: u64,
    pub k_ours: u64,
    pub bell_ours: u64,
    pub k_theirs: u64,
    pub bell_theirs: u64,
    pub ratio: f64,
}

/// Bell pairs for an `L × L` lattice of `k³` blocks built from 3-GHZ states.
pub fn bell_pairs_ours(l: u64, k: u64, mode: CountMode) -> Result<u64, ResourceError> {
    let per_ghz = bell_pairs_per_ghz(&SourceSpec::ghz3(), mode)?;
    Ok(per_ghz * 3 * l * l * k.pow(3))
}

/// Bell pairs for the competitor lattice, one 4-GHZ per site of each `k³` block.
pub fn bell_pairs_theirs(l: u64, k: u64, mode: CountMode) -> Result<u64, ResourceError> {
    let per_ghz = bell_pairs_per_ghz(&SourceSpec::ghz4(), mode)?;
    Ok(per_ghz * l * l * k.pow(3))
}

/// For each competitor row, the smallest of our block sizes that reaches
/// the same `L`. Rows we cannot match are left out.
pub fn scheme_comparison(
    ours: &[SizePoint],
    theirs: &[SizePoint],
    mode: CountMode,
) -> Result<Vec<ComparisonRow>, ResourceError> {
    if theirs.is_empty() {
        return Err(ResourceError::EmptyData);
    }
    let mut rows = Vec::new();
    for t in theirs {
        let Some(k_ours) = ours.iter().filter(|o| o.l >= t.l).map(|o| o.k).min() else {
            continue;
        };
        let bell_ours = bell_pairs_ours(t.l, k_ours, mode)?;
        let bell_theirs = bell_pairs_theirs(t.l, t.k, mode)?;
        rows.push(ComparisonRow {
            l: t.l,
            k_ours,
            bell_ours,
            k_theirs: t.k,
            bell_theirs,
            ratio: bell_theirs as f64 / bell_ours as f64,
        });
    }
    Ok(rows)
}

pub const COMPARISON_HEADER: &str = "L,k_ours,bell_ours,k_theirs,bell_theirs,ratio";

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.l, r.k_ours, r.bell_ours, r.k_theirs, r.bell_theirs, r.ratio).unwrap();
    }
    out
}

pub fn size_points_csv(points: &[SizePoint]) -> String {
    let mut out = String::from("L,k\n");
    for p in points {
        writeln!(out, "{},{}", p.l, p.k).unwrap();
    }
    out
}

/// Largest number of `k`-blocks in a line whose channel still spans with
/// probability at least 1/2, searched up to `cap`.
pub fn max_l_at_half(cfg: &ModelConfig, k: usize, cap: usize, n_runs: u64, seed: u64) -> Result<usize, ResourceError> {
    if k < 2 {
        return Err(invalid("k", format!("{k} (need at least 2)")));
    }
    if cap == 0 {
        return Err(invalid("cap", "must be at least 1"));
    }
    let ok = |l: usize| -> Result<bool, ResourceError> {
        let s = estimate_pi(&cfg.with_dims(Dims::new(k * l, k, k)), n_runs, seed)?;
        Ok(s.pi_hat >= 0.5)
    };
    if !ok(1)? {
        return Ok(0);
    }
    // Double until the criterion fails, then bisect.
    let (mut lo, mut hi) = (1usize, 2usize);
    while hi <= cap && ok(hi)? {
        lo = hi;
        hi *= 2;
    }
    if hi > cap {
        if ok(cap)? {
            return Ok(cap);
        }
        hi = cap;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
