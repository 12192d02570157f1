//! One lattice site: a five-qubit star built from three 3-GHZ states.
//!
//! The central GHZ has centre `c` and leaves `l1`, `l2`. Side GHZ `i` has
//! centre `s_i` and two arm leaves. Internal fusion `i` joins `l_i` with
//! `s_i`; on success both of side `i`'s arms hang off `c`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::fusion::{FusionKind, FusionResult, GateParams, GateSampler};
use crate::graphstate::{FusionBasis, FusionMode, FusionOutcome, GraphState, LocalClifford, Pauli};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArmSlot {
    MinusX = 0,
    PlusX = 1,
    T1 = 2,
    T2 = 3,
}

impl ArmSlot {
    pub const ALL: [ArmSlot; 4] = [ArmSlot::MinusX, ArmSlot::PlusX, ArmSlot::T1, ArmSlot::T2];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> ArmSlot {
        Self::ALL[i]
    }

    pub fn name(self) -> &'static str {
        match self {
            ArmSlot::MinusX => "-X",
            ArmSlot::PlusX => "+X",
            ArmSlot::T1 => "T1",
            ArmSlot::T2 => "T2",
        }
    }
}

impl fmt::Display for ArmSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArmSlot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArmSlot::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown arm slot '{s}' (expected -X, +X, T1 or T2)"))
    }
}

impl Serialize for ArmSlot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ArmSlot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which two slots each side GHZ supplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmAssignment {
    pub side1: [ArmSlot; 2],
    pub side2: [ArmSlot; 2],
}

impl Default for ArmAssignment {
    fn default() -> Self {
        default_assignment()
    }
}

impl ArmAssignment {
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = [false; 4];
        for s in self.side1.iter().chain(&self.side2) {
            if std::mem::replace(&mut seen[s.index()], true) {
                return Err(format!("slot {s} assigned twice"));
            }
        }
        Ok(())
    }

    pub fn side(&self, i: usize) -> [ArmSlot; 2] {
        if i == 0 {
            self.side1
        } else {
            self.side2
        }
    }

    /// The three ways of splitting the four slots into two pairs.
    pub fn all_pairings() -> [ArmAssignment; 3] {
        use ArmSlot::*;
        [
            ArmAssignment { side1: [MinusX, T1], side2: [PlusX, T2] },
            ArmAssignment { side1: [MinusX, T2], side2: [PlusX, T1] },
            ArmAssignment { side1: [MinusX, PlusX], side2: [T1, T2] },
        ]
    }
}

/// One X arm and one transverse arm per side.
pub fn default_assignment() -> ArmAssignment {
    ArmAssignment { side1: [ArmSlot::MinusX, ArmSlot::T1], side2: [ArmSlot::PlusX, ArmSlot::T2] }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArmState {
    /// Leaf of the site's centre.
    Attached,
    /// Bell-paired with the arm in the given slot, not bonded to the centre.
    Paired(ArmSlot),
    Dead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteClass {
    FullStar,
    OneDetached,
    TwoDetached,
    /// Centre alive but some arm dead or cut away.
    Degraded,
    CenterDead,
}

impl SiteClass {
    pub fn name(self) -> &'static str {
        match self {
            SiteClass::FullStar => "full_star",
            SiteClass::OneDetached => "one_detached",
            SiteClass::TwoDetached => "two_detached",
            SiteClass::Degraded => "degraded",
            SiteClass::CenterDead => "center_dead",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SiteOutcome {
    pub center_alive: bool,
    pub arms: [ArmState; 4],
}

impl SiteOutcome {
    pub const FULL_STAR: SiteOutcome =
        SiteOutcome { center_alive: true, arms: [ArmState::Attached; 4] };

    pub fn arm(&self, s: ArmSlot) -> ArmState {
        self.arms[s.index()]
    }

    pub fn attached_arms(&self) -> Vec<ArmSlot> {
        ArmSlot::ALL.into_iter().filter(|&s| self.arm(s) == ArmState::Attached).collect()
    }

    pub fn detached_pairs(&self) -> Vec<(ArmSlot, ArmSlot)> {
        ArmSlot::ALL
            .into_iter()
            .filter_map(|s| match self.arm(s) {
                ArmState::Paired(t) if s < t => Some((s, t)),
                _ => None,
            })
            .collect()
    }

    pub fn dead_arms(&self) -> Vec<ArmSlot> {
        ArmSlot::ALL.into_iter().filter(|&s| self.arm(s) == ArmState::Dead).collect()
    }

    pub fn is_full_star(&self) -> bool {
        self.center_alive && self.attached_arms().len() == 4
    }

    pub fn class(&self) -> SiteClass {
        if !self.center_alive {
            return SiteClass::CenterDead;
        }
        let attached = self.attached_arms().len();
        match (attached, self.detached_pairs().len()) {
            (4, _) => SiteClass::FullStar,
            (2, 1) => SiteClass::OneDetached,
            (0, 2) => SiteClass::TwoDetached,
            _ => SiteClass::Degraded,
        }
    }

    /// Checks the partition and centre invariants.
    pub fn validate(&self) -> Result<(), String> {
        for s in ArmSlot::ALL {
            match self.arm(s) {
                ArmState::Attached if !self.center_alive => {
                    return Err(format!("arm {s} attached to a dead centre"))
                }
                ArmState::Paired(t) => {
                    if t == s || self.arm(t) != ArmState::Paired(s) {
                        return Err(format!("arm {s} paired inconsistently"));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Graph-frame consequences of failure measurements, precomputed from the
/// gate's failure bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteRules {
    /// Internal failure isolates the centre (graph-frame X on a central leaf).
    pub internal_fail_cuts_center: bool,
    /// Internal failure leaves the side's arms paired (graph-frame X or Y on
    /// the side centre) rather than dead.
    pub internal_fail_pairs: bool,
    /// External failure on an attached arm isolates its centre, per data role.
    pub external_fail_cuts_center: [bool; 2],
}

/// Graph-frame axis a failure measurement applies to a qubit with tag `tag`.
fn failure_graph_axis(axis: Pauli, mode: FusionMode, tag: LocalClifford) -> Pauli {
    match mode {
        FusionMode::Rotated => tag.pull_back(axis).pauli,
        FusionMode::Standard => LocalClifford::HADAMARD.pull_back(axis).pauli,
    }
}

impl SiteRules {
    pub fn new(gate: &GateParams) -> Self {
        let ib = gate.internal_basis;
        // Central leaf carries a Hadamard tag; the side centre is untagged.
        let leaf = failure_graph_axis(ib.failure.0, ib.mode, LocalClifford::HADAMARD);
        let side = failure_graph_axis(ib.failure.1, ib.mode, LocalClifford::IDENTITY);
        let eb = gate.external_basis;
        // Attached arms keep their GHZ-leaf Hadamard tag through a successful
        // internal fusion.
        let cut = |a: Pauli| failure_graph_axis(a, eb.mode, LocalClifford::HADAMARD) == Pauli::X;
        SiteRules {
            internal_fail_cuts_center: leaf == Pauli::X,
            internal_fail_pairs: side != Pauli::Z,
            external_fail_cuts_center: [cut(eb.failure.0), cut(eb.failure.1)],
        }
    }
}

/// Maps the two internal fusion results to the site's arm structure.
/// Data photon 1 is the central leaf, data photon 2 the side centre.
pub fn site_from_fusions(
    assignment: &ArmAssignment,
    rules: &SiteRules,
    results: [FusionResult; 2],
) -> SiteOutcome {
    let mut arms = [ArmState::Dead; 4];
    let mut center_alive = true;
    let mut center_cut = false;
    for (i, r) in results.iter().enumerate() {
        let [a, b] = assignment.side(i);
        match r.kind {
            FusionKind::Success => {
                arms[a.index()] = ArmState::Attached;
                arms[b.index()] = ArmState::Attached;
            }
            FusionKind::Failure => {
                if rules.internal_fail_pairs {
                    arms[a.index()] = ArmState::Paired(b);
                    arms[b.index()] = ArmState::Paired(a);
                }
                center_cut |= rules.internal_fail_cuts_center;
            }
            FusionKind::LossDetected => {
                // Lost central leaf: its only neighbour, the centre, is cut
                // out. Either way the side's centre is gone and its arms are
                // isolated.
                if r.data1_lost() {
                    center_alive = false;
                }
            }
        }
    }
    if !center_alive || center_cut {
        for a in arms.iter_mut() {
            if *a == ArmState::Attached {
                *a = ArmState::Dead;
            }
        }
    }
    SiteOutcome { center_alive, arms }
}

pub fn build_site<R: RngCore + ?Sized>(
    sampler: &GateSampler,
    rules: &SiteRules,
    assignment: &ArmAssignment,
    rng: &mut R,
) -> SiteOutcome {
    let r1 = sampler.sample(rng);
    let r2 = sampler.sample(rng);
    site_from_fusions(assignment, rules, [r1, r2])
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DistributionError {
    #[error("analytic outcome distribution is only defined without loss (p_loss = {0})")]
    LossNotSupported(f64),
}

/// Loss-free class probabilities.
pub fn outcome_distribution(
    gate: &GateParams,
    p_loss: f64,
) -> Result<BTreeMap<SiteClass, f64>, DistributionError> {
    if p_loss != 0.0 {
        return Err(DistributionError::LossNotSupported(p_loss));
    }
    let p = gate.p_success;
    let rules = SiteRules::new(gate);
    let a = default_assignment();
    let mut out = BTreeMap::new();
    for (r1, w1) in [(FusionResult::SUCCESS, p), (FusionResult::FAILURE, 1.0 - p)] {
        for (r2, w2) in [(FusionResult::SUCCESS, p), (FusionResult::FAILURE, 1.0 - p)] {
            let class = site_from_fusions(&a, &rules, [r1, r2]).class();
            *out.entry(class).or_insert(0.0) += w1 * w2;
        }
    }
    Ok(out)
}

/// Vertex ids of the explicit nine-qubit site fragment.
pub mod fragment {
    use super::*;

    pub const CENTER: u32 = 0;
    pub const LEAVES: [u32; 2] = [1, 2];
    pub const SIDE_CENTERS: [u32; 2] = [10, 20];
    /// Arm qubits of side `i`, in the order of `ArmAssignment::side(i)`.
    pub const SIDE_ARMS: [[u32; 2]; 2] = [[11, 12], [21, 22]];

    pub fn arm_vertex(assignment: &ArmAssignment, slot: ArmSlot) -> u32 {
        for i in 0..2 {
            for m in 0..2 {
                if assignment.side(i)[m] == slot {
                    return SIDE_ARMS[i][m];
                }
            }
        }
        unreachable!("assignment covers every slot")
    }

    /// Three GHZ states, before any fusion.
    pub fn unfused() -> GraphState {
        let mut g = GraphState::ghz(&[CENTER, LEAVES[0], LEAVES[1]]).unwrap();
        for i in 0..2 {
            let ids = [SIDE_CENTERS[i], SIDE_ARMS[i][0], SIDE_ARMS[i][1]];
            g.absorb(GraphState::ghz(&ids).unwrap()).unwrap();
        }
        g
    }

    /// Fusion outcome for `fuse` when the sampled kind is not a loss.
    pub fn outcome_of(kind: FusionKind) -> Option<FusionOutcome> {
        match kind {
            FusionKind::Success => Some(FusionOutcome::Success),
            FusionKind::Failure => Some(FusionOutcome::Failure),
            FusionKind::LossDetected => None,
        }
    }

    pub fn internal_basis(gate: &GateParams) -> FusionBasis {
        gate.internal_basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules() -> SiteRules {
        SiteRules::new(&GateParams::default())
    }

    #[test]
    fn default_assignment_partitions_slots() {
        let a = default_assignment();
        a.validate().unwrap();
        assert_ne!(a.side1[0], a.side2[0]);
        for p in ArmAssignment::all_pairings() {
            p.validate().unwrap();
        }
        let bad = ArmAssignment { side1: [ArmSlot::T1, ArmSlot::T1], side2: a.side2 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn default_rules() {
        let r = rules();
        assert!(!r.internal_fail_cuts_center);
        assert!(r.internal_fail_pairs);
        assert_eq!(r.external_fail_cuts_center, [false, false]);
    }

    #[test]
    fn loss_free_combinations() {
        let a = default_assignment();
        let (s, f) = (FusionResult::SUCCESS, FusionResult::FAILURE);
        assert_eq!(site_from_fusions(&a, &rules(), [s, s]), SiteOutcome::FULL_STAR);

        let sf = site_from_fusions(&a, &rules(), [s, f]);
        assert_eq!(sf.attached_arms(), vec![ArmSlot::MinusX, ArmSlot::T1]);
        assert_eq!(sf.detached_pairs(), vec![(ArmSlot::PlusX, ArmSlot::T2)]);
        assert_eq!(sf.class(), SiteClass::OneDetached);

        let ff = site_from_fusions(&a, &rules(), [f, f]);
        assert!(ff.center_alive && ff.attached_arms().is_empty());
        assert_eq!(ff.detached_pairs().len(), 2);
        assert_eq!(ff.class(), SiteClass::TwoDetached);
        // A single side-1 failure keeps +X attached.
        assert_eq!(site_from_fusions(&a, &rules(), [f, s]).arm(ArmSlot::PlusX), ArmState::Attached);
    }

    #[test]
    fn lost_central_leaf_kills_centre() {
        use crate::fusion::PhotonRole;
        let a = default_assignment();
        let lost = FusionResult::lost(&[PhotonRole::Data1]);
        let o = site_from_fusions(&a, &rules(), [lost, FusionResult::FAILURE]);
        assert!(!o.center_alive);
        assert!(o.attached_arms().is_empty());
        assert_eq!(o.detached_pairs(), vec![(ArmSlot::PlusX, ArmSlot::T2)]);
        o.validate().unwrap();

        let side_lost = FusionResult::lost(&[PhotonRole::Data2]);
        let o = site_from_fusions(&a, &rules(), [side_lost, FusionResult::SUCCESS]);
        assert!(o.center_alive);
        assert_eq!(o.attached_arms(), vec![ArmSlot::PlusX, ArmSlot::T2]);
        assert_eq!(o.dead_arms(), vec![ArmSlot::MinusX, ArmSlot::T1]);
    }

    #[test]
    fn distribution_values() {
        let d = outcome_distribution(&GateParams::with_p(0.75), 0.0).unwrap();
        assert_eq!(d[&SiteClass::FullStar], 0.5625);
        assert_eq!(d[&SiteClass::OneDetached], 0.375);
        assert_eq!(d[&SiteClass::TwoDetached], 0.0625);
        let d = outcome_distribution(&GateParams::with_p(1.0), 0.0).unwrap();
        assert_eq!(d[&SiteClass::FullStar], 1.0);
        assert!(outcome_distribution(&GateParams::default(), 0.1).is_err());
    }

    #[test]
    fn slot_parsing() {
        assert_eq!("-x".parse::<ArmSlot>().unwrap(), ArmSlot::MinusX);
        assert_eq!("T2".parse::<ArmSlot>().unwrap(), ArmSlot::T2);
        assert!("Q".parse::<ArmSlot>().is_err());
    }
}
