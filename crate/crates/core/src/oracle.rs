//! Rule-versus-tableau cross checks.
//!
//! [`CheckedState`] applies every operation both to a [`GraphState`] (via the
//! rewrite rules) and to a [`StabilizerTableau`] (via explicit Pauli
//! measurements), then compares stabilizer groups up to sign and component
//! partitions.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fusion::{FusionKind, FusionResult, GateParams, PhotonRole};
use crate::graphstate::{
    FusionBasis, FusionMode, FusionOutcome, GraphError, GraphState, LocalClifford, Pauli,
    PauliString, StabilizerTableau, TableauError, Vertex,
};
use crate::lattice::{assemble, facing, geometric_bonds, Assembly, Dims, ExternalFusion, LossRemedy};
use crate::microcluster::{fragment, site_from_fusions, ArmAssignment, ArmSlot, ArmState, SiteOutcome, SiteRules};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("rewrite and tableau disagree: {0}")]
    Mismatch(String),
}

#[derive(Clone, Debug)]
pub struct CheckedState {
    pub graph: GraphState,
    pub tableau: StabilizerTableau,
}

impl CheckedState {
    pub fn new(graph: GraphState) -> Result<Self, OracleError> {
        let tableau = graph.to_tableau()?;
        Ok(CheckedState { graph, tableau })
    }

    fn tag(&self, v: Vertex) -> Result<LocalClifford, OracleError> {
        self.graph.vcop(v).ok_or(OracleError::Graph(GraphError::MissingVertex(v)))
    }

    /// Physical operator corresponding to the graph-frame Pauli `p` on `v`.
    fn physical(&self, v: Vertex, p: Pauli) -> Result<Pauli, OracleError> {
        Ok(self.tag(v)?.conjugate(p).pauli)
    }

    fn measure_and_drop(&mut self, v: Vertex, physical: Pauli) -> Result<(), OracleError> {
        let obs = self.tableau.pauli(&[(v, physical)])?;
        self.tableau.measure(&obs, None)?;
        self.tableau.remove_qubit(v)?;
        Ok(())
    }

    pub fn measure_pauli(&mut self, v: Vertex, axis: Pauli) -> Result<(), OracleError> {
        self.graph.measure_pauli(v, axis)?;
        self.measure_and_drop(v, axis)
    }

    pub fn measure_in_graph_frame(&mut self, v: Vertex, axis: Pauli) -> Result<(), OracleError> {
        let phys = self.physical(v, axis)?;
        self.graph.measure_in_graph_frame(v, axis)?;
        self.measure_and_drop(v, phys)
    }

    pub fn local_complement(&mut self, v: Vertex) -> Result<(), OracleError> {
        // The physical state is unchanged; only the representation moves.
        self.graph.local_complement(v)?;
        Ok(())
    }

    /// Loss remedy: graph-frame Z on every neighbour, then the lost qubit is
    /// traced out.
    pub fn z_cut(&mut self, v: Vertex) -> Result<(), OracleError> {
        let ns: Vec<Vertex> = self
            .graph
            .neighbors(v)
            .ok_or(GraphError::MissingVertex(v))?
            .iter()
            .copied()
            .collect();
        for n in ns {
            self.measure_in_graph_frame(n, Pauli::Z)?;
        }
        self.graph.z_cut(v)?;
        self.tableau.remove_qubit(v)?;
        Ok(())
    }

    pub fn fuse(
        &mut self,
        v1: Vertex,
        v2: Vertex,
        outcome: FusionOutcome,
        basis: FusionBasis,
    ) -> Result<(), OracleError> {
        match outcome {
            FusionOutcome::Success => {
                // Graph-frame X1 Z2 and Z1 X2, translated to physical axes.
                let x1 = self.physical(v1, Pauli::X)?;
                let z1 = self.physical(v1, Pauli::Z)?;
                let x2 = self.physical(v2, Pauli::X)?;
                let z2 = self.physical(v2, Pauli::Z)?;
                self.graph.fuse(v1, v2, outcome, basis)?;
                let a = self.tableau.pauli(&[(v1, x1), (v2, z2)])?;
                let b = self.tableau.pauli(&[(v1, z1), (v2, x2)])?;
                self.tableau.measure(&a, None)?;
                self.tableau.measure(&b, None)?;
                // The fused pair is now a decoupled two-qubit state.
                let z = self.tableau.pauli(&[(v1, Pauli::Z)])?;
                self.tableau.measure(&z, None)?;
                self.tableau.remove_qubit(v1)?;
                self.tableau.remove_qubit(v2)?;
            }
            FusionOutcome::Failure => {
                let (a1, a2) = basis.failure;
                let p1 = self.failure_physical(v1, a1, basis.mode)?;
                let p2 = self.failure_physical(v2, a2, basis.mode)?;
                self.graph.fuse(v1, v2, outcome, basis)?;
                for (v, p) in [(v1, p1), (v2, p2)] {
                    let obs = self.tableau.pauli(&[(v, p)])?;
                    self.tableau.measure(&obs, None)?;
                }
                // Measuring v1 can entangle nothing new, but v1 must be
                // dropped only once both single-qubit projections are done.
                self.tableau.remove_qubit(v1)?;
                self.tableau.remove_qubit(v2)?;
            }
        }
        Ok(())
    }

    fn failure_physical(&self, v: Vertex, axis: Pauli, mode: FusionMode) -> Result<Pauli, OracleError> {
        match mode {
            FusionMode::Rotated => Ok(axis),
            FusionMode::Standard => {
                let g = self
                    .graph
                    .failure_axis(v, axis, mode)
                    .ok_or(GraphError::MissingVertex(v))?;
                self.physical(v, g)
            }
        }
    }

    /// Stabilizer groups equal up to sign and identical component partitions.
    pub fn check(&self) -> Result<(), OracleError> {
        let from_rules = self.graph.to_tableau()?;
        if !from_rules.equal_up_to_sign(&self.tableau) {
            return Err(OracleError::Mismatch(format!(
                "stabilizer groups differ; rewrite edges {:?}",
                self.graph.edges()
            )));
        }
        let a = self.graph.components();
        let b = self.tableau.components();
        if a != b {
            return Err(OracleError::Mismatch(format!("components {a:?} vs {b:?}")));
        }
        Ok(())
    }

    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        self.tableau.components()
    }

    pub fn observable(&self, ops: &[(Vertex, Pauli)]) -> Result<PauliString, OracleError> {
        Ok(self.tableau.pauli(ops)?)
    }
}

/// Vertex-id stride between the fragments of neighbouring sites.
const STRIDE: u32 = 100;

fn vid(site: usize, local: u32) -> Vertex {
    site as u32 * STRIDE + local
}

/// A small lattice with every gate outcome fixed in advance.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub dims: Dims,
    pub assignment: ArmAssignment,
    /// Internal fusion results per site, side 1 then side 2.
    pub internal: Vec<[FusionResult; 2]>,
    /// One result per geometric bond, in raster order.
    pub external: Vec<FusionResult>,
    /// Perform each site's side-2 fusion before side 1.
    pub reverse_internal: bool,
}

impl Scenario {
    fn arm(&self, site: usize, slot: ArmSlot) -> Vertex {
        vid(site, fragment::arm_vertex(&self.assignment, slot))
    }
}

fn unfused_lattice(n: usize) -> Result<GraphState, GraphError> {
    let mut g = GraphState::new();
    for s in 0..n {
        let ids = [fragment::CENTER, fragment::LEAVES[0], fragment::LEAVES[1]];
        g.absorb(GraphState::ghz(&ids.map(|l| vid(s, l)))?)?;
        for i in 0..2 {
            let arms = fragment::SIDE_ARMS[i];
            let ids = [fragment::SIDE_CENTERS[i], arms[0], arms[1]];
            g.absorb(GraphState::ghz(&ids.map(|l| vid(s, l)))?)?;
        }
    }
    Ok(g)
}

/// Graph-frame Z removes a photon without touching anything else.
fn discard(st: &mut CheckedState, v: Vertex) -> Result<(), OracleError> {
    if st.graph.contains(v) {
        st.measure_in_graph_frame(v, Pauli::Z)?;
    }
    Ok(())
}

fn lose(st: &mut CheckedState, v: Vertex) -> Result<(), OracleError> {
    if st.graph.contains(v) {
        st.z_cut(v)?;
    }
    Ok(())
}

/// Applies one gate's outcome to physical photons `v1`, `v2`. `cut_both`
/// selects the external loss remedy that Z-cuts both photons' neighbours
/// whichever one was lost.
fn apply_gate(
    st: &mut CheckedState,
    v1: Vertex,
    v2: Vertex,
    r: FusionResult,
    basis: FusionBasis,
    loss: GateLoss,
) -> Result<(), OracleError> {
    let (p1, p2) = (st.graph.contains(v1), st.graph.contains(v2));
    match r.kind {
        FusionKind::LossDetected => {
            for (v, lost) in [(v1, r.data1_lost()), (v2, r.data2_lost())] {
                match loss {
                    GateLoss::Internal if lost => lose(st, v)?,
                    GateLoss::Internal => discard(st, v)?,
                    GateLoss::External(LossRemedy::ZCut) => lose(st, v)?,
                    GateLoss::External(LossRemedy::VoidBond) => discard(st, v)?,
                }
            }
        }
        FusionKind::Failure if p1 && p2 => st.fuse(v1, v2, FusionOutcome::Failure, basis)?,
        FusionKind::Failure => {
            let (a1, a2) = basis.failure;
            for (v, a) in [(v1, a1), (v2, a2)] {
                if st.graph.contains(v) {
                    let axis = st.graph.failure_axis(v, a, basis.mode).ok_or(GraphError::MissingVertex(v))?;
                    st.measure_in_graph_frame(v, axis)?;
                }
            }
        }
        FusionKind::Success if p1 && p2 => st.fuse(v1, v2, FusionOutcome::Success, basis)?,
        // A Bell measurement against a disentangled photon only measures a
        // degree-one qubit, which leaves the rest of the graph connected as
        // before.
        FusionKind::Success => {
            discard(st, v1)?;
            discard(st, v2)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum GateLoss {
    Internal,
    External(LossRemedy),
}

/// Edges the rule model predicts among surviving photons: centre bonds from
/// the assembly, unfused arms on their centres, unfused pair members on
/// whatever their partner's fusion chain reaches.
fn predicted_edges(
    sc: &Scenario,
    sites: &[SiteOutcome],
    fusions: &[ExternalFusion],
    asm: &Assembly,
) -> (BTreeSet<Vertex>, BTreeSet<(Vertex, Vertex)>) {
    let n = sites.len();
    let live = |s: usize| sites[s].center_alive && !asm.removed[s];
    let mut across: BTreeMap<(usize, ArmSlot), ((usize, ArmSlot), FusionKind)> = BTreeMap::new();
    for f in fusions {
        across.insert(f.a, (f.b, f.result.kind));
        across.insert(f.b, (f.a, f.result.kind));
    }
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut toggle = |a: Vertex, b: Vertex| {
        let e = (a.min(b), a.max(b));
        if !edges.remove(&e) {
            edges.insert(e);
        }
    };
    for b in &asm.bonds {
        toggle(vid(b.a as usize, fragment::CENTER), vid(b.b as usize, fragment::CENTER));
    }
    for s in 0..n {
        if live(s) {
            nodes.insert(vid(s, fragment::CENTER));
        }
        for slot in ArmSlot::ALL {
            if across.contains_key(&(s, slot)) {
                continue;
            }
            let me = sc.arm(s, slot);
            match sites[s].arm(slot) {
                ArmState::Dead => {}
                ArmState::Attached => {
                    nodes.insert(me);
                    toggle(me, vid(s, fragment::CENTER));
                }
                ArmState::Paired(mate) => {
                    nodes.insert(me);
                    // Walk the relay chain out of this pair.
                    let (mut site, mut out) = (s, mate);
                    loop {
                        let Some(&((t, tslot), kind)) = across.get(&(site, out)) else {
                            // Partner unfused: plain pair, counted once.
                            let other = sc.arm(site, out);
                            if me < other {
                                toggle(me, other);
                            }
                            break;
                        };
                        if kind != FusionKind::Success {
                            break;
                        }
                        match sites[t].arm(tslot) {
                            ArmState::Dead => break,
                            ArmState::Attached => {
                                toggle(me, vid(t, fragment::CENTER));
                                break;
                            }
                            ArmState::Paired(next) => {
                                site = t;
                                out = next;
                            }
                        }
                    }
                }
            }
        }
    }
    (nodes, edges)
}

fn nontrivial_components(nodes: &BTreeSet<Vertex>, edges: &BTreeSet<(Vertex, Vertex)>) -> BTreeSet<BTreeSet<Vertex>> {
    let mut g = GraphState::new();
    for &v in nodes {
        g.add_vertex(v).expect("distinct nodes");
    }
    for &(a, b) in edges {
        g.add_edge(a, b).expect("edge between predicted nodes");
    }
    g.components().into_iter().filter(|c| c.len() > 1).collect()
}

fn compare(
    st: &CheckedState,
    sc: &Scenario,
    sites: &[SiteOutcome],
    fusions: &[ExternalFusion],
    asm: &Assembly,
    stage: &str,
) -> Result<(), OracleError> {
    st.check()?;
    let (nodes, edges) = predicted_edges(sc, sites, fusions, asm);
    for s in 0..sites.len() {
        let c = vid(s, fragment::CENTER);
        if nodes.contains(&c) != st.graph.contains(c) {
            return Err(OracleError::Mismatch(format!(
                "{stage}: site {s} centre predicted {} but the tableau says {}",
                if nodes.contains(&c) { "live" } else { "gone" },
                if st.graph.contains(c) { "present" } else { "absent" },
            )));
        }
    }
    let want = nontrivial_components(&nodes, &edges);
    let got: BTreeSet<BTreeSet<Vertex>> = st.components().into_iter().filter(|c| c.len() > 1).collect();
    if want != got {
        return Err(OracleError::Mismatch(format!("{stage}: predicted components {want:?}, tableau {got:?}")));
    }
    Ok(())
}

/// Replays `sc` photon by photon and checks the rule model against the
/// tableau after the internal fusions and again after the external ones.
pub fn replay(sc: &Scenario, gate: &GateParams, remedy: LossRemedy) -> Result<(), OracleError> {
    let n = sc.dims.sites();
    let bonds = geometric_bonds(sc.dims);
    assert_eq!(sc.internal.len(), n, "one internal pair per site");
    assert_eq!(sc.external.len(), bonds.len(), "one external result per bond");
    let rules = SiteRules::new(gate);
    let mut st = CheckedState::new(unfused_lattice(n)?)?;

    let order: [usize; 2] = if sc.reverse_internal { [1, 0] } else { [0, 1] };
    for s in 0..n {
        for i in order {
            let (leaf, side) = (vid(s, fragment::LEAVES[i]), vid(s, fragment::SIDE_CENTERS[i]));
            apply_gate(&mut st, leaf, side, sc.internal[s][i], gate.internal_basis, GateLoss::Internal)?;
        }
    }
    let mut sites: Vec<SiteOutcome> =
        sc.internal.iter().map(|r| site_from_fusions(&sc.assignment, &rules, *r)).collect();
    let none = Assembly { bonds: Vec::new(), removed: vec![false; n], routes: Vec::new() };
    compare(&st, sc, &sites, &[], &none, "after internal fusions")?;

    let fusions: Vec<ExternalFusion> = bonds
        .iter()
        .zip(&sc.external)
        .map(|(&(a, slot, b), &result)| ExternalFusion { a: (a, slot), b: (b, facing(slot)), result })
        .collect();
    for stage in [FusionKind::LossDetected, FusionKind::Failure, FusionKind::Success] {
        for f in fusions.iter().filter(|f| f.result.kind == stage) {
            let (v1, v2) = (sc.arm(f.a.0, f.a.1), sc.arm(f.b.0, f.b.1));
            apply_gate(&mut st, v1, v2, f.result, gate.external_basis, GateLoss::External(remedy))?;
        }
    }
    let asm = assemble(&mut sites, &fusions, &rules, remedy);
    compare(&st, sc, &sites, &fusions, &asm, "after external fusions")
}

/// Distinct gate results worth enumerating: success, failure, and loss of
/// each photon class.
pub fn gate_results(with_loss: bool) -> Vec<FusionResult> {
    let mut v = vec![FusionResult::SUCCESS, FusionResult::FAILURE];
    if with_loss {
        v.push(FusionResult::lost(&[PhotonRole::Data1]));
        v.push(FusionResult::lost(&[PhotonRole::Data2]));
        v.push(FusionResult::lost(&[PhotonRole::Ancilla(0)]));
    }
    v
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OracleReport {
    pub group: String,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, sc: &Scenario, res: Result<(), OracleError>) {
        self.cases += 1;
        if let Err(e) = res {
            if self.failures.len() < 20 {
                self.failures.push(format!("{e} in {sc:?}"));
            }
        }
    }
}

/// Single sites: every pair of internal results (including one or two
/// losses), every arm pairing, both fusion orders.
pub fn check_sites(gate: &GateParams) -> OracleReport {
    let mut rep = OracleReport { group: "site".into(), ..Default::default() };
    let results = gate_results(true);
    for assignment in ArmAssignment::all_pairings() {
        for &r1 in &results {
            for &r2 in &results {
                for reverse_internal in [false, true] {
                    let sc = Scenario {
                        dims: Dims::new(1, 1, 1),
                        assignment,
                        internal: vec![[r1, r2]],
                        external: vec![],
                        reverse_internal,
                    };
                    rep.record(&sc, replay(&sc, gate, LossRemedy::ZCut));
                }
            }
        }
    }
    rep
}

/// Two sites joined along each bond direction, under both loss remedies.
pub fn check_pairs(gate: &GateParams) -> OracleReport {
    let mut rep = OracleReport { group: "two-site".into(), ..Default::default() };
    let internal = gate_results(true);
    let internal: Vec<FusionResult> = internal.into_iter().take(4).collect();
    for dims in [Dims::new(2, 1, 1), Dims::new(1, 2, 1), Dims::new(1, 1, 2)] {
        for remedy in [LossRemedy::ZCut, LossRemedy::VoidBond] {
            for code in 0..internal.len().pow(4) {
                let pick = |k: u32| internal[code / internal.len().pow(k) % internal.len()];
                let sites = vec![[pick(0), pick(1)], [pick(2), pick(3)]];
                for ext in gate_results(true) {
                    let sc = Scenario {
                        dims,
                        assignment: crate::microcluster::default_assignment(),
                        internal: sites.clone(),
                        external: vec![ext],
                        reverse_internal: false,
                    };
                    rep.record(&sc, replay(&sc, gate, remedy));
                }
            }
        }
    }
    rep
}

/// Every loss-free outcome of a 2×2×1 block.
pub fn check_block(gate: &GateParams) -> OracleReport {
    let mut rep = OracleReport { group: "2x2x1 block".into(), ..Default::default() };
    let dims = Dims::new(2, 2, 1);
    let nb = geometric_bonds(dims).len();
    let n = dims.sites();
    let rs = gate_results(false);
    for code in 0u64..1 << (2 * n + nb) {
        let bit = |k: usize| rs[(code >> k & 1) as usize];
        let sc = Scenario {
            dims,
            assignment: crate::microcluster::default_assignment(),
            internal: (0..n).map(|s| [bit(2 * s), bit(2 * s + 1)]).collect(),
            external: (0..nb).map(|b| bit(2 * n + b)).collect(),
            reverse_internal: false,
        };
        rep.record(&sc, replay(&sc, gate, LossRemedy::ZCut));
    }
    rep
}

/// Random 3×2×1 lattices with relay chains, losses and every arm pairing.
pub fn check_random(gate: &GateParams, cases: usize, seed: u64) -> OracleReport {
    let mut rep = OracleReport { group: "random 3x2x1".into(), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = Dims::new(3, 2, 1);
    let nb = geometric_bonds(dims).len();
    let rs = gate_results(true);
    let pairings = ArmAssignment::all_pairings();
    // Mostly loss-free draws so that long relay chains show up.
    let draw = |rng: &mut ChaCha8Rng| {
        if rng.random_bool(0.15) {
            rs[rng.random_range(2..rs.len())]
        } else {
            rs[rng.random_range(0..2)]
        }
    };
    for _ in 0..cases {
        let sc = Scenario {
            dims,
            assignment: pairings[rng.random_range(0..pairings.len())],
            internal: (0..dims.sites()).map(|_| [draw(&mut rng), draw(&mut rng)]).collect(),
            external: (0..nb).map(|_| draw(&mut rng)).collect(),
            reverse_internal: rng.random_bool(0.5),
        };
        let remedy = if rng.random_bool(0.5) { LossRemedy::ZCut } else { LossRemedy::VoidBond };
        rep.record(&sc, replay(&sc, gate, remedy));
    }
    rep
}

/// All oracle groups used by the command-line check.
pub fn check_all(gate: &GateParams, random_cases: usize, seed: u64) -> Vec<OracleReport> {
    vec![check_sites(gate), check_pairs(gate), check_block(gate), check_random(gate, random_cases, seed)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_passes(rep: OracleReport) {
        assert!(rep.passed(), "{}: {} of {} failed, first: {}", rep.group, rep.failures.len(), rep.cases, rep.failures[0]);
    }

    #[test]
    fn sites_match_tableau() {
        assert_passes(check_sites(&GateParams::default()));
    }

    #[test]
    fn pairs_match_tableau() {
        assert_passes(check_pairs(&GateParams::default()));
    }

    #[test]
    fn random_lattices_match_tableau() {
        assert_passes(check_random(&GateParams::default(), 300, 7));
    }
}
