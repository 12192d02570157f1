//! Exact graph-state bookkeeping for small cluster fragments.
//!
//! A [`GraphState`] is a simple undirected graph plus one local Clifford tag
//! per vertex: the physical state is `(⊗_v C_v) |G⟩`. Pauli measurements,
//! local complementation and fusion act through the standard graph rewrite
//! rules, with tags kept exact up to Pauli byproducts of measurement outcomes.
//! [`StabilizerTableau`] is an independent Clifford simulator used to check
//! the rewrites.

mod clifford;
mod tableau;
mod text;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clifford::{LocalClifford, Pauli, SignedPauli};
pub use tableau::{PauliString, StabilizerTableau, TableauError};
pub use text::{from_text, to_text, ParseError};

pub type Vertex = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("a GHZ state needs at least one qubit")]
    EmptyGhz,
    #[error("vertex {0} is not in the graph")]
    MissingVertex(Vertex),
    #[error("vertex {0} already exists")]
    DuplicateVertex(Vertex),
    #[error("cannot fuse vertex {0} with itself")]
    SelfFusion(Vertex),
    #[error("fused vertices {0} and {1} are adjacent")]
    AdjacentFusion(Vertex, Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("measurement axis must be X, Y or Z")]
    IdentityAxis,
}

/// How a fusion gate's failure outcome is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// Failure axes are inter-site arm axes: they are read in the nominal
    /// GHZ-leaf frame (a Hadamard away from the graph frame).
    Standard,
    /// Failure axes are physical axes, translated through the recorded tags.
    Rotated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FusionBasis {
    pub mode: FusionMode,
    pub failure: (Pauli, Pauli),
}

impl FusionBasis {
    pub const fn rotated() -> Self {
        FusionBasis { mode: FusionMode::Rotated, failure: (Pauli::X, Pauli::X) }
    }

    pub const fn standard() -> Self {
        FusionBasis { mode: FusionMode::Standard, failure: (Pauli::X, Pauli::X) }
    }

    pub fn with_failure(mut self, a: Pauli, b: Pauli) -> Self {
        self.failure = (a, b);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionOutcome {
    Success,
    Failure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphState {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    vcops: BTreeMap<Vertex, LocalClifford>,
}

impl GraphState {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n`-qubit GHZ state on vertices `0..n`: a star centred on `0` whose
    /// leaves carry Hadamard tags.
    pub fn new_ghz(n: usize) -> Result<Self, GraphError> {
        let ids: Vec<Vertex> = (0..n as Vertex).collect();
        Self::ghz(&ids)
    }

    /// GHZ state on explicit ids; `ids[0]` is the star centre.
    pub fn ghz(ids: &[Vertex]) -> Result<Self, GraphError> {
        let (&center, leaves) = ids.split_first().ok_or(GraphError::EmptyGhz)?;
        let mut g = GraphState::new();
        g.add_vertex(center)?;
        for &leaf in leaves {
            g.add_vertex(leaf)?;
            g.add_edge(center, leaf)?;
            g.vcops.insert(leaf, LocalClifford::HADAMARD);
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if self.adj.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adj.insert(v, BTreeSet::new());
        self.vcops.insert(v, LocalClifford::IDENTITY);
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        self.require(a)?;
        self.require(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        self.adj.get_mut(&a).unwrap().insert(b);
        self.adj.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    /// Moves every vertex of `other` into `self`; ids must be disjoint.
    pub fn absorb(&mut self, other: GraphState) -> Result<(), GraphError> {
        if let Some(&v) = other.adj.keys().find(|v| self.adj.contains_key(v)) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.adj.extend(other.adj);
        self.vcops.extend(other.vcops);
        Ok(())
    }

    pub fn set_vcop(&mut self, v: Vertex, c: LocalClifford) -> Result<(), GraphError> {
        self.require(v)?;
        self.vcops.insert(v, c);
        Ok(())
    }

    pub fn vcop(&self, v: Vertex) -> Option<LocalClifford> {
        self.vcops.get(&v).copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> Option<&BTreeSet<Vertex>> {
        self.adj.get(&v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, |n| n.len())
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    fn require(&self, v: Vertex) -> Result<(), GraphError> {
        if self.adj.contains_key(&v) {
            Ok(())
        } else {
            Err(GraphError::MissingVertex(v))
        }
    }

    fn toggle_edge(&mut self, a: Vertex, b: Vertex) {
        debug_assert_ne!(a, b);
        let na = self.adj.get_mut(&a).unwrap();
        if !na.remove(&b) {
            na.insert(b);
            self.adj.get_mut(&b).unwrap().insert(a);
        } else {
            self.adj.get_mut(&b).unwrap().remove(&a);
        }
    }

    fn remove_vertex(&mut self, v: Vertex) {
        if let Some(ns) = self.adj.remove(&v) {
            for n in ns {
                self.adj.get_mut(&n).unwrap().remove(&v);
            }
        }
        self.vcops.remove(&v);
    }

    fn right_multiply_vcop(&mut self, v: Vertex, c: LocalClifford) {
        let t = self.vcops.entry(v).or_default();
        *t = t.compose(&c);
    }

    /// Local complementation at `v`: the subgraph induced on `N(v)` is
    /// complemented. Tags absorb the inverse of the implementing unitary
    /// `exp(-iπ/4 X_v) ∏ exp(iπ/4 Z_b)` so the physical state is unchanged.
    pub fn local_complement(&mut self, v: Vertex) -> Result<(), GraphError> {
        self.require(v)?;
        let ns: Vec<Vertex> = self.adj[&v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        self.right_multiply_vcop(v, LocalClifford::SQRT_X_NEG.inverse());
        let zinv = LocalClifford::SQRT_Z_POS.inverse();
        for b in ns {
            self.right_multiply_vcop(b, zinv);
        }
        Ok(())
    }

    /// Measures the physical observable `axis` on `v` and removes `v`.
    pub fn measure_pauli(&mut self, v: Vertex, axis: Pauli) -> Result<(), GraphError> {
        self.require(v)?;
        let graph_axis = self.vcops[&v].pull_back(axis).pauli;
        self.measure_in_graph_frame(v, graph_axis)
    }

    /// Measures `axis` on the bare graph state at `v` (ignoring the tag of
    /// `v`) and removes `v`. Outcome `+1` is assumed; other outcomes differ
    /// only by Pauli byproducts.
    pub fn measure_in_graph_frame(&mut self, v: Vertex, axis: Pauli) -> Result<(), GraphError> {
        self.require(v)?;
        match axis {
            Pauli::I => return Err(GraphError::IdentityAxis),
            Pauli::Z => {}
            Pauli::Y => self.local_complement(v)?,
            Pauli::X => {
                if let Some(&b0) = self.adj[&v].iter().next() {
                    self.local_complement(b0)?;
                    self.local_complement(v)?;
                    self.remove_vertex(v);
                    self.local_complement(b0)?;
                    return Ok(());
                }
            }
        }
        self.remove_vertex(v);
        Ok(())
    }

    /// Type-II fusion of `v1` and `v2`. Both qubits are always consumed.
    ///
    /// Success joins the former neighbourhoods: every pair in
    /// `N(v1) × N(v2)` has its edge toggled. Failure measures each qubit on
    /// the axis given by `basis`.
    pub fn fuse(
        &mut self,
        v1: Vertex,
        v2: Vertex,
        outcome: FusionOutcome,
        basis: FusionBasis,
    ) -> Result<(), GraphError> {
        if v1 == v2 {
            return Err(GraphError::SelfFusion(v1));
        }
        self.require(v1)?;
        self.require(v2)?;
        if self.has_edge(v1, v2) {
            return Err(GraphError::AdjacentFusion(v1, v2));
        }
        match outcome {
            FusionOutcome::Success => {
                let n1: Vec<Vertex> = self.adj[&v1].iter().copied().collect();
                let n2: Vec<Vertex> = self.adj[&v2].iter().copied().collect();
                self.remove_vertex(v1);
                self.remove_vertex(v2);
                for &a in &n1 {
                    for &b in &n2 {
                        if a != b {
                            self.toggle_edge(a, b);
                        }
                    }
                }
            }
            FusionOutcome::Failure => {
                let (a1, a2) = basis.failure;
                self.measure_failure_qubit(v1, a1, basis.mode)?;
                self.measure_failure_qubit(v2, a2, basis.mode)?;
            }
        }
        Ok(())
    }

    fn measure_failure_qubit(
        &mut self,
        v: Vertex,
        axis: Pauli,
        mode: FusionMode,
    ) -> Result<(), GraphError> {
        match mode {
            FusionMode::Rotated => self.measure_pauli(v, axis),
            FusionMode::Standard => {
                let q = LocalClifford::HADAMARD.pull_back(axis).pauli;
                self.measure_in_graph_frame(v, q)
            }
        }
    }

    /// Graph-frame axis a failure measurement applies to `v` under `mode`.
    pub fn failure_axis(&self, v: Vertex, axis: Pauli, mode: FusionMode) -> Option<Pauli> {
        let tag = match mode {
            FusionMode::Rotated => self.vcop(v)?,
            FusionMode::Standard => LocalClifford::HADAMARD,
        };
        Some(tag.pull_back(axis).pauli)
    }

    /// Loss remedy: every neighbour of the lost qubit `v` is measured in the
    /// graph-frame Z basis, after which `v` is isolated and discarded.
    pub fn z_cut(&mut self, v: Vertex) -> Result<(), GraphError> {
        self.require(v)?;
        let ns: Vec<Vertex> = self.adj[&v].iter().copied().collect();
        for n in ns {
            self.measure_in_graph_frame(n, Pauli::Z)?;
        }
        self.remove_vertex(v);
        Ok(())
    }

    pub fn connected_component(&self, v: Vertex) -> Result<BTreeSet<Vertex>, GraphError> {
        self.require(v)?;
        let mut seen = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &n in &self.adj[&u] {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        Ok(seen)
    }

    /// Partition of all vertices into connected components, sorted.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let c = self.connected_component(v).unwrap();
            seen.extend(c.iter().copied());
            out.push(c);
        }
        out
    }

    /// Stabilizer tableau of the physical state `(⊗ C_v)|G⟩`.
    pub fn to_tableau(&self) -> Result<StabilizerTableau, TableauError> {
        StabilizerTableau::from_graph(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> GraphState {
        let mut g = GraphState::new();
        for v in 0..3 {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    fn triangle() -> GraphState {
        let mut g = path3();
        g.add_edge(0, 2).unwrap();
        g
    }

    #[test]
    fn ghz_is_a_star() {
        let g1 = GraphState::new_ghz(1).unwrap();
        assert_eq!(g1.vertex_count(), 1);
        assert!(g1.edges().is_empty());

        let g3 = GraphState::new_ghz(3).unwrap();
        assert_eq!(g3.vertex_count(), 3);
        assert_eq!(g3.edges().len(), 2);
        assert_eq!(g3.degree(0), 2);
        assert_eq!(g3.vcop(1), Some(LocalClifford::HADAMARD));
        assert_eq!(GraphState::new_ghz(0), Err(GraphError::EmptyGhz));
    }

    #[test]
    fn z_measurement_deletes_vertex() {
        let mut g = path3();
        g.measure_pauli(1, Pauli::Z).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.vertex_count(), 2);
    }

    #[test]
    fn x_and_y_on_path_middle_leave_bond() {
        for axis in [Pauli::X, Pauli::Y] {
            let mut g = path3();
            g.measure_pauli(1, axis).unwrap();
            assert_eq!(g.edges(), vec![(0, 2)], "axis {axis}");
        }
    }

    #[test]
    fn local_complement_examples() {
        let mut t = triangle();
        t.local_complement(0).unwrap();
        assert_eq!(t.edges(), vec![(0, 1), (0, 2)]);

        let mut star = GraphState::new_ghz(4).unwrap();
        star.local_complement(0).unwrap();
        assert_eq!(star.edges().len(), 6);

        let mut g = triangle();
        let before = g.edges();
        g.local_complement(1).unwrap();
        g.local_complement(1).unwrap();
        assert_eq!(g.edges(), before);
    }

    #[test]
    fn missing_vertex_errors() {
        let mut g = path3();
        assert_eq!(g.measure_pauli(7, Pauli::Z), Err(GraphError::MissingVertex(7)));
        assert_eq!(g.local_complement(7), Err(GraphError::MissingVertex(7)));
        assert_eq!(
            g.fuse(0, 1, FusionOutcome::Success, FusionBasis::rotated()),
            Err(GraphError::AdjacentFusion(0, 1))
        );
        assert_eq!(
            g.fuse(0, 0, FusionOutcome::Success, FusionBasis::rotated()),
            Err(GraphError::SelfFusion(0))
        );
    }

    #[test]
    fn leaf_fusion_success_joins_fragments() {
        // a–x and y–b
        let mut g = GraphState::new();
        for v in 0..4 {
            g.add_vertex(v).unwrap();
        }
        g.add_edge(0, 1).unwrap();
        g.add_edge(2, 3).unwrap();
        g.fuse(1, 2, FusionOutcome::Success, FusionBasis::standard()).unwrap();
        assert_eq!(g.edges(), vec![(0, 3)]);
    }

    fn two_ghz() -> GraphState {
        // centre 0 with leaves 1, 2; centre 10 with leaves 11, 12
        let mut g = GraphState::ghz(&[0, 1, 2]).unwrap();
        g.absorb(GraphState::ghz(&[10, 11, 12]).unwrap()).unwrap();
        g
    }

    #[test]
    fn star_building_step() {
        let mut g = two_ghz();
        g.fuse(1, 10, FusionOutcome::Success, FusionBasis::rotated()).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (0, 11), (0, 12)]);
    }

    #[test]
    fn rotated_failure_detaches_side_pair() {
        let mut g = two_ghz();
        g.fuse(1, 10, FusionOutcome::Failure, FusionBasis::rotated()).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (11, 12)]);
        assert_eq!(g.connected_component(0).unwrap(), BTreeSet::from([0, 2]));
    }

    #[test]
    fn z_cut_removes_neighbours() {
        let mut g = GraphState::new_ghz(4).unwrap();
        g.z_cut(1).unwrap();
        assert_eq!(g.vertices().collect::<Vec<_>>(), vec![2, 3]);
        assert!(g.edges().is_empty());
    }
}
