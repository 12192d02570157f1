//! Stabilizer-only Clifford simulator (no destabilizers), at most 64 qubits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{GraphState, LocalClifford, Pauli, Vertex};

pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableauError {
    #[error("tableau supports at most {MAX_QUBITS} qubits, got {0}")]
    TooManyQubits(usize),
    #[error("qubit {0} is not in the tableau")]
    MissingQubit(Vertex),
    #[error("qubit {0} is entangled and cannot be discarded")]
    NotProduct(Vertex),
    #[error("generators do not commute")]
    NonCommuting,
    #[error("generators are not independent")]
    Dependent,
    #[error("forced outcome contradicts a deterministic measurement")]
    ForcedContradiction,
}

/// Hermitian Pauli string `(-1)^neg ∏_j σ(x_j, z_j)` with `σ(1,1) = Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub neg: bool,
}

impl PauliString {
    pub fn single(q: usize, p: Pauli) -> Self {
        let mut s = PauliString::default();
        s.set(q, p);
        s
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        let m = 1u64 << q;
        self.x = if x { self.x | m } else { self.x & !m };
        self.z = if z { self.z | m } else { self.z & !m };
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn anticommutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 1
    }

    /// Product `self · other` of two commuting strings.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        debug_assert!(!self.anticommutes(other));
        let mut phase: u32 = 0;
        let touched = self.support() & other.support();
        let mut bits = touched;
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (k, _) = self.get(q).mul(other.get(q));
            phase += k as u32;
        }
        debug_assert!(phase % 2 == 0);
        PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            neg: self.neg ^ other.neg ^ (phase % 4 == 2),
        }
    }

    fn key(&self) -> u128 {
        (self.x as u128) | ((self.z as u128) << 64)
    }

    fn remove_column(&mut self, q: usize) {
        let squeeze = |w: u64| {
            let low = w & ((1u64 << q) - 1);
            let high = if q + 1 >= 64 { 0 } else { (w >> (q + 1)) << q };
            low | high
        };
        self.x = squeeze(self.x);
        self.z = squeeze(self.z);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    qubits: Vec<Vertex>,
    rows: Vec<PauliString>,
}

/// Result of extracting an LC-equivalent graph from a tableau.
#[derive(Clone, Debug)]
pub struct ExtractedGraph {
    pub edges: Vec<(Vertex, Vertex)>,
    /// Qubits that needed a Hadamard to make the X block invertible.
    pub hadamards: BTreeSet<Vertex>,
}

impl StabilizerTableau {
    /// Tableau of `(⊗ C_v)|G⟩` for a tagged graph state.
    pub fn from_graph(g: &GraphState) -> Result<Self, TableauError> {
        let qubits: Vec<Vertex> = g.vertices().collect();
        if qubits.len() > MAX_QUBITS {
            return Err(TableauError::TooManyQubits(qubits.len()));
        }
        let index: BTreeMap<Vertex, usize> =
            qubits.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rows = Vec::with_capacity(qubits.len());
        for (i, &v) in qubits.iter().enumerate() {
            let mut r = PauliString::single(i, Pauli::X);
            for n in g.neighbors(v).unwrap() {
                r.z |= 1 << index[n];
            }
            rows.push(r);
        }
        let mut t = StabilizerTableau { qubits, rows };
        for (i, &v) in t.qubits.clone().iter().enumerate() {
            let c = g.vcop(v).unwrap_or_default();
            if !c.is_identity() {
                t.apply_local_clifford(i, &c);
            }
        }
        Ok(t)
    }

    /// Builds a tableau from explicit generators; checks commutation and
    /// independence.
    pub fn from_generators(
        qubits: Vec<Vertex>,
        rows: Vec<PauliString>,
    ) -> Result<Self, TableauError> {
        if qubits.len() > MAX_QUBITS {
            return Err(TableauError::TooManyQubits(qubits.len()));
        }
        let t = StabilizerTableau { qubits, rows };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TableauError> {
        for (i, a) in self.rows.iter().enumerate() {
            for b in &self.rows[i + 1..] {
                if a.anticommutes(b) {
                    return Err(TableauError::NonCommuting);
                }
            }
        }
        if self.rows.len() != self.qubits.len() || gf2_rank(self.rows.iter().map(|r| r.key())) != self.rows.len() {
            return Err(TableauError::Dependent);
        }
        Ok(())
    }

    pub fn qubits(&self) -> &[Vertex] {
        &self.qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn index_of(&self, v: Vertex) -> Result<usize, TableauError> {
        self.qubits.iter().position(|&q| q == v).ok_or(TableauError::MissingQubit(v))
    }

    /// Conjugates every generator by `c` acting on qubit index `q`.
    pub fn apply_local_clifford(&mut self, q: usize, c: &LocalClifford) {
        for r in &mut self.rows {
            let p = r.get(q);
            if p == Pauli::I {
                continue;
            }
            let img = c.conjugate(p);
            r.set(q, img.pauli);
            r.neg ^= img.neg;
        }
    }

    /// Builds a Pauli string over this tableau's qubits.
    pub fn pauli(&self, ops: &[(Vertex, Pauli)]) -> Result<PauliString, TableauError> {
        let mut s = PauliString::default();
        for &(v, p) in ops {
            s.set(self.index_of(v)?, p);
        }
        Ok(s)
    }

    /// Projective measurement of `p`. Random outcomes take `forced` (default
    /// `+1`); returns `true` for the `-1` eigenvalue.
    pub fn measure(&mut self, p: &PauliString, forced: Option<bool>) -> Result<bool, TableauError> {
        let anti: Vec<usize> =
            (0..self.rows.len()).filter(|&i| self.rows[i].anticommutes(p)).collect();
        let Some((&k, rest)) = anti.split_first() else {
            let value = self.deterministic_sign(p);
            if forced.is_some_and(|f| f != value) {
                return Err(TableauError::ForcedContradiction);
            }
            return Ok(value);
        };
        let pivot = self.rows[k];
        for &j in rest {
            self.rows[j] = self.rows[j].mul(&pivot);
        }
        let neg = forced.unwrap_or(false);
        self.rows[k] = PauliString { neg, ..*p };
        Ok(neg)
    }

    /// Sign of `±p` when `p` (up to sign) lies in the stabilizer group.
    fn deterministic_sign(&self, p: &PauliString) -> bool {
        let mut basis: Vec<PauliString> = Vec::new();
        for r in &self.rows {
            let mut r = *r;
            for b in &basis {
                if r.key() & leading_bit(b.key()) != 0 {
                    r = r.mul(b);
                }
            }
            if r.key() != 0 {
                for b in basis.iter_mut() {
                    if b.key() & leading_bit(r.key()) != 0 {
                        *b = b.mul(&r);
                    }
                }
                basis.push(r);
            }
        }
        let mut acc = PauliString::default();
        for b in &basis {
            if p.key() & leading_bit(b.key()) != 0 {
                acc = acc.mul(b);
            }
        }
        debug_assert_eq!(acc.key(), p.key(), "observable not in the stabilizer group");
        acc.neg ^ p.neg
    }

    /// Single-qubit Pauli stabilizing qubit `v` alone, if `v` is unentangled.
    pub fn product_pauli(&self, v: Vertex) -> Result<Option<PauliString>, TableauError> {
        let q = self.index_of(v)?;
        let others = |s: &PauliString| s.support() & !(1u64 << q);
        let mut basis: Vec<PauliString> = Vec::new();
        // Eliminate every column except q's first so that rows supported on q
        // alone survive at the end.
        let order: Vec<u128> = {
            let mut cols: Vec<u128> = Vec::new();
            for j in 0..self.qubits.len() {
                if j != q {
                    cols.push(1u128 << j);
                    cols.push(1u128 << (64 + j));
                }
            }
            cols.push(1u128 << q);
            cols.push(1u128 << (64 + q));
            cols
        };
        let mut rows = self.rows.clone();
        for col in order {
            if let Some(pos) = rows.iter().position(|r| r.key() & col != 0) {
                let piv = rows.swap_remove(pos);
                for r in rows.iter_mut() {
                    if r.key() & col != 0 {
                        *r = r.mul(&piv);
                    }
                }
                basis.push(piv);
            }
        }
        Ok(basis.into_iter().find(|b| others(b) == 0 && b.support() != 0))
    }

    /// Discards qubit `v`, which must be in a product state.
    pub fn remove_qubit(&mut self, v: Vertex) -> Result<(), TableauError> {
        let q = self.index_of(v)?;
        let local = self.product_pauli(v)?.ok_or(TableauError::NotProduct(v))?;
        // Every generator commutes with `local`, so it acts on q as I or as
        // local's Pauli; strip q, then drop the one dependent row.
        let lp = local.get(q);
        let mut stripped = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            match r.get(q) {
                Pauli::I => stripped.push(*r),
                p if p == lp => stripped.push(r.mul(&local)),
                _ => return Err(TableauError::NotProduct(v)),
            }
        }
        let mut basis: Vec<PauliString> = Vec::with_capacity(stripped.len());
        for mut r in stripped {
            for b in &basis {
                if r.key() & leading_bit(b.key()) != 0 {
                    r = r.mul(b);
                }
            }
            if !r.is_identity() {
                for b in basis.iter_mut() {
                    if b.key() & leading_bit(r.key()) != 0 {
                        *b = b.mul(&r);
                    }
                }
                basis.push(r);
            }
        }
        if basis.len() + 1 != self.rows.len() {
            return Err(TableauError::Dependent);
        }
        for r in &mut basis {
            r.remove_column(q);
        }
        self.qubits.remove(q);
        self.rows = basis;
        Ok(())
    }

    /// Same stabilizer group up to generator signs (states equal up to a
    /// Pauli), with qubits matched by id.
    pub fn equal_up_to_sign(&self, other: &StabilizerTableau) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let mut perm = Vec::with_capacity(other.len());
        for &v in &other.qubits {
            match self.index_of(v) {
                Ok(i) => perm.push(i),
                Err(_) => return false,
            }
        }
        let remap = |r: &PauliString| {
            let mut s = PauliString::default();
            for (j, &i) in perm.iter().enumerate() {
                s.set(i, r.get(j));
            }
            s.key()
        };
        let a: Vec<u128> = self.rows.iter().map(|r| r.key()).collect();
        let b: Vec<u128> = other.rows.iter().map(remap).collect();
        let n = self.len();
        gf2_rank(a.iter().copied()) == n
            && gf2_rank(b.iter().copied()) == n
            && gf2_rank(a.iter().chain(b.iter()).copied()) == n
    }

    /// LC-equivalent graph: Hadamards on a minimal pivot set make the X block
    /// invertible, after which the Z block is the adjacency matrix.
    pub fn to_graph(&self) -> ExtractedGraph {
        let n = self.len();
        let mut rows: Vec<(u64, u64)> = self.rows.iter().map(|r| (r.x, r.z)).collect();
        let mut rank = 0;
        for col in 0..n {
            let m = 1u64 << col;
            if let Some(p) = (rank..n).find(|&i| rows[i].0 & m != 0) {
                rows.swap(rank, p);
                let piv = rows[rank];
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != rank && r.0 & m != 0 {
                        r.0 ^= piv.0;
                        r.1 ^= piv.1;
                    }
                }
                rank += 1;
            }
        }
        // Z-only rows: reduce on Z and collect pivot columns.
        let mut zpivots = Vec::new();
        let mut brank = rank;
        for col in 0..n {
            let m = 1u64 << col;
            if let Some(p) = (brank..n).find(|&i| rows[i].1 & m != 0) {
                rows.swap(brank, p);
                let piv = rows[brank];
                for (i, r) in rows.iter_mut().enumerate() {
                    if i != brank && r.1 & m != 0 {
                        // Bottom rows have no X part, so this clears column
                        // `col` from every row without touching X.
                        r.1 ^= piv.1;
                    }
                }
                zpivots.push(col);
                brank += 1;
            }
        }
        debug_assert_eq!(brank, n, "tableau not full rank");
        let mut hadamards = BTreeSet::new();
        for &col in &zpivots {
            let m = 1u64 << col;
            for r in rows.iter_mut() {
                let xb = r.0 & m;
                let zb = r.1 & m;
                r.0 = (r.0 & !m) | zb;
                r.1 = (r.1 & !m) | xb;
            }
            hadamards.insert(self.qubits[col]);
        }
        // Gauss-Jordan so that row i has X part e_i.
        for col in 0..n {
            let m = 1u64 << col;
            let p = (col..n).find(|&i| rows[i].0 & m != 0).expect("X block invertible");
            rows.swap(col, p);
            let piv = rows[col];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != col && r.0 & m != 0 {
                    r.0 ^= piv.0;
                    r.1 ^= piv.1;
                }
            }
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rows[i].1 >> j & 1 == 1 {
                    debug_assert!(rows[j].1 >> i & 1 == 1, "adjacency not symmetric");
                    edges.push((self.qubits[i], self.qubits[j]));
                }
            }
        }
        ExtractedGraph { edges, hadamards }
    }

    /// Finest tensor-product partition (connected components of any
    /// LC-equivalent graph).
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut g = GraphState::new();
        for &q in &self.qubits {
            g.add_vertex(q).unwrap();
        }
        for (a, b) in self.to_graph().edges {
            g.add_edge(a, b).unwrap();
        }
        g.components()
    }
}

fn leading_bit(k: u128) -> u128 {
    if k == 0 {
        0
    } else {
        1u128 << (127 - k.leading_zeros())
    }
}

fn gf2_rank(vectors: impl Iterator<Item = u128>) -> usize {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            f.write_str(if r.neg { "-" } else { "+" })?;
            for q in 0..self.len() {
                match r.get(q) {
                    Pauli::I => f.write_str(".")?,
                    p => write!(f, "{p}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
