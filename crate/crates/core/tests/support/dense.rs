//! Dense state-vector simulator for at most 14 qubits.

#![allow(dead_code)]

use ballistic_cluster::graphstate::{GraphState, LocalClifford, Pauli, SignedPauli};
use num_complex::Complex64;

pub const MAX_QUBITS: usize = 14;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_matrix(p: Pauli) -> Mat2 {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                r[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    r
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn close(a: &Mat2, b: &Mat2) -> bool {
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < 1e-9))
}

fn as_signed_pauli(m: &Mat2) -> Option<SignedPauli> {
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        let pm = pauli_matrix(p);
        if close(m, &pm) {
            return Some(SignedPauli::pos(p));
        }
        let neg = [[-pm[0][0], -pm[0][1]], [-pm[1][0], -pm[1][1]]];
        if close(m, &neg) {
            return Some(SignedPauli::neg(p));
        }
    }
    None
}

/// A unitary implementing `cl`, found by searching words in H and S.
pub fn clifford_matrix(cl: &LocalClifford) -> Mat2 {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h: Mat2 = [[c(s2, 0.0), c(s2, 0.0)], [c(s2, 0.0), c(-s2, 0.0)]];
    let s: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];
    let mut frontier: Vec<Mat2> = vec![pauli_matrix(Pauli::I)];
    for _ in 0..8 {
        let mut next = Vec::new();
        for u in &frontier {
            let ux = as_signed_pauli(&mul(&mul(u, &pauli_matrix(Pauli::X)), &dagger(u)));
            let uz = as_signed_pauli(&mul(&mul(u, &pauli_matrix(Pauli::Z)), &dagger(u)));
            if ux == Some(cl.x_image()) && uz == Some(cl.z_image()) {
                return *u;
            }
            next.push(mul(&h, u));
            next.push(mul(&s, u));
        }
        frontier = next;
    }
    panic!("no H/S word found for {cl:?}");
}

#[derive(Clone, Debug)]
pub struct Dense {
    pub qubits: Vec<u32>,
    pub amp: Vec<Complex64>,
}

impl Dense {
    /// `(⊗ C_v)|G⟩` with qubit `i` of the vector being `qubits[i]`.
    pub fn from_graph(g: &GraphState) -> Dense {
        let qubits: Vec<u32> = g.vertices().collect();
        let n = qubits.len();
        assert!(n <= MAX_QUBITS);
        let norm = (1usize << n) as f64;
        let mut d = Dense { qubits, amp: vec![c(1.0 / norm.sqrt(), 0.0); 1 << n] };
        for (a, b) in g.edges() {
            d.cz(a, b);
        }
        for v in g.vertices() {
            if let Some(cl) = g.vcop(v) {
                d.apply_1q(v, &clifford_matrix(&cl));
            }
        }
        d
    }

    pub fn pos(&self, v: u32) -> usize {
        self.qubits.iter().position(|&q| q == v).expect("qubit present")
    }

    pub fn cz(&mut self, a: u32, b: u32) {
        let (ia, ib) = (self.pos(a), self.pos(b));
        for (k, x) in self.amp.iter_mut().enumerate() {
            if k >> ia & 1 == 1 && k >> ib & 1 == 1 {
                *x = -*x;
            }
        }
    }

    pub fn apply_1q(&mut self, v: u32, m: &Mat2) {
        let q = self.pos(v);
        let bit = 1 << q;
        for k in 0..self.amp.len() {
            if k & bit == 0 {
                let (a0, a1) = (self.amp[k], self.amp[k | bit]);
                self.amp[k] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[k | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_pauli_string(&self, ops: &[(u32, Pauli)]) -> Vec<Complex64> {
        let mut d = self.clone();
        for &(v, p) in ops {
            d.apply_1q(v, &pauli_matrix(p));
        }
        d.amp
    }

    /// `⟨ψ|P|ψ⟩` for a Pauli string.
    pub fn expectation(&self, ops: &[(u32, Pauli)]) -> f64 {
        let pa = self.apply_pauli_string(ops);
        self.amp.iter().zip(&pa).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Projects qubit `v` onto the `+1` eigenstate of `p` and removes it.
    pub fn measure_and_remove(&mut self, v: u32, p: Pauli) {
        let pm = pauli_matrix(p);
        let proj: Mat2 = [
            [(c(1.0, 0.0) + pm[0][0]) * 0.5, pm[0][1] * 0.5],
            [pm[1][0] * 0.5, (c(1.0, 0.0) + pm[1][1]) * 0.5],
        ];
        self.apply_1q(v, &proj);
        let q = self.pos(v);
        // The qubit is now in a fixed state |e⟩; contract with ⟨e|.
        let e = if proj[0][0].norm() > 1e-9 {
            [proj[0][0], proj[1][0]]
        } else {
            [proj[0][1], proj[1][1]]
        };
        let en = (e[0].norm_sqr() + e[1].norm_sqr()).sqrt();
        let e = [e[0] / en, e[1] / en];
        let bit = 1 << q;
        let mut out = Vec::with_capacity(self.amp.len() / 2);
        for k in 0..self.amp.len() {
            if k & bit == 0 {
                out.push(e[0].conj() * self.amp[k] + e[1].conj() * self.amp[k | bit]);
            }
        }
        self.amp = out;
        self.qubits.remove(q);
        self.normalize();
    }

    pub fn normalize(&mut self) {
        let n: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 1e-9, "projection annihilated the state");
        for a in &mut self.amp {
            *a /= n;
        }
    }

    /// `Tr ρ_A²` for the reduced state on `subset`.
    pub fn purity(&self, subset: &[u32]) -> f64 {
        let mask: usize = subset.iter().map(|&v| 1usize << self.pos(v)).sum();
        let n = self.qubits.len();
        let keep: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let dim_a = 1usize << keep.len();
        let mut rho = vec![c(0.0, 0.0); dim_a * dim_a];
        let index_a = |k: usize| -> usize {
            keep.iter().enumerate().map(|(i, &q)| (k >> q & 1) << i).sum()
        };
        for k in 0..self.amp.len() {
            for l in 0..self.amp.len() {
                if k & !mask == l & !mask {
                    rho[index_a(k) * dim_a + index_a(l)] += self.amp[k] * self.amp[l].conj();
                }
            }
        }
        let mut p = 0.0;
        for i in 0..dim_a {
            for j in 0..dim_a {
                p += (rho[i * dim_a + j] * rho[j * dim_a + i]).re;
            }
        }
        p
    }

    /// True if some local Pauli correction maps `self` onto `other`.
    pub fn equal_up_to_local_pauli(&self, other: &Dense) -> bool {
        assert_eq!(self.qubits.len(), other.qubits.len());
        let n = self.qubits.len();
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for code in 0..4usize.pow(n as u32) {
            let ops: Vec<(u32, Pauli)> = (0..n)
                .map(|i| (self.qubits[i], paulis[code / 4usize.pow(i as u32) % 4]))
                .collect();
            let v = self.apply_pauli_string(&ops);
            let mut overlap = c(0.0, 0.0);
            for (k, a) in other.amp.iter().enumerate() {
                // Reorder bits from `other`'s qubit order into ours.
                let mut kk = 0;
                for (j, &q) in other.qubits.iter().enumerate() {
                    kk |= (k >> j & 1) << self.pos(q);
                }
                overlap += a.conj() * v[kk];
            }
            if (overlap.norm() - 1.0).abs() < 1e-9 {
                return true;
            }
        }
        false
    }
}
