//! Single-qubit Paulis and the 24-element local Clifford group.
//!
//! A [`LocalClifford`] is stored by its conjugation action on `X` and `Z`
//! (`C X C†` and `C Z C†`, each a signed Pauli). Global phase is dropped, so
//! the 24 possible action tables are exactly the 24 group elements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Single-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic bits `(x, z)`; `Y` is `(1, 1)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    /// `self · other = i^k · result`; returns `(k mod 4, result)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(format!("unknown Pauli axis '{other}'")),
        }
    }
}

/// Pauli with a ±1 sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub neg: bool,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub const fn pos(pauli: Pauli) -> Self {
        SignedPauli { neg: false, pauli }
    }

    pub const fn neg(pauli: Pauli) -> Self {
        SignedPauli { neg: true, pauli }
    }
}

/// Element of the single-qubit Clifford group modulo global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalClifford {
    x_image: SignedPauli,
    z_image: SignedPauli,
}

impl Default for LocalClifford {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl LocalClifford {
    pub const IDENTITY: LocalClifford = LocalClifford {
        x_image: SignedPauli::pos(Pauli::X),
        z_image: SignedPauli::pos(Pauli::Z),
    };

    pub const HADAMARD: LocalClifford = LocalClifford {
        x_image: SignedPauli::pos(Pauli::Z),
        z_image: SignedPauli::pos(Pauli::X),
    };

    /// Phase gate `S = diag(1, i)`.
    pub const PHASE: LocalClifford = LocalClifford {
        x_image: SignedPauli::pos(Pauli::Y),
        z_image: SignedPauli::pos(Pauli::Z),
    };

    /// `exp(-iπ/4 X)`, the vertex factor of a local complementation.
    pub const SQRT_X_NEG: LocalClifford = LocalClifford {
        x_image: SignedPauli::pos(Pauli::X),
        z_image: SignedPauli::neg(Pauli::Y),
    };

    /// `exp(+iπ/4 Z)`, the neighbour factor of a local complementation.
    pub const SQRT_Z_POS: LocalClifford = LocalClifford {
        x_image: SignedPauli::neg(Pauli::Y),
        z_image: SignedPauli::pos(Pauli::Z),
    };

    /// Builds an element from its action on `X` and `Z`; `None` if the images
    /// do not anticommute.
    pub fn from_images(x_image: SignedPauli, z_image: SignedPauli) -> Option<Self> {
        let ok = x_image.pauli != Pauli::I
            && z_image.pauli != Pauli::I
            && !x_image.pauli.commutes_with(z_image.pauli);
        ok.then_some(LocalClifford { x_image, z_image })
    }

    pub fn x_image(&self) -> SignedPauli {
        self.x_image
    }

    pub fn z_image(&self) -> SignedPauli {
        self.z_image
    }

    /// Conjugation `C P C†`.
    pub fn conjugate(&self, p: Pauli) -> SignedPauli {
        match p {
            Pauli::I => SignedPauli::pos(Pauli::I),
            Pauli::X => self.x_image,
            Pauli::Z => self.z_image,
            Pauli::Y => {
                // Y = i X Z, so C Y C† = i (C X C†)(C Z C†).
                let (k, r) = self.x_image.pauli.mul(self.z_image.pauli);
                // i^(1+k) must be real because Y is Hermitian.
                let phase = (1 + k) % 4;
                debug_assert!(phase == 0 || phase == 2);
                let neg = (phase == 2) ^ self.x_image.neg ^ self.z_image.neg;
                SignedPauli { neg, pauli: r }
            }
        }
    }

    pub fn conjugate_signed(&self, p: SignedPauli) -> SignedPauli {
        let mut r = self.conjugate(p.pauli);
        r.neg ^= p.neg;
        r
    }

    /// Composition `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LocalClifford) -> LocalClifford {
        LocalClifford {
            x_image: self.conjugate_signed(other.x_image),
            z_image: self.conjugate_signed(other.z_image),
        }
    }

    pub fn inverse(&self) -> LocalClifford {
        Self::all()
            .into_iter()
            .find(|c| c.compose(self) == Self::IDENTITY)
            .expect("every Clifford has an inverse")
    }

    /// `C† P C`: the operator in the frame before `C` was applied.
    pub fn pull_back(&self, p: Pauli) -> SignedPauli {
        self.inverse().conjugate(p)
    }

    /// All 24 elements in a fixed order; the position is the text-format tag.
    pub fn all() -> Vec<LocalClifford> {
        use Pauli::*;
        let axes = [X, Y, Z];
        let mut out = Vec::with_capacity(24);
        for &xa in &axes {
            for xneg in [false, true] {
                for &za in &axes {
                    if za == xa {
                        continue;
                    }
                    for zneg in [false, true] {
                        out.push(LocalClifford {
                            x_image: SignedPauli { neg: xneg, pauli: xa },
                            z_image: SignedPauli { neg: zneg, pauli: za },
                        });
                    }
                }
            }
        }
        out
    }

    pub fn index(&self) -> u8 {
        Self::all().iter().position(|c| c == self).expect("valid element") as u8
    }

    pub fn from_index(i: u8) -> Option<LocalClifford> {
        Self::all().get(i as usize).copied()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True when the element is a Pauli (acts as ±identity on each axis).
    pub fn is_pauli(&self) -> bool {
        self.x_image.pauli == Pauli::X && self.z_image.pauli == Pauli::Z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_has_24_distinct_elements() {
        let all = LocalClifford::all();
        assert_eq!(all.len(), 24);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.index() as usize, i);
            assert_eq!(LocalClifford::from_index(i as u8), Some(*a));
        }
    }

    #[test]
    fn closure_and_inverses() {
        let all = LocalClifford::all();
        for a in &all {
            for b in &all {
                assert!(all.contains(&a.compose(b)));
            }
            assert_eq!(a.compose(&a.inverse()), LocalClifford::IDENTITY);
        }
    }

    #[test]
    fn named_elements() {
        let h = LocalClifford::HADAMARD;
        assert_eq!(h.compose(&h), LocalClifford::IDENTITY);
        assert_eq!(h.conjugate(Pauli::Y), SignedPauli::neg(Pauli::Y));
        let s = LocalClifford::PHASE;
        assert_eq!(s.conjugate(Pauli::Y), SignedPauli::neg(Pauli::X));
        // (exp(-iπ/4 X))² = -iX, which acts as X-conjugation.
        let u2 = LocalClifford::SQRT_X_NEG.compose(&LocalClifford::SQRT_X_NEG);
        assert!(u2.is_pauli());
        assert_eq!(u2.conjugate(Pauli::Z), SignedPauli::neg(Pauli::Z));
        assert_eq!(LocalClifford::SQRT_X_NEG.conjugate(Pauli::Y), SignedPauli::pos(Pauli::Z));
    }

    #[test]
    fn pauli_products() {
        assert_eq!(Pauli::X.mul(Pauli::Y), (1, Pauli::Z));
        assert_eq!(Pauli::X.mul(Pauli::Z), (3, Pauli::Y));
        assert_eq!(Pauli::Y.mul(Pauli::Y), (0, Pauli::I));
    }
}
