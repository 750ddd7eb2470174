//! Signed Pauli strings on up to 64 qubits and abelian stabilizer groups.
//!
//! A string is `i^phase · Π_k X_k^{x_k} Z_k^{z_k}`, with X written to the
//! left of Z on every qubit. `Y = i·X·Z` in this convention.

use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{parse_bitstring, to_bitstring};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PauliString {
    /// Exponent of `i`, in `0..4`.
    pub phase: u8,
    pub x: u64,
    pub z: u64,
}

impl Mul for PauliString {
    type Output = PauliString;

    fn mul(self, rhs: PauliString) -> PauliString {
        // Z^{z1} X^{x2} = (−1)^{|z1 ∧ x2|} X^{x2} Z^{z1}.
        let swap = 2 * (self.z & rhs.x).count_ones() as u8;
        PauliString::new(self.phase + rhs.phase + swap, self.x ^ rhs.x, self.z ^ rhs.z)
    }
}

impl Neg for PauliString {
    type Output = PauliString;

    fn neg(self) -> PauliString {
        PauliString::new(self.phase + 2, self.x, self.z)
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { phase: 0, x: 0, z: 0 };

    pub fn new(phase: u8, x: u64, z: u64) -> Self {
        PauliString { phase: phase & 3, x, z }
    }

    pub fn x_on(mask: u64) -> Self {
        Self::new(0, mask, 0)
    }

    pub fn z_on(mask: u64) -> Self {
        Self::new(0, 0, mask)
    }

    /// `Q(u) = ⊗_k (iY)^{u_k} = (−1)^{W(u)} X^u Z^u`.
    pub fn q_of(u: u64) -> Self {
        Self::new(2 * (u.count_ones() & 1) as u8, u, u)
    }

    /// Multiplies by `(−1)^bit`.
    pub fn signed(self, bit: u8) -> PauliString {
        if bit & 1 == 1 {
            -self
        } else {
            self
        }
    }

    pub fn commutes(self, other: PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    pub fn is_hermitian(self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()).is_multiple_of(2)
    }

    pub fn phase_str(self) -> &'static str {
        ["+1", "+i", "-1", "-i"][self.phase as usize]
    }

    pub fn to_json(self, n_qubits: usize) -> PauliJson {
        PauliJson {
            phase: self.phase_str().to_string(),
            x: to_bitstring(self.x, n_qubits),
            z: to_bitstring(self.z, n_qubits),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliJson {
    pub phase: String,
    pub x: String,
    pub z: String,
}

impl PauliJson {
    pub fn parse(&self, n_qubits: usize) -> Result<PauliString> {
        let phase = match self.phase.as_str() {
            "+1" | "1" => 0,
            "+i" | "i" => 1,
            "-1" => 2,
            "-i" => 3,
            other => return Err(Error::Invalid(format!("unknown phase {other:?}"))),
        };
        let (x, lx) = parse_bitstring(&self.x).map_err(Error::Invalid)?;
        let (z, lz) = parse_bitstring(&self.z).map_err(Error::Invalid)?;
        if lx != n_qubits || lz != n_qubits {
            return Err(Error::DimensionMismatch { expected: n_qubits, got: lx.max(lz) });
        }
        Ok(PauliString::new(phase, x, z))
    }
}

/// An abelian group given by independent, pairwise commuting, Hermitian
/// generators that does not contain `−I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    gens: Vec<PauliString>,
    /// Reduced echelon rows: symplectic vector and the generator subset
    /// that produces it.
    echelon: Vec<(u64, u64, u64)>,
}

impl StabilizerGroup {
    pub fn new(n_qubits: usize, gens: Vec<PauliString>) -> Result<Self> {
        if n_qubits > 64 || gens.len() > 64 {
            return Err(Error::SizeCap(format!("{} generators on {n_qubits} qubits", gens.len())));
        }
        for (i, g) in gens.iter().enumerate() {
            if !g.is_hermitian() {
                return Err(Error::Invalid(format!("generator {i} is not Hermitian")));
            }
            for (j, h) in gens.iter().enumerate().skip(i + 1) {
                if !g.commutes(*h) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        let mut echelon: Vec<(u64, u64, u64)> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let (x, z, combo) = reduce(&echelon, g.x, g.z, 1 << i);
            if x == 0 && z == 0 {
                return Err(Error::DependentGenerators);
            }
            echelon.push((x, z, combo));
        }
        Ok(StabilizerGroup { n_qubits, gens, echelon })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.gens
    }

    /// The group element with the same X/Z masks as `p`, if any.
    pub fn element_with_masks(&self, x: u64, z: u64) -> Option<PauliString> {
        let (rx, rz, combo) = reduce(&self.echelon, x, z, 0);
        if rx != 0 || rz != 0 {
            return None;
        }
        Some(
            (0..self.gens.len())
                .filter(|&i| (combo >> i) & 1 == 1)
                .fold(PauliString::IDENTITY, |acc, i| acc * self.gens[i]),
        )
    }

    pub fn contains(&self, p: PauliString) -> bool {
        self.element_with_masks(p.x, p.z) == Some(p)
    }
}

/// Eliminates `(x, z)` against echelon rows keyed by their lowest set bit.
fn reduce(echelon: &[(u64, u64, u64)], mut x: u64, mut z: u64, mut combo: u64) -> (u64, u64, u64) {
    // Rows are pivoted on the lowest bit of the 128-bit word (z:x).
    for &(ex, ez, ec) in echelon {
        let pivot = lowest_bit(ex, ez);
        if has_bit(x, z, pivot) {
            x ^= ex;
            z ^= ez;
            combo ^= ec;
        }
    }
    (x, z, combo)
}

fn lowest_bit(x: u64, z: u64) -> u32 {
    if x != 0 {
        x.trailing_zeros()
    } else {
        64 + z.trailing_zeros()
    }
}

fn has_bit(x: u64, z: u64, b: u32) -> bool {
    if b < 64 {
        (x >> b) & 1 == 1
    } else {
        (z >> (b - 64)) & 1 == 1
    }
}
