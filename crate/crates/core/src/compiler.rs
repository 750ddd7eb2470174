//! Synthesis of non-adaptive measurement schemes.
//!
//! A GHZ scheme measures qubit `k` with `X(e^{iπ·c_k(i)·ϑ_k})`, where
//! `c_k(i) = φ_{a_k}(i)`; its output is the parity of all outcomes plus
//! `m0`. The output on input `i` is deterministic iff `Σ_k c_k(i)·ϑ_k` is
//! an integer, in which case it equals that integer plus `m0`, mod 2.

use serde::{Deserialize, Serialize};

use crate::boolfn::{phi, BoolFn, WalshSpectrum, MAX_SPECTRAL_ARITY};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gf2::{parse_bitstring, to_bitstring, BitMatrix};
use crate::pauli::{PauliJson, PauliString, StabilizerGroup};
use crate::stabilizer::QuadraticForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qubit {
    pub mask: usize,
    /// Phase in units of π, kept in `[0, 2)`.
    pub theta: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementScheme {
    n: usize,
    qubits: Vec<Qubit>,
    m0: u8,
}

impl MeasurementScheme {
    pub fn new(n: usize, qubits: impl IntoIterator<Item = (usize, Dyadic)>, m0: u8) -> Result<Self> {
        if n == 0 || n > MAX_SPECTRAL_ARITY {
            return Err(Error::ArityOutOfRange { n, min: 1, max: MAX_SPECTRAL_ARITY });
        }
        let qubits = qubits
            .into_iter()
            .map(|(mask, theta)| {
                if mask == 0 {
                    return Err(Error::ZeroMask);
                }
                if mask >= 1 << n {
                    return Err(Error::Invalid(format!("mask {mask:#b} exceeds arity {n}")));
                }
                Ok(Qubit { mask, theta: theta.rem2() })
            })
            .collect::<Result<Vec<_>>>()?;
        if m0 > 1 {
            return Err(Error::Invalid(format!("m0 must be 0 or 1, got {m0}")));
        }
        Ok(MeasurementScheme { n, qubits, m0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn m0(&self) -> u8 {
        self.m0
    }

    /// `Σ_k c_k(i)·ϑ_k + m0`, reduced into `[0, 2)`.
    pub fn phase_sum(&self, i: usize) -> Dyadic {
        let s: Dyadic = self.qubits.iter().filter(|q| phi(q.mask, i) == 1).map(|q| q.theta).sum();
        (s + Dyadic::from_int(self.m0 as i64)).rem2()
    }

    pub fn phase_sums(&self) -> Vec<Dyadic> {
        let mut coeffs = vec![Dyadic::ZERO; 1 << self.n];
        coeffs[0] = Dyadic::from_int(self.m0 as i64);
        for q in &self.qubits {
            coeffs[q.mask] = coeffs[q.mask] + q.theta;
        }
        let s = WalshSpectrum::from_coeffs(self.n, coeffs).expect("arity checked on construction");
        s.pointwise().into_iter().map(Dyadic::rem2).collect()
    }

    pub fn to_json(&self) -> SchemeJson {
        SchemeJson {
            n: self.n,
            m0: self.m0,
            qubits: self
                .qubits
                .iter()
                .map(|q| QubitJson { mask: to_bitstring(q.mask as u64, self.n), theta: q.theta })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitJson {
    pub mask: String,
    pub theta: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub n: usize,
    pub m0: u8,
    pub qubits: Vec<QubitJson>,
}

impl SchemeJson {
    pub fn to_scheme(&self) -> Result<MeasurementScheme> {
        let qubits = self
            .qubits
            .iter()
            .map(|q| {
                let (mask, len) = parse_bitstring(&q.mask).map_err(Error::Invalid)?;
                if len != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: len });
                }
                Ok((mask as usize, q.theta))
            })
            .collect::<Result<Vec<_>>>()?;
        MeasurementScheme::new(self.n, qubits, self.m0)
    }
}

/// Delta function `δ_n` on all `2^n − 1` nonzero masks, `ϑ = 2^{−(n−1)}`.
pub fn compile_delta(n: usize) -> Result<MeasurementScheme> {
    if n == 0 || n > MAX_SPECTRAL_ARITY {
        return Err(Error::ArityOutOfRange { n, min: 1, max: MAX_SPECTRAL_ARITY });
    }
    let theta = Dyadic::new(1, n as u32 - 1);
    MeasurementScheme::new(n, (1..1usize << n).map(|a| (a, theta)), 1)
}

/// One qubit per mask in the Walsh support of `f`, phase `C_a mod 2`.
pub fn compile_general(f: &BoolFn) -> Result<MeasurementScheme> {
    scheme_from_spectrum(&f.walsh_inverse()?)
}

/// One qubit per support mask; the integer constant `C_0` sets `m0`.
pub fn scheme_from_spectrum(s: &WalshSpectrum) -> Result<MeasurementScheme> {
    let c0 = s.coeff(0);
    if !c0.is_integer() {
        return Err(Error::NonDeterministic { input: 0, value: c0.to_string() });
    }
    let qubits = s.support().into_iter().map(|a| (a, s.coeff(a)));
    MeasurementScheme::new(s.n(), qubits, c0.num().rem_euclid(2) as u8)
}

/// Exact evaluation of the phase relations. Fails on the first input whose
/// phase sum is not an integer.
pub fn scheme_output_oracle(s: &MeasurementScheme) -> Result<BoolFn> {
    let sums = s.phase_sums();
    if let Some((i, v)) = sums.iter().enumerate().find(|(_, v)| !v.is_integer()) {
        return Err(Error::NonDeterministic { input: i, value: v.to_string() });
    }
    BoolFn::from_fn(s.n(), |i| sums[i] == Dyadic::ONE)
}

/// `1 + max log2den(ϑ_k)`; an empty scheme has level 1.
pub fn clifford_level(s: &MeasurementScheme) -> usize {
    1 + s.qubits().iter().map(|q| q.theta.rem2().log2den() as usize).max().unwrap_or(0)
}

/// Symplectic splitting `Q = Σ_t (u_t v_tᵀ + v_t u_tᵀ)` of an alternating
/// matrix, returned as rows `u_1, v_1, u_2, v_2, …`.
fn alternating_split(q: &BitMatrix) -> Vec<u64> {
    let mut m = q.clone();
    let n = m.ncols();
    let mut out = Vec::new();
    while let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| m.get(i, j)) {
        let u = m.column(i);
        let v = m.column(j);
        for r in 0..n {
            let mut row = m.row(r);
            if (u >> r) & 1 == 1 {
                row ^= v;
            }
            if (v >> r) & 1 == 1 {
                row ^= u;
            }
            m.set_row(r, row);
        }
        out.push(u);
        out.push(v);
    }
    out
}

/// GF(2) factorization `PᵀP = Q` with `rk(Q) + 1` rows (one row if `Q = 0`).
///
/// `Q = BᵀJB` by symplectic splitting, `K = 11ᵀ + I = DᵀJD` likewise, and
/// `K = AᵀA` for `A = [I; 1ᵀ]`, so `P = A·D⁻¹·B`.
pub fn lempel_factor(q: &BitMatrix) -> Result<BitMatrix> {
    let n = q.ncols();
    if !q.is_symmetric() || (0..n).any(|i| q.get(i, i)) {
        return Err(Error::Invalid("Q must be symmetric with zero diagonal".into()));
    }
    if q.is_zero() {
        return Ok(BitMatrix::zeros(1, n));
    }
    let b = BitMatrix::from_rows(alternating_split(q), n);
    let two_r = b.nrows();
    let full = (1u64 << two_r) - 1;
    let k = BitMatrix::from_rows((0..two_r).map(|i| full ^ (1 << i)).collect(), two_r);
    let d = BitMatrix::from_rows(alternating_split(&k), two_r);
    let d_inv = d.inverse().expect("split of a full-rank alternating matrix is invertible");
    let mut a_rows: Vec<u64> = (0..two_r).map(|i| 1 << i).collect();
    a_rows.push(full);
    let a = BitMatrix::from_rows(a_rows, two_r);
    let p = a.mul(&d_inv).mul(&b);
    debug_assert_eq!(p.transpose().mul(&p), *q);
    Ok(p)
}

/// How a qubit's setting bit selects its observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitKind {
    /// `M(0) = X`, `M(1) = Z`.
    Xz,
    /// `M(0) = X`, `M(1) = −X`.
    Flip,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerScheme {
    n: usize,
    m0: u8,
    p: BitMatrix,
    kinds: Vec<QubitKind>,
    /// Sign bit of the generator attached to each input column.
    signs: Vec<u8>,
    generators: Vec<PauliString>,
}

impl StabilizerScheme {
    pub fn new(
        n: usize,
        m0: u8,
        p: BitMatrix,
        kinds: Vec<QubitKind>,
        signs: Vec<u8>,
        generators: Vec<PauliString>,
    ) -> Result<Self> {
        if p.ncols() != n || kinds.len() != p.nrows() {
            return Err(Error::DimensionMismatch { expected: n, got: p.ncols() });
        }
        Ok(StabilizerScheme { n, m0, p, kinds, signs, generators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m0(&self) -> u8 {
        self.m0
    }

    pub fn p(&self) -> &BitMatrix {
        &self.p
    }

    pub fn num_qubits(&self) -> usize {
        self.p.nrows()
    }

    pub fn kinds(&self) -> &[QubitKind] {
        &self.kinds
    }

    pub fn signs(&self) -> &[u8] {
        &self.signs
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Replaces one generator; used to build deliberately broken schemes.
    pub fn with_generator(mut self, idx: usize, g: PauliString) -> Self {
        self.generators[idx] = g;
        self
    }

    /// `M(c) = ⊗_k M_k(c_k)` as a signed Pauli string.
    pub fn measurement(&self, c: u64) -> PauliString {
        let mut m = PauliString::IDENTITY;
        for (k, kind) in self.kinds.iter().enumerate() {
            let bit = (c >> k) & 1 == 1;
            let local = match (kind, bit) {
                (_, false) => PauliString::x_on(1 << k),
                (QubitKind::Xz, true) => PauliString::z_on(1 << k),
                (QubitKind::Flip, true) => -PauliString::x_on(1 << k),
            };
            m = m * local;
        }
        m
    }

    /// Settings for input `x`: `c = P·x`.
    pub fn settings(&self, x: usize) -> u64 {
        self.p.mul_vec(x as u64)
    }

    pub fn group(&self) -> Result<StabilizerGroup> {
        StabilizerGroup::new(self.num_qubits(), self.generators.clone())
    }

    pub fn to_json(&self) -> StabilizerSchemeJson {
        let nq = self.num_qubits();
        StabilizerSchemeJson {
            n: self.n,
            m0: self.m0,
            p: self.p.rows().iter().map(|&r| to_bitstring(r, self.n)).collect(),
            kinds: self.kinds.clone(),
            signs: self.signs.clone(),
            generators: self.generators.iter().map(|g| g.to_json(nq)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerSchemeJson {
    pub n: usize,
    pub m0: u8,
    #[serde(rename = "P")]
    pub p: Vec<String>,
    pub kinds: Vec<QubitKind>,
    pub signs: Vec<u8>,
    pub generators: Vec<PauliJson>,
}

impl StabilizerSchemeJson {
    pub fn to_scheme(&self) -> Result<StabilizerScheme> {
        let rows = self
            .p
            .iter()
            .map(|r| {
                let (v, len) = parse_bitstring(r).map_err(Error::Invalid)?;
                if len != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: len });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let nq = rows.len();
        let gens = self.generators.iter().map(|g| g.parse(nq)).collect::<Result<Vec<_>>>()?;
        StabilizerScheme::new(self.n, self.m0, BitMatrix::from_rows(rows, self.n), self.kinds.clone(), self.signs.clone(), gens)
    }
}

/// Stabilizer scheme for a function of degree at most 2.
///
/// With `f = c + l·x + Σ_{i<j} q_ij x_i x_j` and `P` the Lempel factor of
/// `Q`, the generators are `X^{⊗N}` and `(−1)^{σ_i} Q(p_i)`. On `ker P` the
/// quadratic part is linear, equal to `w·x` with `w_i = W(p_i)/2 mod 2`.
/// If `λ = l + w` lies in the row space of `P` then `σ = l` closes the group
/// on `rk(Q) + 1` qubits. Otherwise one extra qubit measuring `±X` with
/// setting `λ·x` absorbs the linear part, and `σ = w`.
pub fn compile_quadratic(f: &BoolFn) -> Result<StabilizerScheme> {
    let qf = QuadraticForm::from_bool_fn(f)?;
    let n = f.n();
    let m0 = qf.c;
    if qf.q.is_zero() {
        // A single qubit: X for constants, ±X driven by the linear part otherwise.
        let (row, kind) = if qf.l == 0 { (0, QubitKind::Xz) } else { (qf.l, QubitKind::Flip) };
        let p = BitMatrix::from_rows(vec![row], n);
        return StabilizerScheme::new(n, m0, p, vec![kind], vec![0; n], vec![PauliString::x_on(1)]);
    }
    let lempel = lempel_factor(&qf.q)?;
    let w: u64 = (0..n).filter(|&i| (lempel.column(i).count_ones() / 2) % 2 == 1).fold(0, |acc, i| acc | 1 << i);
    let lambda = qf.l ^ w;
    let (p, kinds, sigma) = if lempel.transpose().solve(lambda).is_some() {
        (lempel.clone(), vec![QubitKind::Xz; lempel.nrows()], qf.l)
    } else {
        let mut rows = lempel.rows().to_vec();
        rows.push(lambda);
        let mut kinds = vec![QubitKind::Xz; lempel.nrows()];
        kinds.push(QubitKind::Flip);
        (BitMatrix::from_rows(rows, n), kinds, w)
    };
    let nq = p.nrows();
    let mut gens = vec![PauliString::x_on((1u64 << nq) - 1)];
    for i in 0..n {
        let g = PauliString::q_of(lempel.column(i)).signed(((sigma >> i) & 1) as u8);
        if !in_span(&gens, g) {
            gens.push(g);
        }
    }
    complete_generators(&mut gens, nq);
    let signs = (0..n).map(|i| ((sigma >> i) & 1) as u8).collect();
    let ss = StabilizerScheme::new(n, m0, p, kinds, signs, gens)?;
    debug_assert!(crate::simulator::stabilizer_verify(&ss, f).map(|r| r.ok).unwrap_or(false));
    Ok(ss)
}

fn in_span(gens: &[PauliString], g: PauliString) -> bool {
    let mut all = gens.to_vec();
    all.push(g);
    symplectic_rank(&all) == gens.len()
}

fn symplectic_rank(gens: &[PauliString]) -> usize {
    // Pack (x, z) into a 128-bit row and eliminate.
    let mut rows: Vec<u128> = gens.iter().map(|g| g.x as u128 | (g.z as u128) << 64).collect();
    let mut rank = 0;
    for bit in 0..128 {
        let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> bit) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && (*r >> bit) & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

/// Extends commuting independent generators to `nq` of them using Hermitian
/// elements of the centralizer.
fn complete_generators(gens: &mut Vec<PauliString>, nq: usize) {
    while gens.len() < nq {
        // Centralizer: (x, z) with x·g.z + z·g.x = 0 for every generator.
        let rows: Vec<u64> = gens.iter().map(|g| g.z | g.x << nq).collect();
        let m = BitMatrix::from_rows(rows, 2 * nq);
        let candidate = m
            .nullspace()
            .into_iter()
            .map(|v| {
                let x = v & ((1 << nq) - 1);
                let z = v >> nq;
                PauliString::new((x & z).count_ones() as u8 % 2, x, z)
            })
            .find(|&g| !in_span(gens, g))
            .expect("a Lagrangian subspace has dimension nq");
        gens.push(candidate);
    }
}
