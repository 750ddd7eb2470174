//! Dense state-vector simulation used as the independent check on the
//! phase-relation oracle, and stabilizer-group membership checks.
//!
//! Expectations reported here are of the output observable
//! `(−1)^{m0}·⊗_k M_k`, so `+1` means output bit 0 with certainty.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{phi, BoolFn};
use crate::compiler::{MeasurementScheme, StabilizerScheme};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gf2::to_bitstring;
use crate::pauli::PauliString;

pub const MAX_QUBITS: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(n_qubits));
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << n_qubits, got: amps.len() });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Invalid(format!("state norm {norm} is not 1")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|P|ψ⟩` for a signed Pauli string.
    pub fn pauli_expectation(&self, p: PauliString) -> Complex64 {
        let applied = apply_pauli(&self.amps, p);
        self.inner(&applied)
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(n_qubits));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = Complex64::new(h, 0.0);
    amps[(1 << n_qubits) - 1] = Complex64::new(h, 0.0);
    Ok(StateVector { n_qubits, amps })
}

fn cis_pi(v: Dyadic) -> Complex64 {
    Complex64::from_polar(1.0, PI * v.rem2().to_f64())
}

/// `[[0, θ*], [θ, 0]]` with `θ = e^{iπϑ}`.
pub fn x_theta(vartheta: Dyadic) -> [[Complex64; 2]; 2] {
    let t = cis_pi(vartheta);
    let zero = Complex64::new(0.0, 0.0);
    [[zero, t.conj()], [t, zero]]
}

fn apply_local(amps: &mut [Complex64], k: usize, m: &[[Complex64; 2]; 2]) {
    let bit = 1usize << k;
    for b in 0..amps.len() {
        if b & bit == 0 {
            let (a0, a1) = (amps[b], amps[b | bit]);
            amps[b] = m[0][0] * a0 + m[0][1] * a1;
            amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_pauli(amps: &[Complex64], p: PauliString) -> Vec<Complex64> {
    let ph = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
        [p.phase as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (b, &a) in amps.iter().enumerate() {
        let sign = if (b as u64 & p.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[b ^ p.x as usize] = ph * sign * a;
    }
    out
}

/// `⟨ψ|(−1)^{m0} ⊗_k X(e^{iπ·c_k(i)·ϑ_k})|ψ⟩`, by applying every local
/// operator to the state vector. `psi` defaults to the GHZ state.
pub fn expectation(s: &MeasurementScheme, i: usize, psi: Option<&StateVector>) -> Result<Complex64> {
    let owned;
    let psi = match psi {
        Some(p) => p,
        None => {
            owned = ghz_state(s.num_qubits())?;
            &owned
        }
    };
    if psi.n_qubits() != s.num_qubits() {
        return Err(Error::DimensionMismatch { expected: s.num_qubits(), got: psi.n_qubits() });
    }
    let mut amps = psi.amps().to_vec();
    for (k, q) in s.qubits().iter().enumerate() {
        let angle = if phi(q.mask, i) == 1 { q.theta } else { Dyadic::ZERO };
        apply_local(&mut amps, k, &x_theta(angle));
    }
    let e = psi.inner(&amps);
    Ok(if s.m0() == 1 { -e } else { e })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputRecord {
    pub input: usize,
    pub expectation: Complex64,
    pub deterministic: bool,
    pub output_bit: Option<u8>,
    /// Probability of producing the target bit; `None` without a target.
    pub p_success: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimReport {
    pub n: usize,
    pub records: Vec<InputRecord>,
    /// Mean of `p_success` over all inputs when a target is given.
    pub p_succ: Option<f64>,
    pub output_fn: Option<BoolFn>,
}

impl SimReport {
    fn build(n: usize, expectations: Vec<Complex64>, target: Option<&BoolFn>, tol: f64) -> Result<Self> {
        if let Some(t) = target {
            if t.n() != n {
                return Err(Error::ArityMismatch { left: t.n(), right: n });
            }
        }
        let records: Vec<InputRecord> = expectations
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                let deterministic = e.norm() >= 1.0 - tol;
                let output_bit = deterministic.then(|| u8::from(e.re < 0.0));
                let p_success = target.map(|t| {
                    let sign = if t.eval(i) { -1.0 } else { 1.0 };
                    (1.0 + sign * e.re) / 2.0
                });
                InputRecord { input: i, expectation: e, deterministic, output_bit, p_success }
            })
            .collect();
        let p_succ = target.map(|_| records.iter().map(|r| r.p_success.unwrap()).sum::<f64>() / records.len() as f64);
        let output_fn = if records.iter().all(|r| r.deterministic) {
            Some(BoolFn::from_fn(n, |i| records[i].output_bit == Some(1))?)
        } else {
            None
        };
        Ok(SimReport { n, records, p_succ, output_fn })
    }

    pub fn all_deterministic(&self) -> bool {
        self.records.iter().all(|r| r.deterministic)
    }

    pub fn to_json(&self) -> SimReportJson {
        SimReportJson {
            p_succ: self.p_succ,
            deterministic: self.all_deterministic(),
            outputs: self
                .records
                .iter()
                .map(|r| OutputJson {
                    i: to_bitstring(r.input as u64, self.n),
                    expectation_re: r.expectation.re,
                    expectation_im: r.expectation.im,
                    bit: r.output_bit,
                    p: r.p_success,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputJson {
    pub i: String,
    pub expectation_re: f64,
    pub expectation_im: f64,
    pub bit: Option<u8>,
    pub p: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReportJson {
    pub p_succ: Option<f64>,
    pub deterministic: bool,
    pub outputs: Vec<OutputJson>,
}

/// Simulates every input of a GHZ scheme.
pub fn run(s: &MeasurementScheme, target: Option<&BoolFn>, tol: f64) -> Result<SimReport> {
    let psi = ghz_state(s.num_qubits().max(1))?;
    let expectations = if s.num_qubits() == 0 {
        // No qubits: the output observable is the constant (−1)^{m0}.
        let e = if s.m0() == 1 { -1.0 } else { 1.0 };
        vec![Complex64::new(e, 0.0); 1 << s.n()]
    } else {
        (0..1usize << s.n())
            .into_par_iter()
            .map(|i| expectation(s, i, Some(&psi)))
            .collect::<Result<Vec<_>>>()?
    };
    SimReport::build(s.n(), expectations, target, tol)
}

/// Draws `shots` outputs on input `i` from the distribution fixed by the
/// expectation value.
pub fn sample_outputs(s: &MeasurementScheme, i: usize, shots: usize, seed: u64) -> Result<Vec<u8>> {
    let e = if s.num_qubits() == 0 {
        if s.m0() == 1 { -1.0 } else { 1.0 }
    } else {
        expectation(s, i, None)?.re
    };
    let p0 = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..shots).map(|_| u8::from(rng.gen::<f64>() >= p0)).collect())
}

/// The state stabilized by the scheme's generators.
pub fn stabilizer_state(ss: &StabilizerScheme) -> Result<StateVector> {
    let nq = ss.num_qubits();
    if nq == 0 || nq > MAX_QUBITS {
        return Err(Error::QubitCount(nq));
    }
    ss.group()?;
    let dim = 1usize << nq;
    for seed in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[seed] = Complex64::new(1.0, 0.0);
        for &g in ss.generators() {
            let ga = apply_pauli(&amps, g);
            amps = amps.iter().zip(&ga).map(|(a, b)| (a + b) * 0.5).collect();
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let amps = amps.into_iter().map(|a| a / norm).collect();
            return StateVector::new(nq, amps);
        }
    }
    Err(Error::Invalid("generators stabilize no state".into()))
}

/// Simulates a stabilizer scheme on its resource state.
pub fn run_stabilizer(ss: &StabilizerScheme, target: Option<&BoolFn>, tol: f64) -> Result<SimReport> {
    let psi = stabilizer_state(ss)?;
    let expectations = (0..1usize << ss.n())
        .map(|x| {
            let m = ss.measurement(ss.settings(x)).signed(ss.m0());
            psi.pauli_expectation(m)
        })
        .collect();
    SimReport::build(ss.n(), expectations, target, tol)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    /// Per input: whether `(−1)^{f(x)+m0}·M(Px)` lies in the group.
    pub inputs: Vec<bool>,
    pub first_failure: Option<usize>,
}

/// Checks `(−1)^{f(x)+m0}·M(Px) ∈ S` for every input.
pub fn stabilizer_verify(ss: &StabilizerScheme, f: &BoolFn) -> Result<VerifyReport> {
    if f.n() != ss.n() {
        return Err(Error::ArityMismatch { left: f.n(), right: ss.n() });
    }
    let group = ss.group()?;
    let inputs: Vec<bool> = (0..1usize << f.n())
        .map(|x| {
            let m = ss.measurement(ss.settings(x)).signed(f.bit(x) ^ ss.m0());
            group.contains(m)
        })
        .collect();
    let first_failure = inputs.iter().position(|ok| !ok);
    Ok(VerifyReport { ok: first_failure.is_none(), inputs, first_failure })
}
