//! Delta functions on `Z_d^n` for prime `d`, with an exact qudit GHZ
//! simulator for verification.
//!
//! Phases are integers in units of `1/L` turns, `L = 2·d^{n+1}·(d−1)`:
//! `θ(c) = 2c/d^{n+1}` and `χ = −2/(d^n(d−1))` turns. `M(c)` maps
//! `|q⟩ ↦ θ(c)·χ^{c·[q≠0]}·|q+1⟩`, and `M(0)` is the plain shift.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `d^n` accepted by [`qudit_delta_scheme`].
pub const MAX_INPUTS: u64 = 6561;
/// Largest state vector `d^N` accepted by [`qudit_run`].
pub const MAX_AMPLITUDES: u64 = 1 << 22;

pub fn is_prime(d: u32) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| !d.is_multiple_of(p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuditScheme {
    d: u32,
    n: usize,
    /// Nonzero `a ∈ Z_d^n`, little-endian base-`d` order.
    forms: Vec<Vec<u32>>,
    denom: i64,
    /// `θ(c)` in units of `1/denom` turns, indexed by `c`.
    theta: Vec<i64>,
    chi: i64,
}

/// Affine post-map `δ = a·o + b (mod d)`.
pub const POST: (u32, u32) = (1, 1);

impl QuditScheme {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_qudits(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[Vec<u32>] {
        &self.forms
    }

    pub fn phase_unit(&self) -> Rational64 {
        Rational64::new(1, self.denom)
    }

    pub fn theta_turn(&self, c: u32) -> Rational64 {
        turn(self.theta[c as usize], self.denom)
    }

    pub fn chi_turn(&self) -> Rational64 {
        turn(self.chi, self.denom)
    }

    pub fn omega_turn(&self) -> Rational64 {
        Rational64::new(1, self.d as i64)
    }

    /// `c_k(i) = Σ_j a_j i_j mod d`.
    pub fn setting(&self, k: usize, input: &[u32]) -> u32 {
        self.forms[k].iter().zip(input).map(|(&a, &x)| a * x).sum::<u32>() % self.d
    }

    /// Phase picked up by `M(c)` acting on `|q⟩`, in units of `1/denom`.
    fn step_units(&self, c: u32, q: u32) -> i64 {
        if c == 0 {
            0
        } else {
            self.theta[c as usize] + if q != 0 { c as i64 * self.chi } else { 0 }
        }
    }

    /// `M(c)^d` as a diagonal of exact turns; identity means all zero.
    pub fn power_d_turns(&self, c: u32) -> Vec<Rational64> {
        (0..self.d)
            .map(|q0| {
                let total: i64 = (0..self.d).map(|t| self.step_units(c, (q0 + t) % self.d)).sum();
                turn(total, self.denom)
            })
            .collect()
    }

    /// Dense `d×d` matrix of `M(c)`, column `q` holding the image of `|q⟩`.
    pub fn matrix(&self, c: u32) -> Vec<Vec<Complex64>> {
        let d = self.d as usize;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); d]; d];
        for q in 0..self.d {
            m[((q + 1) % self.d) as usize][q as usize] = cis(turn(self.step_units(c, q), self.denom));
        }
        m
    }

    pub fn to_json(&self) -> QuditSchemeJson {
        QuditSchemeJson {
            d: self.d,
            n: self.n,
            num_qudits: self.forms.len(),
            forms: self.forms.clone(),
            phase_unit: self.phase_unit().to_string(),
            theta: (0..self.d).map(|c| self.theta_turn(c).to_string()).collect(),
            chi: self.chi_turn().to_string(),
            omega: self.omega_turn().to_string(),
            post: POST,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuditSchemeJson {
    pub d: u32,
    pub n: usize,
    pub num_qudits: usize,
    pub forms: Vec<Vec<u32>>,
    pub phase_unit: String,
    /// Turns, indexed by `c`.
    pub theta: Vec<String>,
    pub chi: String,
    pub omega: String,
    pub post: (u32, u32),
}

fn turn(units: i64, denom: i64) -> Rational64 {
    Rational64::new(units.rem_euclid(denom), denom)
}

fn cis(t: Rational64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (*t.numer() as f64) / (*t.denom() as f64))
}

/// Base-`d` digits of `v`, least significant first.
pub fn digits(mut v: u64, d: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let r = (v % d as u64) as u32;
            v /= d as u64;
            r
        })
        .collect()
}

pub fn qudit_delta_scheme(n: usize, d: u32) -> Result<QuditScheme> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if n == 0 {
        return Err(Error::ArityOutOfRange { n, min: 1, max: usize::MAX });
    }
    let inputs = (d as u64).checked_pow(n as u32).filter(|&v| v <= MAX_INPUTS);
    let Some(inputs) = inputs else {
        return Err(Error::SizeCap(format!("d^n with d={d}, n={n} exceeds {MAX_INPUTS}")));
    };
    let d64 = d as i64;
    let denom = 2 * d64.pow(n as u32 + 1) * (d64 - 1);
    // θ(c) = 2c/d^{n+1} and χ = −2/(d^n(d−1)) turns.
    let theta = (0..d64).map(|c| 4 * c * (d64 - 1)).collect();
    let chi = -4 * d64;
    let forms = (1..inputs).map(|v| digits(v, d, n)).collect();
    Ok(QuditScheme { d, n, forms, denom, theta, chi })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuditRun {
    pub input: Vec<u32>,
    pub deterministic: bool,
    /// Outcome sum `o` with `⟨M⟩ ≈ ω^o`.
    pub outcome: u32,
    pub delta: u32,
    pub expectation_re: f64,
    pub expectation_im: f64,
    /// `|⟨M⟩ − ω^o|`.
    pub deviation: f64,
}

/// Applies `⊗_k M_k(c_k(i))` to the qudit GHZ state and reads `ω^o` from
/// `⟨ψ|M|ψ⟩`.
pub fn qudit_run(s: &QuditScheme, input: &[u32], tol: f64) -> Result<QuditRun> {
    if input.len() != s.n {
        return Err(Error::DimensionMismatch { expected: s.n, got: input.len() });
    }
    if let Some(&bad) = input.iter().find(|&&x| x >= s.d) {
        return Err(Error::Invalid(format!("input digit {bad} not in Z_{}", s.d)));
    }
    let dim = (s.d as u64)
        .checked_pow(s.num_qudits() as u32)
        .filter(|&v| v <= MAX_AMPLITUDES)
        .ok_or_else(|| Error::SizeCap(format!("{}^{} amplitudes", s.d, s.num_qudits())))?
        as usize;
    let d = s.d as usize;
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    let repunit: usize = (0..s.num_qudits()).fold(0, |acc, _| acc * d + 1);
    let norm = 1.0 / (d as f64).sqrt();
    for q in 0..d {
        psi[q * repunit] = Complex64::new(norm, 0.0);
    }
    let mut phi = psi.clone();
    let mut stride = 1usize;
    for k in 0..s.num_qudits() {
        let c = s.setting(k, input);
        let m = s.matrix(c);
        phi = apply_shift_local(&phi, stride, d, &m);
        stride *= d;
    }
    let e: Complex64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
    let o = ((e.arg() / TAU * d as f64).round() as i64).rem_euclid(d as i64) as u32;
    let target = cis(Rational64::new(o as i64, d as i64));
    let deviation = (e - target).norm();
    Ok(QuditRun {
        input: input.to_vec(),
        deterministic: (e.norm() - 1.0).abs() < tol && deviation < tol,
        outcome: o,
        delta: (POST.0 * o + POST.1) % s.d,
        expectation_re: e.re,
        expectation_im: e.im,
        deviation,
    })
}

/// Applies a generalized permutation acting on the digit at `stride`; the
/// matrix has one nonzero entry per column.
fn apply_shift_local(amps: &[Complex64], stride: usize, d: usize, m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    out.par_iter_mut().enumerate().for_each(|(x, slot)| {
        let q_out = (x / stride) % d;
        let base = x - q_out * stride;
        *slot = (0..d).map(|q| m[q_out][q] * amps[base + q * stride]).sum();
    });
    out
}

/// Runs every input in `Z_d^n`, ordered little-endian.
pub fn qudit_run_all(s: &QuditScheme, tol: f64) -> Result<Vec<QuditRun>> {
    let inputs = (s.d as u64).pow(s.n as u32);
    (0..inputs).map(|v| qudit_run(s, &digits(v, s.d, s.n), tol)).collect()
}

/// Exact phase relation: the turn of `∏_k θ(c_k)^q χ^{c_k[q≠0]}` for each
/// branch `q`, i.e. the phase the GHZ component `|q⟩^N` acquires.
pub fn branch_turns(s: &QuditScheme, input: &[u32]) -> Vec<Rational64> {
    (0..s.d)
        .map(|q| {
            let units: i64 = (0..s.num_qudits()).map(|k| s.step_units(s.setting(k, input), q)).sum();
            turn(units, s.denom)
        })
        .collect()
}

/// Composes delta schemes into an arbitrary `f: Z_d^n → Z_d` via
/// `f(i) = Σ_j f_j·δ(i − j)`. `table` is indexed little-endian.
pub fn qudit_compose(s: &QuditScheme, table: &[u32], tol: f64) -> Result<Vec<u32>> {
    let count = (s.d as u64).pow(s.n as u32) as usize;
    if table.len() != count {
        return Err(Error::DimensionMismatch { expected: count, got: table.len() });
    }
    (0..count)
        .map(|i| {
            let xi = digits(i as u64, s.d, s.n);
            let mut acc = 0u32;
            for (j, &fj) in table.iter().enumerate().filter(|(_, &fj)| fj % s.d != 0) {
                let xj = digits(j as u64, s.d, s.n);
                let diff: Vec<u32> = xi.iter().zip(&xj).map(|(a, b)| (a + s.d - b) % s.d).collect();
                let r = qudit_run(s, &diff, tol)?;
                if !r.deterministic {
                    return Err(Error::NonDeterministic { input: i, value: format!("{:?}", r.expectation_re) });
                }
                acc = (acc + fj * r.delta) % s.d;
            }
            Ok(acc)
        })
        .collect()
}

/// Number of nonzero `a ∈ Z_d^n` with `a·i ≢ 0 (mod d)`, by enumeration.
pub fn nonzero_form_count(d: u32, n: usize, input: &[u32]) -> u64 {
    let total = (d as u64).pow(n as u32);
    (1..total)
        .filter(|&v| digits(v, d, n).iter().zip(input).map(|(a, x)| a * x).sum::<u32>() % d != 0)
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile_delta;
    use crate::simulator::{x_theta, DEFAULT_TOL};

    #[test]
    fn primes() {
        let p: Vec<u32> = (0..20).filter(|&d| is_prime(d)).collect();
        assert_eq!(p, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(qudit_delta_scheme(1, 4), Err(Error::NotPrime(4)));
        assert!(matches!(qudit_delta_scheme(9, 3), Err(Error::SizeCap(_))));
    }

    #[test]
    fn qudit_counts() {
        assert_eq!(qudit_delta_scheme(1, 3).unwrap().num_qudits(), 2);
        assert_eq!(qudit_delta_scheme(2, 3).unwrap().num_qudits(), 8);
        assert_eq!(qudit_delta_scheme(2, 5).unwrap().num_qudits(), 24);
    }

    #[test]
    fn phase_invariants() {
        for (n, d) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (1, 5), (2, 5), (1, 7)] {
            let s = qudit_delta_scheme(n, d).unwrap();
            let (d64, n32) = (d as i64, n as u32);
            // χ^{−d^{n−1}(d−1)/2} = ω, as exact turns. The exponent can be
            // a half-integer, so χ is taken unreduced here.
            let lhs = Rational64::new(s.chi, s.denom) * Rational64::new(-d64.pow(n32 - 1) * (d64 - 1), 2);
            assert!((lhs - s.omega_turn()).is_integer());
            for c in 0..d {
                // θ(c)^d = χ^{−(d−1)c}.
                let diff = s.theta_turn(c) * d64 - s.chi_turn() * Rational64::from_integer(-(d64 - 1) * c as i64);
                assert!(diff.is_integer(), "d={d} c={c}");
                if c > 0 {
                    assert!(s.power_d_turns(c).iter().all(|t| *t.numer() == 0), "M({c})^d");
                }
            }
            assert!(s.power_d_turns(0).iter().all(|t| *t.numer() == 0));
        }
    }

    #[test]
    fn binary_case_matches_qubit_delta() {
        for n in 1..=3 {
            let s = qudit_delta_scheme(n, 2).unwrap();
            let q = compile_delta(n).unwrap();
            let m = s.matrix(1);
            let x = x_theta(q.qubits()[0].theta);
            for r in 0..2 {
                for c in 0..2 {
                    assert!((m[r][c] - x[r][c]).norm() < 1e-12);
                }
            }
            for run in qudit_run_all(&s, DEFAULT_TOL).unwrap() {
                let expect = u32::from(run.input.iter().all(|&v| v == 0));
                assert_eq!(run.delta, expect);
            }
        }
    }

    #[test]
    fn ternary_examples() {
        let s = qudit_delta_scheme(1, 3).unwrap();
        assert_eq!(qudit_run(&s, &[0], DEFAULT_TOL).unwrap().delta, 1);
        assert_eq!(qudit_run(&s, &[1], DEFAULT_TOL).unwrap().delta, 0);
        assert_eq!(qudit_run(&s, &[2], DEFAULT_TOL).unwrap().delta, 0);
        assert!(qudit_run(&s, &[3], DEFAULT_TOL).is_err());
        assert!(qudit_run(&s, &[0, 0], DEFAULT_TOL).is_err());
    }

    #[test]
    fn all_small_cases_deterministic() {
        for (n, d) in [(1, 3), (2, 3), (1, 5), (1, 7), (2, 2), (3, 2)] {
            let s = qudit_delta_scheme(n, d).unwrap();
            for r in qudit_run_all(&s, DEFAULT_TOL).unwrap() {
                assert!(r.deterministic, "d={d} n={n} {:?}", r.input);
                assert!(r.deviation < 1e-9);
                let zero = r.input.iter().all(|&v| v == 0);
                assert_eq!(r.delta, u32::from(zero));
                // The outcome sum is −1 on nonzero inputs.
                assert_eq!(r.outcome, if zero { 0 } else { d - 1 });
            }
        }
    }

    #[test]
    fn branch_phases_are_exact() {
        // Oracle independent of the state vector: every GHZ branch |q⟩^N
        // picks up exactly o/d turns.
        for (n, d) in [(1, 3), (2, 3), (1, 5), (2, 5), (3, 3)] {
            let s = qudit_delta_scheme(n, d).unwrap();
            for v in 0..(d as u64).pow(n as u32) {
                let input = digits(v, d, n);
                let o = if v == 0 { 0 } else { d as i64 - 1 };
                for (q, t) in branch_turns(&s, &input).into_iter().enumerate() {
                    assert_eq!(t, turn(o * s.denom / d as i64, s.denom), "d={d} n={n} v={v} q={q}");
                }
            }
        }
    }

    #[test]
    fn counting_identity() {
        for d in [2u32, 3, 5] {
            for n in 1..=3 {
                let total = (d as u64).pow(n as u32);
                for v in 1..total {
                    let input = digits(v, d, n);
                    assert_eq!(nonzero_form_count(d, n, &input), (d as u64 - 1) * total / d as u64);
                }
                assert_eq!(nonzero_form_count(d, n, &vec![0; n]), 0);
                // g(k) = Σ_{l<k} (−1)^l (d−1)^{k−l} counts a with all k
                // entries nonzero and a·i ≠ 0, for i with k nonzero entries.
                for k in 1..=n {
                    let g: i64 = (0..k).map(|l| (-1i64).pow(l as u32) * (d as i64 - 1).pow((k - l) as u32)).sum();
                    let input: Vec<u32> = (0..k).map(|_| 1).chain(std::iter::repeat_n(0, n - k)).collect();
                    let direct = (1..total)
                        .map(|v| digits(v, d, n))
                        .filter(|a| a[..k].iter().all(|&x| x != 0) && a[k..].iter().all(|&x| x == 0))
                        .filter(|a| a.iter().zip(&input).map(|(x, y)| x * y).sum::<u32>() % d != 0)
                        .count() as i64;
                    assert_eq!(direct, g, "d={d} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn matrices_are_unitary_of_order_d() {
        let s = qudit_delta_scheme(2, 3).unwrap();
        for c in 0..3 {
            let m = s.matrix(c);
            let mut p = m.clone();
            for _ in 1..3 {
                p = (0..3)
                    .map(|r| (0..3).map(|col| (0..3).map(|k| m[r][k] * p[k][col]).sum()).collect())
                    .collect();
            }
            for r in 0..3 {
                for col in 0..3 {
                    let id = if r == col { 1.0 } else { 0.0 };
                    assert!((p[r][col] - Complex64::new(id, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn composition_computes_arbitrary_functions() {
        let s = qudit_delta_scheme(1, 3).unwrap();
        assert_eq!(qudit_compose(&s, &[2, 0, 1], DEFAULT_TOL).unwrap(), vec![2, 0, 1]);
        let s = qudit_delta_scheme(2, 2).unwrap();
        assert_eq!(qudit_compose(&s, &[0, 0, 0, 1], DEFAULT_TOL).unwrap(), vec![0, 0, 0, 1]);
        assert!(qudit_compose(&s, &[0, 1], DEFAULT_TOL).is_err());
    }

    #[test]
    fn json_uses_exact_turns() {
        let j = qudit_delta_scheme(1, 3).unwrap().to_json();
        assert_eq!(j.phase_unit, "1/36");
        assert_eq!(j.theta, vec!["0", "2/9", "4/9"]);
        assert_eq!(j.chi, "2/3");
        assert_eq!(j.omega, "1/3");
    }
}
