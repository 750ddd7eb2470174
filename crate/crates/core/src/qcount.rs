//! Qubit counts for GHZ schemes: exact minimization at small arity, the
//! zero-polynomial view, and constructive bounds for symmetric functions.
//!
//! Merging qubits that share a mask turns any deterministic GHZ scheme
//! into one with a single qubit per mask and phases `Θ_a = −2·ĝ(a)` for an
//! integer-valued `g`, so phases with denominator `2^{n−1}` already cover
//! every real choice. A search with `K ≥ n` is therefore exact.

use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::{phi, weight, BoolFn, RealPoly, WalshSpectrum};
use crate::compiler::{scheme_from_spectrum, scheme_output_oracle, MeasurementScheme};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

pub const MAX_EXACT_ARITY: usize = 4;
pub const MAX_LEVEL: usize = 16;
pub const MAX_SYMMETRIC_ARITY: usize = 12;

/// Real polynomial whose coefficients are all even integers, hence zero
/// mod 2 at every point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroPoly {
    poly: RealPoly,
}

impl ZeroPoly {
    pub fn new(poly: RealPoly) -> Result<Self> {
        if let Some(b) = poly.coeffs().iter().position(|c| !c.is_integer() || c.num() % 2 != 0) {
            return Err(Error::NotZeroPoly(b));
        }
        Ok(ZeroPoly { poly })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Ok(ZeroPoly { poly: RealPoly::zero(n)? })
    }

    pub fn poly(&self) -> &RealPoly {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.poly.n()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchClass {
    /// Phases are `u/2^{K−1}` with `u ∈ Z_{2^K}`.
    pub level: usize,
    /// True when `K ≥ n`, which covers every real phase assignment.
    pub covers_all_phases: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitCountResult {
    pub count: usize,
    pub witness: MeasurementScheme,
    pub search_class: SearchClass,
    pub exact_within_class: bool,
}

/// Solves `A·u ≡ b (mod 2^k)`; `None` if unsolvable. Free variables are 0.
///
/// Elimination pivots on the entry of least 2-adic valuation in the
/// remaining block, scaled so the pivot is exactly `2^v`; every other entry
/// of its row is then divisible by `2^v`, which makes solvability a
/// per-pivot divisibility test.
pub fn solve_mod_pow2(a: &[Vec<u64>], b: &[u64], k: u32) -> Option<Vec<u64>> {
    let modulus_mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&v| v & modulus_mask).collect()).collect();
    let mut rhs: Vec<u64> = b.iter().map(|&v| v & modulus_mask).collect();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut vals = Vec::new();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let best = (rank..rows)
            .flat_map(|i| (rank..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].trailing_zeros());
        let Some((pi, pj)) = best else { break };
        m.swap(rank, pi);
        rhs.swap(rank, pi);
        for row in m.iter_mut() {
            row.swap(rank, pj);
        }
        perm.swap(rank, pj);
        let v = m[rank][rank].trailing_zeros();
        let inv = odd_inverse(m[rank][rank] >> v);
        for x in m[rank].iter_mut() {
            *x = x.wrapping_mul(inv) & modulus_mask;
        }
        rhs[rank] = rhs[rank].wrapping_mul(inv) & modulus_mask;
        let pivot_row = m[rank].clone();
        let pivot_rhs = rhs[rank];
        for i in rank + 1..rows {
            let e = m[i][rank];
            if e == 0 {
                continue;
            }
            let factor = e >> v;
            for j in rank..cols {
                m[i][j] = m[i][j].wrapping_sub(factor.wrapping_mul(pivot_row[j])) & modulus_mask;
            }
            rhs[i] = rhs[i].wrapping_sub(factor.wrapping_mul(pivot_rhs)) & modulus_mask;
        }
        vals.push(v);
        rank += 1;
    }
    if rhs[rank..].iter().any(|&r| r != 0) {
        return None;
    }
    let mut u = vec![0u64; cols];
    for t in (0..rank).rev() {
        let s = (t + 1..cols).fold(0u64, |acc, j| acc.wrapping_add(m[t][j].wrapping_mul(u[j]))) & modulus_mask;
        let c = rhs[t].wrapping_sub(s) & modulus_mask;
        let v = vals[t];
        if c.trailing_zeros() < v && c != 0 {
            return None;
        }
        u[t] = if c == 0 { 0 } else { c >> v };
    }
    let mut out = vec![0u64; cols];
    for (t, &col) in perm.iter().enumerate() {
        out[col] = u[t] & modulus_mask;
    }
    Some(out)
}

fn odd_inverse(a: u64) -> u64 {
    debug_assert!(a & 1 == 1);
    // Newton iteration doubles the number of correct low bits each step.
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// Next `r`-combination of `0..m` in lexicographic order.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let r = c.len();
    let Some(i) = (0..r).rev().find(|&i| c[i] < m - r + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..r {
        c[j] = c[j - 1] + 1;
    }
    true
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..r).collect();
    if r > m {
        return out;
    }
    loop {
        out.push(c.clone());
        if !next_combination(&mut c, m) {
            return out;
        }
    }
}

/// Fewest qubits of a GHZ scheme computing `f` with phases `u/2^{K−1}`.
/// The reported witness has the lexicographically smallest support among
/// those of minimal size.
pub fn r_ghz_exact(f: &BoolFn, level: Option<usize>) -> Result<QubitCountResult> {
    let n = f.n();
    if n > MAX_EXACT_ARITY {
        return Err(Error::ArityOutOfRange { n, min: 1, max: MAX_EXACT_ARITY });
    }
    let k = level.unwrap_or(n);
    if k == 0 || k > MAX_LEVEL {
        return Err(Error::SizeCap(format!("level K={k} outside 1..={MAX_LEVEL}")));
    }
    let m0 = f.bit(0);
    let half = 1u64 << (k - 1);
    let rhs: Vec<u64> = (0..f.len()).map(|x| if f.bit(x) ^ m0 == 1 { half } else { 0 }).collect();
    let masks: Vec<usize> = (1..f.len()).collect();
    for r in 0..=masks.len() {
        let found = combinations(masks.len(), r).into_par_iter().find_map_first(|combo| {
            let support: Vec<usize> = combo.iter().map(|&t| masks[t]).collect();
            let a: Vec<Vec<u64>> =
                (0..f.len()).map(|x| support.iter().map(|&s| phi(s, x) as u64).collect()).collect();
            solve_mod_pow2(&a, &rhs, k as u32).map(|u| (support, u))
        });
        if let Some((support, u)) = found {
            let qubits: Vec<(usize, Dyadic)> =
                support.iter().zip(&u).map(|(&s, &v)| (s, Dyadic::new(v as i64, k as u32 - 1))).collect();
            debug_assert!(qubits.iter().all(|(_, t)| !t.is_zero()));
            let witness = MeasurementScheme::new(n, qubits, m0)?;
            debug_assert_eq!(scheme_output_oracle(&witness).as_ref(), Ok(f));
            return Ok(QubitCountResult {
                count: r,
                witness,
                search_class: SearchClass { level: k, covers_all_phases: k >= n },
                exact_within_class: true,
            });
        }
    }
    Err(Error::Invalid(format!("no GHZ scheme computes f with phases u/2^{}", k - 1)))
}

/// Spectrum of `interp(f) + z`. Reducing it mod 2 still yields `f`.
pub fn reduce_by_zero_poly(f: &BoolFn, z: &ZeroPoly) -> Result<WalshSpectrum> {
    if f.n() != z.n() {
        return Err(Error::ArityMismatch { left: f.n(), right: z.n() });
    }
    let poly = RealPoly::of_bool_fn(f)?.add(z.poly())?;
    let s = poly.to_spectrum();
    assert_eq!(s.to_bool_fn().as_ref(), Ok(f), "zero polynomial changed the function");
    Ok(s)
}

/// Minimum Walsh support over the coset `interp(f) + Z(f)`, enumerating
/// even coefficients `z_b ∈ {0, 2, …, 2^{W(b)} − 2}`; larger values change
/// no coefficient mod 2. Only feasible for `n ≤ 3`.
pub fn min_support_over_zero_polys(f: &BoolFn) -> Result<(usize, WalshSpectrum)> {
    let n = f.n();
    if n > 3 {
        return Err(Error::ArityOutOfRange { n, min: 1, max: 3 });
    }
    let base = RealPoly::of_bool_fn(f)?;
    let choices: Vec<(usize, i64)> = (1..f.len()).map(|b| (b, 1i64 << (weight(b) - 1))).collect();
    let total: i64 = choices.iter().map(|&(_, c)| c).product();
    let mut best: Option<(usize, WalshSpectrum)> = None;
    for idx in 0..total {
        let mut rest = idx;
        let mut poly = base.clone();
        for &(b, c) in &choices {
            let z = 2 * (rest % c);
            rest /= c;
            poly.set(b, poly.coeff(b) + Dyadic::from_int(z));
        }
        let s = poly.to_spectrum();
        let size = s.support_size();
        if best.as_ref().is_none_or(|(bs, _)| size < *bs) {
            best = Some((size, s));
        }
    }
    Ok(best.expect("at least one coset element"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricBound {
    /// Nonzero real coefficients, `Σ_{l<k} C(n,l) + 1`.
    pub terms: usize,
    /// Coefficients nonzero mod 2, i.e. qubits. Can be below `terms` when a
    /// low-weight coefficient is an even integer (first at `n = 10, k = 3`).
    pub count: usize,
    pub spectrum: WalshSpectrum,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Upper bound for `Σ^n_k` from the representation `Σ^n_k + z`, where `z`
/// adds `(−2)^{w−k}` to every monomial of weight `w ∈ (k, n]`. All
/// coefficients of weights `k..n−1` then cancel.
pub fn r_ghz_upper_symmetric(n: usize, k: usize) -> Result<SymmetricBound> {
    if n == 0 || n > MAX_SYMMETRIC_ARITY {
        return Err(Error::ArityOutOfRange { n, min: 1, max: MAX_SYMMETRIC_ARITY });
    }
    if k == 0 || k > n {
        return Err(Error::OrderOutOfRange { k, n });
    }
    let mut poly = RealPoly::zero(n)?;
    for b in 1..1usize << n {
        let w = weight(b) as usize;
        if w >= k {
            let mag = 1i64 << (w - k);
            poly.set(b, Dyadic::from_int(if (w - k).is_multiple_of(2) { mag } else { -mag }));
        }
    }
    let spectrum = poly.to_spectrum();
    let f = BoolFn::elementary_symmetric(n, k)?;
    assert_eq!(spectrum.to_bool_fn().as_ref(), Ok(&f), "symmetric representation drifted");
    let terms = spectrum.coeffs()[1..].iter().filter(|c| !c.is_zero()).count();
    let expected: usize = (1..k).map(|l| binomial(n, l)).sum::<usize>() + 1;
    assert_eq!(terms, expected, "symmetric term formula");
    let count = spectrum.support_size();
    Ok(SymmetricBound { terms, count, spectrum })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchCertificate {
    pub f: BoolFn,
    pub g: BoolFn,
    pub degrees: (usize, usize),
    pub counts: (usize, usize),
    pub f_witness: MeasurementScheme,
    pub g_witness: MeasurementScheme,
}

/// `Σ^3_3` has higher degree than `Σ^7_2` yet needs fewer qubits.
pub fn mismatch_certificate() -> Result<MismatchCertificate> {
    let fb = r_ghz_upper_symmetric(3, 3)?;
    let gb = r_ghz_upper_symmetric(7, 2)?;
    let f = BoolFn::elementary_symmetric(3, 3)?;
    let g = BoolFn::elementary_symmetric(7, 2)?;
    Ok(MismatchCertificate {
        degrees: (f.degree(), g.degree()),
        counts: (fb.count, gb.count),
        f_witness: scheme_from_spectrum(&fb.spectrum)?,
        g_witness: scheme_from_spectrum(&gb.spectrum)?,
        f,
        g,
    })
}
