//! Quadratic structure of Boolean functions and the success probability of
//! level-2 (stabilizer) schemes.

use num_rational::Rational64;
use rayon::prelude::*;

use crate::boolfn::{weight, Anf, BoolFn};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest arity for exhaustive search over quadratics.
pub const MAX_NQ_ARITY: usize = 6;

/// `f(x) = c + l·x + Σ_{i<j} q_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub n: usize,
    /// Symmetric, zero diagonal.
    pub q: BitMatrix,
    pub l: u64,
    pub c: u8,
}

impl QuadraticForm {
    pub fn from_bool_fn(f: &BoolFn) -> Result<Self> {
        let anf = f.to_anf();
        let degree = anf.degree();
        if degree > 2 {
            return Err(Error::DegreeTooHigh { degree, max: 2 });
        }
        let n = f.n();
        if n > 64 {
            return Err(Error::ArityOutOfRange { n, min: 1, max: 64 });
        }
        let mut q = BitMatrix::zeros(n, n);
        let mut l = 0u64;
        let mut c = 0u8;
        for b in anf.monomials() {
            match weight(b) {
                0 => c = 1,
                1 => l |= b as u64,
                _ => {
                    let i = b.trailing_zeros() as usize;
                    let j = (b & (b - 1)).trailing_zeros() as usize;
                    q.set(i, j, true);
                    q.set(j, i, true);
                }
            }
        }
        Ok(QuadraticForm { n, q, l, c })
    }

    pub fn rank(&self) -> usize {
        self.q.rank()
    }

    pub fn to_bool_fn(&self) -> BoolFn {
        let mut mono: Vec<usize> = Vec::new();
        if self.c == 1 {
            mono.push(0);
        }
        mono.extend((0..self.n).filter(|i| (self.l >> i) & 1 == 1).map(|i| 1 << i));
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.q.get(i, j) {
                    mono.push(1 << i | 1 << j);
                }
            }
        }
        Anf::from_monomials(self.n, mono).expect("arity validated").to_bool_fn()
    }
}

pub fn q_matrix(f: &BoolFn) -> Result<QuadraticForm> {
    QuadraticForm::from_bool_fn(f)
}

/// Drops every monomial of degree above 2.
pub fn truncate_to_quadratic(f: &BoolFn) -> BoolFn {
    let anf = f.to_anf();
    Anf::from_monomials(f.n(), anf.monomials().filter(|&b| weight(b) <= 2))
        .expect("same arity")
        .to_bool_fn()
}

/// Minimum distance and the lexicographically smallest minimizing
/// coefficient vector `(c, l_1..l_n, q_12, q_13, …, q_{n−1,n})`, packed
/// with `c` in the most significant position.
fn nearest_search(f: &BoolFn) -> Result<(u64, u64)> {
    let n = f.n();
    if n > MAX_NQ_ARITY {
        return Err(Error::SizeCap(format!("exhaustive quadratic search needs n <= {MAX_NQ_ARITY}, got {n}")));
    }
    let target = f.words()[0];
    let monomial_table = |b: usize| BoolFn::from_fn(n, |x| x & b == b).unwrap().words()[0];
    let pairs: Vec<usize> = (0..n).flat_map(|i| (i + 1..n).map(move |j| 1 << i | 1 << j)).collect();
    let np = pairs.len();
    // qtab[m]: table of Σ over set bits of m, where bit np−1−t selects pair t.
    let mut qtab = vec![0u64; 1 << np];
    for m in 1..qtab.len() {
        let low = m.trailing_zeros() as usize;
        qtab[m] = qtab[m & (m - 1)] ^ monomial_table(pairs[np - 1 - low]);
    }
    let affine = |prefix: usize| {
        // Bit n is c; bit n−1−i is l_{i+1}.
        let mut t = if (prefix >> n) & 1 == 1 { monomial_table(0) } else { 0 };
        for i in 0..n {
            if (prefix >> (n - 1 - i)) & 1 == 1 {
                t ^= monomial_table(1 << i);
            }
        }
        t
    };
    let best = (0..1usize << (n + 1))
        .into_par_iter()
        .map(|prefix| {
            let a = target ^ affine(prefix);
            let (d, m) = qtab
                .iter()
                .enumerate()
                .map(|(m, &t)| ((a ^ t).count_ones() as u64, m))
                .min()
                .expect("nonempty");
            (d, ((prefix as u64) << np) | m as u64)
        })
        .min()
        .expect("nonempty");
    Ok(best)
}

fn decode(n: usize, index: u64) -> QuadraticForm {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let np = pairs.len();
    let prefix = index >> np;
    let mut q = BitMatrix::zeros(n, n);
    for (t, &(i, j)) in pairs.iter().enumerate() {
        if (index >> (np - 1 - t)) & 1 == 1 {
            q.set(i, j, true);
            q.set(j, i, true);
        }
    }
    let l = (0..n).filter(|&i| (prefix >> (n - 1 - i)) & 1 == 1).fold(0u64, |acc, i| acc | 1 << i);
    QuadraticForm { n, q, l, c: ((prefix >> n) & 1) as u8 }
}

/// Minimum Hamming distance from `f` to a function of degree at most 2.
pub fn non_quadraticity(f: &BoolFn) -> Result<u64> {
    Ok(nearest_search(f)?.0)
}

/// `1 − NQ(f)/2^n`.
pub fn max_success_prob(f: &BoolFn) -> Result<Rational64> {
    let nq = non_quadraticity(f)?;
    Ok(success_from_distance(nq, f.n()))
}

pub fn success_from_distance(distance: u64, n: usize) -> Rational64 {
    Rational64::from_integer(1) - Rational64::new(distance as i64, 1 << n)
}

/// A closest quadratic; ties go to the lexicographically smallest
/// coefficient vector `(c, l, q)`.
pub fn nearest_quadratic(f: &BoolFn) -> Result<BoolFn> {
    let (_, index) = nearest_search(f)?;
    Ok(decode(f.n(), index).to_bool_fn())
}

/// Extends a quadratic on the first `m` variables to all `n` variables of
/// `g`, one variable at a time, adding `Δ_j·x_{m+j+1}` with `Δ_j` chosen so
/// the new half-cube disagrees with `g` on at most half its points. The
/// result satisfies `d_H(q, g) ≤ (2^n − 2^m)/2 + d_H(q̃, g̃)`, where `g̃` is
/// `g` with the new variables fixed to zero.
pub fn extend_quadratic_approx(q_small: &BoolFn, g: &BoolFn) -> Result<BoolFn> {
    let (m, n) = (q_small.n(), g.n());
    if m > n {
        return Err(Error::ArityMismatch { left: m, right: n });
    }
    let degree = q_small.degree();
    if degree > 2 {
        return Err(Error::DegreeTooHigh { degree, max: 2 });
    }
    let mut bits: Vec<u8> = q_small.bits();
    for j in m..n {
        let half = 1usize << j;
        let disagree = (0..half).filter(|&u| bits[u] != g.bit(half | u)).count();
        let delta = u8::from(2 * disagree > half);
        let upper: Vec<u8> = (0..half).map(|u| bits[u] ^ delta).collect();
        bits.extend(upper);
    }
    let q = BoolFn::from_bits(n, &bits)?;
    let base = q_small.hamming_distance(&g.restrict_low(m)?)?;
    let bound = ((1u64 << n) - (1u64 << m)) / 2 + base;
    assert!(q.hamming_distance(g)? <= bound, "extension bound violated");
    Ok(q)
}
