//! Boolean functions and their three representations: truth table,
//! algebraic normal form, and the real-linear expansion over the parity
//! functions `φ_a(x) = a·x mod 2`.
//!
//! Input `x` is encoded as an integer index with `x_1` in the least
//! significant bit. A mask `a` uses the same encoding.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::gf2::{parity, BitMatrix};

pub const MAX_TABLE_ARITY: usize = 24;
pub const MAX_SPECTRAL_ARITY: usize = 20;

/// `φ_a(x)`.
#[inline]
pub fn phi(a: usize, x: usize) -> u8 {
    parity((a & x) as u64)
}

#[inline]
pub fn weight(v: usize) -> u32 {
    v.count_ones()
}

fn check_arity(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::ArityOutOfRange { n, min: 1, max });
    }
    Ok(())
}

fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

fn top_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// In-place GF(2) Möbius transform on a packed table of `2^n` bits. It is
/// an involution, so the same routine maps table to ANF and back.
fn mobius_bits(words: &mut [u64], n: usize) {
    const LOW: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for w in words.iter_mut() {
        for (j, &low) in LOW.iter().enumerate().take(n.min(6)) {
            *w ^= (*w & low) << (1 << j);
        }
    }
    for j in 6..n {
        let step = 1 << (j - 6);
        for base in (0..words.len()).step_by(2 * step) {
            for k in base..base + step {
                words[k + step] ^= words[k];
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    n: usize,
    table: Vec<u64>,
}

impl BoolFn {
    pub fn zero(n: usize) -> Result<Self> {
        check_arity(n, MAX_TABLE_ARITY)?;
        Ok(BoolFn { n, table: vec![0; words_for(n)] })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut g = Self::zero(n)?;
        for i in 0..1usize << n {
            if f(i) {
                g.table[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(g)
    }

    /// Packed table words; bits past `2^n` must be clear.
    pub fn from_words(n: usize, table: Vec<u64>) -> Result<Self> {
        check_arity(n, MAX_TABLE_ARITY)?;
        if table.len() != words_for(n) {
            return Err(Error::DimensionMismatch { expected: words_for(n), got: table.len() });
        }
        if table[0] & !top_mask(n) != 0 {
            return Err(Error::Invalid("truth table has bits beyond 2^n".into()));
        }
        Ok(BoolFn { n, table })
    }

    pub fn from_bits(n: usize, bits: &[u8]) -> Result<Self> {
        check_arity(n, MAX_TABLE_ARITY)?;
        if bits.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: bits.len() });
        }
        Self::from_fn(n, |i| bits[i] & 1 == 1)
    }

    pub fn constant(n: usize, v: bool) -> Result<Self> {
        let mut f = Self::zero(n)?;
        if v {
            f = f.complement();
        }
        Ok(f)
    }

    pub fn linear(n: usize, a: usize) -> Result<Self> {
        Self::from_fn(n, |x| phi(a, x) == 1)
    }

    pub fn and_n(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x == (1 << n) - 1)
    }

    pub fn delta(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x == 0)
    }

    pub fn majority(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| 2 * weight(x) as usize > n)
    }

    /// `Σ^n_k`: the sum of all degree-`k` monomials, i.e. `C(W(x), k) mod 2`.
    pub fn elementary_symmetric(n: usize, k: usize) -> Result<Self> {
        check_arity(n, MAX_TABLE_ARITY)?;
        if k == 0 || k > n {
            return Err(Error::OrderOutOfRange { k, n });
        }
        // Lucas: C(w, k) is odd iff k's bits are a subset of w's.
        Self::from_fn(n, |x| {
            let w = weight(x) as usize;
            w & k == k
        })
    }

    pub fn from_anf(n: usize, expr: &str) -> Result<Self> {
        Ok(Anf::parse(n, expr)?.to_bool_fn())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, i: usize) -> bool {
        (self.table[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.eval(i) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    pub fn weight(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn xor(&self, other: &BoolFn) -> Result<BoolFn> {
        self.same_arity(other)?;
        let table = self.table.iter().zip(&other.table).map(|(a, b)| a ^ b).collect();
        Ok(BoolFn { n: self.n, table })
    }

    pub fn complement(&self) -> BoolFn {
        let mut table: Vec<u64> = self.table.iter().map(|w| !w).collect();
        table[0] &= top_mask(self.n);
        BoolFn { n: self.n, table }
    }

    fn same_arity(&self, other: &BoolFn) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn to_anf(&self) -> Anf {
        let mut coeffs = self.table.clone();
        mobius_bits(&mut coeffs, self.n);
        Anf { n: self.n, coeffs }
    }

    /// Algebraic degree; the zero function has degree 0.
    pub fn degree(&self) -> usize {
        self.to_anf().degree()
    }

    pub fn hamming_distance(&self, other: &BoolFn) -> Result<u64> {
        Ok(self.xor(other)?.weight())
    }

    /// `g(i) = f(P·i ⊕ shift)`.
    pub fn apply_affine(&self, p: &BitMatrix, shift: usize) -> Result<BoolFn> {
        if p.nrows() != self.n || p.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.nrows() });
        }
        if p.inverse().is_none() {
            return Err(Error::SingularMatrix);
        }
        Self::from_fn(self.n, |i| self.eval(p.mul_vec(i as u64) as usize ^ shift))
    }

    /// Restriction to the first `m` variables with the rest fixed to zero.
    pub fn restrict_low(&self, m: usize) -> Result<BoolFn> {
        if m > self.n {
            return Err(Error::ArityMismatch { left: m, right: self.n });
        }
        Self::from_fn(m, |i| self.eval(i))
    }

    /// Truth table as a hex integer whose bit `i` is `f(i)`, most significant
    /// digit first, padded to `ceil(2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nib = (0..4)
                    .filter(|&b| 4 * d + b < self.len() && self.eval(4 * d + b))
                    .fold(0u32, |acc, b| acc | (1 << b));
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<BoolFn> {
        check_arity(n, MAX_TABLE_ARITY)?;
        let body = hex.trim();
        let body = body.strip_prefix("0x").unwrap_or(body);
        let mut f = Self::zero(n)?;
        for (pos, ch) in body.chars().rev().enumerate() {
            let nib = ch.to_digit(16).ok_or_else(|| Error::Parse {
                pos: body.len() - 1 - pos,
                msg: format!("invalid hex digit {ch:?}"),
            })?;
            for b in 0..4 {
                if (nib >> b) & 1 == 1 {
                    let i = 4 * pos + b;
                    if i >= f.len() {
                        return Err(Error::Invalid(format!("hex table sets bit {i} >= 2^{n}")));
                    }
                    f.table[i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(f)
    }

    pub fn walsh_inverse(&self) -> Result<WalshSpectrum> {
        check_arity(self.n, MAX_SPECTRAL_ARITY)?;
        let values: Vec<Dyadic> = (0..self.len()).map(|i| Dyadic::from_int(self.bit(i) as i64)).collect();
        Ok(WalshSpectrum::from_values(self.n, &values))
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFn(n={}, tt=0x{})", self.n, self.to_hex())
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_anf(), f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Anf {
    n: usize,
    coeffs: Vec<u64>,
}

impl Anf {
    pub fn from_monomials(n: usize, monomials: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut a = Anf { n, coeffs: BoolFn::zero(n)?.table };
        for b in monomials {
            if b >= 1 << n {
                return Err(Error::Invalid(format!("monomial {b:#b} exceeds arity {n}")));
            }
            a.coeffs[b / 64] ^= 1 << (b % 64);
        }
        Ok(a)
    }

    pub fn parse(n: usize, expr: &str) -> Result<Self> {
        check_arity(n, MAX_TABLE_ARITY)?;
        Parser { src: expr.as_bytes(), pos: 0, n }.parse()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, b: usize) -> bool {
        (self.coeffs[b / 64] >> (b % 64)) & 1 == 1
    }

    pub fn monomials(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.n).filter(|&b| self.coeff(b))
    }

    pub fn degree(&self) -> usize {
        self.monomials().map(|b| weight(b) as usize).max().unwrap_or(0)
    }

    pub fn to_bool_fn(&self) -> BoolFn {
        let mut table = self.coeffs.clone();
        mobius_bits(&mut table, self.n);
        BoolFn { n: self.n, table }
    }
}

impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .monomials()
            .map(|b| {
                if b == 0 {
                    "1".to_string()
                } else {
                    (0..self.n)
                        .filter(|j| (b >> j) & 1 == 1)
                        .map(|j| format!("x{}", j + 1))
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Anf(n={}, {})", self.n, self)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn parse(mut self) -> Result<Anf> {
        let mut anf = Anf::from_monomials(self.n, [])?;
        loop {
            if let Some(b) = self.term()? {
                anf.coeffs[b / 64] ^= 1 << (b % 64);
            }
            self.skip_ws();
            match self.src.get(self.pos) {
                None => return Ok(anf),
                Some(b'+') => self.pos += 1,
                Some(&c) => return Err(self.err(format!("unexpected {:?}", c as char))),
            }
        }
    }

    /// A product term; `None` when a literal `0` annihilates it.
    fn term(&mut self) -> Result<Option<usize>> {
        let mut mono = Some(0usize);
        loop {
            self.skip_ws();
            match self.src.get(self.pos) {
                Some(b'0') => {
                    self.pos += 1;
                    mono = None;
                }
                Some(b'1') => self.pos += 1,
                Some(b'x') => {
                    self.pos += 1;
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if start == self.pos {
                        return Err(self.err("expected variable index after 'x'"));
                    }
                    let index: usize = std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .parse()
                        .map_err(|_| self.err("variable index too large"))?;
                    if index == 0 || index > self.n {
                        return Err(Error::VariableOutOfRange { index, n: self.n });
                    }
                    mono = mono.map(|m| m | 1 << (index - 1));
                }
                Some(&c) => return Err(self.err(format!("unexpected {:?}", c as char))),
                None => return Err(self.err("unexpected end of expression")),
            }
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'*') {
                self.pos += 1;
            } else {
                return Ok(mono);
            }
        }
    }
}

/// `+1` if `a = b = 0`, otherwise `(−1)^(a·b − 1)`.
pub fn symmetric_product(b: usize, a: usize) -> i8 {
    if (a == 0 && b == 0) || phi(a, b) == 1 {
        1
    } else {
        -1
    }
}

/// Real polynomial in the monomial basis `π_b(x) = Π_{j∈b} x_j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealPoly {
    n: usize,
    coeffs: Vec<Dyadic>,
}

impl RealPoly {
    pub fn zero(n: usize) -> Result<Self> {
        check_arity(n, MAX_SPECTRAL_ARITY)?;
        Ok(RealPoly { n, coeffs: vec![Dyadic::ZERO; 1 << n] })
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Dyadic>) -> Result<Self> {
        check_arity(n, MAX_SPECTRAL_ARITY)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: coeffs.len() });
        }
        Ok(RealPoly { n, coeffs })
    }

    /// Unique multilinear interpolation of the given pointwise values.
    pub fn interpolate(n: usize, values: &[Dyadic]) -> Result<Self> {
        let mut coeffs = values.to_vec();
        let mut p = Self::zero(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: coeffs.len() });
        }
        for j in 0..n {
            for b in 0..1usize << n {
                if (b >> j) & 1 == 1 {
                    coeffs[b] = coeffs[b] - coeffs[b ^ (1 << j)];
                }
            }
        }
        p.coeffs = coeffs;
        Ok(p)
    }

    pub fn of_bool_fn(f: &BoolFn) -> Result<Self> {
        let values: Vec<Dyadic> = (0..f.len()).map(|i| Dyadic::from_int(f.bit(i) as i64)).collect();
        Self::interpolate(f.n(), &values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn coeff(&self, b: usize) -> Dyadic {
        self.coeffs[b]
    }

    pub fn set(&mut self, b: usize, v: Dyadic) {
        self.coeffs[b] = v;
    }

    pub fn add(&self, other: &RealPoly) -> Result<RealPoly> {
        if self.n != other.n {
            return Err(Error::ArityMismatch { left: self.n, right: other.n });
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect();
        Ok(RealPoly { n: self.n, coeffs })
    }

    pub fn scale(&self, k: Dyadic) -> RealPoly {
        RealPoly { n: self.n, coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn eval(&self, x: usize) -> Dyadic {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|&(b, c)| b & x == b && !c.is_zero())
            .map(|(_, &c)| c)
            .sum()
    }

    /// Values at every point of `Z2^n` (subset-sum transform).
    pub fn pointwise(&self) -> Vec<Dyadic> {
        let mut v = self.coeffs.clone();
        for j in 0..self.n {
            for x in 0..1usize << self.n {
                if (x >> j) & 1 == 1 {
                    v[x] = v[x] + v[x ^ (1 << j)];
                }
            }
        }
        v
    }

    /// Reduction of integer coefficients mod 2; `None` if some coefficient
    /// is not an integer.
    pub fn to_anf(&self) -> Option<Anf> {
        if !self.coeffs.iter().all(|c| c.is_integer()) {
            return None;
        }
        let odd = (0..self.coeffs.len()).filter(|&b| self.coeffs[b].num() % 2 != 0);
        Anf::from_monomials(self.n, odd).ok()
    }

    pub fn to_spectrum(&self) -> WalshSpectrum {
        WalshSpectrum::from_values(self.n, &self.pointwise())
    }
}

/// `φ_a` in the monomial basis: coefficient `(−2)^(W(b)−1)` on every
/// nonzero `b ⊆ a`.
pub fn linear_to_monomials(n: usize, a: usize) -> Result<RealPoly> {
    if a == 0 {
        return Err(Error::ZeroMask);
    }
    let mut p = RealPoly::zero(n)?;
    if a >= 1 << n {
        return Err(Error::Invalid(format!("mask {a:#b} exceeds arity {n}")));
    }
    // Enumerate nonzero submasks of a.
    let mut b = a;
    while b != 0 {
        let w = weight(b) as i64;
        let mag = 1i64 << (w - 1);
        p.coeffs[b] = Dyadic::from_int(if w % 2 == 1 { mag } else { -mag });
        b = (b - 1) & a;
    }
    Ok(p)
}

/// Coefficients `C_a` of `Σ_a C_a φ_a` with `φ_0 := 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WalshSpectrum {
    n: usize,
    coeffs: Vec<Dyadic>,
}

impl WalshSpectrum {
    pub fn from_coeffs(n: usize, coeffs: Vec<Dyadic>) -> Result<Self> {
        check_arity(n, MAX_SPECTRAL_ARITY)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, got: coeffs.len() });
        }
        Ok(WalshSpectrum { n, coeffs })
    }

    /// Expansion of the real function with the given pointwise values:
    /// `C_0 = g(0)` and `C_a = −2·ĝ(a)` with `ĝ(a) = 2^−n Σ_x g(x)(−1)^(a·x)`.
    pub fn from_values(n: usize, values: &[Dyadic]) -> Self {
        assert_eq!(values.len(), 1 << n);
        let k = values.iter().map(|v| v.log2den()).max().unwrap_or(0);
        let mut h: Vec<i128> = values.iter().map(|v| v.scaled_num(k).unwrap()).collect();
        fwht(&mut h);
        let mut coeffs: Vec<Dyadic> = h
            .iter()
            .map(|&s| {
                let v = i64::try_from(-s).expect("spectrum overflow");
                Dyadic::new(v, n as u32 + k - 1)
            })
            .collect();
        coeffs[0] = values[0];
        WalshSpectrum { n, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn coeff(&self, a: usize) -> Dyadic {
        self.coeffs[a]
    }

    /// Masks `a ≠ 0` whose coefficient is nonzero mod 2.
    pub fn support(&self) -> Vec<usize> {
        (1..self.coeffs.len()).filter(|&a| !self.coeffs[a].rem2().is_zero()).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support().len()
    }

    pub fn eval(&self, x: usize) -> Dyadic {
        self.coeffs[0]
            + (1..self.coeffs.len())
                .filter(|&a| phi(a, x) == 1)
                .map(|a| self.coeffs[a])
                .sum::<Dyadic>()
    }

    pub fn pointwise(&self) -> Vec<Dyadic> {
        // Σ_{a≠0} C_a φ_a(x) = S/2 − ½ Σ_{a≠0} C_a (−1)^(a·x).
        let k = self.coeffs.iter().map(|v| v.log2den()).max().unwrap_or(0);
        let mut h: Vec<i128> = self.coeffs.iter().map(|v| v.scaled_num(k).unwrap()).collect();
        h[0] = 0;
        let total: i128 = h.iter().sum();
        fwht(&mut h);
        h.iter()
            .map(|&s| {
                let v = i64::try_from(total - s).expect("spectrum overflow");
                self.coeffs[0] + Dyadic::new(v, k + 1)
            })
            .collect()
    }

    /// The Boolean function this spectrum evaluates to mod 2, or the first
    /// input whose value is not an integer.
    pub fn to_bool_fn(&self) -> std::result::Result<BoolFn, (usize, Dyadic)> {
        let values = self.pointwise();
        if let Some((x, v)) = values.iter().enumerate().find(|(_, v)| !v.is_integer()) {
            return Err((x, v.rem2()));
        }
        Ok(BoolFn::from_fn(self.n, |x| values[x].num().rem_euclid(2) == 1).unwrap())
    }

    pub fn walsh_forward(&self) -> RealPoly {
        RealPoly::interpolate(self.n, &self.pointwise()).unwrap()
    }
}

pub fn walsh_inverse(f: &BoolFn) -> Result<WalshSpectrum> {
    f.walsh_inverse()
}

pub fn walsh_forward(s: &WalshSpectrum) -> RealPoly {
    s.walsh_forward()
}

/// Unnormalized Walsh–Hadamard transform.
fn fwht(h: &mut [i128]) {
    let mut len = 1;
    while len < h.len() {
        for base in (0..h.len()).step_by(2 * len) {
            for i in base..base + len {
                let (a, b) = (h[i], h[i + len]);
                h[i] = a + b;
                h[i + len] = a - b;
            }
        }
        len *= 2;
    }
}

/// Wire format for a function: `{"n", "anf"}` or `{"n", "tt_hex"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionJson {
    Anf { n: usize, anf: String },
    Hex { n: usize, tt_hex: String },
}

impl FunctionJson {
    pub fn to_bool_fn(&self) -> Result<BoolFn> {
        match self {
            FunctionJson::Anf { n, anf } => BoolFn::from_anf(*n, anf),
            FunctionJson::Hex { n, tt_hex } => BoolFn::from_hex(*n, tt_hex),
        }
    }

    pub fn anf_of(f: &BoolFn) -> Self {
        FunctionJson::Anf { n: f.n(), anf: f.to_anf().to_string() }
    }

    pub fn hex_of(f: &BoolFn) -> Self {
        FunctionJson::Hex { n: f.n(), tt_hex: f.to_hex() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: i64, k: u32) -> Dyadic {
        Dyadic::new(n, k)
    }

    fn arb_fn(max_n: usize) -> impl Strategy<Value = BoolFn> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(any::<u64>(), words_for(n)).prop_map(move |mut w| {
                w[0] &= top_mask(n);
                BoolFn::from_words(n, w).unwrap()
            })
        })
    }

    /// Evaluates an ANF by brute force: sum of monomials present.
    fn anf_eval_oracle(anf: &Anf, x: usize) -> bool {
        anf.monomials().filter(|&b| b & x == b).count() % 2 == 1
    }

    #[test]
    fn parse_examples() {
        assert_eq!(BoolFn::from_anf(2, "x1*x2 + x1 + x2").unwrap().bits(), [0, 1, 1, 1]);
        assert_eq!(BoolFn::from_anf(3, "0").unwrap().weight(), 0);
        assert_eq!(BoolFn::from_anf(2, "1 + x1 + x2 + x1*x2").unwrap().bits(), [1, 0, 0, 0]);
        assert_eq!(BoolFn::from_anf(2, "x1*0 + x2*1").unwrap(), BoolFn::linear(2, 0b10).unwrap());
        assert_eq!(BoolFn::from_anf(2, "x1 + x1").unwrap().weight(), 0);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(BoolFn::from_anf(2, "x3"), Err(Error::VariableOutOfRange { index: 3, n: 2 }));
        assert_eq!(BoolFn::from_anf(2, "x0"), Err(Error::VariableOutOfRange { index: 0, n: 2 }));
        assert!(matches!(BoolFn::from_anf(2, "x1 + y"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(BoolFn::from_anf(2, "x1 +"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(BoolFn::from_anf(2, "x*x1"), Err(Error::Parse { pos: 1, .. })));
    }

    #[test]
    fn anf_examples() {
        let delta = BoolFn::delta(2).unwrap();
        assert_eq!(delta.to_anf().monomials().collect::<Vec<_>>(), [0, 1, 2, 3]);
        let one = BoolFn::constant(3, true).unwrap();
        assert_eq!(one.to_anf().monomials().collect::<Vec<_>>(), [0]);
        let and2 = BoolFn::and_n(2).unwrap();
        assert_eq!(and2.to_anf().monomials().collect::<Vec<_>>(), [3]);
        assert_eq!(and2.to_anf().to_string(), "x1*x2");
        assert_eq!(BoolFn::zero(3).unwrap().to_anf().to_string(), "0");
    }

    #[test]
    fn degree_examples() {
        for n in 1..=8 {
            assert_eq!(BoolFn::and_n(n).unwrap().degree(), n);
            assert_eq!(BoolFn::delta(n).unwrap().degree(), n);
        }
        assert_eq!(BoolFn::linear(2, 0b11).unwrap().degree(), 1);
        assert_eq!(BoolFn::zero(4).unwrap().degree(), 0);
    }

    #[test]
    fn hamming_examples() {
        let and2 = BoolFn::and_n(2).unwrap();
        let or2 = BoolFn::from_anf(2, "x1*x2 + x1 + x2").unwrap();
        assert_eq!(and2.hamming_distance(&and2).unwrap(), 0);
        assert_eq!(and2.hamming_distance(&and2.complement()).unwrap(), 4);
        assert_eq!(and2.hamming_distance(&or2).unwrap(), 2);
        let f3 = BoolFn::zero(3).unwrap();
        assert!(matches!(and2.hamming_distance(&f3), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn symmetric_product_examples() {
        assert_eq!(symmetric_product(0, 0), 1);
        assert_eq!(symmetric_product(0b1, 0b1), 1);
        assert_eq!(symmetric_product(0b10, 0b1), -1);
        assert_eq!(symmetric_product(0, 0b11), -1);
    }

    /// Sylvester Hadamard matrix entry `(−1)^(a·b)`.
    fn hadamard(a: usize, b: usize) -> i64 {
        if phi(a, b) == 1 {
            -1
        } else {
            1
        }
    }

    #[test]
    fn symmetric_product_matrix_structure() {
        // The literal product matrix is −H everywhere except at (0,0), where
        // it is +1. H itself satisfies H·Hᵀ = 2^n·I.
        for n in 1..=6 {
            let size = 1usize << n;
            for a in 0..size {
                for b in 0..size {
                    let lit = symmetric_product(b, a) as i64;
                    if a == 0 && b == 0 {
                        assert_eq!(lit, 1);
                    } else {
                        assert_eq!(lit, -hadamard(a, b));
                    }
                }
            }
            for a in 0..size {
                for c in 0..size {
                    let dot: i64 = (0..size).map(|b| hadamard(a, b) * hadamard(c, b)).sum();
                    assert_eq!(dot, if a == c { size as i64 } else { 0 });
                }
            }
        }
        // At n = 1 the literal matrix is singular, hence not orthogonal.
        let m = [[symmetric_product(0, 0), symmetric_product(0, 1)], [symmetric_product(1, 0), symmetric_product(1, 1)]];
        assert_eq!(m, [[1, -1], [-1, 1]]);
    }

    #[test]
    fn linear_to_monomials_examples() {
        let p = linear_to_monomials(2, 0b01).unwrap();
        assert_eq!(p.coeffs(), [d(0, 0), d(1, 0), d(0, 0), d(0, 0)]);
        let p = linear_to_monomials(2, 0b11).unwrap();
        assert_eq!(p.coeffs(), [d(0, 0), d(1, 0), d(1, 0), d(-2, 0)]);
        let p = linear_to_monomials(3, 0b111).unwrap();
        for b in 1..8usize {
            let expect = match weight(b) {
                1 => 1,
                2 => -2,
                _ => 4,
            };
            assert_eq!(p.coeff(b), Dyadic::from_int(expect));
        }
        assert_eq!(linear_to_monomials(2, 0), Err(Error::ZeroMask));
    }

    #[test]
    fn linear_to_monomials_evaluates_to_parity() {
        for n in 1..=6 {
            for a in 1..1usize << n {
                let p = linear_to_monomials(n, a).unwrap();
                for x in 0..1usize << n {
                    // Direct evaluation independent of the subset-sum transform.
                    let direct: i64 = (0..1usize << n)
                        .filter(|&b| b & x == b)
                        .map(|b| p.coeff(b).num())
                        .sum();
                    assert_eq!(direct, phi(a, x) as i64);
                }
            }
        }
    }

    #[test]
    fn walsh_examples() {
        let and2 = BoolFn::and_n(2).unwrap().walsh_inverse().unwrap();
        assert_eq!(and2.coeffs(), [d(0, 0), d(1, 1), d(1, 1), d(-1, 1)]);
        let delta = BoolFn::delta(2).unwrap().walsh_inverse().unwrap();
        assert_eq!(delta.coeffs(), [d(1, 0), d(-1, 1), d(-1, 1), d(-1, 1)]);
        for a in 1..8 {
            let s = BoolFn::linear(3, a).unwrap().walsh_inverse().unwrap();
            for b in 0..8 {
                assert_eq!(s.coeff(b), Dyadic::from_int((a == b) as i64));
            }
        }
    }

    #[test]
    fn walsh_forward_examples() {
        for a in 1..8 {
            let s = BoolFn::linear(3, a).unwrap().walsh_inverse().unwrap();
            assert_eq!(s.walsh_forward(), linear_to_monomials(3, a).unwrap());
        }
        let s = BoolFn::and_n(2).unwrap().walsh_inverse().unwrap();
        assert_eq!(s.walsh_forward().coeffs(), [d(0, 0), d(0, 0), d(0, 0), d(1, 0)]);
        let zero = WalshSpectrum::from_coeffs(3, vec![Dyadic::ZERO; 8]).unwrap();
        assert!(zero.walsh_forward().coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn apply_affine_examples() {
        let and2 = BoolFn::and_n(2).unwrap();
        let id = BitMatrix::identity(2);
        assert_eq!(and2.apply_affine(&id, 0).unwrap(), and2);
        let swap = BitMatrix::from_rows(vec![0b10, 0b01], 2);
        assert_eq!(and2.apply_affine(&swap, 0).unwrap(), and2);
        let delta = BoolFn::delta(3).unwrap();
        let id3 = BitMatrix::identity(3);
        for j in 0..8 {
            let g = delta.apply_affine(&id3, j).unwrap();
            assert_eq!(g, BoolFn::from_fn(3, |i| i == j).unwrap());
        }
        let singular = BitMatrix::from_rows(vec![0b11, 0b11], 2);
        assert_eq!(and2.apply_affine(&singular, 0), Err(Error::SingularMatrix));
    }

    #[test]
    fn elementary_symmetric_examples() {
        for n in 1..=6 {
            let parity = BoolFn::from_fn(n, |x| weight(x) % 2 == 1).unwrap();
            assert_eq!(BoolFn::elementary_symmetric(n, 1).unwrap(), parity);
        }
        assert_eq!(BoolFn::elementary_symmetric(2, 2).unwrap(), BoolFn::and_n(2).unwrap());
        let s32 = BoolFn::elementary_symmetric(3, 2).unwrap();
        assert_eq!(s32.to_anf().monomials().collect::<Vec<_>>(), [0b011, 0b101, 0b110]);
        assert!(BoolFn::elementary_symmetric(3, 0).is_err());
        assert!(BoolFn::elementary_symmetric(3, 4).is_err());
        // Cross-check the Lucas shortcut against explicit subset enumeration.
        for n in 1..=7 {
            for k in 1..=n {
                let mono = (0..1usize << n).filter(|&b| weight(b) as usize == k);
                let anf = Anf::from_monomials(n, mono).unwrap();
                assert_eq!(anf.to_bool_fn(), BoolFn::elementary_symmetric(n, k).unwrap());
            }
        }
    }

    #[test]
    fn hex_round_trip_and_convention() {
        let or2 = BoolFn::from_anf(2, "x1*x2 + x1 + x2").unwrap();
        assert_eq!(or2.to_hex(), "e");
        assert_eq!(BoolFn::and_n(3).unwrap().to_hex(), "80");
        assert_eq!(BoolFn::from_hex(2, "0xe").unwrap(), or2);
        assert!(BoolFn::from_hex(2, "1e").is_err());
        assert!(BoolFn::from_hex(2, "g").is_err());
    }

    #[test]
    fn function_json() {
        let f: FunctionJson = serde_json::from_str(r#"{"n":2,"anf":"x1*x2"}"#).unwrap();
        assert_eq!(f.to_bool_fn().unwrap(), BoolFn::and_n(2).unwrap());
        let g: FunctionJson = serde_json::from_str(r#"{"n":2,"tt_hex":"8"}"#).unwrap();
        assert_eq!(g.to_bool_fn().unwrap(), BoolFn::and_n(2).unwrap());
    }

    #[test]
    fn arity_caps() {
        assert!(BoolFn::zero(0).is_err());
        assert!(BoolFn::zero(25).is_err());
        let big = BoolFn::zero(21).unwrap();
        assert!(big.walsh_inverse().is_err());
    }

    proptest! {
        #[test]
        fn anf_round_trip(f in arb_fn(10)) {
            let anf = f.to_anf();
            prop_assert_eq!(anf.to_bool_fn(), f.clone());
            let reparsed = BoolFn::from_anf(f.n(), &anf.to_string()).unwrap();
            prop_assert_eq!(&reparsed, &f);
            for x in (0..f.len()).step_by(7) {
                prop_assert_eq!(anf_eval_oracle(&anf, x), f.eval(x));
            }
        }

        #[test]
        fn walsh_round_trip(f in arb_fn(10)) {
            let s = f.walsh_inverse().unwrap();
            prop_assert_eq!(s.coeff(0), Dyadic::from_int(f.bit(0) as i64));
            prop_assert!(s.coeffs().iter().all(|c| (c.log2den() as usize) < f.n()));
            let values = s.pointwise();
            for x in 0..f.len() {
                prop_assert_eq!(values[x], Dyadic::from_int(f.bit(x) as i64));
            }
            let poly = s.walsh_forward();
            prop_assert_eq!(&poly, &RealPoly::of_bool_fn(&f).unwrap());
            prop_assert_eq!(poly.to_anf().unwrap(), f.to_anf());
            prop_assert_eq!(s.to_bool_fn().unwrap(), f);
        }

        #[test]
        fn walsh_pointwise_matches_direct_sum(f in arb_fn(5)) {
            let s = f.walsh_inverse().unwrap();
            for x in 0..f.len() {
                prop_assert_eq!(s.eval(x), Dyadic::from_int(f.bit(x) as i64));
            }
        }

        #[test]
        fn forward_is_sum_of_linear_images(f in arb_fn(5)) {
            // Independent route: Σ_a C_a · linear_to_monomials(a) plus C_0.
            let s = f.walsh_inverse().unwrap();
            let mut acc = RealPoly::zero(f.n()).unwrap();
            acc.set(0, s.coeff(0));
            for a in 1..f.len() {
                if !s.coeff(a).is_zero() {
                    acc = acc.add(&linear_to_monomials(f.n(), a).unwrap().scale(s.coeff(a))).unwrap();
                }
            }
            prop_assert_eq!(acc, s.walsh_forward());
        }

        #[test]
        fn hamming_is_metric(f in arb_fn(6)) {
            let n = f.n();
            let g = f.complement().xor(&BoolFn::linear(n, 1).unwrap()).unwrap();
            let h = BoolFn::majority(n).unwrap();
            prop_assert_eq!(f.hamming_distance(&g).unwrap(), g.hamming_distance(&f).unwrap());
            prop_assert_eq!(f.hamming_distance(&f).unwrap(), 0);
            prop_assert!(f.hamming_distance(&h).unwrap() <= f.hamming_distance(&g).unwrap() + g.hamming_distance(&h).unwrap());
            prop_assert_eq!(f.hamming_distance(&g).unwrap() == 0, f == g);
        }

        #[test]
        fn hex_round_trip(f in arb_fn(9)) {
            prop_assert_eq!(BoolFn::from_hex(f.n(), &f.to_hex()).unwrap(), f);
        }
    }
}
