//! Dense GF(2) matrices with at most 64 columns, one `u64` per row.
//!
//! Bit `j` of row `i` is entry `(i, j)`. Vectors are `u64` bit masks with
//! the same convention.

use std::fmt;

#[inline]
pub fn parity(v: u64) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Bit string with character `j` holding bit `j` (first variable first).
pub fn to_bitstring(v: u64, len: usize) -> String {
    (0..len).map(|j| if (v >> j) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Result<(u64, usize), String> {
    if s.len() > 64 {
        return Err(format!("bit string longer than 64: {s:?}"));
    }
    s.chars().enumerate().try_fold((0u64, 0usize), |(v, _), (j, c)| match c {
        '0' => Ok((v, j + 1)),
        '1' => Ok((v | 1 << j, j + 1)),
        _ => Err(format!("invalid character {c:?} in bit string {s:?}")),
    })
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 columns");
        BitMatrix { rows: vec![0; rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(rows: Vec<u64>, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 columns");
        let mask = col_mask(cols);
        assert!(rows.iter().all(|r| r & !mask == 0), "row wider than {cols} columns");
        BitMatrix { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn set_row(&mut self, i: usize, v: u64) {
        assert!(v & !col_mask(self.cols) == 0, "row wider than {} columns", self.cols);
        self.rows[i] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | (((r >> j) & 1) << i))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows() == self.cols && (0..self.cols).all(|j| self.column(j) == self.rows[j])
    }

    pub fn transpose(&self) -> BitMatrix {
        assert!(self.nrows() <= 64, "transpose needs at most 64 rows");
        let rows = (0..self.cols).map(|j| self.column(j)).collect();
        BitMatrix { rows, cols: self.nrows() }
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.nrows(), "inner dimensions differ");
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                (0..self.cols)
                    .filter(|&k| (r >> k) & 1 == 1)
                    .fold(0, |acc, k| acc ^ other.rows[k])
            })
            .collect();
        BitMatrix { rows, cols: other.cols }
    }

    /// `A·x` for a column vector `x` given as a mask over the columns.
    pub fn mul_vec(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | ((parity(r & x) as u64) << i))
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for j in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> j) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && (*r >> j) & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.nrows();
        if n != self.cols {
            return None;
        }
        let mut a = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for j in 0..n {
            let p = (j..n).find(|&i| (a[i] >> j) & 1 == 1)?;
            a.swap(j, p);
            inv.swap(j, p);
            for i in 0..n {
                if i != j && (a[i] >> j) & 1 == 1 {
                    a[i] ^= a[j];
                    inv[i] ^= inv[j];
                }
            }
        }
        Some(BitMatrix { rows: inv, cols: n })
    }

    /// Some `x` with `A·x = b`, free variables set to zero.
    pub fn solve(&self, b: u64) -> Option<u64> {
        let m = self.nrows();
        assert!(m <= 64, "solve needs at most 64 rows");
        let mut rows: Vec<(u64, bool)> =
            self.rows.iter().enumerate().map(|(i, &r)| (r, (b >> i) & 1 == 1)).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for j in 0..self.cols {
            let Some(p) = (rank..m).find(|&i| (rows[i].0 >> j) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && (r.0 >> j) & 1 == 1 {
                    r.0 ^= pivot.0;
                    r.1 ^= pivot.1;
                }
            }
            pivots.push(j);
            rank += 1;
        }
        if rows[rank..].iter().any(|r| r.1) {
            return None;
        }
        Some(
            pivots
                .iter()
                .enumerate()
                .filter(|&(i, _)| rows[i].1)
                .fold(0, |acc, (_, &j)| acc | (1 << j)),
        )
    }

    /// Basis of `{x : A·x = 0}`.
    pub fn nullspace(&self) -> Vec<u64> {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for j in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> j) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && (*r >> j) & 1 == 1 {
                    *r ^= pivot;
                }
            }
            pivots.push(j);
            rank += 1;
        }
        (0..self.cols)
            .filter(|j| !pivots.contains(j))
            .map(|free| {
                pivots
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| (rows[i] >> free) & 1 == 1)
                    .fold(1u64 << free, |acc, (_, &j)| acc | (1 << j))
            })
            .collect()
    }
}

fn col_mask(cols: usize) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.cols)?;
        for &r in &self.rows {
            let s: String = (0..self.cols).map(|j| if (r >> j) & 1 == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
        proptest::collection::vec(0u64..(1 << cols), rows)
            .prop_map(move |r| BitMatrix::from_rows(r, cols))
    }

    #[test]
    fn bitstrings() {
        assert_eq!(to_bitstring(0b001, 3), "100");
        assert_eq!(parse_bitstring("100").unwrap(), (1, 3));
        assert_eq!(parse_bitstring("").unwrap(), (0, 0));
        assert!(parse_bitstring("102").is_err());
    }

    #[test]
    fn identity_rank_and_inverse() {
        let i = BitMatrix::identity(5);
        assert_eq!(i.rank(), 5);
        assert_eq!(i.inverse().unwrap(), i);
        let singular = BitMatrix::from_rows(vec![0b11, 0b11], 2);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(m in matrix(5, 5)) {
            if let Some(inv) = m.inverse() {
                prop_assert_eq!(m.mul(&inv), BitMatrix::identity(5));
                prop_assert_eq!(inv.mul(&m), BitMatrix::identity(5));
                prop_assert_eq!(m.rank(), 5);
            } else {
                prop_assert!(m.rank() < 5);
            }
        }

        #[test]
        fn solve_finds_preimage(m in matrix(6, 4), x in 0u64..16) {
            let b = m.mul_vec(x);
            let y = m.solve(b).unwrap();
            prop_assert_eq!(m.mul_vec(y), b);
        }

        #[test]
        fn nullspace_dimension(m in matrix(4, 7)) {
            let ns = m.nullspace();
            prop_assert_eq!(ns.len() + m.rank(), 7);
            for v in &ns {
                prop_assert_eq!(m.mul_vec(*v), 0);
            }
            prop_assert_eq!(BitMatrix::from_rows(ns.clone(), 7).rank(), ns.len());
        }

        #[test]
        fn transpose_rank(m in matrix(5, 8)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}
