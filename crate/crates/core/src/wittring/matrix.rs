use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::Rng;

use super::{Valuation, WittElem, WittRing};
use crate::error::{Error, Result};

/// Dense row-major matrix over a truncated Witt ring.
#[derive(Clone, PartialEq, Eq)]
pub struct WittMatrix {
    ring: WittRing,
    rows: usize,
    cols: usize,
    entries: Vec<WittElem>,
}

impl WittMatrix {
    pub fn zero(ring: &WittRing, rows: usize, cols: usize) -> Self {
        WittMatrix { ring: ring.clone(), rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &WittRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &WittRing, rows: Vec<Vec<WittElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        let entries: Vec<WittElem> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| e.ring() != ring) {
            return Err(Error::RingMismatch);
        }
        Ok(WittMatrix { ring: ring.clone(), rows: r, cols: c, entries })
    }

    /// Matrix with entries in Z (embedded as Z/p^N ⊂ W).
    pub fn from_ints(ring: &WittRing, rows: &[&[i64]]) -> Self {
        let vals = rows.iter().map(|row| row.iter().map(|&v| ring.from_int(v)).collect()).collect();
        Self::from_rows(ring, vals).expect("rectangular integer matrix")
    }

    pub fn diagonal(ring: &WittRing, diag: &[WittElem]) -> Self {
        let mut m = Self::zero(ring, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(ring: &WittRing, rows: usize, cols: usize, rng: &mut R) -> Self {
        let entries = (0..rows * cols).map(|_| ring.random_elem(rng)).collect();
        WittMatrix { ring: ring.clone(), rows, cols, entries }
    }

    /// Uniformly random element of GL_n(W) at this precision.
    pub fn random_unit<R: Rng + ?Sized>(ring: &WittRing, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(ring, n, n, rng);
            if super::linalg::det(&m).is_unit() {
                return m;
            }
        }
    }

    pub fn ring(&self) -> &WittRing {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &WittElem {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: WittElem) {
        debug_assert!(v.ring() == &self.ring);
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[WittElem] {
        &self.entries
    }

    pub fn row_vecs(&self) -> Vec<Vec<WittElem>> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(<[_]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(WittElem::is_zero)
    }

    /// Minimum valuation over all entries.
    pub fn min_val(&self) -> Valuation {
        self.entries.iter().map(WittElem::val).min().unwrap_or(Valuation::AtLeastPrecision)
    }

    /// Entry-wise Frobenius σ(M).
    pub fn frobenius(&self) -> Self {
        self.map(WittElem::frobenius)
    }

    pub fn frobenius_pow(&self, k: usize) -> Self {
        self.map(|e| e.frobenius_pow(k))
    }

    pub fn map(&self, f: impl Fn(&WittElem) -> WittElem) -> Self {
        WittMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &WittElem) -> Self {
        self.map(|e| e * c)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(&self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zero(&self.ring, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn columns(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, cols)
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zero(&self.ring, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    /// Block-diagonal sum; both blocks must live in the same ring.
    pub fn block_diag(blocks: &[&WittMatrix]) -> Result<Self> {
        let ring = blocks.first().ok_or_else(|| Error::InvalidInput("no blocks".into()))?.ring.clone();
        if blocks.iter().any(|b| b.ring != ring) {
            return Err(Error::RingMismatch);
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zero(&ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(r0 + r, c0 + c, b.get(r, c).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Reduces every entry into `ring` (lower precision, same residue field).
    pub fn reduce_to(&self, ring: &WittRing) -> Self {
        WittMatrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.reduce_to(ring)).collect(),
        }
    }

    pub fn lift_to(&self, ring: &WittRing) -> Self {
        WittMatrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.lift_to(ring)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(&self.ring, self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &WittElem) {
        for c in 0..self.cols {
            let v = self.get(dst, c) + &(factor * self.get(src, c));
            self.set(dst, c, v);
        }
    }

    /// col[dst] += factor * col[src]
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &WittElem) {
        for r in 0..self.rows {
            let v = self.get(r, dst) + &(self.get(r, src) * factor);
            self.set(r, dst, v);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, factor: &WittElem) {
        for c in 0..self.cols {
            let v = self.get(r, c) * factor;
            self.set(r, c, v);
        }
    }

    pub(crate) fn scale_col(&mut self, c: usize, factor: &WittElem) {
        for r in 0..self.rows {
            let v = self.get(r, c) * factor;
            self.set(r, c, v);
        }
    }
}

impl fmt::Debug for WittMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.row_vecs()).finish()
    }
}

impl<'a> Mul<&'a WittMatrix> for &'a WittMatrix {
    type Output = WittMatrix;

    fn mul(self, rhs: &'a WittMatrix) -> WittMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = WittMatrix::zero(&self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + &(a * rhs.get(k, j));
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a WittMatrix> for &'a WittMatrix {
    type Output = WittMatrix;

    fn add(self, rhs: &'a WittMatrix) -> WittMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        WittMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a WittMatrix> for &'a WittMatrix {
    type Output = WittMatrix;

    fn sub(self, rhs: &'a WittMatrix) -> WittMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        WittMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}
