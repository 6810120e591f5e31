//! Dense bit-packed linear algebra over F₂.
//!
//! Rows are packed into 64-bit words. Bits past `cols` in the last word of a
//! row are always zero, so whole-word operations (XOR, popcount, equality)
//! never need masking.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Dense F₂ matrix, row-major, 64 bits per word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Cyclic shift matrix: row `i` has its single one at column `(i + 1) mod n`.
    pub fn shift(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, (i + 1) % n, true);
        }
        m
    }

    /// Builds a matrix from 0/1 entries. All rows must have `cols` entries.
    pub fn from_dense<R: AsRef<[u8]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose row `i` has ones exactly at `supports[i]`.
    pub fn from_supports<R: AsRef<[usize]>>(cols: usize, supports: &[R]) -> Result<Self> {
        let mut m = Self::zeros(supports.len(), cols);
        for (i, s) in supports.iter().enumerate() {
            for &j in s.as_ref() {
                if j >= cols {
                    return Err(Error::shape(format!("column {j} out of range for {cols} columns")));
                }
                m.toggle(i, j);
            }
        }
        Ok(m)
    }

    /// A single 1×n row vector with ones at `support`.
    pub fn row_vector(cols: usize, support: &[usize]) -> Result<Self> {
        Self::from_supports(cols, &[support])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        let w = &mut self.data[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    /// Copies row `r` into a 1×cols matrix.
    pub fn row(&self, r: usize) -> BitMatrix {
        let mut m = Self::zeros(1, self.cols);
        m.data.copy_from_slice(self.row_words(r));
        m
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        support_of(self.row_words(r))
    }

    /// Total number of ones.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Entrywise sum modulo 2.
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(format!(
                "add: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    /// Matrix product over F₂.
    pub fn matmul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "matmul: {:?} x {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_support(r) {
                let (dst, src) = (r * out.stride, k * other.stride);
                for w in 0..out.stride {
                    out.data[dst + w] ^= other.data[src + w];
                }
            }
        }
        Ok(out)
    }

    /// Square matrix power.
    pub fn pow(&self, mut e: u64) -> Result<BitMatrix> {
        if self.rows != self.cols {
            return Err(Error::shape(format!("pow of non-square {:?}", self.shape())));
        }
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Kronecker product: block `(i, j)` equals `other` iff `self[i, j] = 1`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in self.row_support(i) {
                for p in 0..other.rows {
                    for q in other.row_support(p) {
                        out.set(i * other.rows + p, j * other.cols + q, true);
                    }
                }
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::shape(format!(
                "hstack: {:?} | {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                out.set(r, c, true);
            }
            for c in other.row_support(r) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::shape(format!(
                "vstack: {:?} over {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        })
    }

    /// Columns `start..end` as a new matrix.
    pub fn col_slice(&self, start: usize, end: usize) -> BitMatrix {
        assert!(start <= end && end <= self.cols);
        let mut out = Self::zeros(self.rows, end - start);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                if c >= start && c < end {
                    out.set(r, c - start, true);
                }
            }
        }
        out
    }

    /// Selected rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        let mut out = Self::zeros(idx.len(), self.cols);
        for (dst, &src) in idx.iter().enumerate() {
            out.row_words_mut(dst).copy_from_slice(self.row_words(src));
        }
        out
    }

    /// Appends a row given as packed words (length must equal the stride).
    pub(crate) fn push_row_words(&mut self, words: &[u64]) {
        debug_assert_eq!(words.len(), self.stride);
        self.data.extend_from_slice(words);
        self.rows += 1;
    }

    /// Reduced row echelon form with pivots searched in ascending column order.
    pub fn rref(&self) -> Echelon {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_with_order(&order)
    }

    /// Reduced row echelon form where pivots are searched in the given column order.
    /// Zero rows are dropped.
    pub fn rref_with_order(&self, col_order: &[usize]) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in col_order {
            if r == m.rows {
                break;
            }
            let (wi, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (r..m.rows).find(|&i| m.data[i * m.stride + wi] & bit != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.data[i * m.stride + wi] & bit != 0 {
                    m.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.data.truncate(r * m.stride);
        m.rows = r;
        Echelon { basis: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of `{v : self · vᵀ = 0}`, returned in reduced echelon form.
    pub fn nullspace(&self) -> BitMatrix {
        let ech = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut ns = Self::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            ns.set(k, f, true);
            for (i, &p) in ech.pivots.iter().enumerate() {
                if ech.basis.get(i, f) {
                    ns.set(k, p, true);
                }
            }
        }
        ns.rref().basis
    }

    /// Basis of the intersection of the row spaces of `self` and `other`
    /// (Zassenhaus), in reduced echelon form.
    pub fn intersect_rowspaces(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::shape(format!(
                "intersect_rowspaces: {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let n = self.cols;
        let top = self.hstack(self)?;
        let bottom = other.hstack(&Self::zeros(other.rows, n))?;
        let ech = top.vstack(&bottom)?.rref();
        let rows: Vec<usize> = ech
            .pivots
            .iter()
            .enumerate()
            .filter(|(_, &p)| p >= n)
            .map(|(i, _)| i)
            .collect();
        Ok(ech.basis.select_rows(&rows).col_slice(n, 2 * n).rref().basis)
    }

    /// Whether the 1×cols row `v` is an F₂ combination of the rows of `self`.
    pub fn in_rowspace(&self, v: &BitMatrix) -> Result<bool> {
        if v.rows != 1 || v.cols != self.cols {
            return Err(Error::shape(format!(
                "in_rowspace: vector {:?} against {} columns",
                v.shape(),
                self.cols
            )));
        }
        Ok(self.rref().contains(v.row_words(0)))
    }

    /// Product `self · vᵀ` for a packed vector `v` of length `cols`, as packed bits.
    pub fn mul_vec_words(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.rows)];
        for r in 0..self.rows {
            if dot_words(self.row_words(r), v) {
                out[r / WORD] |= 1 << (r % WORD);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub(crate) fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        for w in 0..s {
            let v = self.data[src * s + w];
            self.data[dst * s + w] ^= v;
        }
    }

    #[cfg(test)]
    pub(crate) fn trailing_bits_clear(&self) -> bool {
        let rem = self.cols % WORD;
        if rem == 0 || self.stride == 0 {
            return true;
        }
        let mask = !0u64 << rem;
        (0..self.rows).all(|r| self.data[r * self.stride + self.stride - 1] & mask == 0)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Row-reduced basis with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub basis: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces packed vector `v` in place against the basis; the result is
    /// zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &mut [u64]) {
        for (i, &p) in self.pivots.iter().enumerate() {
            if v[p / WORD] >> (p % WORD) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(self.basis.row_words(i)) {
                    *a ^= b;
                }
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        v.iter().all(|&w| w == 0)
    }
}

#[inline]
pub(crate) fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

#[inline]
pub(crate) fn weight_words(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn support_of(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(wi * WORD + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_matrix(rows: usize, cols: usize, bits: &[bool]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if bits[(r * cols + c) % bits.len().max(1)] {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    fn arb_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_c).prop_flat_map(move |c| arb_rows(max_r, c))
    }

    fn arb_rows(max_r: usize, c: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max_r).prop_flat_map(move |r| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let mut m = BitMatrix::zeros(r, c);
                for (i, b) in bits.into_iter().enumerate() {
                    if b {
                        m.set(i / c, i % c, true);
                    }
                }
                m
            })
        })
    }

    fn twelve_hx() -> BitMatrix {
        BitMatrix::from_supports(
            12,
            &[
                vec![2, 3, 6, 7],
                vec![0, 4, 7, 8],
                vec![1, 5, 6, 8],
                vec![0, 5, 9, 10],
                vec![1, 3, 10, 11],
                vec![2, 4, 9, 11],
            ],
        )
        .unwrap()
    }

    #[test]
    fn add_examples() {
        let s3 = BitMatrix::shift(3);
        assert!(s3.add(&s3).unwrap().is_zero());
        let i2 = BitMatrix::identity(2);
        assert_eq!(i2.add(&BitMatrix::zeros(2, 2)).unwrap(), i2);
        let a = BitMatrix::shift(2)
            .kron(&BitMatrix::identity(3))
            .add(&BitMatrix::identity(2).kron(&BitMatrix::shift(3).pow(2).unwrap()))
            .unwrap();
        // Row 1 (1-based) of Aᵀ is {2, 4}.
        assert_eq!(a.transpose().row_support(0), vec![1, 3]);
        assert!(matches!(
            BitMatrix::zeros(2, 2).add(&BitMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn matmul_examples() {
        let s3 = BitMatrix::shift(3);
        assert_eq!(s3.matmul(&s3.pow(2).unwrap()).unwrap(), BitMatrix::identity(3));
        let m = random_matrix(4, 7, &[true, false, false, true, true]);
        assert_eq!(BitMatrix::identity(4).matmul(&m).unwrap(), m);
        let x = BitMatrix::shift(2).kron(&BitMatrix::identity(3));
        assert_eq!(x.matmul(&x).unwrap(), BitMatrix::identity(6));
        assert!(BitMatrix::zeros(2, 3).matmul(&BitMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn kron_examples() {
        let x = BitMatrix::shift(2).kron(&BitMatrix::identity(3));
        assert_eq!(x.row_support(0), vec![3]);
        let m = random_matrix(3, 5, &[true, true, false]);
        assert_eq!(BitMatrix::identity(1).kron(&m), m);
        let z = BitMatrix::shift(2).kron(&BitMatrix::shift(3));
        assert_eq!(z.row_support(0), vec![4]);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(5).rank(), 5);
        assert_eq!(twelve_hx().rank(), 5);
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(BitMatrix::identity(3).nullspace().rows(), 0);
        assert_eq!(twelve_hx().nullspace().rows(), 7);
        let parity = BitMatrix::from_dense(2, &[[1u8, 1]]).unwrap();
        let ns = parity.nullspace();
        assert_eq!(ns, BitMatrix::from_dense(2, &[[1u8, 1]]).unwrap());
    }

    #[test]
    fn intersect_examples() {
        let b = twelve_hx();
        assert_eq!(b.intersect_rowspaces(&b).unwrap().rows(), b.rank());
        let e0 = BitMatrix::from_dense(2, &[[1u8, 0]]).unwrap();
        let e1 = BitMatrix::from_dense(2, &[[0u8, 1]]).unwrap();
        assert_eq!(e0.intersect_rowspaces(&e1).unwrap().rows(), 0);
        assert!(e0.intersect_rowspaces(&BitMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn in_rowspace_examples() {
        let h = twelve_hx();
        assert!(h.in_rowspace(&BitMatrix::zeros(1, 12)).unwrap());
        assert!(h.in_rowspace(&h.row(0)).unwrap());
        assert!(h.in_rowspace(&BitMatrix::zeros(1, 11)).is_err());
    }

    #[test]
    fn empty_matrices() {
        let e = BitMatrix::zeros(0, 4);
        assert_eq!(e.rank(), 0);
        assert_eq!(e.nullspace().rows(), 4);
        assert_eq!(BitMatrix::zeros(3, 0).nullspace().rows(), 0);
        assert!(e.in_rowspace(&BitMatrix::zeros(1, 4)).unwrap());
    }

    #[test]
    fn wide_rows_span_words() {
        let mut m = BitMatrix::zeros(2, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        assert_eq!(m.row_support(0), vec![0, 129]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.nullspace().rows(), 128);
        assert!(m.trailing_bits_clear());
        assert_eq!(m.transpose().transpose(), m);
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(9, 80)) {
            let ns = m.nullspace();
            prop_assert_eq!(m.rank() + ns.rows(), m.cols());
            for r in 0..ns.rows() {
                prop_assert!(m.mul_vec_words(ns.row_words(r)).iter().all(|&w| w == 0));
            }
            prop_assert!(ns.trailing_bits_clear());
        }

        #[test]
        fn add_is_involution(a in arb_matrix(6, 70)) {
            let b = a.transpose().transpose();
            let c = a.add(&b).unwrap();
            prop_assert!(c.is_zero());
            prop_assert_eq!(c.add(&a).unwrap().add(&a).unwrap(), c);
        }

        #[test]
        fn matmul_associative(a in arb_matrix(5, 5), seed in any::<u64>()) {
            let mut bits = Vec::new();
            let mut s = seed;
            for _ in 0..64 { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); bits.push(s >> 63 == 1); }
            let b = random_matrix(a.cols(), 4, &bits);
            let c = random_matrix(4, 3, &bits[7..]);
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn kron_mixed_product(seed in any::<u64>()) {
            let mut bits = Vec::new();
            let mut s = seed;
            for _ in 0..61 { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); bits.push(s >> 62 == 1); }
            let a = random_matrix(2, 3, &bits);
            let b = random_matrix(3, 2, &bits[5..]);
            let c = random_matrix(3, 2, &bits[11..]);
            let d = random_matrix(2, 4, &bits[17..]);
            let lhs = a.kron(&b).matmul(&c.kron(&d)).unwrap();
            let rhs = a.matmul(&c).unwrap().kron(&b.matmul(&d).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn intersection_lies_in_both(
            (a, b) in (1..=9usize).prop_flat_map(|c| (arb_rows(5, c), arb_rows(5, c)))
        ) {
            let i = a.intersect_rowspaces(&b).unwrap();
            let (ea, eb) = (a.rref(), b.rref());
            for r in 0..i.rows() {
                prop_assert!(ea.contains(i.row_words(r)));
                prop_assert!(eb.contains(i.row_words(r)));
            }
            // dim(A ∩ B) = dim A + dim B − dim(A + B)
            let sum = a.vstack(&b).unwrap().rank();
            prop_assert_eq!(i.rows(), ea.rank() + eb.rank() - sum);
        }
    }
}
