//! Dense linear algebra over `F_2` with bit-packed rows.
//!
//! Vectors use the shared bit encoding of the whole crate: the vector
//! `(x_1, ..., x_n)` corresponds to the integer `sum x_i * 2^(i-1)`, so
//! coordinate `x_(i+1)` lives in bit `i`. Gaussian elimination works on
//! whole 64-bit words; at the sizes involved here (up to a few hundred
//! unknowns) that beats anything asymptotically clever.

use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// Default cap on the number of solutions [`SolutionSpace::enumerate`]
/// will yield.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 20;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over `F_2`, bit-packed into machine words.
///
/// Bits beyond `len` are kept at zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zero(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector of length `len` from the low bits of an integer.
    ///
    /// Panics if `x` has bits at or above position `len`.
    pub fn from_element(x: u64, len: usize) -> Self {
        assert!(len >= 64 - x.leading_zeros() as usize, "element out of range");
        let mut v = BitVector::zero(len);
        if !v.words.is_empty() {
            v.words[0] = x;
        }
        v
    }

    /// The integer whose bits are this vector. Requires `len <= 64`.
    pub fn to_element(&self) -> u64 {
        assert!(self.len <= WORD_BITS);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product `<self, other>` over `F_2`.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit, if any.
    pub fn lowest_bit(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterates over the indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            core::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    /// Lower-case hex rendering of the packed bits (low bit first in the
    /// integer sense), e.g. a 6-bit vector prints as up to 2 hex digits.
    pub fn to_hex(&self) -> alloc::string::String {
        use core::fmt::Write;
        let digits = self.len.div_ceil(4).max(1);
        let mut s = alloc::string::String::new();
        for d in (0..digits).rev() {
            let nibble = (self.words[d * 4 / WORD_BITS] >> ((d * 4) % WORD_BITS)) & 0xf;
            write!(s, "{nibble:x}").unwrap();
        }
        s
    }
}

impl core::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over `F_2`, one [`BitVector`] per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVector::zero(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zero(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[BitVector], rows: usize) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows));
        let mut m = BitMatrix::zero(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for i in col.iter_ones() {
                m.data[i].set(j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.data[i]
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zero(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.data[i].iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = BitMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.data[i].iter_ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len());
        let mut out = BitVector::zero(self.rows);
        for i in 0..self.rows {
            if self.data[i].dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Applies the matrix to an integer-encoded element of `F_2^cols`,
    /// returning the integer-encoded image in `F_2^rows`.
    ///
    /// Requires `cols <= 64` and `rows <= 64`.
    #[inline]
    pub fn mul_element(&self, x: u64) -> u64 {
        debug_assert!(self.cols <= WORD_BITS && self.rows <= WORD_BITS);
        let mut out = 0u64;
        for i in 0..self.rows {
            let parity = (self.data[i].words[0] & x).count_ones() & 1;
            out |= u64::from(parity) << i;
        }
        out
    }

    /// Rank, i.e. the dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut pivot_rows: Vec<BitVector> = Vec::new();
        let mut pivot_of_bit: Vec<usize> = vec![usize::MAX; self.cols];
        for row in &self.data {
            let mut r = row.clone();
            while let Some(lb) = r.lowest_bit() {
                let p = pivot_of_bit[lb];
                if p == usize::MAX {
                    pivot_of_bit[lb] = pivot_rows.len();
                    pivot_rows.push(r);
                    break;
                }
                r.xor_assign(&pivot_rows[p]);
            }
        }
        pivot_rows.len()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis, in reduced row echelon form, of `{u : u^T M = 0}`.
    ///
    /// The basis has `rows - rank` elements of length `rows`.
    pub fn left_kernel(&self) -> Vec<BitVector> {
        self.transpose().right_kernel()
    }

    /// Basis, in reduced row echelon form, of `{x : M x = 0}`.
    pub fn right_kernel(&self) -> Vec<BitVector> {
        let mut rows = self.data.clone();
        let pivots = rref_in_place(&mut rows, self.cols);
        kernel_from_rref(&rows, &pivots, self.cols)
    }

    /// Full solution set of `M x = rhs`, or `None` if the system is
    /// inconsistent.
    pub fn solve_affine(&self, rhs: &BitVector) -> Option<SolutionSpace> {
        assert_eq!(rhs.len(), self.rows);
        // Augment each row with its right-hand-side bit at column `cols`.
        let aug_cols = self.cols + 1;
        let mut rows: Vec<BitVector> = self
            .data
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = BitVector::zero(aug_cols);
                for j in r.iter_ones() {
                    a.set(j, true);
                }
                a.set(self.cols, rhs.get(i));
                a
            })
            .collect();
        let pivots = rref_in_place(&mut rows, aug_cols);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut particular = BitVector::zero(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if rows[r].get(self.cols) {
                particular.set(p, true);
            }
        }
        // Kernel of the unaugmented matrix: drop the rhs column.
        let plain: Vec<BitVector> = rows
            .iter()
            .take(pivots.len())
            .map(|r| {
                let mut v = BitVector::zero(self.cols);
                for j in r.iter_ones().take_while(|&j| j < self.cols) {
                    v.set(j, true);
                }
                v
            })
            .collect();
        let kernel_basis = kernel_from_rref(&plain, &pivots, self.cols);
        Some(SolutionSpace {
            particular,
            kernel_basis,
        })
    }

    /// Inverse of a square matrix, or `None` if it is singular.
    pub fn invert(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols, "invert requires a square matrix");
        let n = self.rows;
        // Work on [M | I] and reduce the left half to the identity.
        let mut rows: Vec<BitVector> = self
            .data
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = BitVector::zero(2 * n);
                for j in r.iter_ones() {
                    a.set(j, true);
                }
                a.set(n + i, true);
                a
            })
            .collect();
        let pivots = rref_in_place(&mut rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let inv_rows: Vec<BitVector> = rows
            .into_iter()
            .take(n)
            .map(|r| {
                let mut v = BitVector::zero(n);
                for j in r.iter_ones().filter(|&j| j >= n) {
                    v.set(j - n, true);
                }
                v
            })
            .collect();
        Some(BitMatrix::from_rows(inv_rows, n))
    }
}

impl core::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            for i in 0..self.cols {
                write!(f, "{}", u8::from(r.get(i)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reduces `rows` to reduced row echelon form, pivoting on the lowest
/// available column first. Returns the pivot columns in row order.
fn rref_in_place(rows: &mut [BitVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..cols {
        if next_row == rows.len() {
            break;
        }
        let Some(found) = (next_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next_row, found);
        let pivot_row = rows[next_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next_row && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        next_row += 1;
    }
    pivots
}

/// Kernel basis read off a reduced row echelon form: one basis vector per
/// free column, in ascending column order. The result is itself in RREF.
fn kernel_from_rref(rows: &[BitVector], pivots: &[usize], cols: usize) -> Vec<BitVector> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::with_capacity(cols - pivots.len());
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = BitVector::zero(cols);
        v.set(free, true);
        for (r, &p) in pivots.iter().enumerate() {
            if rows[r].get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Extends linearly independent `vectors` to a basis of `F_2^ambient` and
/// returns the nonsingular matrix whose first `vectors.len()` columns are
/// the inputs, in order.
///
/// Completion vectors are chosen greedily by ascending integer value, so
/// the result is reproducible. Fails with [`Error::DependentInput`] if the
/// inputs are not independent.
pub fn complete_to_basis(vectors: &[BitVector], ambient: usize) -> Result<BitMatrix, Error> {
    assert!(vectors.iter().all(|v| v.len() == ambient));
    assert!(ambient <= WORD_BITS, "completion implemented for ambient <= 64");
    let mut columns: Vec<BitVector> = Vec::with_capacity(ambient);
    // Echelon with one element per lowest set bit; reduction terminates
    // because each XOR strictly raises the lowest bit of the residual.
    let mut echelon: Vec<u64> = Vec::new();
    let add = |x: u64, echelon: &mut Vec<u64>| -> bool {
        let mut r = x;
        loop {
            if r == 0 {
                return false;
            }
            let low = r & r.wrapping_neg();
            match echelon.iter().find(|&&e| e & e.wrapping_neg() == low) {
                Some(&e) => r ^= e,
                None => {
                    echelon.push(r);
                    return true;
                }
            }
        }
    };
    for v in vectors {
        if !add(v.to_element(), &mut echelon) {
            return Err(Error::DependentInput);
        }
        columns.push(v.clone());
    }
    let mut candidate = 1u64;
    while columns.len() < ambient {
        if add(candidate, &mut echelon) {
            columns.push(BitVector::from_element(candidate, ambient));
        }
        candidate += 1;
    }
    Ok(BitMatrix::from_columns(&columns, ambient))
}

/// The full solution set of an affine system: a particular solution plus
/// the kernel of the homogeneous part.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    particular: BitVector,
    kernel_basis: Vec<BitVector>,
}

impl SolutionSpace {
    pub fn particular(&self) -> &BitVector {
        &self.particular
    }

    pub fn kernel_basis(&self) -> &[BitVector] {
        &self.kernel_basis
    }

    /// Dimension of the solution space.
    pub fn dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// Iterates over all `2^dim` solutions, refusing if that count exceeds
    /// `cap`. The iteration order is a Gray code walk starting from the
    /// particular solution and is fixed across runs.
    pub fn enumerate(&self, cap: u64) -> Result<SolutionIter<'_>, Error> {
        let dim = self.dim();
        if dim >= 64 || 1u64 << dim > cap {
            return Err(Error::EnumerationCapExceeded { dim });
        }
        Ok(SolutionIter {
            space: self,
            current: self.particular.clone(),
            index: 0,
            total: 1u64 << dim,
        })
    }
}

/// Iterator over the elements of a [`SolutionSpace`].
pub struct SolutionIter<'a> {
    space: &'a SolutionSpace,
    current: BitVector,
    index: u64,
    total: u64,
}

impl Iterator for SolutionIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.index == self.total {
            return None;
        }
        if self.index > 0 {
            let flip = self.index.trailing_zeros() as usize;
            self.current.xor_assign(&self.space.kernel_basis[flip]);
        }
        self.index += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.index) as usize;
        (left, Some(left))
    }
}
