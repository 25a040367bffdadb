//! Dense bit-packed matrices over F₂.
//!
//! Rows are stored as consecutive runs of `u64` words; bit `j % 64` of word
//! `j / 64` in a row holds column `j`. Padding bits past `cols` are always zero.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF2 {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(32) {
            let line: String = (0..self.cols.min(96))
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        MatF2 {
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

    /// Builds a matrix from explicit 0/1 rows. All rows must have length `cols`.
    pub fn from_rows<R: AsRef<[u8]>>(cols: usize, rows: &[R]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix whose column `j` has ones at the row indices `columns[j]`.
    /// Repeated indices cancel.
    pub fn from_sparse_columns(rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for &i in col {
                m.flip(i as usize, j);
            }
        }
        m
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
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let bit = 1u64 << (j % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * WORD + b))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn xor_row_from(&mut self, src: usize, dst: usize, first_word: usize) {
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..dst * s + s])
        };
        for k in first_word..s {
            b[k] ^= a[k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &MatF2) -> MatF2 {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = MatF2::zeros(self.rows, rhs.cols);
        let s = out.stride;
        for i in 0..self.rows {
            let dst = &mut out.data[i * s..(i + 1) * s];
            for k in self.row_ones(i) {
                for (d, &r) in dst.iter_mut().zip(rhs.row_words(k)) {
                    *d ^= r;
                }
            }
        }
        out
    }

    /// Entrywise sum over F₂.
    pub fn add(&self, rhs: &MatF2) -> MatF2 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a ^= b;
        }
        out
    }

    /// Applies the matrix to a packed column vector.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.stride);
        let mut out = vec![0u64; words_for(self.rows)];
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(x)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out[i / WORD] |= 1 << (i % WORD);
            }
        }
        out
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &MatF2) -> MatF2 {
        assert_eq!(self.cols, below.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        MatF2 {
            rows: self.rows + below.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        }
    }

    /// Horizontal concatenation `[self | right]`.
    pub fn hconcat(&self, right: &MatF2) -> MatF2 {
        assert_eq!(self.rows, right.rows);
        let mut out = MatF2::zeros(self.rows, self.cols + right.cols);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                out.set(i, j, true);
            }
            for j in right.row_ones(i) {
                out.set(i, self.cols + j, true);
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> MatF2 {
        let mut out = MatF2::zeros(idx.len(), self.cols);
        for (k, &i) in idx.iter().enumerate() {
            out.data[k * self.stride..(k + 1) * self.stride].copy_from_slice(self.row_words(i));
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> MatF2 {
        let mut out = MatF2::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                if self.get(i, j) {
                    out.set(i, k, true);
                }
            }
        }
        out
    }

    /// Scatters the columns of `self` into a wider matrix: column `k` of
    /// `self` becomes column `idx[k]` of the result.
    pub fn embed_columns(&self, idx: &[usize], total_cols: usize) -> MatF2 {
        assert_eq!(idx.len(), self.cols);
        let mut out = MatF2::zeros(self.rows, total_cols);
        for i in 0..self.rows {
            for k in self.row_ones(i) {
                out.set(i, idx[k], true);
            }
        }
        out
    }

    /// Block matrix `[[a, 0], [0, b]]`.
    pub fn block_diag(a: &MatF2, b: &MatF2) -> MatF2 {
        let mut out = MatF2::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in a.row_ones(i) {
                out.set(i, j, true);
            }
        }
        for i in 0..b.rows {
            for j in b.row_ones(i) {
                out.set(a.rows + i, a.cols + j, true);
            }
        }
        out
    }

    /// In-place reduction to reduced row echelon form. Returns the pivot
    /// column of each nonzero row, in row order.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let w = c / WORD;
            let bit = 1u64 << (c % WORD);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + w] & bit != 0) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + w] & bit != 0 {
                    self.xor_row_from(r, i, w);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Forward elimination only; enough for the rank.
    fn echelon_rank(mut self) -> usize {
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let w = c / WORD;
            let bit = 1u64 << (c % WORD);
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + w] & bit != 0) else {
                continue;
            };
            self.swap_rows(p, r);
            for i in r + 1..self.rows {
                if self.data[i * self.stride + w] & bit != 0 {
                    self.xor_row_from(r, i, w);
                }
            }
            r += 1;
        }
        r
    }

    /// Rank over F₂.
    pub fn rank(&self) -> usize {
        if self.rows <= self.cols {
            self.clone().echelon_rank()
        } else {
            self.transpose().echelon_rank()
        }
    }

    /// Rows spanning the null space `{x : A x = 0}`; there are `cols - rank` of them.
    pub fn kernel_basis(&self) -> MatF2 {
        let mut e = self.clone();
        let pivots = e.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = MatF2::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if e.get(r, f) {
                    out.set(k, p, true);
                }
            }
        }
        out
    }

    /// Some solution of `A x = b`, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows);
        let rhs = MatF2::from_rows(1, &b.iter().map(|&v| [v]).collect::<Vec<_>>());
        let mut aug = self.hconcat(&rhs);
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u8; self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            if aug.get(r, self.cols) {
                x[p] = 1;
            }
        }
        Some(x)
    }

    /// Row-reduced basis of the row space (drops dependent rows).
    pub fn row_space_basis(&self) -> MatF2 {
        let mut e = self.clone();
        let r = e.rref_in_place().len();
        e.rows = r;
        e.data.truncate(r * e.stride);
        e
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let t = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(t)
        }
    }
}

/// Column-sparse F₂ matrix. Used for complexes too large for the dense path;
/// rank is computed by column reduction with lowest-pivot bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatF2 {
    pub rows: usize,
    /// Sorted, duplicate-free row indices per column.
    pub columns: Vec<Vec<u32>>,
}

impl SparseMatF2 {
    pub fn new(rows: usize, mut columns: Vec<Vec<u32>>) -> Self {
        for c in &mut columns {
            normalize_f2(c);
        }
        SparseMatF2 { rows, columns }
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> MatF2 {
        MatF2::from_sparse_columns(self.rows, &self.columns)
    }

    pub fn rank(&self) -> usize {
        let mut owner: Vec<u32> = vec![u32::MAX; self.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(self.columns.len());
        let mut rank = 0;
        for col in &self.columns {
            let mut c = col.clone();
            while let Some(&low) = c.last() {
                let o = owner[low as usize];
                if o == u32::MAX {
                    owner[low as usize] = reduced.len() as u32;
                    rank += 1;
                    break;
                }
                c = xor_sorted(&c, &reduced[o as usize]);
            }
            reduced.push(c);
        }
        rank
    }
}

/// Sorts and cancels repeated indices in pairs.
pub fn normalize_f2(v: &mut Vec<u32>) {
    v.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(v.len());
    for &x in v.iter() {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    *v = out;
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Rank of a matrix.
pub fn f2_rank(a: &MatF2) -> usize {
    a.rank()
}

/// Null-space basis as rows.
pub fn f2_kernel_basis(a: &MatF2) -> MatF2 {
    a.kernel_basis()
}
