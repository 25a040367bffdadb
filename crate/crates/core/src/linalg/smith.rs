//! Integer matrices, Smith normal form and finitely generated abelian groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use super::LinalgError;

/// Default cap on the bit length of any intermediate entry during elimination.
pub const DEFAULT_PRECISION_BITS: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatZ {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl MatZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatZ {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Ragged);
        }
        let entries = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        Ok(MatZ {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn diagonal(values: &[i64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = BigInt::from(v);
        }
        m
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

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &MatZ) -> MatZ {
        assert_eq!(self.cols, rhs.rows);
        let mut out = MatZ::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a * &rhs[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Deletes the listed rows and the same-numbered columns.
    pub fn delete_indices(&self, drop: &[usize]) -> MatZ {
        let keep_r: Vec<usize> = (0..self.rows).filter(|i| !drop.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|i| !drop.contains(i)).collect();
        let mut out = MatZ::zeros(keep_r.len(), keep_c.len());
        for (a, &i) in keep_r.iter().enumerate() {
            for (b, &j) in keep_c.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &MatZ) -> MatZ {
        let mut out = MatZ::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, src: usize, dst: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = &self.entries[src * self.cols + j] * factor;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, src: usize, dst: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = &self.entries[i * self.cols + src] * factor;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let e = &mut self.entries[r * self.cols + j];
            *e = -std::mem::take(e);
        }
    }

    fn max_bits(&self) -> u64 {
        self.entries.iter().map(|e| e.bits()).max().unwrap_or(0)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for MatZ {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatZ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal with d₁ | d₂ | …
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: MatZ,
    pub u: MatZ,
    pub v: MatZ,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

pub fn smith_normal_form(a: &MatZ) -> Result<SmithForm, LinalgError> {
    smith_normal_form_with_budget(a, DEFAULT_PRECISION_BITS)
}

/// Smith normal form by repeated pivot minimisation. Fails with
/// [`LinalgError::OverflowGuard`] when an entry of `d`, `u` or `v` grows past
/// `budget_bits`.
pub fn smith_normal_form_with_budget(a: &MatZ, budget_bits: u64) -> Result<SmithForm, LinalgError> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = MatZ::identity(m);
    let mut v = MatZ::identity(n);
    let guard = |d: &MatZ, u: &MatZ, v: &MatZ| {
        let bits = d.max_bits().max(u.max_bits()).max(v.max_bits());
        if bits > budget_bits {
            Err(LinalgError::OverflowGuard { bits, budget: budget_bits })
        } else {
            Ok(())
        }
    };

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = &d[(i, j)];
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(t, i, &q);
                u.add_row_multiple(t, i, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(t, j, &q);
                v.add_col_multiple(t, j, &q);
                clean &= d[(t, j)].is_zero();
            }
            guard(&d, &u, &v)?;
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row and retry
            let p = d[(t, t)].clone();
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(i, t, &one);
                    u.add_row_multiple(i, t, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(d, u, v)
}

fn finish(mut d: MatZ, mut u: MatZ, v: MatZ) -> Result<SmithForm, LinalgError> {
    for t in 0..d.rows.min(d.cols) {
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Ok(SmithForm { d, u, v })
}

/// Finitely generated abelian group ℤ^free_rank ⊕ ⊕ ℤ/dᵢ with d₁ | d₂ | …, all dᵢ ≥ 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => AbelianGroup {
                invariant_factors: Vec::new(),
                free_rank: 1,
            },
            1 => Self::trivial(),
            n => AbelianGroup {
                invariant_factors: vec![n],
                free_rank: 0,
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<u128> {
        if !self.is_finite() {
            return None;
        }
        Some(self.invariant_factors.iter().map(|&f| f as u128).product())
    }

    /// |H| when finite, else 0 (the convention used for Euler characteristics).
    pub fn order_or_zero(&self) -> u128 {
        self.order().unwrap_or(0)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of `A : ℤ^cols → ℤ^rows`.
pub fn cokernel_group(a: &MatZ) -> Result<AbelianGroup, LinalgError> {
    let snf = smith_normal_form(a)?;
    let diag = snf.diagonal();
    let nonzero = diag.iter().filter(|x| !x.is_zero()).count();
    let mut factors = Vec::new();
    for x in diag.iter().filter(|x| !x.is_zero() && !x.is_one()) {
        factors.push(x.to_u64().ok_or(LinalgError::FactorOverflow)?);
    }
    Ok(AbelianGroup {
        invariant_factors: factors,
        free_rank: a.rows - nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[i64]]) -> MatZ {
        MatZ::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn check_smith(a: &MatZ) -> SmithForm {
        let s = smith_normal_form(a).unwrap();
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U A V != D");
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken: {diag:?}");
            }
        }
        s
    }

    #[test]
    fn one_by_one() {
        let s = check_smith(&mat(&[&[7]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(7)]);
        assert_eq!(cokernel_group(&mat(&[&[7]])).unwrap(), AbelianGroup::cyclic(7));
        let z = cokernel_group(&mat(&[&[0]])).unwrap();
        assert_eq!(z.free_rank, 1);
        assert!(z.invariant_factors.is_empty());
    }

    #[test]
    fn hand_eliminated_examples() {
        let s = check_smith(&mat(&[&[2, 1], &[1, 2]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        assert_eq!(cokernel_group(&mat(&[&[2, 1], &[1, 2]])).unwrap(), AbelianGroup::cyclic(3));
        // gcd(6,4) = 2, lcm = 12
        let s = check_smith(&MatZ::diagonal(&[6, 4]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rectangular_and_singular() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = check_smith(&a);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let b = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        let g = cokernel_group(&b).unwrap();
        assert_eq!(g.free_rank, 1);
        check_smith(&b);
    }

    #[test]
    fn overflow_guard_trips_on_tiny_budget() {
        let a = mat(&[&[123456789, 987654321], &[192837465, 564738291]]);
        assert!(matches!(
            smith_normal_form_with_budget(&a, 8),
            Err(LinalgError::OverflowGuard { .. })
        ));
        assert!(smith_normal_form(&a).is_ok());
    }

    #[test]
    fn determinant_is_product_of_invariant_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let a = MatZ::from_i64_rows(&rows).unwrap();
            let det = a.determinant();
            let s = check_smith(&a);
            let prod: BigInt = s.diagonal().iter().product();
            assert_eq!(det.abs(), prod.abs());
        }
    }
}
