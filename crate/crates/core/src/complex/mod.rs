//! Finite chain complexes over F2.
//!
//! The differential raises the homological degree by one. Generators are
//! indexed globally; the differential is stored as sparse columns.

mod cone;
mod double;
mod spectral;

pub use cone::{
    check_double_mapping_cone, mapping_cone, random_dmc_instance, ChainMapF2, DmcInstance, DmcVerdict, GradedModule,
};
pub use double::DoubleComplexF2;
pub use spectral::{FilteredComplexF2, SpectralPages};

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::linalg::{normalize_f2, MatF2, SparseMatF2};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("not a bicomplex: {0}")]
    NotBicomplex(String),
    #[error("filtration violated: {0}")]
    FiltrationViolation(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
}

#[derive(Clone, Debug)]
pub struct GradedComplexF2 {
    degree: Vec<i32>,
    secondary: Vec<i32>,
    diff: Vec<Vec<u32>>,
}

impl GradedComplexF2 {
    /// `diff[j]` lists the generators in the boundary of generator `j`.
    pub fn new(degree: Vec<i32>, diff: Vec<Vec<u32>>) -> Result<Self, ComplexError> {
        let n = degree.len();
        Self::with_gradings(degree, vec![0; n], diff)
    }

    /// As [`GradedComplexF2::new`] with a second grading the differential must preserve.
    pub fn with_gradings(degree: Vec<i32>, secondary: Vec<i32>, mut diff: Vec<Vec<u32>>) -> Result<Self, ComplexError> {
        if diff.len() != degree.len() || secondary.len() != degree.len() {
            return Err(ComplexError::NotAComplex("grading and differential lengths differ".into()));
        }
        diff.par_iter_mut().for_each(normalize_f2);
        let n = degree.len() as u32;
        for (j, col) in diff.iter().enumerate() {
            for &i in col {
                if i >= n {
                    return Err(ComplexError::NotAComplex(format!("generator {j} maps to unknown generator {i}")));
                }
                if degree[i as usize] != degree[j] + 1 {
                    return Err(ComplexError::NotAComplex(format!(
                        "differential from degree {} hits degree {}",
                        degree[j], degree[i as usize]
                    )));
                }
                if secondary[i as usize] != secondary[j] {
                    return Err(ComplexError::NotAComplex(format!(
                        "differential changes the secondary grading at generator {j}"
                    )));
                }
            }
        }
        let c = GradedComplexF2 { degree, secondary, diff };
        if let Some(j) = c.square_defect() {
            return Err(ComplexError::NotAComplex(format!("d∘d is nonzero on generator {j}")));
        }
        Ok(c)
    }

    /// First generator on which d∘d fails to vanish.
    pub(crate) fn square_defect(&self) -> Option<usize> {
        square_defect(&self.diff, &self.diff)
    }

    pub fn len(&self) -> usize {
        self.degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degree.is_empty()
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degree
    }

    pub fn secondary(&self) -> &[i32] {
        &self.secondary
    }

    pub fn differential(&self) -> &[Vec<u32>] {
        &self.diff
    }

    /// Generators grouped by (degree, secondary grading).
    pub(crate) fn blocks(&self) -> BTreeMap<(i32, i32), Vec<u32>> {
        let mut out: BTreeMap<(i32, i32), Vec<u32>> = BTreeMap::new();
        for j in 0..self.len() {
            out.entry((self.degree[j], self.secondary[j])).or_default().push(j as u32);
        }
        out
    }

    /// Rank of d out of each (degree, secondary) block.
    fn block_ranks(&self, blocks: &BTreeMap<(i32, i32), Vec<u32>>) -> HashMap<(i32, i32), usize> {
        let mut local = vec![0u32; self.len()];
        for gens in blocks.values() {
            for (k, &g) in gens.iter().enumerate() {
                local[g as usize] = k as u32;
            }
        }
        blocks
            .par_iter()
            .map(|(&(t, q), gens)| {
                let rows = blocks.get(&(t + 1, q)).map_or(0, |v| v.len());
                if rows == 0 {
                    return ((t, q), 0);
                }
                let cols: Vec<Vec<u32>> = gens
                    .iter()
                    .map(|&g| self.diff[g as usize].iter().map(|&i| local[i as usize]).collect())
                    .collect();
                ((t, q), SparseMatF2::new(rows, cols).rank())
            })
            .collect()
    }

    /// Betti numbers per (degree, secondary grading); zero entries omitted.
    pub fn homology_bigraded(&self) -> BTreeMap<(i32, i32), usize> {
        let blocks = self.blocks();
        let ranks = self.block_ranks(&blocks);
        let mut out = BTreeMap::new();
        for (&(t, q), gens) in &blocks {
            let b = gens.len() - ranks[&(t, q)] - ranks.get(&(t - 1, q)).copied().unwrap_or(0);
            if b > 0 {
                out.insert((t, q), b);
            }
        }
        out
    }

    /// Betti numbers per degree; zero entries omitted.
    pub fn homology_ranks(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for ((t, _), b) in self.homology_bigraded() {
            *out.entry(t).or_insert(0) += b;
        }
        out
    }

    pub fn total_homology(&self) -> usize {
        self.homology_bigraded().values().sum()
    }

    /// Generators of degree `t`, in index order.
    pub fn generators_in_degree(&self, t: i32) -> Vec<u32> {
        (0..self.len() as u32).filter(|&j| self.degree[j as usize] == t).collect()
    }

    /// Dense matrix of d restricted to the listed source and target generators.
    pub(crate) fn block_matrix(&self, sources: &[u32], targets: &[u32]) -> MatF2 {
        dense_block(&self.diff, sources, targets)
    }
}

pub(crate) fn dense_block(diff: &[Vec<u32>], sources: &[u32], targets: &[u32]) -> MatF2 {
    let pos: HashMap<u32, usize> = targets.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let mut m = MatF2::zeros(targets.len(), sources.len());
    for (j, &s) in sources.iter().enumerate() {
        for i in &diff[s as usize] {
            if let Some(&r) = pos.get(i) {
                m.set(r, j, true);
            }
        }
    }
    m
}

/// Applies a sparse map given by columns to a sparse vector.
pub(crate) fn apply_sparse(map: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = v.iter().flat_map(|&j| map[j as usize].iter().copied()).collect();
    normalize_f2(&mut out);
    out
}

/// First generator `j` with `a(b(j)) != 0`.
pub(crate) fn square_defect(a: &[Vec<u32>], b: &[Vec<u32>]) -> Option<usize> {
    (0..b.len()).into_par_iter().find_first(|&j| !apply_sparse(a, &b[j]).is_empty())
}

/// First generator `j` with `a(b(j)) != c(d(j))`.
pub(crate) fn commute_defect(a: &[Vec<u32>], b: &[Vec<u32>], c: &[Vec<u32>], d: &[Vec<u32>]) -> Option<usize> {
    (0..b.len()).into_par_iter().find_first(|&j| apply_sparse(a, &b[j]) != apply_sparse(c, &d[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_differential_keeps_every_generator() {
        let c = GradedComplexF2::new(vec![0, 1, 1, 2], vec![vec![]; 4]).unwrap();
        let h = c.homology_ranks();
        assert_eq!(h, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn identity_two_term_complex_is_acyclic() {
        let c = GradedComplexF2::new(vec![0, 1], vec![vec![1], vec![]]).unwrap();
        assert!(c.homology_ranks().is_empty());
    }

    #[test]
    fn nonzero_square_is_rejected() {
        let r = GradedComplexF2::new(vec![0, 1, 2], vec![vec![1], vec![2], vec![]]);
        assert!(matches!(r, Err(ComplexError::NotAComplex(_))));
        let r = GradedComplexF2::new(vec![0, 0], vec![vec![1], vec![]]);
        assert!(matches!(r, Err(ComplexError::NotAComplex(_))));
    }

    #[test]
    fn secondary_grading_splits_homology() {
        let c = GradedComplexF2::with_gradings(vec![0, 1, 1], vec![0, 0, 2], vec![vec![1], vec![], vec![]]).unwrap();
        assert_eq!(c.homology_bigraded(), BTreeMap::from([((1, 2), 1)]));
    }
}
