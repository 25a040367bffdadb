use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{commute_defect, dense_block, square_defect, ComplexError, FilteredComplexF2, GradedComplexF2};
use crate::linalg::{normalize_f2, MatF2};

/// Bigraded complex with horizontal differential of bidegree (1,0) and
/// vertical differential of bidegree (0,1).
#[derive(Clone, Debug)]
pub struct DoubleComplexF2 {
    w: Vec<i32>,
    v: Vec<i32>,
    dh: Vec<Vec<u32>>,
    dv: Vec<Vec<u32>>,
}

impl DoubleComplexF2 {
    pub fn new(w: Vec<i32>, v: Vec<i32>, mut dh: Vec<Vec<u32>>, mut dv: Vec<Vec<u32>>) -> Result<Self, ComplexError> {
        let n = w.len();
        if v.len() != n || dh.len() != n || dv.len() != n {
            return Err(ComplexError::NotBicomplex("grading and differential lengths differ".into()));
        }
        dh.par_iter_mut().for_each(normalize_f2);
        dv.par_iter_mut().for_each(normalize_f2);
        for j in 0..n {
            for &i in &dh[j] {
                let i = i as usize;
                if i >= n || w[i] != w[j] + 1 || v[i] != v[j] {
                    return Err(ComplexError::NotBicomplex(format!("horizontal map from generator {j} has wrong bidegree")));
                }
            }
            for &i in &dv[j] {
                let i = i as usize;
                if i >= n || w[i] != w[j] || v[i] != v[j] + 1 {
                    return Err(ComplexError::NotBicomplex(format!("vertical map from generator {j} has wrong bidegree")));
                }
            }
        }
        if let Some(j) = square_defect(&dh, &dh) {
            return Err(ComplexError::NotBicomplex(format!("d_h∘d_h is nonzero on generator {j}")));
        }
        if let Some(j) = square_defect(&dv, &dv) {
            return Err(ComplexError::NotBicomplex(format!("d_v∘d_v is nonzero on generator {j}")));
        }
        if let Some(j) = commute_defect(&dh, &dv, &dv, &dh) {
            return Err(ComplexError::NotBicomplex(format!("d_h and d_v do not commute on generator {j}")));
        }
        Ok(DoubleComplexF2 { w, v, dh, dv })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn horizontal_grading(&self) -> &[i32] {
        &self.w
    }

    pub fn vertical_grading(&self) -> &[i32] {
        &self.v
    }

    pub fn horizontal(&self) -> &[Vec<u32>] {
        &self.dh
    }

    pub fn vertical(&self) -> &[Vec<u32>] {
        &self.dv
    }

    fn total_parts(&self) -> (Vec<i32>, Vec<Vec<u32>>) {
        let degree = self.w.iter().zip(&self.v).map(|(a, b)| a + b).collect();
        let diff = self
            .dh
            .par_iter()
            .zip(&self.dv)
            .map(|(a, b)| {
                let mut c: Vec<u32> = a.iter().chain(b).copied().collect();
                normalize_f2(&mut c);
                c
            })
            .collect();
        (degree, diff)
    }

    /// Total complex with differential d_h + d_v, graded by w + v.
    pub fn total_complex(&self) -> GradedComplexF2 {
        let (degree, diff) = self.total_parts();
        GradedComplexF2::new(degree, diff).expect("total complex of a bicomplex")
    }

    /// Total complex filtered by the horizontal grading.
    pub fn filtered_total(&self) -> FilteredComplexF2 {
        FilteredComplexF2::new(self.total_complex(), self.w.clone()).expect("d_h and d_v never lower w")
    }

    /// (C, d_v) with degree v and secondary grading w.
    pub fn vertical_complex(&self) -> GradedComplexF2 {
        GradedComplexF2::with_gradings(self.v.clone(), self.w.clone(), self.dv.clone()).expect("d_v squares to zero")
    }

    /// (C, d_h) with degree w and secondary grading v.
    pub fn horizontal_complex(&self) -> GradedComplexF2 {
        GradedComplexF2::with_gradings(self.w.clone(), self.v.clone(), self.dh.clone()).expect("d_h squares to zero")
    }

    fn bidegree_blocks(&self) -> BTreeMap<(i32, i32), Vec<u32>> {
        let mut out: BTreeMap<(i32, i32), Vec<u32>> = BTreeMap::new();
        for j in 0..self.len() {
            out.entry((self.w[j], self.v[j])).or_default().push(j as u32);
        }
        out
    }

    /// H(H(C, d_v), d_h) per bidegree (w, v); zero entries omitted.
    pub fn vertical_then_horizontal(&self) -> BTreeMap<(i32, i32), usize> {
        let blocks = self.bidegree_blocks();
        let empty = Vec::new();
        let get = |k: (i32, i32)| blocks.get(&k).unwrap_or(&empty);
        // per bidegree: cycles of d_v and boundaries of d_v, both as rows
        let keys: Vec<(i32, i32)> = blocks.keys().copied().collect();
        let zb: BTreeMap<(i32, i32), (MatF2, MatF2)> = keys
            .par_iter()
            .map(|&(w, v)| {
                let here = get((w, v));
                let z = dense_block(&self.dv, here, get((w, v + 1))).kernel_basis();
                let b = dense_block(&self.dv, get((w, v - 1)), here).transpose().row_space_basis();
                ((w, v), (z, b))
            })
            .collect();
        let induced: BTreeMap<(i32, i32), usize> = keys
            .par_iter()
            .map(|&(w, v)| {
                let Some((bt, target)) = zb.get(&(w + 1, v)).map(|x| (&x.1, get((w + 1, v)))) else {
                    return ((w, v), 0);
                };
                let z = &zb[&(w, v)].0;
                let dh = dense_block(&self.dh, get((w, v)), target);
                let image = z.mul(&dh.transpose());
                ((w, v), image.stack(bt).rank() - bt.rank())
            })
            .collect();
        let mut out = BTreeMap::new();
        for &k in &keys {
            let (z, b) = &zb[&k];
            let hv = z.rows() - b.rank();
            let out_rank = induced[&k];
            let in_rank = induced.get(&(k.0 - 1, k.1)).copied().unwrap_or(0);
            let h = hv - out_rank - in_rank;
            if h > 0 {
                out.insert(k, h);
            }
        }
        out
    }

    /// Bidegrees that carry generators.
    pub fn support(&self) -> BTreeSet<(i32, i32)> {
        self.w.iter().copied().zip(self.v.iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> DoubleComplexF2 {
        // a -> b horizontally, a -> c vertically, b -> d and c -> d
        DoubleComplexF2::new(
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![vec![1], vec![], vec![3], vec![]],
            vec![vec![2], vec![3], vec![], vec![]],
        )
        .unwrap()
    }

    #[test]
    fn acyclic_square() {
        let d = square();
        assert_eq!(d.total_complex().total_homology(), 0);
        assert!(d.vertical_then_horizontal().is_empty());
    }

    #[test]
    fn zero_vertical_map_gives_horizontal_complex() {
        let d = DoubleComplexF2::new(vec![0, 1, 1], vec![0, 0, 0], vec![vec![1], vec![], vec![]], vec![vec![]; 3]).unwrap();
        assert_eq!(d.total_complex().homology_ranks(), d.horizontal_complex().homology_ranks());
        assert_eq!(d.vertical_then_horizontal(), BTreeMap::from([((1, 0), 1)]));
    }

    #[test]
    fn noncommuting_maps_are_rejected() {
        let r = DoubleComplexF2::new(
            vec![0, 1, 0, 1],
            vec![0, 0, 1, 1],
            vec![vec![1], vec![], vec![3], vec![]],
            vec![vec![2], vec![], vec![], vec![]],
        );
        assert!(matches!(r, Err(ComplexError::NotBicomplex(_))));
    }
}
