//! Khovanov-type homologies over F2 from the cube of resolutions.
//!
//! The vertex space of a resolution with circles S_0..S_{k-1} is the exterior
//! algebra on them, with basis the subsets of circles stored as bit masks.
//! The differential raises the cube weight w = |I|. Reported degrees are
//! i = w + n_+ and h = w - n_-.

mod cube;
mod det;
mod theta;
mod twisted;

pub use cube::{edge_map, CubeComplex, EdgeKind, EdgeMap};
pub use det::state_sum_det;
pub use theta::{psi_check_all, psi_identification, ExteriorElement, PsiReport, ThetaModuleModel};
pub use twisted::{hd_homology, twisted_complex, twisted_ranks, weight_ss, HdResult, TwistedComplex, TwistedRanks};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{ComplexError, GradedComplexF2};
use crate::diagram::{Diagram, DiagramError};

pub const DEFAULT_MAX_CROSSINGS: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KhError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("{crossings} crossings exceed the configured cap of {cap}")]
    SizeBudgetExceeded { crossings: usize, cap: usize },
    #[error("bad circle map: {0}")]
    BadCircleMap(String),
    #[error("cross-check failed: {0}")]
    Mismatch(String),
}

/// Deliberate corruptions of the edge maps, used as negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Δ loses a term: one of two on subsets missing the split circle, the only one otherwise.
    DropSplitTerm,
    /// m sends S_a ∧ S_b to the merged circle instead of zero.
    IdempotentMerge,
}

/// Generators of an assembled cube complex.
pub(crate) struct Assembled {
    pub w: Vec<i32>,
    /// k(I) - 2|A| + |I|, preserved by the cube differential.
    pub q: Vec<i32>,
    pub dh: Vec<Vec<u32>>,
    pub dv: Vec<Vec<u32>>,
    /// Vertex of each generator.
    pub vertex: Vec<u64>,
    pub k0: i32,
}

impl Assembled {
    /// Vertical degree (k(0) - q) / 2.
    pub fn v(&self) -> Vec<i32> {
        self.q.iter().map(|&q| (self.k0 - q) / 2).collect()
    }
}

/// Removes bit `m` from `mask`, closing the gap.
fn compress(mask: u64, m: u32) -> u64 {
    let low = mask & ((1u64 << m) - 1);
    ((mask >> (m + 1)) << m) | low
}

fn expand(local: u64, m: u32) -> u64 {
    let low = local & ((1u64 << m) - 1);
    ((local >> m) << (m + 1)) | low | 1 << m
}

impl CubeComplex {
    /// Size of the vertex space of `v`, reduced or not.
    fn vertex_dim(&self, v: u64, reduced: bool) -> usize {
        let k = self.state(v).circle_count;
        if reduced {
            1 << (k - 1)
        } else {
            1 << k
        }
    }

    fn marked(&self, v: u64) -> u32 {
        self.state(v).marked_circle.expect("non-empty diagram has a marked circle")
    }

    /// Builds generators and differentials. With `parities`, also builds the
    /// vertical map wedging by the odd circles of each vertex.
    pub(crate) fn assemble(&self, reduced: bool, parities: Option<&[Vec<u8>]>) -> Assembled {
        let n = self.crossing_count();
        let count = 1usize << n;
        let mut offset = vec![0u64; count + 1];
        for v in 0..count {
            offset[v + 1] = offset[v] + self.vertex_dim(v as u64, reduced) as u64;
        }
        let index = |v: u64, mask: u64| -> u32 {
            let local = if reduced { compress(mask, self.marked(v)) } else { mask };
            (offset[v as usize] + local) as u32
        };
        type Gen = (i32, i32, Vec<u32>, Vec<u32>, u64);
        let per_vertex: Vec<Vec<Gen>> = (0..count as u64)
            .into_par_iter()
            .map(|v| {
                let st = self.state(v);
                let w = v.count_ones() as i32;
                let k = st.circle_count as i32;
                let edges: Vec<(u64, crate::khovanov::EdgeMap)> = (0..n)
                    .filter(|&c| v >> c & 1 == 0)
                    .map(|c| (v | 1 << c, self.edge(v, c)))
                    .collect();
                let odd: u64 = parities.map_or(0, |p| {
                    p[v as usize].iter().enumerate().filter(|(_, &b)| b & 1 == 1).fold(0, |acc, (j, _)| acc | 1 << j)
                });
                (0..self.vertex_dim(v, reduced) as u64)
                    .map(|local| {
                        let mask = if reduced { expand(local, self.marked(v)) } else { local };
                        let mut dh = Vec::new();
                        for (t, e) in &edges {
                            let (imgs, len) = e.apply(mask);
                            dh.extend(imgs[..len].iter().map(|&x| index(*t, x)));
                        }
                        let mut dv = Vec::new();
                        let mut free = odd & !mask;
                        while free != 0 {
                            let j = free.trailing_zeros();
                            dv.push(index(v, mask | 1 << j));
                            free &= free - 1;
                        }
                        (w, k - 2 * mask.count_ones() as i32 + w, dh, dv, v)
                    })
                    .collect()
            })
            .collect();
        let total = offset[count] as usize;
        let mut a = Assembled {
            w: Vec::with_capacity(total),
            q: Vec::with_capacity(total),
            dh: Vec::with_capacity(total),
            dv: Vec::with_capacity(total),
            vertex: Vec::with_capacity(total),
            k0: self.state(0).circle_count as i32,
        };
        for gens in per_vertex {
            for (w, q, dh, dv, v) in gens {
                a.w.push(w);
                a.q.push(q);
                a.dh.push(dh);
                a.dv.push(dv);
                a.vertex.push(v);
            }
        }
        a
    }
}

/// Homology ranks with the two reported degree conventions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KhRanks {
    pub theory: String,
    /// Keyed by i = w + n_+.
    pub ranks_i: BTreeMap<i32, usize>,
    /// Keyed by h = w - n_-.
    pub ranks_h: BTreeMap<i32, usize>,
    pub total: usize,
}

impl KhRanks {
    pub fn from_weights(theory: &str, d: &Diagram, by_w: &BTreeMap<i32, usize>) -> Self {
        let (np, nm) = (d.n_plus() as i32, d.n_minus() as i32);
        KhRanks {
            theory: theory.into(),
            ranks_i: by_w.iter().map(|(&w, &r)| (w + np, r)).collect(),
            ranks_h: by_w.iter().map(|(&w, &r)| (w - nm, r)).collect(),
            total: by_w.values().sum(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KhOptions {
    pub basepoint: Option<u32>,
    pub max_crossings: usize,
    pub fault: Fault,
}

impl Default for KhOptions {
    fn default() -> Self {
        KhOptions {
            basepoint: None,
            max_crossings: DEFAULT_MAX_CROSSINGS,
            fault: Fault::None,
        }
    }
}

fn cube(d: &Diagram, opts: &KhOptions) -> Result<CubeComplex, KhError> {
    Ok(CubeComplex::build(d, opts.basepoint, opts.max_crossings)?.with_fault(opts.fault))
}

fn graded(a: Assembled) -> Result<GradedComplexF2, KhError> {
    Ok(GradedComplexF2::with_gradings(a.w, a.q, a.dh)?)
}

/// The unreduced Khovanov complex, graded by cube weight.
pub fn kh_complex(d: &Diagram, opts: &KhOptions) -> Result<GradedComplexF2, KhError> {
    graded(cube(d, opts)?.assemble(false, None))
}

/// The reduced complex: subsets containing the circle through the basepoint.
pub fn khr_complex(d: &Diagram, opts: &KhOptions) -> Result<GradedComplexF2, KhError> {
    graded(cube(d, opts)?.assemble(true, None))
}

pub fn kh_ranks(d: &Diagram, opts: &KhOptions) -> Result<KhRanks, KhError> {
    Ok(KhRanks::from_weights("kh", d, &kh_complex(d, opts)?.homology_ranks()))
}

pub fn khr_ranks(d: &Diagram, opts: &KhOptions) -> Result<KhRanks, KhError> {
    Ok(KhRanks::from_weights("khr", d, &khr_complex(d, opts)?.homology_ranks()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn trefoil() -> Diagram {
        parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap()
    }

    fn hopf() -> Diagram {
        parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap()
    }

    #[test]
    fn compress_roundtrip() {
        for m in 0..5 {
            for x in 0..64u64 {
                let y = x | 1 << m;
                assert_eq!(expand(compress(y, m), m), y);
            }
        }
    }

    #[test]
    fn unknot_ranks() {
        let o = KhOptions::default();
        let u = Diagram::unknot();
        assert_eq!(kh_ranks(&u, &o).unwrap().total, 2);
        let r = khr_ranks(&u, &o).unwrap();
        assert_eq!(r.total, 1);
        assert_eq!(r.ranks_i, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn trefoil_and_hopf_totals() {
        let o = KhOptions::default();
        assert_eq!(kh_ranks(&trefoil(), &o).unwrap().total, 6);
        assert_eq!(khr_ranks(&trefoil(), &o).unwrap().total, 3);
        assert_eq!(kh_ranks(&hopf(), &o).unwrap().total, 4);
        assert_eq!(khr_ranks(&hopf(), &o).unwrap().total, 2);
    }

    #[test]
    fn left_trefoil_sits_in_negative_degrees() {
        let r = khr_ranks(&trefoil(), &KhOptions::default()).unwrap();
        assert_eq!(r.ranks_h, BTreeMap::from([(-3, 1), (-2, 1), (0, 1)]));
        let m = khr_ranks(&trefoil().mirror(), &KhOptions::default()).unwrap();
        assert_eq!(m.ranks_h, BTreeMap::from([(0, 1), (2, 1), (3, 1)]));
    }

    #[test]
    fn khr_does_not_depend_on_the_basepoint() {
        let d = trefoil().connected_sum(&hopf());
        let base = khr_ranks(&d, &KhOptions::default()).unwrap();
        for arc in 1..=d.arc_count() {
            let o = KhOptions { basepoint: Some(arc), ..Default::default() };
            assert_eq!(khr_ranks(&d, &o).unwrap(), base);
        }
    }

    #[test]
    fn faults_break_the_complex_or_its_ranks() {
        let t = trefoil();
        for fault in [Fault::DropSplitTerm, Fault::IdempotentMerge] {
            let o = KhOptions { fault, ..Default::default() };
            match kh_complex(&t, &o) {
                Err(KhError::Complex(_)) => {}
                Ok(c) => assert_ne!(c.total_homology(), 6),
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }
}
