use rayon::prelude::*;

use super::{Fault, KhError};
use crate::diagram::{Diagram, ResolvedState};
use crate::linalg::MatF2;

/// Largest circle count a vertex space may have; masks are stored in a u64.
const MAX_CIRCLES: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// Source circles `a` and `b` become one.
    Merge { a: u32, b: u32 },
    /// Source circle `from` becomes target circles `first` and `second`.
    Split { from: u32, first: u32, second: u32 },
}

/// The map on exterior algebras along one cube edge, in subset bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    pub kind: EdgeKind,
    /// Image of each source circle; a split circle goes to `first`.
    pub circle_map: Vec<u32>,
    pub target_circles: usize,
    fault: Fault,
}

impl EdgeMap {
    pub fn new(kind: EdgeKind, circle_map: Vec<u32>, target_circles: usize) -> Result<Self, KhError> {
        let bad = |why: &str| Err(KhError::BadCircleMap(why.into()));
        if circle_map.iter().any(|&c| c as usize >= target_circles) {
            return bad("circle mapped outside the target");
        }
        let mut hits = vec![0u8; target_circles];
        for &c in &circle_map {
            hits[c as usize] += 1;
        }
        match kind {
            EdgeKind::Merge { a, b } => {
                if a == b || circle_map.len() != target_circles + 1 {
                    return bad("a merge joins two distinct circles and loses one");
                }
                if circle_map.get(a as usize) != circle_map.get(b as usize) {
                    return bad("merged circles must share an image");
                }
                if hits.iter().enumerate().any(|(t, &h)| h != 1 + (t as u32 == circle_map[a as usize]) as u8) {
                    return bad("circles away from the merge must map bijectively");
                }
            }
            EdgeKind::Split { from, first, second } => {
                if first == second || circle_map.len() + 1 != target_circles {
                    return bad("a split creates one extra circle");
                }
                if circle_map.get(from as usize) != Some(&first) {
                    return bad("the split circle must map to its first part");
                }
                if hits[second as usize] != 0 || hits.iter().enumerate().any(|(t, &h)| t as u32 != second && h != 1) {
                    return bad("circles away from the split must map bijectively");
                }
            }
        }
        Ok(EdgeMap {
            kind,
            circle_map,
            target_circles,
            fault: Fault::None,
        })
    }

    pub(crate) fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    fn push(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros();
            out |= 1 << self.circle_map[i as usize];
            m &= m - 1;
        }
        out
    }

    /// Images of a basis subset, as target subsets (zero, one or two terms).
    pub fn apply(&self, mask: u64) -> ([u64; 2], usize) {
        match self.kind {
            EdgeKind::Merge { a, b } => {
                if mask >> a & 1 == 1 && mask >> b & 1 == 1 {
                    if self.fault == Fault::IdempotentMerge {
                        return ([self.push(mask & !(1 << b)), 0], 1);
                    }
                    return ([0, 0], 0);
                }
                ([self.push(mask), 0], 1)
            }
            EdgeKind::Split { from, first, second } => {
                let base = self.push(mask);
                if mask >> from & 1 == 1 {
                    if self.fault == Fault::DropSplitTerm {
                        return ([0, 0], 0);
                    }
                    ([base | 1 << second, 0], 1)
                } else if self.fault == Fault::DropSplitTerm {
                    ([base | 1 << first, 0], 1)
                } else {
                    ([base | 1 << first, base | 1 << second], 2)
                }
            }
        }
    }

    /// Dense matrix, 2^target rows by 2^source columns.
    pub fn matrix(&self) -> MatF2 {
        let src = self.circle_map.len();
        let mut m = MatF2::zeros(1 << self.target_circles, 1 << src);
        for mask in 0..1u64 << src {
            let (t, n) = self.apply(mask);
            for &x in &t[..n] {
                m.flip(x as usize, mask as usize);
            }
        }
        m
    }
}

/// The matrix of m (merge) or Δ (split) between exterior algebras.
pub fn edge_map(kind: EdgeKind, circle_map: Vec<u32>, target_circles: usize) -> Result<MatF2, KhError> {
    Ok(EdgeMap::new(kind, circle_map, target_circles)?.matrix())
}

/// All 2^n resolutions of a diagram with their circle data.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    diagram: Diagram,
    basepoint: Option<u32>,
    states: Vec<ResolvedState>,
    fault: Fault,
}

impl CubeComplex {
    pub fn build(d: &Diagram, basepoint: Option<u32>, max_crossings: usize) -> Result<Self, KhError> {
        let n = d.crossing_count();
        if n > max_crossings {
            return Err(KhError::SizeBudgetExceeded { crossings: n, cap: max_crossings });
        }
        d.resolve(0, basepoint)?;
        let states: Vec<ResolvedState> = (0..1u64 << n)
            .into_par_iter()
            .map(|s| d.resolve_unchecked(s, basepoint))
            .collect();
        if let Some(s) = states.iter().find(|s| s.circle_count > MAX_CIRCLES) {
            return Err(KhError::SizeBudgetExceeded {
                crossings: s.circle_count,
                cap: MAX_CIRCLES,
            });
        }
        Ok(CubeComplex {
            diagram: d.clone(),
            basepoint,
            states,
            fault: Fault::None,
        })
    }

    pub(crate) fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = fault;
        self
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn basepoint(&self) -> Option<u32> {
        self.basepoint
    }

    pub fn crossing_count(&self) -> usize {
        self.diagram.crossing_count()
    }

    pub fn states(&self) -> &[ResolvedState] {
        &self.states
    }

    pub fn state(&self, v: u64) -> &ResolvedState {
        &self.states[v as usize]
    }

    /// Circle counts of all vertices, listed by weight then by index.
    pub fn circle_counts_by_weight(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.states.len()).collect();
        idx.sort_by_key(|&i| (i.count_ones(), i));
        idx.into_iter().map(|i| self.states[i].circle_count).collect()
    }

    /// The map along the edge leaving vertex `v` by changing crossing `c` from 0 to 1.
    pub fn edge(&self, v: u64, c: usize) -> EdgeMap {
        debug_assert_eq!(v >> c & 1, 0);
        let src = &self.states[v as usize];
        let tgt = &self.states[(v | 1 << c) as usize];
        let t = self.diagram.crossings()[c];
        let mut circle_map = vec![u32::MAX; src.circle_count];
        for (a, &ci) in src.arc_to_circle.iter().enumerate() {
            circle_map[ci as usize] = tgt.arc_to_circle[a];
        }
        for i in 0..self.diagram.free_loops() as usize {
            circle_map[src.arc_circles + i] = (tgt.arc_circles + i) as u32;
        }
        let kind = if tgt.circle_count + 1 == src.circle_count {
            EdgeKind::Merge {
                a: src.circle_of_arc(t[0]),
                b: src.circle_of_arc(t[2]),
            }
        } else {
            let from = src.circle_of_arc(t[0]);
            let first = tgt.circle_of_arc(t[0]);
            let second = tgt.circle_of_arc(t[2]);
            circle_map[from as usize] = first;
            EdgeKind::Split { from, first, second }
        };
        EdgeMap::new(kind, circle_map, tgt.circle_count)
            .expect("cube edges change the circle count by one")
            .with_fault(self.fault)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn merge_and_split_matrices() {
        let m = edge_map(EdgeKind::Merge { a: 0, b: 1 }, vec![0, 0], 1).unwrap();
        assert_eq!((m.rows(), m.cols(), m.rank()), (2, 4, 2));
        let s = edge_map(EdgeKind::Split { from: 0, first: 0, second: 1 }, vec![0], 2).unwrap();
        assert_eq!((s.rows(), s.cols(), s.rank()), (4, 2, 2));
        // Δ(1) = S_0 + S_1
        assert!(s.get(0b01, 0) && s.get(0b10, 0) && !s.get(0, 0));
        assert!(m.mul(&s).is_zero());
    }

    #[test]
    fn bad_circle_maps_are_rejected() {
        assert!(matches!(
            edge_map(EdgeKind::Merge { a: 0, b: 1 }, vec![0, 1], 1),
            Err(KhError::BadCircleMap(_))
        ));
        assert!(matches!(
            edge_map(EdgeKind::Split { from: 0, first: 0, second: 0 }, vec![0], 2),
            Err(KhError::BadCircleMap(_))
        ));
    }

    #[test]
    fn cube_circle_counts() {
        let u = CubeComplex::build(&Diagram::unknot(), None, 14).unwrap();
        assert_eq!(u.circle_counts_by_weight(), vec![1]);
        let h = CubeComplex::build(&parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap(), None, 14).unwrap();
        assert_eq!(h.circle_counts_by_weight(), vec![2, 1, 1, 2]);
        let t = CubeComplex::build(&parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap(), None, 14).unwrap();
        assert_eq!(t.circle_counts_by_weight(), vec![3, 2, 2, 2, 1, 1, 1, 2]);
        let m = CubeComplex::build(&t.diagram().mirror(), None, 14).unwrap();
        assert_eq!(m.circle_counts_by_weight(), vec![2, 1, 1, 1, 2, 2, 2, 3]);
    }

    #[test]
    fn crossing_cap_is_enforced() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        assert!(matches!(
            CubeComplex::build(&t, None, 2),
            Err(KhError::SizeBudgetExceeded { crossings: 3, cap: 2 })
        ));
    }
}
