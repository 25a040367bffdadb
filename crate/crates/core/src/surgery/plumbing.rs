use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::lspace::{Derivation, LSpaceVerdict, Rule, VerdictKind};
use super::SurgeryError;
use crate::diagram::UnionFind;
use crate::linalg::{cokernel_group, MatZ};

/// Weighted graph (G, m) describing the plumbed 3-manifold Y(G, m).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlumbingGraph {
    pub mult: Vec<i64>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
}

impl PlumbingGraph {
    pub fn new(mult: Vec<i64>, edges: Vec<[usize; 2]>) -> Result<Self, SurgeryError> {
        let g = PlumbingGraph { mult, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SurgeryError> {
        let n = self.mult.len();
        for &[a, b] in &self.edges {
            if a >= n || b >= n {
                return Err(SurgeryError::Malformed(format!("edge [{a},{b}] out of range")));
            }
            if a == b {
                return Err(SurgeryError::Malformed(format!("self-loop at vertex {a}")));
            }
        }
        Ok(())
    }

    /// Linear chain A_n with the given weights.
    pub fn chain(mult: Vec<i64>) -> Self {
        let edges = (1..mult.len()).map(|i| [i - 1, i]).collect();
        PlumbingGraph { mult, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.mult.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.mult.len()];
        for &[a, b] in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_forest(&self) -> bool {
        let mut uf = UnionFind::new(self.mult.len());
        self.edges.iter().all(|&[a, b]| uf.union(a, b))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.mult.len());
        for &[a, b] in &self.edges {
            uf.union(a, b);
        }
        let mut by_root: Vec<Vec<usize>> = Vec::new();
        let mut slot = HashMap::new();
        for v in 0..self.mult.len() {
            let r = uf.find(v);
            let i = *slot.entry(r).or_insert_with(|| {
                by_root.push(Vec::new());
                by_root.len() - 1
            });
            by_root[i].push(v);
        }
        by_root
    }

    /// Induced subgraph on `keep` (ascending), relabelled 0..keep.len().
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.mult.len()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        PlumbingGraph {
            mult: keep.iter().map(|&v| self.mult[v]).collect(),
            edges: self
                .edges
                .iter()
                .filter(|&&[a, b]| index[a] != usize::MAX && index[b] != usize::MAX)
                .map(|&[a, b]| [index[a], index[b]])
                .collect(),
        }
    }

    fn without(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.mult.len()).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    fn key(&self) -> (Vec<i64>, Vec<[usize; 2]>) {
        let mut e: Vec<[usize; 2]> = self.edges.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        e.sort_unstable();
        (self.mult.clone(), e)
    }

    fn label(&self) -> String {
        format!("Y(G,m) m={:?} edges={:?}", self.mult, self.key().1)
    }
}

/// m(v) on the diagonal, 1 for each edge.
pub fn plumbing_linking_matrix(g: &PlumbingGraph) -> MatZ {
    let mut m = MatZ::diagonal(&g.mult);
    for &[a, b] in &g.edges {
        m[(a, b)] += BigInt::from(1);
        m[(b, a)] += BigInt::from(1);
    }
    m
}

fn linking_rows(g: &PlumbingGraph) -> Vec<Vec<i64>> {
    let n = g.vertex_count();
    let mut rows = vec![vec![0i64; n]; n];
    for (i, &m) in g.mult.iter().enumerate() {
        rows[i][i] = m;
    }
    for &[a, b] in &g.edges {
        rows[a][b] += 1;
        rows[b][a] += 1;
    }
    rows
}

/// Why the forest and degree hypotheses fail, if they do.
fn hypothesis_failure(g: &PlumbingGraph) -> Option<String> {
    if !g.is_forest() {
        return Some("graph is not a disjoint union of trees".into());
    }
    let d = g.degrees();
    if let Some(v) = (0..g.vertex_count()).find(|&v| d[v] as i64 > g.mult[v]) {
        return Some(format!("vertex {v} has degree {} > multiplicity {}", d[v], g.mult[v]));
    }
    for comp in g.components() {
        if comp.iter().all(|&v| d[v] as i64 == g.mult[v]) {
            return Some(format!(
                "component containing vertex {} has d(v) = m(v) everywhere",
                comp[0]
            ));
        }
    }
    None
}

struct Deriver {
    d: Derivation,
    memo: HashMap<(Vec<i64>, Vec<[usize; 2]>), usize>,
}

impl Deriver {
    fn record(&mut self, g: &PlumbingGraph, rule: Rule) -> Result<usize, String> {
        let id = self.d.push(g.label(), Some(linking_rows(g)), None, rule)?;
        self.memo.insert(g.key(), id);
        Ok(id)
    }

    fn derive(&mut self, g: &PlumbingGraph) -> Result<usize, String> {
        if let Some(&id) = self.memo.get(&g.key()) {
            return Ok(id);
        }
        let comps = g.components();
        if comps.len() > 1 {
            let parts = comps
                .iter()
                .map(|c| self.derive(&g.induced(c)))
                .collect::<Result<Vec<_>, _>>()?;
            return self.record(g, Rule::ConnectedSum { parts });
        }
        if g.vertex_count() == 1 {
            let p = g.mult[0];
            if p < 1 {
                return Err(format!("single vertex with multiplicity {p}"));
            }
            return self.record(g, Rule::LensSeed { p: p as u128 });
        }
        let deg = g.degrees();
        let leaf = (0..g.vertex_count())
            .find(|&v| deg[v] == 1)
            .ok_or("tree without a leaf")?;
        let nbr = g
            .edges
            .iter()
            .find_map(|&[a, b]| match (a == leaf, b == leaf) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .expect("leaf has an edge");
        let top = g.mult[leaf];
        let mut at = g.clone();
        at.mult[leaf] = 1;
        let mut prev = match self.memo.get(&at.key()) {
            Some(&id) => id,
            None => {
                let mut down = g.clone();
                down.mult[nbr] -= 1;
                let down = down.without(leaf);
                let from = self.derive(&down)?;
                self.record(&at, Rule::BlowDown { from })?
            }
        };
        if top > 1 {
            let y0 = self.derive(&g.without(leaf))?;
            for k in 2..=top {
                at.mult[leaf] = k;
                prev = match self.memo.get(&at.key()) {
                    Some(&id) => id,
                    None => self.record(&at, Rule::Triad { y0, y1: prev })?,
                };
            }
        }
        Ok(prev)
    }
}

/// Certifies Y(G, m) when G is a forest with d(v) ≤ m(v) everywhere and strict
/// inequality somewhere in each component, by leaf blow-downs and triads.
pub fn plumbing_lspace_check(g: &PlumbingGraph) -> Result<LSpaceVerdict, SurgeryError> {
    g.validate()?;
    let order = cokernel_group(&plumbing_linking_matrix(g))?.order_or_zero();
    if g.vertex_count() == 0 {
        return Ok(LSpaceVerdict::other(VerdictKind::NotApplicable, order, "empty graph"));
    }
    if let Some(reason) = hypothesis_failure(g) {
        return Ok(LSpaceVerdict::other(VerdictKind::NotApplicable, order, reason));
    }
    let mut der = Deriver {
        d: Derivation::default(),
        memo: HashMap::new(),
    };
    Ok(match der.derive(g) {
        Ok(_) => LSpaceVerdict::certified(der.d.steps),
        Err(e) => LSpaceVerdict::other(VerdictKind::Unknown, order, e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        for p in 1..=12 {
            let v = plumbing_lspace_check(&PlumbingGraph::chain(vec![p])).unwrap();
            assert!(v.is_certified());
            assert_eq!(v.h1, p as u128);
        }
        let v = plumbing_lspace_check(&PlumbingGraph::chain(vec![0])).unwrap();
        assert_eq!(v.verdict, VerdictKind::NotApplicable);
        assert_eq!(v.h1, 0);
    }

    #[test]
    fn a_n_chains() {
        for n in 1..=10 {
            let g = PlumbingGraph::chain(vec![2; n]);
            let v = plumbing_lspace_check(&g).unwrap();
            assert!(v.is_certified(), "{v:?}");
            assert_eq!(v.h1, n as u128 + 1);
            v.verify().unwrap();
        }
        let a2 = PlumbingGraph::chain(vec![2, 2]);
        assert_eq!(
            plumbing_linking_matrix(&a2).to_i64_rows().unwrap(),
            vec![vec![2, 1], vec![1, 2]]
        );
    }

    #[test]
    fn star_and_forest() {
        let g = PlumbingGraph::new(vec![3, 2, 2, 2], vec![[0, 1], [0, 2], [0, 3]]).unwrap();
        let v = plumbing_lspace_check(&g).unwrap();
        assert!(v.is_certified());
        v.verify().unwrap();
        let det = plumbing_linking_matrix(&g).determinant();
        assert_eq!(BigInt::from(v.h1), det);
        let f = PlumbingGraph::new(vec![2, 2, 5], vec![[0, 1]]).unwrap();
        let v = plumbing_lspace_check(&f).unwrap();
        assert_eq!(v.h1, 15);
        assert!(matches!(v.derivation.last().unwrap().rule, Rule::ConnectedSum { .. }));
        v.verify().unwrap();
    }

    #[test]
    fn hypotheses() {
        let cyc = PlumbingGraph::new(vec![3, 3, 3], vec![[0, 1], [1, 2], [2, 0]]).unwrap();
        assert_eq!(plumbing_lspace_check(&cyc).unwrap().verdict, VerdictKind::NotApplicable);
        let tight = PlumbingGraph::chain(vec![1, 1]);
        let v = plumbing_lspace_check(&tight).unwrap();
        assert_eq!(v.verdict, VerdictKind::NotApplicable);
        assert_eq!(v.h1, 0);
        let split = PlumbingGraph::new(vec![1, 1, 3], vec![[0, 1]]).unwrap();
        assert_eq!(plumbing_lspace_check(&split).unwrap().verdict, VerdictKind::NotApplicable);
        assert!(PlumbingGraph::new(vec![1], vec![[0, 0]]).is_err());
        assert!(PlumbingGraph::new(vec![1], vec![[0, 3]]).is_err());
    }

    #[test]
    fn large_weights_stay_linear() {
        let g = PlumbingGraph::chain(vec![200, 3, 150]);
        let v = plumbing_lspace_check(&g).unwrap();
        assert!(v.is_certified());
        assert!(v.derivation.len() < 1000);
        v.verify().unwrap();
    }
}
