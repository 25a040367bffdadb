use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use super::goeritz;
use crate::diagram::{CanonicalPd, Diagram};
use crate::khovanov::state_sum_det;

/// A proof tree that a link is quasi-alternating.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QACertificate {
    pub pd: Vec<[u32; 4]>,
    pub free_loops: u32,
    pub node: QANode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QANode {
    /// Simplifies to the crossingless unknot.
    Unknot,
    Resolve {
        crossing: usize,
        det: u64,
        det0: u64,
        det1: u64,
        zero: Box<QACertificate>,
        one: Box<QACertificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QAVerdict {
    Certified { certificate: QACertificate },
    Unknown { reason: String },
}

type Memo = Arc<RwLock<HashMap<CanonicalPd, Option<QACertificate>>>>;

fn canonical_diagram(d: &Diagram) -> Diagram {
    let key = d.canonical();
    Diagram::from_pd_normalized(&key.crossings, key.free_loops).expect("canonical form is a valid diagram")
}

fn is_unknot(d: &Diagram) -> bool {
    d.crossing_count() == 0 && d.free_loops() == 1
}

fn goeritz_det(d: &Diagram) -> u64 {
    goeritz(d).map(|g| g.det()).unwrap_or(0)
}

struct Search {
    memo: Memo,
    budget: usize,
    spent: usize,
    exhausted: bool,
}

impl Search {
    /// Depth-first search on a diagram already in canonical form.
    fn run(&mut self, d: &Diagram) -> Option<QACertificate> {
        let key = d.canonical();
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        if self.spent >= self.budget {
            self.exhausted = true;
            return None;
        }
        self.spent += 1;
        let out = self.expand(d);
        if out.is_some() || !self.exhausted {
            self.memo.write().expect("memo lock").insert(key, out.clone());
        }
        out
    }

    fn expand(&mut self, d: &Diagram) -> Option<QACertificate> {
        if is_unknot(d) {
            return Some(leaf(d));
        }
        let det = goeritz_det(d);
        if det == 0 {
            return None;
        }
        for c in 0..d.crossing_count() {
            if let Some(node) = self.try_crossing(d, c, det) {
                return Some(node);
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }

    fn try_crossing(&mut self, d: &Diagram, c: usize, det: u64) -> Option<QACertificate> {
        let d0 = canonical_diagram(&d.resolve_crossing(c, 0).simplify_greedy());
        let d1 = canonical_diagram(&d.resolve_crossing(c, 1).simplify_greedy());
        let (det0, det1) = (goeritz_det(&d0), goeritz_det(&d1));
        if det0 == 0 || det1 == 0 || det0 + det1 != det {
            return None;
        }
        let zero = self.run(&d0)?;
        let one = self.run(&d1)?;
        Some(QACertificate {
            pd: d.crossings().to_vec(),
            free_loops: d.free_loops(),
            node: QANode::Resolve {
                crossing: c,
                det,
                det0,
                det1,
                zero: Box::new(zero),
                one: Box::new(one),
            },
        })
    }
}

fn leaf(d: &Diagram) -> QACertificate {
    QACertificate {
        pd: d.crossings().to_vec(),
        free_loops: d.free_loops(),
        node: QANode::Unknot,
    }
}

/// Searches for a quasi-alternating certificate. Top-level crossings are
/// tried in parallel with a shared memo, each with `budget` node expansions;
/// the lowest-index success is reported. Failure is always `Unknown`.
pub fn qa_certify(d: &Diagram, budget: usize) -> QAVerdict {
    let root = canonical_diagram(&d.simplify_greedy());
    if is_unknot(&root) {
        return QAVerdict::Certified { certificate: leaf(&root) };
    }
    let det = goeritz_det(&root);
    if det == 0 {
        return QAVerdict::Unknown {
            reason: "determinant is zero".into(),
        };
    }
    let memo: Memo = Arc::new(RwLock::new(HashMap::new()));
    let results: Vec<(Option<QACertificate>, bool)> = (0..root.crossing_count())
        .into_par_iter()
        .map(|c| {
            let mut s = Search {
                memo: memo.clone(),
                budget,
                spent: 0,
                exhausted: false,
            };
            (s.try_crossing(&root, c, det), s.exhausted)
        })
        .collect();
    let exhausted = results.iter().any(|r| r.1);
    match results.into_iter().find_map(|r| r.0) {
        Some(certificate) => QAVerdict::Certified { certificate },
        None if exhausted => QAVerdict::Unknown {
            reason: format!("node budget of {budget} exhausted"),
        },
        None => QAVerdict::Unknown {
            reason: "no crossing gives a certificate with greedy unknot recognition".into(),
        },
    }
}

impl QACertificate {
    pub fn diagram(&self) -> Diagram {
        Diagram::from_pd_normalized(&self.pd, self.free_loops).expect("certificate stores a valid diagram")
    }

    /// Re-checks every node with the state-sum determinant.
    pub fn verify(&self) -> Result<(), String> {
        let d = self.diagram();
        match &self.node {
            QANode::Unknot => {
                if is_unknot(&d.simplify_greedy()) {
                    Ok(())
                } else {
                    Err("leaf does not simplify to the unknot".into())
                }
            }
            QANode::Resolve {
                crossing,
                det,
                det0,
                det1,
                zero,
                one,
            } => {
                if *crossing >= d.crossing_count() {
                    return Err(format!("crossing {crossing} out of range"));
                }
                let cap = usize::MAX;
                let det_of = |x: &Diagram| state_sum_det(x, cap).map_err(|e| e.to_string());
                let children = [(0u8, zero, det0), (1u8, one, det1)];
                for (bit, child, child_det) in children {
                    let r = d.resolve_crossing(*crossing, bit).simplify_greedy();
                    if r.canonical() != child.diagram().canonical() {
                        return Err(format!("child {bit} at crossing {crossing} is not the resolution"));
                    }
                    if det_of(&r)? != *child_det || *child_det == 0 {
                        return Err(format!("child {bit} determinant is wrong"));
                    }
                    child.verify()?;
                }
                if det_of(&d)? != *det || det0 + det1 != *det {
                    return Err(format!("determinants {det} != {det0} + {det1}"));
                }
                Ok(())
            }
        }
    }

    /// (det, det0, det1) at the root, if it is an internal node.
    pub fn det_triple(&self) -> Option<(u64, u64, u64)> {
        match &self.node {
            QANode::Unknot => None,
            QANode::Resolve { det, det0, det1, .. } => Some((*det, *det0, *det1)),
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.node {
            QANode::Unknot => 1,
            QANode::Resolve { zero, one, .. } => 1 + zero.node_count() + one.node_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn certify(code: &str) -> QACertificate {
        match qa_certify(&parse_pd(code, 0).unwrap(), 10_000) {
            QAVerdict::Certified { certificate } => certificate,
            QAVerdict::Unknown { reason } => panic!("{code}: {reason}"),
        }
    }

    #[test]
    fn unknot_is_a_leaf() {
        match qa_certify(&Diagram::unknot(), 10) {
            QAVerdict::Certified { certificate } => assert_eq!(certificate.node, QANode::Unknot),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn hopf_and_trefoil() {
        let h = certify("[[1,3,2,4],[3,1,4,2]]");
        assert_eq!(h.det_triple(), Some((2, 1, 1)));
        h.verify().unwrap();
        let t = certify("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]");
        let (d, a, b) = t.det_triple().unwrap();
        assert_eq!((d, a.max(b), a.min(b)), (3, 2, 1));
        t.verify().unwrap();
    }

    #[test]
    fn split_links_are_unknown() {
        assert!(matches!(qa_certify(&Diagram::unlink(2), 100), QAVerdict::Unknown { .. }));
    }

    #[test]
    fn tiny_budget_gives_unknown() {
        let d = parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", 0).unwrap();
        assert!(matches!(qa_certify(&d, 0), QAVerdict::Unknown { .. }));
    }
}
