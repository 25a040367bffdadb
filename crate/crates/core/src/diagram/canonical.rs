use std::collections::{HashMap, VecDeque};

use super::Diagram;

/// Relabelling-invariant form of a PD code, used as a memo key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalPd {
    pub free_loops: u32,
    pub crossings: Vec<[u32; 4]>,
}

impl Diagram {
    /// Minimum over all breadth-first relabellings started from each
    /// (crossing, slot). Tuples are stored in the smaller of their two
    /// under-first rotations, then sorted.
    pub fn canonical(&self) -> CanonicalPd {
        let n = self.crossings.len();
        let mut best: Option<Vec<[u32; 4]>> = None;
        for c0 in 0..n {
            for s0 in 0..4u8 {
                let cand = self.relabel_from(c0, s0);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        CanonicalPd {
            free_loops: self.free_loops,
            crossings: best.unwrap_or_default(),
        }
    }

    fn relabel_from(&self, c0: usize, s0: u8) -> Vec<[u32; 4]> {
        let n = self.crossings.len();
        let mut label: HashMap<u32, u32> = HashMap::new();
        let mut visited = vec![false; n];
        let mut queue = VecDeque::new();
        let mut out = Vec::with_capacity(n);
        let mut seeds = std::iter::once((c0, s0)).chain((0..n).map(|c| (c, 0)));
        loop {
            if queue.is_empty() {
                match seeds.by_ref().find(|&(c, _)| !visited[c]) {
                    Some(seed) => queue.push_back(seed),
                    None => break,
                }
            }
            let Some((c, e)) = queue.pop_front() else { break };
            if visited[c] {
                continue;
            }
            visited[c] = true;
            for k in 0..4u8 {
                let slot = (e + k) % 4;
                let arc = self.crossings[c][slot as usize];
                if !label.contains_key(&arc) {
                    let next = label.len() as u32 + 1;
                    label.insert(arc, next);
                }
                let (c2, s2) = super::other_end(&self.ends, arc, (c as u32, slot));
                if !visited[c2 as usize] {
                    queue.push_back((c2 as usize, s2));
                }
            }
        }
        for t in &self.crossings {
            let r = t.map(|a| label[&a]);
            let r2 = [r[2], r[3], r[0], r[1]];
            out.push(r.min(r2));
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::diagram::parse_pd;

    #[test]
    fn relabelled_trefoil_has_the_same_key() {
        let a = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        // shift every label by 2 (cyclically) and reorder the crossings
        let b = parse_pd("[[5,2,6,3],[1,4,2,5],[3,6,4,1]]", 0).unwrap();
        let c = parse_pd("[[3,6,4,1],[5,2,6,3],[1,4,2,5]]", 0).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.canonical(), c.canonical());
        assert_ne!(a.canonical(), a.mirror().canonical());
    }
}
