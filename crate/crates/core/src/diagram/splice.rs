use std::collections::HashMap;

use super::{Diagram, Mode, UnionFind};

/// Slot pairs joined when a crossing is taken out of the diagram.
const ZERO: [[usize; 2]; 2] = [[0, 1], [2, 3]];
const ONE: [[usize; 2]; 2] = [[0, 3], [1, 2]];
const THROUGH: [[usize; 2]; 2] = [[0, 2], [1, 3]];

impl Diagram {
    /// Removes the listed crossings, joining slots of each as given.
    /// With `keep_orientation` the surviving components keep their direction;
    /// this only makes sense for through-strand joins.
    fn splice(&self, removed: &[(usize, [[usize; 2]; 2])], keep_orientation: bool) -> Diagram {
        let m = self.arc_count as usize;
        let mut uf = UnionFind::new(m + 1);
        let mut gone = vec![false; self.crossings.len()];
        for &(c, pairs) in removed {
            gone[c] = true;
            let t = self.crossings[c];
            for p in pairs {
                uf.union(t[p[0]] as usize, t[p[1]] as usize);
            }
        }
        let mut label: HashMap<usize, u32> = HashMap::new();
        let mut crossings = Vec::new();
        let mut origin = Vec::new();
        for (c, t) in self.crossings.iter().enumerate() {
            if gone[c] {
                continue;
            }
            let mut nt = [0u32; 4];
            for (k, &a) in t.iter().enumerate() {
                let r = uf.find(a as usize);
                let next = label.len() as u32 + 1;
                nt[k] = *label.entry(r).or_insert(next);
            }
            crossings.push(nt);
            origin.push(c);
        }
        let mut closed: Vec<usize> = (1..=m).map(|a| uf.find(a)).filter(|r| !label.contains_key(r)).collect();
        closed.sort_unstable();
        closed.dedup();
        let free = self.free_loops + closed.len() as u32;
        let d = Diagram::build(crossings, free, None, Mode::Normalize).expect("splicing keeps a diagram planar");
        if !keep_orientation || d.components.is_empty() {
            return d;
        }
        // compare each new component's native direction with the old one
        let orientation: Vec<i8> = d
            .components
            .iter()
            .map(|arcs| {
                let a = arcs[0];
                let (c, s) = d.native_head[a as usize - 1];
                let old_c = origin[c as usize];
                let t_new = d.crossings[c as usize];
                let t_old = self.crossings[old_c];
                // the tuple may have been rotated by two slots
                let rot = if (0..4).all(|k| lab(&uf, &label, t_old[k]) == t_new[k]) { 0 } else { 2 };
                let old_slot = ((s as usize + rot) % 4) as u8;
                let old_arc = t_old[old_slot as usize];
                if self.arc_head(old_arc) == (old_c as u32, old_slot) {
                    1
                } else {
                    -1
                }
            })
            .collect();
        d.with_orientation(&orientation).expect("orientation length matches")
    }

    /// Takes the 0- or 1-resolution at one crossing.
    pub fn resolve_crossing(&self, c: usize, bit: u8) -> Diagram {
        self.splice(&[(c, if bit == 0 { ZERO } else { ONE })], false)
    }

    /// Applies Reidemeister 1 and 2 removals until none is visible in the code.
    pub fn simplify_greedy(&self) -> Diagram {
        let mut d = self.clone();
        loop {
            if let Some(c) = d.find_r1() {
                d = d.splice(&[(c, THROUGH)], true);
                continue;
            }
            if let Some((p, q)) = d.find_r2() {
                d = d.splice(&[(p, THROUGH), (q, THROUGH)], true);
                continue;
            }
            return d;
        }
    }

    fn find_r1(&self) -> Option<usize> {
        self.crossings
            .iter()
            .position(|t| (0..4).any(|s| t[s] == t[(s + 1) % 4]))
    }

    /// A bigon face whose bounding arcs pass over at both of its crossings.
    fn find_r2(&self) -> Option<(usize, usize)> {
        let faces = self.faces().ok()?;
        for f in &faces.faces {
            if f.len() != 2 {
                continue;
            }
            let (p, s) = f[0];
            let (q, t) = f[1];
            if p == q {
                continue;
            }
            // the arc leaving corner (p,s) at slot s+1 arrives at slot t of q
            if (s + 1) % 2 == t % 2 {
                return Some((p as usize, q as usize));
            }
        }
        None
    }
}

fn lab(uf: &UnionFind, label: &HashMap<usize, u32>, a: u32) -> u32 {
    let mut x = a as usize;
    while uf.parent[x] != x {
        x = uf.parent[x];
    }
    label[&x]
}

#[cfg(test)]
mod tests {
    use crate::diagram::{parse_pd, Diagram};

    #[test]
    fn kink_reduces_to_a_free_loop() {
        let k = parse_pd("[[1,2,2,1]]", 0).unwrap();
        let s = k.simplify_greedy();
        assert_eq!(s.crossing_count(), 0);
        assert_eq!(s.free_loops(), 1);
    }

    #[test]
    fn curled_unknot_reduces() {
        let d = parse_pd("[[4,2,1,1],[2,4,3,3]]", 0).unwrap();
        let s = d.simplify_greedy();
        assert_eq!(s.crossing_count(), 0);
        assert_eq!(s.free_loops(), 1);
    }

    #[test]
    fn r2_bigon_between_two_components() {
        let d = parse_pd("[[1,2,3,4],[3,2,1,4]]", 0).unwrap();
        assert!(d.find_r1().is_none());
        assert!(d.find_r2().is_some());
        let s = d.simplify_greedy();
        assert_eq!(s.crossing_count(), 0);
        assert_eq!(s.free_loops(), 2);
    }

    #[test]
    fn clasp_is_not_an_r2_bigon() {
        let h = parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap();
        assert!(h.find_r2().is_none());
        assert_eq!(h.simplify_greedy(), h);
    }

    #[test]
    fn trefoil_is_unchanged() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        assert_eq!(t.simplify_greedy(), t);
    }

    #[test]
    fn simplify_is_idempotent_and_keeps_signs_of_survivors() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        let kinked = t.connected_sum(&parse_pd("[[1,2,2,1]]", 0).unwrap());
        let s = kinked.simplify_greedy();
        assert_eq!(s.crossing_count(), 3);
        assert_eq!(s.n_minus(), 3);
        assert_eq!(s.simplify_greedy(), s);
        assert_eq!(Diagram::unknot().simplify_greedy(), Diagram::unknot());
    }

    #[test]
    fn resolving_a_crossing_drops_it() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        for bit in 0..2 {
            let r = t.resolve_crossing(0, bit);
            assert_eq!(r.crossing_count(), 2);
            for st in 0..4u64 {
                let full = (st & 1) << 1 | (st & 2) << 1 | bit as u64;
                assert_eq!(
                    r.resolve(st, None).unwrap().circle_count,
                    t.resolve(full, None).unwrap().circle_count
                );
            }
        }
    }
}
