//! Planar link diagrams in PD notation.
//!
//! A crossing is a 4-tuple of arc labels listed counterclockwise starting at
//! the incoming under-strand. Slots 0 and 2 carry the under-strand, slots 1
//! and 3 the over-strand. The 0-resolution joins slots (0,1) and (2,3); the
//! 1-resolution joins (0,3) and (1,2).
//!
//! Crossingless unknotted components cannot be written in PD form, so a
//! diagram also carries a count of free loops.

mod canonical;
mod marking;
mod planar;
mod splice;

pub use canonical::CanonicalPd;
pub use marking::{induce_marking, ArcMarking, TwoFoldMarking};
pub use planar::{FaceMap, Faces};

use std::collections::HashMap;

/// A position on a crossing: (crossing index, slot 0..4).
pub type Slot = (u32, u8);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("malformed PD code: {0}")]
    MalformedPd(String),
    #[error("strand tracing is inconsistent: {0}")]
    DisconnectedTrace(String),
    #[error("PD code does not describe a planar diagram: {0}")]
    NonPlanar(String),
    #[error("state has {got} bits but the diagram has {expected} crossings")]
    LengthMismatch { expected: usize, got: usize },
    #[error("marking is incompatible with the diagram: {0}")]
    IncompatibleMarking(String),
    #[error("orientation has {got} entries, expected {expected}")]
    OrientationLength { expected: usize, got: usize },
    #[error("basepoint arc {0} is not an arc of the diagram")]
    BadBasepoint(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    crossings: Vec<[u32; 4]>,
    arc_count: u32,
    free_loops: u32,
    /// Arcs of each component, in native traversal order.
    components: Vec<Vec<u32>>,
    /// Component index of arc `a` at `a - 1`.
    arc_component: Vec<u32>,
    /// Per component: +1 follows the native direction, -1 reverses it.
    orientation: Vec<i8>,
    /// The two ends of arc `a` at `a - 1`.
    ends: Vec<[Slot; 2]>,
    /// End of arc `a` reached when travelling in the native direction.
    native_head: Vec<Slot>,
    /// Whether the over-strand natively runs from slot 1 to slot 3.
    over_forward: Vec<bool>,
    signs: Vec<i8>,
}

/// How to treat tuples whose under-strand is not listed incoming-first.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Normalize,
}

impl Diagram {
    /// The crossingless unknot.
    pub fn unknot() -> Self {
        Self::unlink(1)
    }

    /// Crossingless unlink with `k` components.
    pub fn unlink(k: u32) -> Self {
        Self::from_pd(&[], k, None).expect("crossingless unlink is valid")
    }

    /// Validates a PD code under the slot convention above.
    pub fn from_pd(
        crossings: &[[u32; 4]],
        free_loops: u32,
        orientation: Option<&[i8]>,
    ) -> Result<Self, DiagramError> {
        Self::build(crossings.to_vec(), free_loops, orientation, Mode::Strict)
    }

    /// Like [`Diagram::from_pd`] but rotates tuples by two slots where needed
    /// so the under-strand is listed incoming-first. Used for diagrams derived
    /// by resolving or splicing crossings.
    pub fn from_pd_normalized(crossings: &[[u32; 4]], free_loops: u32) -> Result<Self, DiagramError> {
        Self::build(crossings.to_vec(), free_loops, None, Mode::Normalize)
    }

    fn build(
        mut crossings: Vec<[u32; 4]>,
        free_loops: u32,
        orientation: Option<&[i8]>,
        mode: Mode,
    ) -> Result<Self, DiagramError> {
        let n = crossings.len();
        let arc_count = (2 * n) as u32;
        let mut count = vec![0u8; arc_count as usize + 1];
        for (i, t) in crossings.iter().enumerate() {
            for &a in t {
                if a == 0 || a > arc_count {
                    return Err(DiagramError::MalformedPd(format!(
                        "crossing {i} uses label {a}, labels must lie in 1..={arc_count}"
                    )));
                }
                count[a as usize] += 1;
            }
        }
        if let Some(a) = (1..=arc_count).find(|&a| count[a as usize] != 2) {
            return Err(DiagramError::MalformedPd(format!(
                "arc {a} appears {} times, expected 2",
                count[a as usize]
            )));
        }

        let ends = compute_ends(&crossings, arc_count);
        let traces = trace_components(&crossings, &ends);

        if mode == Mode::Normalize {
            let mut changed = false;
            for tr in &traces {
                // make every under passage enter at slot 0
                for &(c, s) in &tr.passages {
                    if s == 2 {
                        let t = crossings[c as usize];
                        crossings[c as usize] = [t[2], t[3], t[0], t[1]];
                        changed = true;
                    }
                }
            }
            if changed {
                return Self::build(crossings, free_loops, orientation, Mode::Strict);
            }
        }

        let mut components = Vec::with_capacity(traces.len());
        let mut arc_component = vec![0u32; arc_count as usize];
        let mut native_head = vec![(0u32, 0u8); arc_count as usize];
        let mut over_forward = vec![true; n];
        for (ci, tr) in traces.into_iter().enumerate() {
            let unders: Vec<u8> = tr.passages.iter().filter(|p| p.1 % 2 == 0).map(|p| p.1).collect();
            let reverse = if unders.is_empty() {
                // no under passage: prefer the direction in which labels grow
                tr.arcs.len() > 1 && tr.arcs[1] > *tr.arcs.last().unwrap()
            } else if unders.iter().all(|&s| s == 0) {
                false
            } else if unders.iter().all(|&s| s == 2) {
                true
            } else {
                return Err(DiagramError::DisconnectedTrace(format!(
                    "component through arc {} passes under both incoming-first and outgoing-first",
                    tr.arcs[0]
                )));
            };
            let (arcs, heads): (Vec<u32>, Vec<Slot>) = if reverse {
                // travelling backwards, each arc heads to its other end
                let mut arcs = tr.arcs.clone();
                arcs.reverse();
                let heads = arcs
                    .iter()
                    .zip(tr.heads.iter().rev())
                    .map(|(&a, &h)| other_end(&ends, a, h))
                    .collect();
                (arcs, heads)
            } else {
                (tr.arcs.clone(), tr.heads.clone())
            };
            for (&a, &h) in arcs.iter().zip(&heads) {
                arc_component[a as usize - 1] = ci as u32;
                native_head[a as usize - 1] = h;
                let (c, s) = h;
                if s % 2 == 1 {
                    over_forward[c as usize] = s == 1;
                }
            }
            let mut arcs = arcs;
            let lowest = (0..arcs.len()).min_by_key(|&i| arcs[i]).unwrap_or(0);
            arcs.rotate_left(lowest);
            components.push(arcs);
        }

        let orientation = match orientation {
            None => vec![1i8; components.len()],
            Some(o) => {
                // entries for free loops are accepted and ignored
                if o.len() != components.len() && o.len() != components.len() + free_loops as usize {
                    return Err(DiagramError::OrientationLength {
                        expected: components.len(),
                        got: o.len(),
                    });
                }
                if let Some(bad) = o.iter().find(|&&x| x != 1 && x != -1) {
                    return Err(DiagramError::MalformedPd(format!("orientation entry {bad} is not ±1")));
                }
                o[..components.len()].to_vec()
            }
        };

        let mut d = Diagram {
            crossings,
            arc_count,
            free_loops,
            components,
            arc_component,
            orientation,
            ends,
            native_head,
            over_forward,
            signs: Vec::new(),
        };
        d.signs = (0..n).map(|c| d.compute_sign(c)).collect();
        d.faces()?;
        Ok(d)
    }

    fn compute_sign(&self, c: usize) -> i8 {
        let t = self.crossings[c];
        let under_comp = self.arc_component[t[0] as usize - 1] as usize;
        let over_comp = self.arc_component[t[1] as usize - 1] as usize;
        let under_forward = self.orientation[under_comp] == 1;
        let over_forward = self.over_forward[c] == (self.orientation[over_comp] == 1);
        if under_forward == over_forward {
            -1
        } else {
            1
        }
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn arc_count(&self) -> u32 {
        self.arc_count
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    /// Components that carry arcs, in order of their smallest arc label.
    pub fn arc_components(&self) -> &[Vec<u32>] {
        &self.components
    }

    /// Total number of link components, free loops included.
    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops as usize
    }

    pub fn component_of_arc(&self, arc: u32) -> usize {
        self.arc_component[arc as usize - 1] as usize
    }

    pub fn orientation(&self) -> &[i8] {
        &self.orientation
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn arc_ends(&self, arc: u32) -> [Slot; 2] {
        self.ends[arc as usize - 1]
    }

    /// The end an arc runs into under the chosen orientation.
    pub fn arc_head(&self, arc: u32) -> Slot {
        let h = self.native_head[arc as usize - 1];
        if self.orientation[self.component_of_arc(arc)] == 1 {
            h
        } else {
            other_end(&self.ends, arc, h)
        }
    }

    /// The end an arc leaves from under the chosen orientation.
    pub fn arc_tail(&self, arc: u32) -> Slot {
        other_end(&self.ends, arc, self.arc_head(arc))
    }

    /// Same diagram with a new orientation.
    pub fn with_orientation(&self, orientation: &[i8]) -> Result<Self, DiagramError> {
        Self::from_pd(&self.crossings, self.free_loops, Some(orientation))
    }

    /// Planar faces; fails for codes that do not embed in the sphere.
    pub fn faces(&self) -> Result<Faces, DiagramError> {
        planar::Faces::compute(self)
    }

    /// Connected pieces of the underlying 4-valent graph, as crossing lists.
    pub fn graph_components(&self) -> Vec<Vec<usize>> {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(n);
        for e in &self.ends {
            uf.union(e[0].0 as usize, e[1].0 as usize);
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut order = Vec::new();
        for c in 0..n {
            let r = uf.find(c);
            groups
                .entry(r)
                .or_insert_with(|| {
                    order.push(r);
                    Vec::new()
                })
                .push(c);
        }
        order.into_iter().map(|r| groups.remove(&r).unwrap()).collect()
    }

    /// True when the 4-valent graph is connected and there are no extra free loops.
    pub fn is_connected(&self) -> bool {
        if self.crossings.is_empty() {
            self.free_loops <= 1
        } else {
            self.free_loops == 0 && self.graph_components().len() == 1
        }
    }

    /// Resolves every crossing. Bit `i` of `state` picks the resolution of crossing `i`.
    pub fn resolve(&self, state: u64, basepoint: Option<u32>) -> Result<ResolvedState, DiagramError> {
        if self.crossings.len() < 64 && state >> self.crossings.len() != 0 {
            return Err(DiagramError::LengthMismatch {
                expected: self.crossings.len(),
                got: 64 - state.leading_zeros() as usize,
            });
        }
        if let Some(b) = basepoint {
            if b == 0 || b > self.arc_count {
                return Err(DiagramError::BadBasepoint(b));
            }
        }
        Ok(self.resolve_unchecked(state, basepoint))
    }

    /// Resolves from an explicit bit list.
    pub fn resolve_bits(&self, bits: &[u8], basepoint: Option<u32>) -> Result<ResolvedState, DiagramError> {
        if bits.len() != self.crossings.len() {
            return Err(DiagramError::LengthMismatch {
                expected: self.crossings.len(),
                got: bits.len(),
            });
        }
        let state = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (((b & 1) as u64) << i));
        self.resolve(state, basepoint)
    }

    pub(crate) fn resolve_unchecked(&self, state: u64, basepoint: Option<u32>) -> ResolvedState {
        let m = self.arc_count as usize;
        let mut uf = UnionFind::new(m + 1);
        for (i, t) in self.crossings.iter().enumerate() {
            if (state >> i) & 1 == 0 {
                uf.union(t[0] as usize, t[1] as usize);
                uf.union(t[2] as usize, t[3] as usize);
            } else {
                uf.union(t[0] as usize, t[3] as usize);
                uf.union(t[1] as usize, t[2] as usize);
            }
        }
        let mut root_id: HashMap<usize, u32> = HashMap::new();
        let mut arc_to_circle = Vec::with_capacity(m);
        for a in 1..=m {
            let r = uf.find(a);
            let next = root_id.len() as u32;
            arc_to_circle.push(*root_id.entry(r).or_insert(next));
        }
        let arc_circles = root_id.len();
        let circle_count = arc_circles + self.free_loops as usize;
        let marked_circle = match basepoint {
            Some(b) => Some(arc_to_circle[b as usize - 1]),
            None if m > 0 => Some(arc_to_circle[0]),
            None if circle_count > 0 => Some(0),
            None => None,
        };
        ResolvedState {
            index: state,
            circle_count,
            arc_circles,
            arc_to_circle,
            marked_circle,
        }
    }

    /// Mirror image: every crossing changes over/under, rotating its tuple by one slot.
    pub fn mirror(&self) -> Diagram {
        let crossings: Vec<[u32; 4]> = self
            .crossings
            .iter()
            .zip(&self.over_forward)
            .map(|(t, &fwd)| {
                if fwd {
                    [t[1], t[2], t[3], t[0]]
                } else {
                    [t[3], t[0], t[1], t[2]]
                }
            })
            .collect();
        Self::build(crossings, self.free_loops, Some(&self.orientation), Mode::Strict)
            .expect("mirror of a valid diagram is valid")
    }

    /// Disjoint union placed side by side.
    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let shift = self.arc_count;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|t| t.map(|a| a + shift)));
        let mut orientation = self.orientation.clone();
        orientation.extend_from_slice(&other.orientation);
        Self::build(crossings, self.free_loops + other.free_loops, Some(&orientation), Mode::Strict)
            .expect("union of valid diagrams is valid")
    }

    /// Connected sum of two knot diagrams, cutting each at its arc 1.
    /// Falls back to the disjoint union if either side has no crossings.
    pub fn connected_sum(&self, other: &Diagram) -> Diagram {
        if self.crossings.is_empty() || other.crossings.is_empty() {
            // summing with an unknot is a no-op; other free loops stay split
            let d = if self.crossings.is_empty() { other } else { self };
            let loops = (self.free_loops + other.free_loops).saturating_sub(1);
            return Self::build(d.crossings.clone(), loops.max(d.free_loops), None, Mode::Strict)
                .expect("valid");
        }
        // Cut arc 1 of each diagram and reconnect: arc 1 of `self` keeps its
        // tail end, a fresh arc runs from the tail of arc 1 in `other` back.
        let shift = self.arc_count;
        let new_arc = self.arc_count + other.arc_count + 1;
        let mut crossings = self.crossings.clone();
        let a_head = self.native_head[0];
        let b_head = other.native_head[0];
        // self: arc 1 now ends at other's arc-1 head; other's arc 1 runs to self's old head
        crossings[a_head.0 as usize][a_head.1 as usize] = new_arc;
        let mut theirs: Vec<[u32; 4]> = other.crossings.iter().map(|t| t.map(|a| a + shift)).collect();
        theirs[b_head.0 as usize][b_head.1 as usize] = 1;
        crossings.extend(theirs);
        // new_arc replaces shift+1 at its remaining end
        for t in crossings.iter_mut() {
            for a in t.iter_mut() {
                if *a == shift + 1 {
                    *a = new_arc;
                }
            }
        }
        // relabel to 1..2n
        let relabeled = relabel_consecutive(&crossings);
        Self::build(relabeled, self.free_loops + other.free_loops, None, Mode::Normalize)
            .expect("connected sum of valid diagrams is valid")
    }
}

/// Compacts arc labels to 1..=m in order of first appearance.
pub(crate) fn relabel_consecutive(crossings: &[[u32; 4]]) -> Vec<[u32; 4]> {
    let mut map: HashMap<u32, u32> = HashMap::new();
    crossings
        .iter()
        .map(|t| {
            t.map(|a| {
                let next = map.len() as u32 + 1;
                *map.entry(a).or_insert(next)
            })
        })
        .collect()
}

fn compute_ends(crossings: &[[u32; 4]], arc_count: u32) -> Vec<[Slot; 2]> {
    let mut ends = vec![[(u32::MAX, 0u8); 2]; arc_count as usize];
    let mut filled = vec![0usize; arc_count as usize];
    for (c, t) in crossings.iter().enumerate() {
        for (s, &a) in t.iter().enumerate() {
            let i = a as usize - 1;
            ends[i][filled[i]] = (c as u32, s as u8);
            filled[i] += 1;
        }
    }
    ends
}

fn other_end(ends: &[[Slot; 2]], arc: u32, end: Slot) -> Slot {
    let e = ends[arc as usize - 1];
    if e[0] == end {
        e[1]
    } else {
        e[0]
    }
}

struct Trace {
    arcs: Vec<u32>,
    heads: Vec<Slot>,
    /// (crossing, slot entered) for each passage, in traversal order.
    passages: Vec<Slot>,
}

fn trace_components(crossings: &[[u32; 4]], ends: &[[Slot; 2]]) -> Vec<Trace> {
    let m = ends.len();
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for start in 1..=m as u32 {
        if seen[start as usize - 1] {
            continue;
        }
        let start_head = ends[start as usize - 1][1];
        let (mut arc, mut head) = (start, start_head);
        let mut tr = Trace {
            arcs: Vec::new(),
            heads: Vec::new(),
            passages: Vec::new(),
        };
        loop {
            seen[arc as usize - 1] = true;
            tr.arcs.push(arc);
            tr.heads.push(head);
            let (c, s) = head;
            tr.passages.push((c, s));
            let out_slot = (s + 2) % 4;
            let next = crossings[c as usize][out_slot as usize];
            head = other_end(ends, next, (c, out_slot));
            arc = next;
            if arc == start && head == start_head {
                break;
            }
        }
        out.push(tr);
    }
    out
}

/// Result of resolving every crossing of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedState {
    pub index: u64,
    /// Circles, free loops included. Arc circles come first, numbered by
    /// their smallest arc; free loops follow.
    pub circle_count: usize,
    pub arc_circles: usize,
    /// Circle of arc `a` at `a - 1`.
    pub arc_to_circle: Vec<u32>,
    /// Circle containing the basepoint.
    pub marked_circle: Option<u32>,
}

impl ResolvedState {
    pub fn weight(&self) -> u32 {
        self.index.count_ones()
    }

    pub fn circle_of_arc(&self, arc: u32) -> u32 {
        self.arc_to_circle[arc as usize - 1]
    }

    pub fn circles(&self) -> std::ops::Range<u32> {
        0..self.circle_count as u32
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Parses a PD code written as nested brackets, e.g. `[[1,4,2,5],[3,6,4,1],[5,2,6,3]]`.
/// `X[...]` and `PD[...]` wrappers are accepted as well.
pub fn parse_pd(text: &str, free_loops: u32) -> Result<Diagram, DiagramError> {
    let cleaned: String = text.replace("PD", "").replace('X', "");
    let value: serde_json::Value = serde_json::from_str(cleaned.trim())
        .map_err(|e| DiagramError::MalformedPd(format!("not a bracketed list: {e}")))?;
    let rows = value
        .as_array()
        .ok_or_else(|| DiagramError::MalformedPd("expected a list of crossings".into()))?;
    let mut tuples: Vec<Vec<i64>> = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r
            .as_array()
            .ok_or_else(|| DiagramError::MalformedPd("crossing is not a list".into()))?;
        let labels = r
            .iter()
            .map(|v| v.as_i64().ok_or_else(|| DiagramError::MalformedPd("non-integer label".into())))
            .collect::<Result<Vec<_>, _>>()?;
        tuples.push(labels);
    }
    diagram_from_lists(&tuples, free_loops, None)
}

/// Validates arity and sign of raw labels, then builds the diagram.
pub fn diagram_from_lists(
    tuples: &[Vec<i64>],
    free_loops: u32,
    orientation: Option<&[i8]>,
) -> Result<Diagram, DiagramError> {
    let mut crossings = Vec::with_capacity(tuples.len());
    for (i, t) in tuples.iter().enumerate() {
        if t.len() != 4 {
            return Err(DiagramError::MalformedPd(format!(
                "crossing {i} has {} entries, expected 4",
                t.len()
            )));
        }
        let mut arr = [0u32; 4];
        for (k, &x) in t.iter().enumerate() {
            if x <= 0 || x > u32::MAX as i64 {
                return Err(DiagramError::MalformedPd(format!("crossing {i} has invalid label {x}")));
            }
            arr[k] = x as u32;
        }
        crossings.push(arr);
    }
    Diagram::from_pd(&crossings, free_loops, orientation)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn trefoil() -> Diagram {
        parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap()
    }

    pub(crate) fn hopf() -> Diagram {
        parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap()
    }

    #[test]
    fn parses_trefoil_and_hopf() {
        let t = trefoil();
        assert_eq!(t.crossing_count(), 3);
        assert_eq!(t.component_count(), 1);
        assert_eq!(t.n_plus() + t.n_minus(), 3);
        let h = hopf();
        assert_eq!(h.component_count(), 2);
        assert_eq!(h.arc_components(), &[vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn empty_code_with_a_free_loop_is_the_unknot() {
        let u = parse_pd("[]", 1).unwrap();
        assert_eq!(u.crossing_count(), 0);
        assert_eq!(u.component_count(), 1);
        let s = u.resolve(0, None).unwrap();
        assert_eq!(s.circle_count, 1);
        assert_eq!(s.marked_circle, Some(0));
    }

    #[test]
    fn malformed_codes_are_rejected() {
        assert!(matches!(parse_pd("[[1,2,3]]", 0), Err(DiagramError::MalformedPd(_))));
        assert!(matches!(parse_pd("[[1,1,1,2]]", 0), Err(DiagramError::MalformedPd(_))));
        assert!(matches!(parse_pd("[[1,2,3,5],[3,5,2,1]]", 0), Err(DiagramError::MalformedPd(_))));
        assert!(matches!(parse_pd("not a list", 0), Err(DiagramError::MalformedPd(_))));
        // arc 1 runs under-in at one crossing and under-out at the other
        assert!(matches!(
            parse_pd("[[1,3,2,4],[2,4,1,3]]", 0),
            Err(DiagramError::DisconnectedTrace(_)) | Err(DiagramError::NonPlanar(_))
        ));
    }

    #[test]
    fn knot_theory_trefoil_is_left_handed() {
        // labels increase along the orientation; every crossing is negative
        let t = trefoil();
        assert_eq!((t.n_plus(), t.n_minus()), (0, 3));
        let m = t.mirror();
        assert_eq!((m.n_plus(), m.n_minus()), (3, 0));
        assert_eq!(m.mirror(), t);
    }

    #[test]
    fn hopf_mirror_is_an_involution() {
        let h = hopf();
        assert_eq!((h.n_plus(), h.n_minus()), (2, 0));
        assert_eq!(h.mirror().mirror(), h);
        assert_eq!(h.mirror().n_minus(), 2);
        let reversed = h.with_orientation(&[1, -1]).unwrap();
        assert_eq!(reversed.n_minus(), 2);
    }

    #[test]
    fn unknot_mirror_is_itself() {
        assert_eq!(Diagram::unknot().mirror(), Diagram::unknot());
    }

    #[test]
    fn trefoil_resolutions() {
        let t = trefoil();
        assert_eq!(t.resolve_bits(&[0, 0, 0], None).unwrap().circle_count, 3);
        assert_eq!(t.resolve_bits(&[1, 1, 1], None).unwrap().circle_count, 2);
        assert_eq!(t.resolve_bits(&[1, 0, 0], None).unwrap().circle_count, 2);
        assert_eq!(t.resolve_bits(&[1, 1, 0], None).unwrap().circle_count, 1);
        let m = t.mirror();
        assert_eq!(m.resolve_bits(&[0, 0, 0], None).unwrap().circle_count, 2);
        assert_eq!(m.resolve_bits(&[1, 1, 1], None).unwrap().circle_count, 3);
        assert!(matches!(
            t.resolve_bits(&[0, 1], None),
            Err(DiagramError::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn flipping_a_bit_changes_circle_count_by_one() {
        for d in [trefoil(), hopf(), trefoil().connected_sum(&hopf())] {
            let n = d.crossing_count();
            for state in 0..(1u64 << n) {
                let k = d.resolve(state, None).unwrap().circle_count as i64;
                for c in 0..n {
                    let k2 = d.resolve(state ^ (1 << c), None).unwrap().circle_count as i64;
                    assert_eq!((k - k2).abs(), 1);
                }
            }
        }
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let t = trefoil();
        let s = t.connected_sum(&t);
        assert_eq!(s.crossing_count(), 6);
        assert_eq!(s.component_count(), 1);
        assert!(s.is_connected());
    }

    #[test]
    fn orientation_length_is_checked() {
        assert!(matches!(
            Diagram::from_pd(hopf().crossings(), 0, Some(&[1])),
            Err(DiagramError::OrientationLength { .. })
        ));
    }
}
