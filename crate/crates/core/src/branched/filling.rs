use std::collections::VecDeque;

use serde::Serialize;

use super::BranchedError;
use crate::diagram::{Diagram, UnionFind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilledCircle {
    pub arcs: Vec<u32>,
    /// +1 when the circle runs counterclockwise around its inside.
    pub a: i8,
    /// (-1)^M with M the number of circles enclosing it.
    pub b: i8,
    pub filled: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillingReport {
    pub circles: Vec<FilledCircle>,
    /// (crossing, circle, circle) for the band at each crossing.
    pub bands: Vec<(usize, usize, usize)>,
    /// Free loops, placed in the outer region and filled.
    pub free_loops: u32,
    pub valid: bool,
}

/// Resolves every crossing along the orientation, fills the circles with
/// a_k b_k = +1, and checks that each band joins a filled and an unfilled circle.
pub fn oriented_resolution_filling(d: &Diagram) -> Result<FillingReport, BranchedError> {
    let n = d.crossing_count();
    if n == 0 {
        return Ok(FillingReport {
            circles: Vec::new(),
            bands: Vec::new(),
            free_loops: d.free_loops(),
            valid: true,
        });
    }
    let state = d
        .signs()
        .iter()
        .enumerate()
        .fold(0u64, |acc, (c, &s)| if s < 0 { acc | 1 << c } else { acc });
    let st = d.resolve(state, None)?;
    let faces = d.faces()?;
    // regions: faces joined through each smoothed crossing
    let mut uf = UnionFind::new(faces.len());
    for c in 0..n as u32 {
        let (x, y) = if state >> c & 1 == 0 { (1, 3) } else { (0, 2) };
        uf.union(faces.face_of((c, x)), faces.face_of((c, y)));
    }
    let outer_face = (0..faces.len()).max_by_key(|&f| (faces.faces[f].len(), std::cmp::Reverse(f))).unwrap();
    let outer = uf.find(outer_face);
    // each circle separates its left and right regions
    let k = st.arc_circles;
    let mut sides = vec![(usize::MAX, usize::MAX); k];
    let mut arcs_of = vec![Vec::new(); k];
    for arc in 1..=d.arc_count() {
        let ci = st.circle_of_arc(arc) as usize;
        arcs_of[ci].push(arc);
        if sides[ci].0 == usize::MAX {
            let (c, s) = d.arc_tail(arc);
            let left = uf.find(faces.face_of((c, s)));
            let right = uf.find(faces.face_of((c, (s + 3) % 4)));
            sides[ci] = (left, right);
        }
    }
    // breadth-first from the outer region; depth counts enclosing circles
    let mut depth = vec![usize::MAX; faces.len()];
    depth[outer] = 0;
    let mut queue = VecDeque::from([outer]);
    while let Some(r) = queue.pop_front() {
        for &(l, rt) in &sides {
            let other = if l == r { rt } else if rt == r { l } else { continue };
            if depth[other] == usize::MAX {
                depth[other] = depth[r] + 1;
                queue.push_back(other);
            }
        }
    }
    let mut circles = Vec::with_capacity(k);
    for (ci, &(left, right)) in sides.iter().enumerate() {
        let (parent, child) = if depth[left] < depth[right] { (left, right) } else { (right, left) };
        let a: i8 = if child == left { 1 } else { -1 };
        let b: i8 = if depth[parent] % 2 == 0 { 1 } else { -1 };
        circles.push(FilledCircle {
            arcs: arcs_of[ci].clone(),
            a,
            b,
            filled: a * b == 1,
        });
    }
    let mut bands = Vec::with_capacity(n);
    for (c, t) in d.crossings().iter().enumerate() {
        let x = st.circle_of_arc(t[0]) as usize;
        let y = st.circle_of_arc(t[2]) as usize;
        if x == y || circles[x].filled == circles[y].filled {
            return Err(BranchedError::BandConditionViolated(c));
        }
        bands.push((c, x, y));
    }
    Ok(FillingReport {
        circles,
        bands,
        free_loops: d.free_loops(),
        valid: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    #[test]
    fn unknot_is_vacuous() {
        let r = oriented_resolution_filling(&Diagram::unknot()).unwrap();
        assert!(r.valid && r.bands.is_empty());
    }

    #[test]
    fn trefoil_and_figure_eight() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        let r = oriented_resolution_filling(&t).unwrap();
        assert_eq!((r.circles.len(), r.bands.len()), (2, 3));
        let f8 = parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", 0).unwrap();
        let r = oriented_resolution_filling(&f8).unwrap();
        assert_eq!((r.circles.len(), r.bands.len()), (3, 4));
        for o in [[1, -1], [-1, 1], [1, 1]] {
            let h = parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap().with_orientation(&o).unwrap();
            assert!(oriented_resolution_filling(&h).unwrap().valid);
        }
    }
}
