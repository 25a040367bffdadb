use super::{Diagram, DiagramError, Slot};

/// Faces of the diagram's 4-valent graph. Corner `(c, s)` is the corner of
/// crossing `c` between slots `s` and `s + 1`.
#[derive(Clone, Debug)]
pub struct Faces {
    pub faces: Vec<Vec<Slot>>,
    face_of_corner: Vec<u32>,
}

/// Face index per corner, flattened as `4 * crossing + slot`.
pub type FaceMap = Vec<u32>;

impl Faces {
    pub(super) fn compute(d: &Diagram) -> Result<Self, DiagramError> {
        let n = d.crossing_count();
        let mut face_of_corner = vec![u32::MAX; 4 * n];
        let mut faces = Vec::new();
        for start in 0..4 * n {
            if face_of_corner[start] != u32::MAX {
                continue;
            }
            let id = faces.len() as u32;
            let mut face = Vec::new();
            let mut cur = start;
            while face_of_corner[cur] == u32::MAX {
                face_of_corner[cur] = id;
                let (c, s) = ((cur / 4) as u32, (cur % 4) as u8);
                face.push((c, s));
                let out = (s + 1) % 4;
                let arc = d.crossings()[c as usize][out as usize];
                let (c2, t) = super::other_end(&d.ends, arc, (c, out));
                cur = 4 * c2 as usize + t as usize;
            }
            if cur != start {
                return Err(DiagramError::NonPlanar("face boundary does not close up".into()));
            }
            faces.push(face);
        }
        if n > 0 {
            let pieces = d.graph_components().len();
            if faces.len() != n + 2 * pieces {
                return Err(DiagramError::NonPlanar(format!(
                    "{} faces for {} crossings in {} pieces",
                    faces.len(),
                    n,
                    pieces
                )));
            }
        }
        Ok(Faces { faces, face_of_corner })
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face_of(&self, corner: Slot) -> usize {
        self.face_of_corner[4 * corner.0 as usize + corner.1 as usize] as usize
    }

    pub fn face_map(&self) -> &FaceMap {
        &self.face_of_corner
    }

    /// Checkerboard colouring, 0 or 1 per face. Faces meeting along an arc
    /// get different colours.
    pub fn two_colouring(&self, d: &Diagram) -> Vec<u8> {
        let mut colour = vec![u8::MAX; self.faces.len()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.faces.len()];
        for (c, _) in d.crossings().iter().enumerate() {
            for s in 0..4u8 {
                // the arc at slot s separates corners s-1 and s
                let f1 = self.face_of((c as u32, (s + 3) % 4));
                let f2 = self.face_of((c as u32, s));
                adj[f1].push(f2);
                adj[f2].push(f1);
            }
        }
        for root in 0..self.faces.len() {
            if colour[root] != u8::MAX {
                continue;
            }
            colour[root] = 0;
            let mut stack = vec![root];
            while let Some(f) = stack.pop() {
                for &g in &adj[f] {
                    if colour[g] == u8::MAX {
                        colour[g] = 1 - colour[f];
                        stack.push(g);
                    }
                }
            }
        }
        colour
    }
}

#[cfg(test)]
mod tests {
    use crate::diagram::{parse_pd, Diagram};

    #[test]
    fn trefoil_has_five_faces() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        let f = t.faces().unwrap();
        assert_eq!(f.len(), 5);
        let mut sizes: Vec<usize> = f.faces.iter().map(|x| x.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2, 2, 3, 3]);
    }

    #[test]
    fn colouring_is_proper() {
        let t = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        let f = t.faces().unwrap();
        let col = f.two_colouring(&t);
        for c in 0..3u32 {
            for s in 0..4u8 {
                assert_ne!(col[f.face_of((c, s))], col[f.face_of((c, (s + 1) % 4))]);
            }
        }
    }

    #[test]
    fn nonplanar_code_is_rejected() {
        // a virtual trefoil style code with two crossings
        let r = Diagram::from_pd(&[[1, 3, 2, 4], [4, 1, 3, 2]], 0, None);
        assert!(r.is_err());
    }
}
