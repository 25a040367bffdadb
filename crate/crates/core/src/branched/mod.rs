//! Branched double covers: Goeritz matrices, det(L), H_1, quasi-alternating
//! certificates and the oriented-resolution filling.

mod filling;
mod qa;

pub use filling::{oriented_resolution_filling, FilledCircle, FillingReport};
pub use qa::{qa_certify, QACertificate, QANode, QAVerdict};

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::diagram::{Diagram, DiagramError};
use crate::khovanov::{khr_ranks, state_sum_det, KhError, KhOptions};
use crate::linalg::{cokernel_group, AbelianGroup, LinalgError, MatZ};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BranchedError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Kh(#[from] KhError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("determinant oracles disagree: Goeritz {goeritz}, state sum {state_sum}")]
    DetMismatch { goeritz: u64, state_sum: u64 },
    #[error("band at crossing {0} does not join one filled and one unfilled circle")]
    BandConditionViolated(usize),
}

/// Checkerboard data and the Goeritz matrix of a diagram.
#[derive(Clone, Debug)]
pub struct GoeritzData {
    /// Colour per face; 1 marks the white faces used for the matrix.
    pub colouring: Vec<u8>,
    /// White faces that index the matrix, per connected piece.
    pub white_faces: Vec<Vec<usize>>,
    pub matrix: MatZ,
}

impl GoeritzData {
    pub fn det(&self) -> u64 {
        self.matrix
            .determinant()
            .abs()
            .to_u64()
            .expect("determinant fits in 64 bits at supported sizes")
    }
}

/// Goeritz matrix of the white faces, one face deleted per piece. Split
/// diagrams give a block sum padded with a zero block per extra piece;
/// free loops count as pieces.
pub fn goeritz(d: &Diagram) -> Result<GoeritzData, BranchedError> {
    let faces = d.faces()?;
    let raw = faces.two_colouring(d);
    let mut colouring = vec![0u8; faces.len()];
    let pieces = d.graph_components();
    let mut face_piece = vec![0usize; faces.len()];
    for (f, face) in faces.faces.iter().enumerate() {
        let c = face[0].0 as usize;
        face_piece[f] = pieces.iter().position(|p| p.contains(&c)).expect("every crossing lies in a piece");
    }
    let mut matrix = MatZ::zeros(0, 0);
    let mut white_faces = Vec::new();
    for (pi, _) in pieces.iter().enumerate() {
        let mine: Vec<usize> = (0..faces.len()).filter(|&f| face_piece[f] == pi).collect();
        let ones = mine.iter().filter(|&&f| raw[f] == 1).count();
        let zeros = mine.len() - ones;
        let first = raw[mine[0]];
        let white_class = if ones > zeros || (ones == zeros && first == 1) { 1 } else { 0 };
        let white: Vec<usize> = mine.iter().copied().filter(|&f| raw[f] == white_class).collect();
        for &f in &white {
            colouring[f] = 1;
        }
        let pos = |f: usize| white.iter().position(|&x| x == f).expect("white face");
        let m = white.len();
        let mut g = MatZ::zeros(m, m);
        for &c in &pieces[pi] {
            // opposite corners share a colour; 0-resolution joins corners 1 and 3
            let f1 = faces.face_of((c as u32, 1));
            let f0 = faces.face_of((c as u32, 0));
            let (a, b, eta) = if raw[f1] == white_class {
                (f1, faces.face_of((c as u32, 3)), 1i64)
            } else {
                (f0, faces.face_of((c as u32, 2)), -1i64)
            };
            if a == b {
                continue;
            }
            let (i, j) = (pos(a), pos(b));
            g[(i, j)] -= eta;
            g[(j, i)] -= eta;
            g[(i, i)] += eta;
            g[(j, j)] += eta;
        }
        matrix = matrix.direct_sum(&g.delete_indices(&[0]));
        white_faces.push(white);
    }
    let extra = pieces.len() + d.free_loops() as usize;
    for _ in 1..extra.max(1) {
        matrix = matrix.direct_sum(&MatZ::zeros(1, 1));
    }
    Ok(GoeritzData {
        colouring,
        white_faces,
        matrix,
    })
}

/// H_1 of the branched double cover, from the Goeritz matrix.
pub fn h1_sigma(d: &Diagram) -> Result<AbelianGroup, BranchedError> {
    Ok(cokernel_group(&goeritz(d)?.matrix)?)
}

/// det(L) from the Goeritz matrix, checked against the state sum when the
/// diagram is small enough for it.
pub fn det(d: &Diagram, max_crossings: usize) -> Result<DetReport, BranchedError> {
    let g = goeritz(d)?.det();
    let s = if d.crossing_count() <= max_crossings {
        Some(state_sum_det(d, max_crossings)?)
    } else {
        None
    };
    if let Some(s) = s {
        if s != g {
            return Err(BranchedError::DetMismatch { goeritz: g, state_sum: s });
        }
    }
    Ok(DetReport {
        det: g,
        goeritz: g,
        state_sum: s,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetReport {
    pub det: u64,
    pub goeritz: u64,
    pub state_sum: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankInequalityReport {
    pub det_goeritz: u64,
    pub det_state_sum: u64,
    pub khr_mirror_rank: usize,
    pub holds: bool,
    pub equality: bool,
}

/// Compares det(L) with rk Khr(m(L); F2).
pub fn rank_inequality_check(d: &Diagram, opts: &KhOptions) -> Result<RankInequalityReport, BranchedError> {
    let g = goeritz(d)?.det();
    let s = state_sum_det(d, opts.max_crossings)?;
    if g != s {
        return Err(BranchedError::DetMismatch { goeritz: g, state_sum: s });
    }
    let r = khr_ranks(&d.mirror(), opts)?.total;
    Ok(RankInequalityReport {
        det_goeritz: g,
        det_state_sum: s,
        khr_mirror_rank: r,
        holds: g as usize <= r,
        equality: g as usize == r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    fn trefoil() -> Diagram {
        parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap()
    }

    #[test]
    fn goeritz_determinants() {
        let kink = parse_pd("[[1,2,2,1]]", 0).unwrap();
        let g = goeritz(&kink).unwrap();
        assert_eq!(g.matrix.rows(), 1);
        assert_eq!(g.det(), 1);
        assert_eq!(goeritz(&trefoil()).unwrap().det(), 3);
        let f8 = parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", 0).unwrap();
        assert_eq!(goeritz(&f8).unwrap().det(), 5);
    }

    #[test]
    fn first_homology_of_covers() {
        assert_eq!(h1_sigma(&trefoil()).unwrap(), AbelianGroup::cyclic(3));
        let u2 = h1_sigma(&Diagram::unlink(2)).unwrap();
        assert_eq!((u2.free_rank, u2.invariant_factors.len()), (1, 0));
        let h = parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap();
        assert_eq!(h1_sigma(&h).unwrap(), AbelianGroup::cyclic(2));
        assert_eq!(h1_sigma(&Diagram::unknot()).unwrap(), AbelianGroup::trivial());
        assert_eq!(h1_sigma(&Diagram::unlink(3)).unwrap().free_rank, 2);
        assert_eq!(h1_sigma(&trefoil().disjoint_union(&Diagram::unknot())).unwrap().free_rank, 1);
    }

    #[test]
    fn rank_inequality() {
        let o = KhOptions::default();
        let u = rank_inequality_check(&Diagram::unknot(), &o).unwrap();
        assert_eq!((u.det_goeritz, u.khr_mirror_rank, u.equality), (1, 1, true));
        let t = rank_inequality_check(&trefoil(), &o).unwrap();
        assert_eq!((t.det_goeritz, t.khr_mirror_rank, t.equality), (3, 3, true));
        let tt = rank_inequality_check(&trefoil().connected_sum(&trefoil()), &o).unwrap();
        assert_eq!((tt.det_goeritz, tt.det_state_sum, tt.khr_mirror_rank), (9, 9, 9));
    }
}
