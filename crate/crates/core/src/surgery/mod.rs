//! Surgery arithmetic on framed links: first homology of surgered manifolds,
//! surgery triads, the multi-framing lattice, plumbing graphs and
//! |H₁|-level L-space certification.

mod lspace;
mod plumbing;

pub use lspace::{
    large_surgery_family, pretzel_p237_family, DerivationStep, LSpaceVerdict, Rule, VerdictKind,
};
pub use plumbing::{plumbing_linking_matrix, plumbing_lspace_check, PlumbingGraph};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::linalg::{cokernel_group, AbelianGroup, LinalgError, MatZ};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error("multi-framing has {got} entries, presentation has {expected} components")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linking matrix is not symmetric")]
    NotSymmetric,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One entry of a multi-framing. Ordered as ∞ < 0 < 1, i.e. ∞ is read as −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "FramingRepr", into = "FramingRepr")]
pub enum Framing {
    Infinity,
    Zero,
    One,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FramingRepr {
    Int(i64),
    Str(String),
}

impl Framing {
    pub const ALL: [Framing; 3] = [Framing::Infinity, Framing::Zero, Framing::One];

    pub fn as_i8(self) -> i8 {
        match self {
            Framing::Infinity => -1,
            Framing::Zero => 0,
            Framing::One => 1,
        }
    }
}

impl TryFrom<i64> for Framing {
    type Error = String;
    fn try_from(x: i64) -> Result<Self, String> {
        match x {
            -1 => Ok(Framing::Infinity),
            0 => Ok(Framing::Zero),
            1 => Ok(Framing::One),
            _ => Err(format!("framing entry {x} not in {{-1, 0, 1}}")),
        }
    }
}

impl FromStr for Framing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "∞" | "-1" => Ok(Framing::Infinity),
            "0" => Ok(Framing::Zero),
            "1" => Ok(Framing::One),
            other => Err(format!("unknown framing {other:?}")),
        }
    }
}

impl TryFrom<FramingRepr> for Framing {
    type Error = String;
    fn try_from(r: FramingRepr) -> Result<Self, String> {
        match r {
            FramingRepr::Int(x) => Framing::try_from(x),
            FramingRepr::Str(s) => s.parse(),
        }
    }
}

impl From<Framing> for FramingRepr {
    fn from(f: Framing) -> Self {
        match f {
            Framing::Infinity => FramingRepr::Str("inf".into()),
            f => FramingRepr::Int(f.as_i8() as i64),
        }
    }
}

impl fmt::Display for Framing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Framing::Infinity => write!(f, "inf"),
            other => write!(f, "{}", other.as_i8()),
        }
    }
}

/// Number of entries different from 0.
pub fn weight(v: &[Framing]) -> usize {
    v.iter().filter(|&&f| f != Framing::Zero).count()
}

/// Componentwise order on {∞,0,1}^m.
pub fn lattice_le(v: &[Framing], w: &[Framing]) -> bool {
    v.len() == w.len() && v.iter().zip(w).all(|(a, b)| a <= b)
}

/// A framed link in S³ recorded by its linking matrix: linking numbers off
/// the diagonal, framings on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedLinkPresentation {
    linking: MatZ,
}

impl FramedLinkPresentation {
    pub fn new(linking: MatZ) -> Result<Self, SurgeryError> {
        if !linking.is_symmetric() {
            return Err(SurgeryError::NotSymmetric);
        }
        Ok(FramedLinkPresentation { linking })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, SurgeryError> {
        let m = MatZ::from_i64_rows(rows)?;
        if m.rows() != m.cols() {
            return Err(SurgeryError::NotSymmetric);
        }
        Self::new(m)
    }

    /// Unknot with framing `p`.
    pub fn framed_unknot(p: i64) -> Self {
        FramedLinkPresentation {
            linking: MatZ::diagonal(&[p]),
        }
    }

    pub fn component_count(&self) -> usize {
        self.linking.rows()
    }

    pub fn linking_matrix(&self) -> &MatZ {
        &self.linking
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        FramedLinkPresentation {
            linking: self.linking.direct_sum(&other.linking),
        }
    }

    /// Presentation matrix of H₁(Y_v).
    pub fn surgered_matrix(&self, v: &[Framing]) -> Result<MatZ, SurgeryError> {
        let m = self.component_count();
        if v.len() != m {
            return Err(SurgeryError::DimensionMismatch {
                expected: m,
                got: v.len(),
            });
        }
        let mut a = self.linking.clone();
        let mut drop = Vec::new();
        for (k, f) in v.iter().enumerate() {
            match f {
                Framing::Infinity => drop.push(k),
                Framing::Zero => {}
                Framing::One => a[(k, k)] += 1,
            }
        }
        Ok(a.delete_indices(&drop))
    }
}

pub fn surgered_h1(p: &FramedLinkPresentation, v: &[Framing]) -> Result<AbelianGroup, SurgeryError> {
    Ok(cokernel_group(&p.surgered_matrix(v)?)?)
}

/// Euler characteristic of the instanton homology of Y_v: |H₁| when finite, else 0.
pub fn euler_char_si(p: &FramedLinkPresentation, v: &[Framing]) -> Result<u128, SurgeryError> {
    Ok(surgered_h1(p, v)?.order_or_zero())
}

/// True when the orders of (Y, Y₀, Y₁) satisfy |H₁(Y)| = |H₁(Y₀)| + |H₁(Y₁)|
/// up to cyclic permutation.
pub fn is_additive_triad(orders: [u128; 3]) -> bool {
    (0..3).any(|i| orders[i] == orders[(i + 1) % 3] + orders[(i + 2) % 3])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriadReport {
    pub component: usize,
    /// |H₁| of the ∞-, 0- and 1-fillings, 0 for infinite groups.
    pub orders: [u128; 3],
    pub groups: [AbelianGroup; 3],
    /// False when some member has b₁ > 0.
    pub applicable: bool,
    pub additive: bool,
}

/// Fills component `k` with ∞, 0, 1 and the other components as in `base`.
pub fn triad_additivity_check_at(
    p: &FramedLinkPresentation,
    base: &[Framing],
    k: usize,
) -> Result<TriadReport, SurgeryError> {
    let m = p.component_count();
    if base.len() != m {
        return Err(SurgeryError::DimensionMismatch {
            expected: m,
            got: base.len(),
        });
    }
    if k >= m {
        return Err(SurgeryError::InvalidParameters(format!(
            "component {k} out of range for {m} components"
        )));
    }
    let mut groups = Vec::with_capacity(3);
    for f in Framing::ALL {
        let mut v = base.to_vec();
        v[k] = f;
        groups.push(surgered_h1(p, &v)?);
    }
    let orders = [
        groups[0].order_or_zero(),
        groups[1].order_or_zero(),
        groups[2].order_or_zero(),
    ];
    let applicable = orders.iter().all(|&o| o > 0);
    let groups: [AbelianGroup; 3] = groups.try_into().expect("three fillings");
    Ok(TriadReport {
        component: k,
        orders,
        groups,
        applicable,
        additive: applicable && is_additive_triad(orders),
    })
}

/// Triad of component `k` with every other component at its given framing.
pub fn triad_additivity_check(
    p: &FramedLinkPresentation,
    k: usize,
) -> Result<TriadReport, SurgeryError> {
    triad_additivity_check_at(p, &vec![Framing::Zero; p.component_count()], k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePoint {
    pub framing: Vec<Framing>,
    pub weight: usize,
    pub h1: AbelianGroup,
}

pub const MAX_LATTICE_COMPONENTS: usize = 12;

/// H₁(Y_v) for all v in {∞,0,1}^m, in lexicographic order with ∞ < 0 < 1.
pub fn multi_framing_lattice(p: &FramedLinkPresentation) -> Result<Vec<LatticePoint>, SurgeryError> {
    let m = p.component_count();
    if m > MAX_LATTICE_COMPONENTS {
        return Err(SurgeryError::InvalidParameters(format!(
            "{m} components exceeds the lattice cap {MAX_LATTICE_COMPONENTS}"
        )));
    }
    let total = 3usize.pow(m as u32);
    (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut framing = vec![Framing::Infinity; m];
            for slot in framing.iter_mut().rev() {
                *slot = Framing::ALL[idx % 3];
                idx /= 3;
            }
            let h1 = surgered_h1(p, &framing)?;
            Ok(LatticePoint {
                weight: weight(&framing),
                framing,
                h1,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn framed_unknot_groups() {
        let p = FramedLinkPresentation::framed_unknot(7);
        assert_eq!(surgered_h1(&p, &[Framing::Zero]).unwrap(), AbelianGroup::cyclic(7));
        assert_eq!(surgered_h1(&p, &[Framing::Infinity]).unwrap(), AbelianGroup::trivial());
        let z = FramedLinkPresentation::framed_unknot(0);
        let g = surgered_h1(&z, &[Framing::Zero]).unwrap();
        assert_eq!(g.free_rank, 1);
        assert_eq!(euler_char_si(&z, &[Framing::Zero]).unwrap(), 0);
        assert_eq!(euler_char_si(&p, &[Framing::One]).unwrap(), 8);
    }

    #[test]
    fn dimension_mismatch() {
        let p = FramedLinkPresentation::framed_unknot(2);
        assert!(matches!(
            surgered_h1(&p, &[Framing::Zero, Framing::Zero]),
            Err(SurgeryError::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(FramedLinkPresentation::from_rows(&[vec![1, 2], vec![3, 1]]).is_err());
    }

    #[test]
    fn connected_sum_multiplies() {
        let a = FramedLinkPresentation::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let b = FramedLinkPresentation::framed_unknot(5);
        let s = a.direct_sum(&b);
        let v = vec![Framing::Zero; 3];
        assert_eq!(euler_char_si(&s, &v).unwrap(), 15);
    }

    #[test]
    fn triads() {
        let p = FramedLinkPresentation::framed_unknot(4);
        let r = triad_additivity_check(&p, 0).unwrap();
        assert_eq!(r.orders, [1, 4, 5]);
        assert!(r.additive);
        let z = FramedLinkPresentation::framed_unknot(0);
        let r = triad_additivity_check(&z, 0).unwrap();
        assert!(!r.applicable);
        assert!(!r.additive);
        assert!(is_additive_triad([3, 2, 1]));
        assert!(!is_additive_triad([3, 2, 2]));
    }

    #[test]
    fn framing_serde() {
        let v: Vec<Framing> = serde_json::from_str(r#"[0, 1, -1, "inf"]"#).unwrap();
        assert_eq!(v, [Framing::Zero, Framing::One, Framing::Infinity, Framing::Infinity]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[0,1,"inf","inf"]"#);
        assert!(serde_json::from_str::<Framing>("2").is_err());
    }

    #[test]
    fn lattice_order_and_weights() {
        let p = FramedLinkPresentation::from_rows(&[vec![1, 1], vec![1, 3]]).unwrap();
        let pts = multi_framing_lattice(&p).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0].framing, [Framing::Infinity, Framing::Infinity]);
        assert_eq!(pts[0].h1, AbelianGroup::trivial());
        assert_eq!(pts[4].framing, [Framing::Zero, Framing::Zero]);
        assert_eq!(pts[4].weight, 0);
        assert_eq!(pts[4].h1.order(), Some(2));
        assert!(lattice_le(&pts[0].framing, &pts[8].framing));
        assert!(!lattice_le(&pts[2].framing, &pts[3].framing));
    }

    #[test]
    fn order_matches_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let m = rng.gen_range(1..=4);
            let mut rows = vec![vec![0i64; m]; m];
            for i in 0..m {
                for j in i..m {
                    let x = rng.gen_range(-9..=9);
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            let p = FramedLinkPresentation::from_rows(&rows).unwrap();
            let v: Vec<Framing> = (0..m).map(|_| Framing::ALL[rng.gen_range(0..3)]).collect();
            let det = p.surgered_matrix(&v).unwrap().determinant().abs();
            assert_eq!(num_bigint::BigInt::from(euler_char_si(&p, &v).unwrap()), det);
        }
    }
}
