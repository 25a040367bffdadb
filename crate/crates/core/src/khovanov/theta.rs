use std::collections::BTreeSet;

use serde::Serialize;

use super::{cube, CubeComplex, KhError, KhOptions};
use crate::diagram::Diagram;
use crate::linalg::MatF2;

/// An element of an exterior algebra over F2, as a set of monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExteriorElement {
    pub terms: BTreeSet<u64>,
}

impl ExteriorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(mask: u64) -> Self {
        ExteriorElement {
            terms: BTreeSet::from([mask]),
        }
    }

    /// The degree-one element with the given generators.
    pub fn linear(gens: u64) -> Self {
        let mut e = Self::zero();
        let mut g = gens;
        while g != 0 {
            e.toggle(1 << g.trailing_zeros());
            g &= g - 1;
        }
        e
    }

    fn toggle(&mut self, m: u64) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &m in &other.terms {
            out.toggle(m);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for &a in &self.terms {
            for &b in &other.terms {
                if a & b == 0 {
                    out.toggle(a | b);
                }
            }
        }
        out
    }

    /// Applies the algebra map sending generator i to `images[i]`, a linear form.
    pub fn substitute(&self, images: &[u64]) -> Self {
        let mut out = Self::zero();
        for &m in &self.terms {
            let mut prod = Self::monomial(0);
            let mut g = m;
            while g != 0 {
                prod = prod.wedge(&Self::linear(images[g.trailing_zeros() as usize]));
                g &= g - 1;
            }
            out = out.add(&prod);
        }
        out
    }
}

/// F2⟨Θ, θ⟩^{⊗k} as a module over the exterior algebra on X_1..X_k.
/// Basis element `b` has θ in the positions set in `b`; Θ^{⊗k} is `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaModuleModel {
    pub k: usize,
}

impl ThetaModuleModel {
    pub fn dim(&self) -> usize {
        1 << self.k
    }

    /// ξ · η = (ξ ∧ ξ_η) · Θ, where η = ξ_η · Θ.
    pub fn act(&self, xi: &ExteriorElement, eta: u64) -> ExteriorElement {
        xi.wedge(&ExteriorElement::monomial(eta))
    }

    /// Every basis vector is X_A · Θ for exactly one A.
    pub fn is_free_rank_one(&self) -> bool {
        let images: BTreeSet<u64> = (0..self.dim() as u64)
            .map(|a| {
                let e = self.act(&ExteriorElement::monomial(a), 0);
                *e.terms.iter().next().unwrap_or(&u64::MAX)
            })
            .collect();
        images.len() == self.dim() && !images.contains(&u64::MAX)
    }
}

/// Outcome of checking F ∘ Ψ_I = Ψ_I' ∘ d on the edges leaving a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub vertex: u64,
    pub k: usize,
    pub edges_checked: usize,
    pub failures: Vec<usize>,
}

/// Position of each non-marked circle among the X generators; the marked circle gets none.
fn x_index(circles: usize, marked: u32) -> Vec<Option<u32>> {
    (0..circles as u32)
        .map(|c| match c.cmp(&marked) {
            std::cmp::Ordering::Less => Some(c),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(c - 1),
        })
        .collect()
}

/// Ψ_I: S_I ∧ S_A ↦ X_A · Θ, as a map from masks containing the marked circle.
fn psi(mask: u64, xi: &[Option<u32>]) -> u64 {
    (0..xi.len()).filter(|&c| mask >> c & 1 == 1).filter_map(|c| xi[c]).fold(0, |acc, x| acc | 1 << x)
}

/// Checks the module identification on every edge leaving vertex `v`.
pub fn psi_identification(c: &CubeComplex, v: u64) -> PsiReport {
    let d = c.diagram();
    let src = c.state(v);
    let ms = src.marked_circle.expect("marked circle");
    let xs = x_index(src.circle_count, ms);
    let k = src.circle_count - 1;
    let mut report = PsiReport {
        vertex: v,
        k,
        edges_checked: 0,
        failures: Vec::new(),
    };
    for cr in (0..d.crossing_count()).filter(|&cr| v >> cr & 1 == 0) {
        let v2 = v | 1 << cr;
        let tgt = c.state(v2);
        let mt = tgt.marked_circle.expect("marked circle");
        let xt = x_index(tgt.circle_count, mt);
        // each source circle goes to the target circles meeting its arcs
        let mut reach: Vec<u64> = vec![0; src.circle_count];
        for a in 0..src.arc_to_circle.len() {
            reach[src.arc_to_circle[a] as usize] |= 1 << tgt.arc_to_circle[a];
        }
        for i in 0..d.free_loops() as usize {
            reach[src.arc_circles + i] |= 1 << (tgt.arc_circles + i);
        }
        let to_x = |circles: u64| -> u64 {
            (0..tgt.circle_count).filter(|&t| circles >> t & 1 == 1).filter_map(|t| xt[t]).fold(0, |a, x| a | 1 << x)
        };
        let split = tgt.circle_count > src.circle_count;
        // φ_*: X_c ↦ X of the image of c (the lowest one when c splits)
        let phi: Vec<u64> = (0..src.circle_count)
            .filter_map(|s| xs[s].map(|_| to_x(1 << reach[s].trailing_zeros())))
            .collect();
        let k_w = if split {
            let from = (0..src.circle_count).find(|&s| reach[s].count_ones() == 2).expect("split circle");
            to_x(reach[from])
        } else {
            0
        };
        let model_map = |xa: u64| -> ExteriorElement {
            let image = ExteriorElement::monomial(xa).substitute(&phi);
            if split {
                image.wedge(&ExteriorElement::linear(k_w))
            } else {
                image
            }
        };
        let edge = c.edge(v, cr);
        let dim_s = 1usize << k;
        let dim_t = 1usize << (tgt.circle_count - 1);
        let mut lhs = MatF2::zeros(dim_t, dim_s);
        let mut rhs = MatF2::zeros(dim_t, dim_s);
        for mask in (0..1u64 << src.circle_count).filter(|m| m >> ms & 1 == 1) {
            let col = psi(mask, &xs) as usize;
            for &t in &model_map(psi(mask, &xs)).terms {
                lhs.flip(t as usize, col);
            }
            let (imgs, len) = edge.apply(mask);
            for &t in &imgs[..len] {
                rhs.flip(psi(t, &xt) as usize, col);
            }
        }
        report.edges_checked += 1;
        if lhs != rhs {
            report.failures.push(cr);
        }
    }
    report
}

/// Runs [`psi_identification`] on every vertex of the cube.
pub fn psi_check_all(d: &Diagram, opts: &KhOptions) -> Result<Vec<PsiReport>, KhError> {
    let c = cube(d, opts)?;
    Ok((0..1u64 << d.crossing_count()).map(|v| psi_identification(&c, v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::khovanov::Fault;

    #[test]
    fn model_is_free_of_rank_one() {
        for k in 0..5 {
            assert!(ThetaModuleModel { k }.is_free_rank_one());
        }
        assert_eq!(ThetaModuleModel { k: 0 }.dim(), 1);
    }

    #[test]
    fn exterior_substitution() {
        // X0 ∧ X1 under X0 ↦ X0 + X1, X1 ↦ X1 gives X0 ∧ X1
        let e = ExteriorElement::monomial(0b11).substitute(&[0b11, 0b10]);
        assert_eq!(e, ExteriorElement::monomial(0b11));
        let z = ExteriorElement::monomial(0b11).substitute(&[0b01, 0b01]);
        assert_eq!(z, ExteriorElement::zero());
    }

    #[test]
    fn squares_commute_on_small_cubes() {
        for code in ["[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", "[[1,3,2,4],[3,1,4,2]]", "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]"] {
            let d = parse_pd(code, 0).unwrap();
            for r in psi_check_all(&d, &KhOptions::default()).unwrap() {
                assert!(r.failures.is_empty(), "{code}: vertex {} edges {:?}", r.vertex, r.failures);
            }
        }
    }

    #[test]
    fn corrupted_split_is_detected() {
        let d = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap();
        let o = KhOptions { fault: Fault::DropSplitTerm, ..Default::default() };
        let reports = psi_check_all(&d, &o).unwrap();
        assert!(reports.iter().any(|r| !r.failures.is_empty()));
    }
}
