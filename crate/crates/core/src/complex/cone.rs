use num_rational::Rational64;
use num_traits::Signed;
use rand::Rng;

use super::{apply_sparse, ComplexError, GradedComplexF2};
use crate::linalg::MatF2;

/// A degree-preserving map between complexes, as sparse columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMapF2 {
    pub columns: Vec<Vec<u32>>,
}

/// Cone(f) with cone degree t holding `A` in degree t+1 and `B` in degree t.
/// Generators of `A` come first.
pub fn mapping_cone(a: &GradedComplexF2, b: &GradedComplexF2, f: &ChainMapF2) -> Result<GradedComplexF2, ComplexError> {
    if f.columns.len() != a.len() {
        return Err(ComplexError::NotChainMap(format!(
            "{} columns for a source of size {}",
            f.columns.len(),
            a.len()
        )));
    }
    for (j, col) in f.columns.iter().enumerate() {
        if let Some(&i) = col.iter().find(|&&i| i as usize >= b.len() || b.degrees()[i as usize] != a.degrees()[j]) {
            return Err(ComplexError::NotChainMap(format!("generator {j} maps to {i} in another degree")));
        }
        let lhs = apply_sparse(b.differential(), &apply_sparse(&f.columns, &[j as u32]));
        let rhs = apply_sparse(&f.columns, &a.differential()[j]);
        if lhs != rhs {
            return Err(ComplexError::NotChainMap(format!("d f and f d differ on generator {j}")));
        }
    }
    let na = a.len() as u32;
    let mut degree: Vec<i32> = a.degrees().iter().map(|t| t - 1).collect();
    degree.extend_from_slice(b.degrees());
    let mut secondary = a.secondary().to_vec();
    secondary.extend_from_slice(b.secondary());
    let mut diff: Vec<Vec<u32>> = (0..a.len())
        .map(|j| {
            let mut c = a.differential()[j].clone();
            c.extend(f.columns[j].iter().map(|&i| i + na));
            c
        })
        .collect();
    diff.extend(b.differential().iter().map(|c| c.iter().map(|&i| i + na).collect()));
    GradedComplexF2::with_gradings(degree, secondary, diff)
}

/// A finite F2 vector space with a rational grading per basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    pub grades: Vec<Rational64>,
}

impl GradedModule {
    pub fn dim(&self) -> usize {
        self.grades.len()
    }

    /// Whether no two grades differ by an amount in `[lo, hi)`.
    pub fn has_gap(&self, lo: Rational64, hi: Option<Rational64>) -> bool {
        self.grades.iter().all(|&s| {
            self.grades.iter().all(|&t| {
                let d = (s - t).abs();
                d < lo || hi.is_some_and(|h| d >= h)
            })
        })
    }
}

/// Three complexes with maps f: E0 -> E1, g: E1 -> E2 and a homotopy h: E0 -> E2.
/// Matrices have rows indexed by the target basis.
#[derive(Clone, Debug)]
pub struct DmcInstance {
    pub e: [GradedModule; 3],
    pub delta: [MatF2; 3],
    pub f: MatF2,
    pub g: MatF2,
    pub h: MatF2,
    pub eps: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DmcVerdict {
    /// The input is not a pair of chain maps with a nullhomotopy of g∘f.
    NotChainData(String),
    /// Hypothesis 1, 2 or 3 fails; the conclusion is not asserted.
    HypothesisFailed { hypothesis: u8, detail: String },
    /// All hypotheses hold and (h, g): Cone(f) -> E2 is a quasi-isomorphism.
    QuasiIsomorphism,
    /// All hypotheses hold but the conclusion fails.
    ConclusionFails,
}

fn entries(m: &MatF2) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..m.rows()).flat_map(move |i| m.row_ones(i).map(move |j| (i, j)))
}

fn shift(src: &GradedModule, tgt: &GradedModule, i: usize, j: usize) -> Rational64 {
    tgt.grades[i] - src.grades[j]
}

/// Keeps the entries whose grade shift satisfies `keep`.
fn part(m: &MatF2, src: &GradedModule, tgt: &GradedModule, keep: impl Fn(Rational64) -> bool) -> MatF2 {
    let mut out = MatF2::zeros(m.rows(), m.cols());
    for (i, j) in entries(m) {
        if keep(shift(src, tgt, i, j)) {
            out.set(i, j, true);
        }
    }
    out
}

fn assemble(rows: &[usize], cols: &[usize], parts: &[(usize, usize, &MatF2)]) -> MatF2 {
    let ro: Vec<usize> = rows.iter().scan(0, |acc, &x| { let s = *acc; *acc += x; Some(s) }).collect();
    let co: Vec<usize> = cols.iter().scan(0, |acc, &x| { let s = *acc; *acc += x; Some(s) }).collect();
    let mut m = MatF2::zeros(rows.iter().sum(), cols.iter().sum());
    for &(bi, bj, p) in parts {
        for (i, j) in entries(p) {
            m.set(ro[bi] + i, co[bj] + j, true);
        }
    }
    m
}

impl DmcInstance {
    fn chain_data_defect(&self) -> Option<String> {
        let [d0, d1, d2] = &self.delta;
        for (k, d) in self.delta.iter().enumerate() {
            if d.rows() != self.e[k].dim() || d.cols() != self.e[k].dim() {
                return Some(format!("δ{k} has the wrong shape"));
            }
            if !d.mul(d).is_zero() {
                return Some(format!("δ{k}∘δ{k} is nonzero"));
            }
        }
        let shapes = [
            (&self.f, 1, 0, "f"),
            (&self.g, 2, 1, "g"),
            (&self.h, 2, 0, "h"),
        ];
        for (m, t, s, name) in shapes {
            if m.rows() != self.e[t].dim() || m.cols() != self.e[s].dim() {
                return Some(format!("{name} has the wrong shape"));
            }
        }
        if d1.mul(&self.f) != self.f.mul(d0) {
            return Some("f is not a chain map".into());
        }
        if d2.mul(&self.g) != self.g.mul(d1) {
            return Some("g is not a chain map".into());
        }
        if d2.mul(&self.h).add(&self.h.mul(d0)) != self.g.mul(&self.f) {
            return Some("h is not a nullhomotopy of g∘f".into());
        }
        None
    }

    /// Whether Cone((h, g)) is acyclic, i.e. (h, g): Cone(f) -> E2 is a quasi-isomorphism.
    pub fn conclusion_holds(&self) -> bool {
        let [d0, d1, d2] = &self.delta;
        let sizes = [self.e[0].dim(), self.e[1].dim(), self.e[2].dim()];
        let total = assemble(
            &sizes,
            &sizes,
            &[(0, 0, d0), (1, 0, &self.f), (1, 1, d1), (2, 0, &self.h), (2, 1, &self.g), (2, 2, d2)],
        );
        2 * total.rank() == sizes.iter().sum::<usize>()
    }
}

/// Checks the hypotheses of the double mapping cone lemma, then its conclusion.
pub fn check_double_mapping_cone(inst: &DmcInstance) -> DmcVerdict {
    if let Some(why) = inst.chain_data_defect() {
        return DmcVerdict::NotChainData(why);
    }
    let eps = inst.eps;
    let two_eps = eps * 2;
    let zero = Rational64::from_integer(0);
    for k in 0..3 {
        if let Some((i, j)) = entries(&inst.delta[k]).find(|&(i, j)| shift(&inst.e[k], &inst.e[k], i, j) < two_eps) {
            return DmcVerdict::HypothesisFailed {
                hypothesis: 1,
                detail: format!("δ{k} has an entry ({i},{j}) of order below 2ε"),
            };
        }
    }
    let maps = [(&inst.f, 0, 1, "f", true), (&inst.g, 1, 2, "g", false), (&inst.h, 0, 2, "h", false)];
    for (m, s, t, name, small) in maps {
        let bad = entries(m).find(|&(i, j)| {
            let x = shift(&inst.e[s], &inst.e[t], i, j);
            let low = if small { x >= zero && x < eps } else { x == zero };
            !(low || x >= two_eps)
        });
        if let Some((i, j)) = bad {
            return DmcVerdict::HypothesisFailed {
                hypothesis: 2,
                detail: format!("{name} has an entry ({i},{j}) outside the allowed orders"),
            };
        }
    }
    let f0 = part(&inst.f, &inst.e[0], &inst.e[1], |x| x >= zero && x < eps);
    let g0 = part(&inst.g, &inst.e[1], &inst.e[2], |x| x == zero);
    let (n0, n1, n2) = (inst.e[0].dim(), inst.e[1].dim(), inst.e[2].dim());
    let (rf, rg) = (f0.rank(), g0.rank());
    if rf != n0 || rg != n2 || !g0.mul(&f0).is_zero() || rf + rg != n1 {
        return DmcVerdict::HypothesisFailed {
            hypothesis: 3,
            detail: format!("0 -> E0 -> E1 -> E2 -> 0 is not exact (ranks {rf}, {rg} for dimensions {n0}, {n1}, {n2})"),
        };
    }
    if inst.conclusion_holds() {
        DmcVerdict::QuasiIsomorphism
    } else {
        DmcVerdict::ConclusionFails
    }
}

fn random_grades<R: Rng>(rng: &mut R, n: usize, eps: Rational64) -> GradedModule {
    let step = eps / 2;
    GradedModule {
        grades: (0..n).map(|_| step * rng.gen_range(0..12i64)).collect(),
    }
}

fn random_map<R: Rng>(
    rng: &mut R,
    src: &GradedModule,
    tgt: &GradedModule,
    allowed: impl Fn(Rational64) -> bool,
    density: f64,
) -> MatF2 {
    let mut m = MatF2::zeros(tgt.dim(), src.dim());
    for i in 0..tgt.dim() {
        for j in 0..src.dim() {
            if allowed(tgt.grades[i] - src.grades[j]) && rng.gen_bool(density) {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Unipotent change of basis whose off-diagonal entries have order 0 or at
/// least 2ε, returned with its inverse.
fn random_unipotent<R: Rng>(rng: &mut R, e: &GradedModule, eps: Rational64) -> (MatF2, MatF2) {
    let n = e.dim();
    let mut m = MatF2::identity(n);
    let key = |k: usize| (e.grades[k], k);
    for i in 0..n {
        for j in 0..n {
            let x = e.grades[i] - e.grades[j];
            let allowed = (x == Rational64::from_integer(0) && key(j) < key(i)) || x >= eps * 2;
            if allowed && rng.gen_bool(0.3) {
                m.set(i, j, true);
            }
        }
    }
    let mut aug = m.hconcat(&MatF2::identity(n));
    aug.rref_in_place();
    let inv = aug.select_columns(&(n..2 * n).collect::<Vec<_>>());
    (m, inv)
}

/// A differential of order at least 2ε: a random pairing, conjugated.
fn random_differential<R: Rng>(rng: &mut R, e: &GradedModule, eps: Rational64) -> MatF2 {
    let n = e.dim();
    let mut d = MatF2::zeros(n, n);
    let mut used = vec![false; n];
    for j in 0..n {
        if used[j] || !rng.gen_bool(0.6) {
            continue;
        }
        if let Some(i) = (0..n).find(|&i| !used[i] && i != j && e.grades[i] - e.grades[j] >= eps * 2) {
            d.set(i, j, true);
            used[i] = true;
            used[j] = true;
        }
    }
    let (b, b_inv) = random_unipotent(rng, e, eps);
    b.mul(&d).mul(&b_inv)
}

/// Random data satisfying the lemma's hypotheses. With `break_exactness`, E1
/// gets an extra generator outside the image of f and the kernel of g is too big.
pub fn random_dmc_instance<R: Rng>(rng: &mut R, eps: Rational64, break_exactness: bool) -> DmcInstance {
    let (n0, n2) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
    let e0 = random_grades(rng, n0, eps);
    let e2 = random_grades(rng, n2, eps);
    let d0 = random_differential(rng, &e0, eps);
    let d2 = random_differential(rng, &e2, eps);
    let high = |x: Rational64| x >= eps * 2;
    let phi = random_map(rng, &e0, &e2, high, 0.4);
    let eta = random_map(rng, &e0, &e2, |x| x == Rational64::from_integer(0) || x >= eps * 2, 0.4);
    let c = d2.mul(&phi).add(&phi.mul(&d0));
    let chi = d2.mul(&eta).add(&eta.mul(&d0));
    let mut e1 = GradedModule {
        grades: e0.grades.iter().chain(&e2.grades).copied().collect(),
    };
    let mut sizes = vec![n0, n2];
    if break_exactness {
        e1.grades.push(Rational64::from_integer(0));
        sizes.push(1);
    }
    let id0 = MatF2::identity(n0);
    let id2 = MatF2::identity(n2);
    let phi_chi = phi.add(&chi);
    let d1 = assemble(&sizes, &sizes, &[(0, 0, &d0), (1, 0, &c), (1, 1, &d2)]);
    let f = assemble(&sizes, &[n0], &[(0, 0, &id0), (1, 0, &phi)]);
    let g = assemble(&[n2], &sizes, &[(0, 0, &phi_chi), (0, 1, &id2)]);
    let h = eta;

    let (b0, b0i) = random_unipotent(rng, &e0, eps);
    let (b1, b1i) = random_unipotent(rng, &e1, eps);
    let (b2, b2i) = random_unipotent(rng, &e2, eps);
    DmcInstance {
        delta: [b0.mul(&d0).mul(&b0i), b1.mul(&d1).mul(&b1i), b2.mul(&d2).mul(&b2i)],
        f: b1.mul(&f).mul(&b0i),
        g: b2.mul(&g).mul(&b1i),
        h: b2.mul(&h).mul(&b0i),
        e: [e0, e1, e2],
        eps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complex(deg: Vec<i32>, diff: Vec<Vec<u32>>) -> GradedComplexF2 {
        GradedComplexF2::new(deg, diff).unwrap()
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let a = complex(vec![0, 1, 1], vec![vec![1], vec![], vec![]]);
        let id = ChainMapF2 { columns: vec![vec![0], vec![1], vec![2]] };
        assert_eq!(mapping_cone(&a, &a, &id).unwrap().total_homology(), 0);
    }

    #[test]
    fn cone_of_zero_is_a_shifted_sum() {
        let a = complex(vec![0, 1], vec![vec![], vec![]]);
        let b = complex(vec![0], vec![vec![]]);
        let z = ChainMapF2 { columns: vec![vec![], vec![]] };
        let c = mapping_cone(&a, &b, &z).unwrap();
        assert_eq!(c.homology_ranks(), [(-1, 1), (0, 2)].into_iter().collect());
    }

    #[test]
    fn non_chain_maps_are_rejected() {
        let a = complex(vec![0, 1], vec![vec![1], vec![]]);
        let f = ChainMapF2 { columns: vec![vec![0], vec![]] };
        assert!(matches!(mapping_cone(&a, &a, &f), Err(ComplexError::NotChainMap(_))));
    }

    #[test]
    fn random_cones_satisfy_the_long_exact_sequence() {
        // |H(Cone f)| = |H(A)| + |H(B)| - 2 rank H(f)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            // A and B: three generators in degrees 0,1,1 with random d(0)
            let da = if rng.gen_bool(0.5) { vec![1] } else { vec![] };
            let a = complex(vec![0, 1, 1], vec![da.clone(), vec![], vec![]]);
            let b = complex(vec![0, 1, 1], vec![vec![2], vec![], vec![]]);
            // f on degree 1 is arbitrary; on degree 0 it must commute
            let f1: Vec<Vec<u32>> = (0..2).map(|_| (1..3).filter(|_| rng.gen_bool(0.5)).collect()).collect();
            let f0: Vec<u32> = if rng.gen_bool(0.5) { vec![0] } else { vec![] };
            let f = ChainMapF2 { columns: vec![f0, f1[0].clone(), f1[1].clone()] };
            let Ok(c) = mapping_cone(&a, &b, &f) else { continue };
            let ha = a.total_homology();
            let hb = b.total_homology();
            let hc = c.total_homology();
            assert!(hc <= ha + hb && (ha + hb - hc) % 2 == 0);
            let is_quasi = hc == 0;
            assert_eq!(is_quasi, ha == hb && ha + hb - hc == 2 * ha);
        }
    }

    #[test]
    fn identity_with_zero_third_term() {
        let one = Rational64::from_integer(1);
        let e0 = GradedModule { grades: vec![one, one * 3] };
        let inst = DmcInstance {
            e: [e0.clone(), e0, GradedModule { grades: vec![] }],
            delta: [MatF2::zeros(2, 2), MatF2::zeros(2, 2), MatF2::zeros(0, 0)],
            f: MatF2::identity(2),
            g: MatF2::zeros(0, 2),
            h: MatF2::zeros(0, 2),
            eps: one,
        };
        assert_eq!(check_double_mapping_cone(&inst), DmcVerdict::QuasiIsomorphism);
    }

    #[test]
    fn random_instances_satisfy_the_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let eps = Rational64::from_integer(1);
        for _ in 0..200 {
            let inst = random_dmc_instance(&mut rng, eps, false);
            assert_eq!(check_double_mapping_cone(&inst), DmcVerdict::QuasiIsomorphism);
        }
    }

    #[test]
    fn broken_exactness_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eps = Rational64::from_integer(1);
        for _ in 0..50 {
            let inst = random_dmc_instance(&mut rng, eps, true);
            assert!(matches!(
                check_double_mapping_cone(&inst),
                DmcVerdict::HypothesisFailed { hypothesis: 3, .. }
            ));
            assert!(!inst.conclusion_holds());
        }
    }
}
