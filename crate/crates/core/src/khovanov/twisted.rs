use std::collections::BTreeMap;

use serde::Serialize;

use super::{cube, KhError, KhOptions, KhRanks};
use crate::complex::{DoubleComplexF2, GradedComplexF2, SpectralPages};
use crate::diagram::{induce_marking, ArcMarking, Diagram};

/// The reduced cube complex with the marking's vertical differential.
#[derive(Clone, Debug)]
pub struct TwistedComplex {
    pub double: DoubleComplexF2,
    /// Cube vertex of each generator.
    pub vertex: Vec<u64>,
    /// Circle parities of each vertex.
    pub parities: Vec<Vec<u8>>,
}

impl TwistedComplex {
    /// Vertices whose circles all have even parity.
    pub fn even_vertices(&self) -> Vec<u64> {
        (0..self.parities.len() as u64)
            .filter(|&v| self.parities[v as usize].iter().all(|&b| b & 1 == 0))
            .collect()
    }
}

/// d = d_h + d_v on the reduced cube complex, where d_v wedges with the sum
/// of odd circles. Gradings: w = |I| and v = (k(0) - q) / 2.
pub fn twisted_complex(d: &Diagram, m: &ArcMarking, opts: &KhOptions) -> Result<TwistedComplex, KhError> {
    m.check(d, None)?;
    let c = cube(d, opts)?;
    let parities: Vec<Vec<u8>> = c
        .states()
        .iter()
        .map(|s| induce_marking(d, m, s))
        .collect::<Result<_, _>>()?;
    let a = c.assemble(true, Some(&parities));
    let v = a.v();
    let vertex = a.vertex.clone();
    let double = DoubleComplexF2::new(a.w, v, a.dh, a.dv)?;
    Ok(TwistedComplex { double, vertex, parities })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HdResult {
    pub ranks: KhRanks,
    /// Ranks per (w, v).
    pub bigraded: Vec<((i32, i32), usize)>,
}

/// Homology of the even-vertex part of the reduced complex under d_h.
fn even_vertex_homology(t: &TwistedComplex) -> Result<BTreeMap<(i32, i32), usize>, KhError> {
    let even: Vec<bool> = t.parities.iter().map(|p| p.iter().all(|&b| b & 1 == 0)).collect();
    let keep: Vec<u32> = (0..t.vertex.len() as u32).filter(|&g| even[t.vertex[g as usize] as usize]).collect();
    let mut new_index = vec![u32::MAX; t.vertex.len()];
    for (k, &g) in keep.iter().enumerate() {
        new_index[g as usize] = k as u32;
    }
    let dh = t.double.horizontal();
    let w = t.double.horizontal_grading();
    let v = t.double.vertical_grading();
    let diff: Vec<Vec<u32>> = keep
        .iter()
        .map(|&g| dh[g as usize].iter().map(|&i| new_index[i as usize]).filter(|&i| i != u32::MAX).collect())
        .collect();
    let c = GradedComplexF2::with_gradings(
        keep.iter().map(|&g| w[g as usize]).collect(),
        keep.iter().map(|&g| v[g as usize]).collect(),
        diff,
    )?;
    Ok(c.homology_bigraded())
}

/// Dotted-diagram homology H(H(C, d_v), d_h), computed directly and through
/// the even-vertex subcomplex; the two must agree.
pub fn hd_homology(d: &Diagram, m: &ArcMarking, opts: &KhOptions) -> Result<HdResult, KhError> {
    let t = twisted_complex(d, m, opts)?;
    let direct = t.double.vertical_then_horizontal();
    let even = even_vertex_homology(&t)?;
    if direct != even {
        return Err(KhError::Mismatch(format!(
            "vertical-then-horizontal homology {direct:?} differs from even-vertex homology {even:?}"
        )));
    }
    let mut by_w = BTreeMap::new();
    for (&(w, _), &r) in &direct {
        *by_w.entry(w).or_insert(0) += r;
    }
    Ok(HdResult {
        ranks: KhRanks::from_weights("hd", d, &by_w),
        bigraded: direct.into_iter().collect(),
    })
}

/// Homology of the twisted total complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedRanks {
    /// Keyed by total degree w + v.
    pub ranks: BTreeMap<i32, usize>,
    pub total: usize,
}

pub fn twisted_ranks(d: &Diagram, m: &ArcMarking, opts: &KhOptions) -> Result<TwistedRanks, KhError> {
    let t = twisted_complex(d, m, opts)?;
    let ranks = t.double.total_complex().homology_ranks();
    let total = ranks.values().sum();
    Ok(TwistedRanks { ranks, total })
}

/// Spectral sequence of the cube-weight filtration on the twisted total
/// complex. Checks E^2 against Hd and E^∞ against the total homology.
pub fn weight_ss(d: &Diagram, m: &ArcMarking, opts: &KhOptions) -> Result<SpectralPages, KhError> {
    let t = twisted_complex(d, m, opts)?;
    let filtered = t.double.filtered_total();
    let pages = filtered.spectral_pages(None);
    pages.consistency_check().map_err(KhError::Mismatch)?;
    let hd = t.double.vertical_then_horizontal();
    let last = pages.page_count() - 1;
    for ((w, v), r) in &hd {
        if pages.dim(2, *w, w + v) != *r {
            return Err(KhError::Mismatch(format!("E^2 at w={w}, v={v} differs from Hd")));
        }
    }
    if pages.total(2.min(last)) != hd.values().sum::<usize>() {
        return Err(KhError::Mismatch("E^2 has classes outside Hd".into()));
    }
    if pages.by_degree(last) != filtered.complex().homology_ranks() {
        return Err(KhError::Mismatch("E^∞ differs from the total homology".into()));
    }
    Ok(pages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::khovanov::khr_ranks;

    fn hopf() -> Diagram {
        parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap()
    }

    fn trefoil() -> Diagram {
        parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap()
    }

    #[test]
    fn zero_marking_gives_khr() {
        let o = KhOptions::default();
        for d in [trefoil(), hopf(), Diagram::unknot()] {
            let z = ArcMarking::zero(&d);
            let t = twisted_complex(&d, &z, &o).unwrap();
            assert!(t.double.vertical().iter().all(|c| c.is_empty()));
            let khr = khr_ranks(&d, &o).unwrap();
            assert_eq!(hd_homology(&d, &z, &o).unwrap().ranks.total, khr.total);
            assert_eq!(t.double.total_complex().total_homology(), khr.total);
        }
    }

    #[test]
    fn marked_unlink_has_no_vertical_homology() {
        let u = Diagram::unlink(2);
        let m = ArcMarking { arcs: vec![], loops: vec![1, 1] };
        let t = twisted_complex(&u, &m, &KhOptions::default()).unwrap();
        assert_eq!(t.double.len(), 2);
        assert_eq!(t.double.vertical_complex().total_homology(), 0);
        assert_eq!(hd_homology(&u, &m, &KhOptions::default()).unwrap().ranks.total, 0);
    }

    #[test]
    fn marked_hopf_link() {
        let h = hopf();
        let m = ArcMarking { arcs: vec![1, 0, 1, 0], loops: vec![] };
        let o = KhOptions::default();
        let hd = hd_homology(&h, &m, &o).unwrap();
        let pages = weight_ss(&h, &m, &o).unwrap();
        assert!(pages.stabilization_index <= 3);
        assert_eq!(pages.total(2), hd.ranks.total);
    }

    #[test]
    fn trefoil_collapses_at_e2() {
        let t = trefoil();
        let z = ArcMarking::zero(&t);
        let pages = weight_ss(&t, &z, &KhOptions::default()).unwrap();
        assert_eq!(pages.total(2), 3);
        assert_eq!(pages.total(pages.page_count() - 1), 3);
    }
}
