use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::{ComplexError, GradedComplexF2};
use crate::linalg::MatF2;

/// A complex with a decreasing filtration: `F^p` is spanned by generators of
/// level at least `p`, and the differential never lowers the level.
#[derive(Clone, Debug)]
pub struct FilteredComplexF2 {
    complex: GradedComplexF2,
    level: Vec<i32>,
}

/// Ranks of every page of the spectral sequence of a filtered complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPages {
    pub p_min: i32,
    pub t_min: i32,
    /// `pages[r][p - p_min][t - t_min]` is the rank of E^r at level p, total degree t.
    pub pages: Vec<Vec<Vec<usize>>>,
    /// Rank of d_r leaving level p in total degree t, same indexing.
    pub differential_ranks: Vec<Vec<Vec<usize>>>,
    pub stabilization_index: usize,
}

impl FilteredComplexF2 {
    pub fn new(complex: GradedComplexF2, level: Vec<i32>) -> Result<Self, ComplexError> {
        if level.len() != complex.len() {
            return Err(ComplexError::FiltrationViolation("one level per generator is required".into()));
        }
        for (j, col) in complex.differential().iter().enumerate() {
            if let Some(&i) = col.iter().find(|&&i| level[i as usize] < level[j]) {
                return Err(ComplexError::FiltrationViolation(format!(
                    "generator {j} at level {} maps to generator {i} at level {}",
                    level[j], level[i as usize]
                )));
            }
        }
        Ok(FilteredComplexF2 { complex, level })
    }

    pub fn complex(&self) -> &GradedComplexF2 {
        &self.complex
    }

    pub fn levels(&self) -> &[i32] {
        &self.level
    }

    fn ranges(&self) -> (i32, i32, i32, i32) {
        if self.complex.is_empty() {
            return (0, 0, 0, 0);
        }
        let d = self.complex.degrees();
        (
            *self.level.iter().min().unwrap(),
            *self.level.iter().max().unwrap(),
            *d.iter().min().unwrap(),
            *d.iter().max().unwrap(),
        )
    }

    /// Pages E^0 through E^(L+1), L the filtration span, computed as
    /// quotients Z^r_p / B^r_p of explicit subspaces. With `max_r`, stops early.
    pub fn spectral_pages(&self, max_r: Option<usize>) -> SpectralPages {
        let (p_min, p_max, t_min, t_max) = self.ranges();
        let span = (p_max - p_min) as usize;
        let last = max_r.map_or(span + 1, |m| m.min(span + 1));
        let ctx = PageContext::new(self, t_min, t_max);
        let np = (p_max - p_min + 1) as usize;
        let nt = (t_max - t_min + 1) as usize;
        let cells: Vec<(usize, i32, i32)> = (0..=last)
            .flat_map(|r| (p_min..=p_max).flat_map(move |p| (t_min..=t_max).map(move |t| (r, p, t))))
            .collect();
        let results: Vec<((usize, i32, i32), (usize, usize))> = cells
            .par_iter()
            .map(|&(r, p, t)| {
                let ri = r as i32;
                let z = ctx.z(ri, p, t);
                let b = ctx.b(ri, p, t);
                let dim = z.rank() - b.rank();
                let target = ctx.b(ri, p + ri, t + 1);
                let image = ctx.apply_d(&z, t);
                let rank = if image.rows() == 0 {
                    0
                } else {
                    image.stack(&target).rank() - target.rank()
                };
                ((r, p, t), (dim, rank))
            })
            .collect();
        let mut pages = vec![vec![vec![0usize; nt]; np]; last + 1];
        let mut differential_ranks = pages.clone();
        for ((r, p, t), (dim, rank)) in results {
            let (pi, ti) = ((p - p_min) as usize, (t - t_min) as usize);
            pages[r][pi][ti] = dim;
            differential_ranks[r][pi][ti] = rank;
        }
        SpectralPages::finish(p_min, t_min, pages, differential_ranks)
    }

    /// Same pages read off a filtration-compatible column reduction: a
    /// pivot pair whose levels differ by L lives on pages 0..=L and is killed by d_L.
    pub fn spectral_pages_by_pairing(&self) -> SpectralPages {
        let (p_min, p_max, t_min, t_max) = self.ranges();
        let span = (p_max - p_min) as usize;
        let np = (p_max - p_min + 1) as usize;
        let nt = (t_max - t_min + 1) as usize;
        let n = self.complex.len();
        // order generators by level descending so each F^p is a prefix
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&g| (std::cmp::Reverse(self.level[g as usize]), g));
        let mut pos = vec![0u32; n];
        for (k, &g) in order.iter().enumerate() {
            pos[g as usize] = k as u32;
        }
        let mut owner: HashMap<u32, usize> = HashMap::new();
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(n);
        let mut paired_as_low = vec![false; n];
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for &g in &order {
            let mut col: Vec<u32> = self.complex.differential()[g as usize].iter().map(|&i| pos[i as usize]).collect();
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match owner.get(&low) {
                    Some(&k) => col = xor_sorted(&col, &reduced[k]),
                    None => {
                        owner.insert(low, reduced.len());
                        let sigma = order[low as usize];
                        paired_as_low[sigma as usize] = true;
                        pairs.push((g, sigma));
                        break;
                    }
                }
            }
            reduced.push(col);
        }
        let mut paired = paired_as_low;
        for &(tau, _) in &pairs {
            paired[tau as usize] = true;
        }
        let last = span + 1;
        let mut pages = vec![vec![vec![0usize; nt]; np]; last + 1];
        let mut differential_ranks = pages.clone();
        let deg = self.complex.degrees();
        let at = |g: u32| ((self.level[g as usize] - p_min) as usize, (deg[g as usize] - t_min) as usize);
        for g in 0..n as u32 {
            if !paired[g as usize] {
                let (pi, ti) = at(g);
                for page in pages.iter_mut() {
                    page[pi][ti] += 1;
                }
            }
        }
        for &(tau, sigma) in &pairs {
            let len = (self.level[sigma as usize] - self.level[tau as usize]) as usize;
            let (pt, tt) = at(tau);
            let (ps, ts) = at(sigma);
            for page in pages.iter_mut().take(len + 1) {
                page[pt][tt] += 1;
                page[ps][ts] += 1;
            }
            differential_ranks[len][pt][tt] += 1;
        }
        SpectralPages::finish(p_min, t_min, pages, differential_ranks)
    }
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

struct DegreePiece {
    gens: Vec<u32>,
    levels: Vec<i32>,
    /// d out of this degree, rows indexed by the next degree's generators.
    d: MatF2,
}

struct PageContext {
    t_min: i32,
    pieces: Vec<DegreePiece>,
}

impl PageContext {
    fn new(f: &FilteredComplexF2, t_min: i32, t_max: i32) -> Self {
        let c = &f.complex;
        let gens: Vec<Vec<u32>> = (t_min..=t_max + 1).map(|t| c.generators_in_degree(t)).collect();
        let pieces = (0..=(t_max - t_min) as usize)
            .map(|k| DegreePiece {
                levels: gens[k].iter().map(|&g| f.level[g as usize]).collect(),
                d: c.block_matrix(&gens[k], &gens[k + 1]),
                gens: gens[k].clone(),
            })
            .collect();
        PageContext { t_min, pieces }
    }

    fn piece(&self, t: i32) -> Option<&DegreePiece> {
        if t < self.t_min {
            return None;
        }
        self.pieces.get((t - self.t_min) as usize)
    }

    fn width(&self, t: i32) -> usize {
        self.piece(t).map_or(0, |p| p.gens.len())
    }

    /// Z^r_p in degree t, as rows over the degree-t generators.
    fn z(&self, r: i32, p: i32, t: i32) -> MatF2 {
        let Some(piece) = self.piece(t) else {
            return MatF2::zeros(0, 0);
        };
        let cols: Vec<usize> = (0..piece.gens.len()).filter(|&k| piece.levels[k] >= p).collect();
        if r <= 0 {
            let mut m = MatF2::zeros(cols.len(), piece.gens.len());
            for (i, &k) in cols.iter().enumerate() {
                m.set(i, k, true);
            }
            return m;
        }
        let rows: Vec<usize> = match self.piece(t + 1) {
            Some(next) => (0..next.gens.len()).filter(|&k| next.levels[k] < p + r).collect(),
            None => Vec::new(),
        };
        let sub = piece.d.select_rows(&rows).select_columns(&cols);
        sub.kernel_basis().embed_columns(&cols, piece.gens.len())
    }

    /// B^r_p = Z^{r-1}_{p+1} + d Z^{r-1}_{p-r+1}, as rows over degree t.
    fn b(&self, r: i32, p: i32, t: i32) -> MatF2 {
        let w = self.width(t);
        let a = self.z(r - 1, p + 1, t);
        let a = if a.cols() == w { a } else { MatF2::zeros(0, w) };
        let src = self.z(r - 1, p - r + 1, t - 1);
        let img = self.apply_d(&src, t - 1);
        if img.rows() == 0 || img.cols() != w {
            return a;
        }
        a.stack(&img)
    }

    /// Applies d to row vectors in degree t, giving rows over degree t+1.
    fn apply_d(&self, rows: &MatF2, t: i32) -> MatF2 {
        let w = self.width(t + 1);
        match self.piece(t) {
            Some(piece) if rows.rows() > 0 && rows.cols() == piece.gens.len() => rows.mul(&piece.d.transpose()),
            _ => MatF2::zeros(0, w),
        }
    }
}

impl SpectralPages {
    fn finish(p_min: i32, t_min: i32, pages: Vec<Vec<Vec<usize>>>, differential_ranks: Vec<Vec<Vec<usize>>>) -> Self {
        let last = pages.len() - 1;
        let stabilization_index = (0..=last).find(|&r| pages[r] == pages[last]).unwrap_or(last);
        SpectralPages {
            p_min,
            t_min,
            pages,
            differential_ranks,
            stabilization_index,
        }
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    pub fn dim(&self, r: usize, p: i32, t: i32) -> usize {
        let (Ok(pi), Ok(ti)) = (usize::try_from(p - self.p_min), usize::try_from(t - self.t_min)) else {
            return 0;
        };
        let r = r.min(self.pages.len() - 1);
        self.pages[r].get(pi).and_then(|row| row.get(ti)).copied().unwrap_or(0)
    }

    pub fn infinity(&self) -> &Vec<Vec<usize>> {
        self.pages.last().expect("at least one page")
    }

    /// Total rank of page r.
    pub fn total(&self, r: usize) -> usize {
        let r = r.min(self.pages.len() - 1);
        self.pages[r].iter().flatten().sum()
    }

    /// Ranks of page r summed over levels, per total degree.
    pub fn by_degree(&self, r: usize) -> BTreeMap<i32, usize> {
        let r = r.min(self.pages.len() - 1);
        let mut out = BTreeMap::new();
        for row in &self.pages[r] {
            for (ti, &x) in row.iter().enumerate() {
                if x > 0 {
                    *out.entry(self.t_min + ti as i32).or_insert(0) += x;
                }
            }
        }
        out
    }

    /// Checks that each page is the homology of the previous one:
    /// dim E^{r+1} = dim E^r - rank d_r out - rank d_r in.
    pub fn consistency_check(&self) -> Result<(), String> {
        for r in 0..self.pages.len().saturating_sub(1) {
            for (pi, row) in self.pages[r].iter().enumerate() {
                for (ti, &e) in row.iter().enumerate() {
                    let out = self.differential_ranks[r][pi][ti];
                    let back = pi.checked_sub(r).filter(|_| ti > 0);
                    let into = back.map_or(0, |bp| self.differential_ranks[r][bp][ti - 1]);
                    let next = self.pages[r + 1][pi][ti];
                    if e < out + into || next != e - out - into {
                        return Err(format!(
                            "page {} at level {}, degree {}: {} - {} - {} != {}",
                            r + 1,
                            self.p_min + pi as i32,
                            self.t_min + ti as i32,
                            e,
                            out,
                            into,
                            next
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
