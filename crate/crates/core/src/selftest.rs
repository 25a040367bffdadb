//! The release gate: ten numbered acceptance checks plus negative controls.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::branched::{goeritz, oriented_resolution_filling, qa_certify, rank_inequality_check, QAVerdict};
use crate::complex::{check_double_mapping_cone, random_dmc_instance, DmcVerdict};
use crate::corpus::{knot_table, standard_corpus, CorpusEntry};
use crate::diagram::{parse_pd, ArcMarking, Diagram};
use crate::khovanov::{
    hd_homology, kh_complex, khr_complex, khr_ranks, state_sum_det, twisted_complex, twisted_ranks, weight_ss,
    Fault, KhOptions,
};
use crate::linalg::smith_normal_form;
use crate::surgery::{
    euler_char_si, plumbing_linking_matrix, plumbing_lspace_check, surgered_h1, Framing, FramedLinkPresentation,
    PlumbingGraph,
};

pub const CORPUS_SIZE: usize = 520;
pub const QA_BUDGET: usize = 4000;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub criteria: Vec<CriterionResult>,
    pub controls: Vec<CriterionResult>,
    pub passed: bool,
}

type Check = Result<String, String>;

fn timed(id: u8, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> CriterionResult {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match out {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if passed && elapsed > limit {
            passed = false;
            detail = format!("took {elapsed:?}, limit {limit:?}; {detail}");
        }
    }
    CriterionResult {
        id,
        title: title.into(),
        passed,
        detail,
        millis: elapsed.as_millis(),
    }
}

/// Two marked arcs; always a valid marking on a diagram with crossings.
pub fn two_arc_marking(d: &Diagram) -> ArcMarking {
    let mut m = ArcMarking::zero(d);
    if d.arc_count() >= 2 {
        m.arcs[0] = 1;
        m.arcs[1] = 1;
    }
    m
}

fn corpus() -> Vec<CorpusEntry> {
    standard_corpus(CORPUS_SIZE)
        .into_iter()
        .filter(|e| e.diagram.crossing_count() <= 7)
        .collect()
}

fn over_corpus<T: Send>(
    corpus: &[CorpusEntry],
    f: impl Fn(&CorpusEntry) -> Result<T, String> + Sync,
) -> Result<Vec<T>, String> {
    corpus
        .par_iter()
        .map(|e| f(e).map_err(|why| format!("{}: {why}", e.name)))
        .collect()
}

pub fn criterion_1() -> CriterionResult {
    timed(1, "Khr of unknot, Hopf, trefoil, figure-eight equals det", None, || {
        let cases = [
            ("unknot", Diagram::unknot(), 1u64),
            ("hopf", parse_pd("[[1,3,2,4],[3,1,4,2]]", 0).unwrap(), 2),
            ("trefoil", parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).unwrap(), 3),
            ("figure-eight", parse_pd("[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]", 0).unwrap(), 5),
        ];
        let mut parts = Vec::new();
        for (name, d, want) in cases {
            let start = Instant::now();
            let opts = KhOptions::default();
            let khr = khr_ranks(&d, &opts).map_err(|e| e.to_string())?.total as u64;
            let g = goeritz(&d).map_err(|e| e.to_string())?.det();
            let s = state_sum_det(&d, opts.max_crossings).map_err(|e| e.to_string())?;
            let t = start.elapsed();
            if khr != want || g != want || s != want {
                return Err(format!("{name}: khr {khr}, goeritz {g}, state sum {s}, expected {want}"));
            }
            if t > Duration::from_secs(1) {
                return Err(format!("{name} took {t:?}"));
            }
            parts.push(format!("{name}={khr}"));
        }
        Ok(parts.join(" "))
    })
}

pub fn criterion_2() -> CriterionResult {
    timed(2, "d^2 = 0, commuting bicomplex, basepoint independence", Some(Duration::from_secs(300)), || {
        let c = corpus();
        if c.len() < 500 {
            return Err(format!("corpus has only {} diagrams", c.len()));
        }
        let opts = KhOptions::default();
        let checked = over_corpus(&c, |e| {
            let d = &e.diagram;
            if !d.is_connected() {
                return Err("diagram is split".into());
            }
            kh_complex(d, &opts).map_err(|e| e.to_string())?;
            khr_complex(d, &opts).map_err(|e| e.to_string())?;
            twisted_complex(d, &two_arc_marking(d), &opts).map_err(|e| e.to_string())?;
            let base = khr_ranks(d, &opts).map_err(|e| e.to_string())?;
            for arc in 1..=d.arc_count() {
                let o = KhOptions {
                    basepoint: Some(arc),
                    ..opts
                };
                let r = khr_ranks(d, &o).map_err(|e| e.to_string())?;
                if r.ranks_h != base.ranks_h {
                    return Err(format!("Khr changes with basepoint at arc {arc}"));
                }
            }
            Ok(())
        })?;
        Ok(format!("{} diagrams", checked.len()))
    })
}

pub fn criterion_3() -> CriterionResult {
    timed(3, "twisted homology with trivial marking equals Khr; Hd constructions agree", None, || {
        let c = corpus();
        let opts = KhOptions::default();
        over_corpus(&c, |e| {
            let d = &e.diagram;
            let khr = khr_ranks(d, &opts).map_err(|e| e.to_string())?;
            let tw = twisted_ranks(d, &ArcMarking::zero(d), &opts).map_err(|e| e.to_string())?;
            let k0 = d.resolve(0, None).map_err(|e| e.to_string())?.circle_count as i32;
            let mut collapsed: BTreeMap<i32, usize> = BTreeMap::new();
            for ((w, q), r) in khr_complex(d, &opts).map_err(|e| e.to_string())?.homology_bigraded() {
                *collapsed.entry(w + (k0 - q) / 2).or_insert(0) += r;
            }
            if tw.total != khr.total || tw.ranks != collapsed {
                return Err("twisted ranks differ from Khr".into());
            }
            hd_homology(d, &ArcMarking::zero(d), &opts).map_err(|e| e.to_string())?;
            hd_homology(d, &two_arc_marking(d), &opts).map_err(|e| e.to_string())?;
            Ok(())
        })?;
        Ok(format!("{} diagrams, 2 markings each", c.len()))
    })
}

fn check_pages(d: &Diagram, m: &ArcMarking, opts: &KhOptions) -> Result<(), String> {
    let pages = weight_ss(d, m, opts).map_err(|e| e.to_string())?;
    let t = twisted_complex(d, m, opts).map_err(|e| e.to_string())?;
    let vert = t.double.vertical_complex().homology_bigraded();
    let mut e1: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for ((v, w), r) in vert {
        e1.insert((w, w + v), r);
    }
    for (&(p, tdeg), &r) in &e1 {
        if pages.dim(1, p, tdeg) != r {
            return Err(format!("E^1 at p={p}, t={tdeg} differs from vertical homology"));
        }
    }
    if pages.total(1) != e1.values().sum::<usize>() {
        return Err("E^1 has classes outside vertical homology".into());
    }
    for r in 0..pages.page_count() - 1 {
        if pages.total(r + 1) > pages.total(r) {
            return Err(format!("page {} is larger than page {r}", r + 1));
        }
    }
    if pages.stabilization_index > d.crossing_count() + 1 {
        return Err(format!("stabilizes at page {}", pages.stabilization_index));
    }
    Ok(())
}

pub fn criterion_4() -> CriterionResult {
    timed(4, "spectral sequence pages: E1, E2, E-infinity, monotone, stabilization", None, || {
        let c = corpus();
        let opts = KhOptions::default();
        over_corpus(&c, |e| {
            let d = &e.diagram;
            check_pages(d, &ArcMarking::zero(d), &opts)?;
            check_pages(d, &two_arc_marking(d), &opts)
        })?;
        Ok(format!("{} diagrams, 2 markings each", c.len()))
    })
}

pub fn criterion_5() -> CriterionResult {
    timed(5, "det(L) <= rk Khr(m(L)) with equality on QA members", None, || {
        let c = corpus();
        let opts = KhOptions::default();
        let rows = over_corpus(&c, |e| {
            let r = rank_inequality_check(&e.diagram, &opts).map_err(|e| e.to_string())?;
            if !r.holds {
                return Err(format!("det {} > rank {}", r.det_goeritz, r.khr_mirror_rank));
            }
            let qa = matches!(qa_certify(&e.diagram, QA_BUDGET), QAVerdict::Certified { .. });
            if qa && !r.equality {
                return Err(format!("QA but det {} < rank {}", r.det_goeritz, r.khr_mirror_rank));
            }
            Ok((qa, r.equality))
        })?;
        let qa = rows.iter().filter(|r| r.0).count();
        let eq = rows.iter().filter(|r| r.1).count();
        Ok(format!("{} diagrams, {qa} QA-certified, {eq} with equality", rows.len()))
    })
}

pub fn criterion_6() -> CriterionResult {
    timed(6, "QA certificates for alternating knots through six crossings", Some(Duration::from_secs(60)), || {
        let mut parts = Vec::new();
        for e in knot_table() {
            match qa_certify(&e.diagram, QA_BUDGET) {
                QAVerdict::Certified { certificate } => {
                    certificate.verify().map_err(|why| format!("{}: {why}", e.name))?;
                    parts.push(format!("{}({} nodes)", e.name, certificate.node_count()));
                }
                QAVerdict::Unknown { reason } => return Err(format!("{}: {reason}", e.name)),
            }
        }
        Ok(parts.join(" "))
    })
}

pub fn criterion_7() -> CriterionResult {
    timed(7, "surgery H1 orders against determinants, lens spaces, Euler characteristic", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let m = rng.gen_range(1..=5);
            let mut rows = vec![vec![0i64; m]; m];
            for i in 0..m {
                for j in i..m {
                    let x = rng.gen_range(-9..=9);
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            let p = FramedLinkPresentation::from_rows(&rows).map_err(|e| e.to_string())?;
            let v: Vec<Framing> = (0..m).map(|_| Framing::ALL[rng.gen_range(0..3)]).collect();
            let a = p.surgered_matrix(&v).map_err(|e| e.to_string())?;
            let chi = euler_char_si(&p, &v).map_err(|e| e.to_string())?;
            let det = num_traits::Signed::abs(&a.determinant());
            if num_bigint::BigInt::from(chi) != det {
                return Err(format!("trial {trial}: chi {chi} but |det| {det}"));
            }
            let snf = smith_normal_form(&a).map_err(|e| e.to_string())?;
            let zero_entry = snf.diagonal().iter().any(|x| x.is_zero());
            if (chi == 0) != zero_entry {
                return Err(format!("trial {trial}: chi {chi} but zero Smith entry {zero_entry}"));
            }
        }
        for q in 1..=50i64 {
            let g = surgered_h1(&FramedLinkPresentation::framed_unknot(q), &[Framing::Zero]).map_err(|e| e.to_string())?;
            if g.order() != Some(q as u128) {
                return Err(format!("lens space L({q},1) has H1 {g}"));
            }
        }
        Ok("1000 presentations, lens spaces p <= 50".into())
    })
}

fn random_forest(rng: &mut ChaCha8Rng) -> PlumbingGraph {
    let n = rng.gen_range(1..=7);
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.gen_bool(0.8) {
            edges.push([rng.gen_range(0..v), v]);
        }
    }
    let mut g = PlumbingGraph { mult: vec![0; n], edges };
    let deg = g.degrees();
    g.mult = deg.iter().map(|&d| d as i64 + rng.gen_range(0..=2)).collect();
    g
}

pub fn criterion_8() -> CriterionResult {
    timed(8, "plumbing certifier", None, || {
        let mut certified = Vec::new();
        for p in 1..=50i64 {
            let v = plumbing_lspace_check(&PlumbingGraph::chain(vec![p])).map_err(|e| e.to_string())?;
            if !v.is_certified() || v.h1 != p as u128 {
                return Err(format!("single vertex m={p}: {:?} h1={}", v.verdict, v.h1));
            }
            certified.push(v);
        }
        for n in 1..=10usize {
            let v = plumbing_lspace_check(&PlumbingGraph::chain(vec![2; n])).map_err(|e| e.to_string())?;
            if !v.is_certified() || v.h1 != n as u128 + 1 {
                return Err(format!("A_{n}: {:?} h1={}", v.verdict, v.h1));
            }
            certified.push(v);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let g = random_forest(&mut rng);
            let v = plumbing_lspace_check(&g).map_err(|e| e.to_string())?;
            if v.is_certified() {
                let det = num_traits::Signed::abs(&plumbing_linking_matrix(&g).determinant());
                if num_bigint::BigInt::from(v.h1) != det {
                    return Err(format!("{g:?}: h1 {} but |det| {det}", v.h1));
                }
                certified.push(v);
            }
        }
        for v in &certified {
            v.verify()?;
        }
        Ok(format!("{} certified derivations re-verified", certified.len()))
    })
}

pub fn criterion_9() -> CriterionResult {
    timed(9, "double mapping cone harness", Some(Duration::from_secs(30)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let eps = Rational64::new(1, 4);
        for i in 0..200 {
            let inst = random_dmc_instance(&mut rng, eps, false);
            let v = check_double_mapping_cone(&inst);
            if v != DmcVerdict::QuasiIsomorphism {
                return Err(format!("instance {i}: {v:?}"));
            }
        }
        for i in 0..50 {
            let inst = random_dmc_instance(&mut rng, eps, true);
            match check_double_mapping_cone(&inst) {
                DmcVerdict::HypothesisFailed { hypothesis: 3, .. } => {}
                v => return Err(format!("negative control {i}: {v:?}")),
            }
        }
        Ok("200 quasi-isomorphisms, 50 rejections of hypothesis 3".into())
    })
}

pub fn criterion_10() -> CriterionResult {
    timed(10, "oriented-resolution filling band condition", None, || {
        let c = corpus();
        over_corpus(&c, |e| {
            let r = oriented_resolution_filling(&e.diagram).map_err(|e| e.to_string())?;
            if r.valid {
                Ok(())
            } else {
                Err("invalid filling".into())
            }
        })?;
        Ok(format!("{} diagrams, no band violations", c.len()))
    })
}

pub fn criteria() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}

/// Each fault must be caught: either the complex fails validation or
/// Khr(trefoil) comes out different from 3.
pub fn negative_controls() -> Vec<CriterionResult> {
    let trefoil = parse_pd("[[1,4,2,5],[3,6,4,1],[5,2,6,3]]", 0).expect("trefoil");
    [(Fault::DropSplitTerm, "split map loses a term"), (Fault::IdempotentMerge, "merge map made idempotent")]
        .into_iter()
        .map(|(fault, title)| {
            timed(0, title, None, || {
                let opts = KhOptions {
                    fault,
                    ..Default::default()
                };
                match (kh_complex(&trefoil, &opts), khr_ranks(&trefoil, &opts)) {
                    (Err(e), _) | (_, Err(e)) => Ok(format!("detected: {e}")),
                    (Ok(kh), Ok(khr)) if kh.total_homology() != 6 || khr.total != 3 => Ok(format!(
                        "detected: Kh {} and Khr {} of the trefoil",
                        kh.total_homology(),
                        khr.total
                    )),
                    _ => Err("fault went unnoticed".into()),
                }
            })
        })
        .collect()
}

pub fn run() -> SelftestReport {
    let criteria = criteria();
    let controls = negative_controls();
    let passed = criteria.iter().chain(&controls).all(|c| c.passed);
    SelftestReport {
        criteria,
        controls,
        passed,
    }
}

