//! Library results against small independent reimplementations.

use std::collections::BTreeMap;

use cubekh::branched::{goeritz, qa_certify, QANode, QAVerdict, QACertificate};
use cubekh::corpus::{braid_closure, knot_table, standard_corpus};
use cubekh::diagram::Diagram;
use cubekh::khovanov::{kh_complex, khr_complex, khr_ranks, state_sum_det, KhOptions};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counts circles of a resolution by walking endpoint pairings.
fn brute_circles(d: &Diagram, state: u64) -> usize {
    let xs = d.crossings();
    let node = |c: usize, s: usize| 4 * c + s;
    let total = 4 * xs.len();
    let mut arc_mate = vec![usize::MAX; total];
    let mut first: BTreeMap<u32, usize> = BTreeMap::new();
    for (c, t) in xs.iter().enumerate() {
        for (s, &a) in t.iter().enumerate() {
            let here = node(c, s);
            match first.remove(&a) {
                Some(other) => {
                    arc_mate[here] = other;
                    arc_mate[other] = here;
                }
                None => {
                    first.insert(a, here);
                }
            }
        }
    }
    let res_mate = |n: usize| {
        let (c, s) = (n / 4, n % 4);
        let one = state >> c & 1 == 1;
        let partner = match (one, s) {
            (false, 0) => 1,
            (false, 1) => 0,
            (false, 2) => 3,
            (false, _) => 2,
            (true, 0) => 3,
            (true, 3) => 0,
            (true, 1) => 2,
            (true, _) => 1,
        };
        node(c, partner)
    };
    let mut seen = vec![false; total];
    let mut circles = 0;
    for start in 0..total {
        if seen[start] {
            continue;
        }
        circles += 1;
        let mut at = start;
        loop {
            seen[at] = true;
            let across = res_mate(at);
            seen[across] = true;
            at = arc_mate[across];
            if at == start || seen[at] {
                break;
            }
        }
    }
    circles + d.free_loops() as usize
}

fn random_braid(rng: &mut ChaCha8Rng) -> Diagram {
    loop {
        let strands = rng.gen_range(2..=5usize);
        let len = rng.gen_range(1..=9);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..strands as i32 + 1);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        if let Ok(d) = braid_closure(strands, &word) {
            return d;
        }
    }
}

#[test]
fn circle_counts_match_strand_following() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let d = random_braid(&mut rng);
        let n = d.crossing_count();
        for _ in 0..4 {
            let s: u64 = if n == 0 { 0 } else { rng.gen_range(0..1u64 << n) };
            assert_eq!(d.resolve(s, None).unwrap().circle_count, brute_circles(&d, s), "{:?} state {s}", d.crossings());
        }
    }
}

type Laurent = BTreeMap<i32, i64>;

fn add_term(p: &mut Laurent, e: i32, c: i64) {
    let x = p.entry(e).or_insert(0);
    *x += c;
    if *x == 0 {
        p.remove(&e);
    }
}

/// Σ_s (−1)^|s| t^|s| t^shift (t + 1/t)^k over all states.
fn cube_euler(d: &Diagram, reduced: bool) -> Laurent {
    let n = d.crossing_count();
    let mut out = Laurent::new();
    for s in 0..1u64 << n {
        let w = s.count_ones() as i32;
        let mut k = brute_circles(&d, s) as u32;
        let mut shift = w;
        if reduced {
            k -= 1;
            shift -= 1;
        }
        let sign = if w % 2 == 0 { 1 } else { -1 };
        for j in 0..=k {
            let binom = (0..j).fold(1i64, |acc, i| acc * (k - i) as i64 / (i + 1) as i64);
            add_term(&mut out, shift + k as i32 - 2 * j as i32, sign * binom);
        }
    }
    out
}

fn homology_euler(bigraded: BTreeMap<(i32, i32), usize>) -> Laurent {
    let mut out = Laurent::new();
    for ((w, q), r) in bigraded {
        add_term(&mut out, q, if w % 2 == 0 { r as i64 } else { -(r as i64) });
    }
    out
}

#[test]
fn graded_euler_characteristic_matches_bracket() {
    let opts = KhOptions::default();
    for e in standard_corpus(200) {
        let d = &e.diagram;
        let kh = kh_complex(d, &opts).unwrap().homology_bigraded();
        assert_eq!(homology_euler(kh), cube_euler(d, false), "{}", e.name);
        let khr = khr_complex(d, &opts).unwrap().homology_bigraded();
        assert_eq!(homology_euler(khr), cube_euler(d, true), "{}", e.name);
    }
}

#[test]
fn unreduced_rank_is_twice_reduced() {
    let opts = KhOptions::default();
    for e in standard_corpus(300) {
        let kh = kh_complex(&e.diagram, &opts).unwrap().total_homology();
        let khr = khr_ranks(&e.diagram, &opts).unwrap().total;
        assert_eq!(kh, 2 * khr, "{}", e.name);
    }
}

/// |⟨D⟩| at A = e^{iπ/4}, from the bracket expanded by brute force.
fn bracket_det(d: &Diagram) -> u64 {
    let n = d.crossing_count();
    let mut bracket = Laurent::new();
    for s in 0..1u64 << n {
        let b = s.count_ones() as i32;
        let a = n as i32 - b;
        let k = brute_circles(d, s) as u32;
        // (−A² − A⁻²)^(k−1)
        let mut loop_poly = Laurent::from([(0, 1)]);
        for _ in 1..k {
            let mut next = Laurent::new();
            for (&e, &c) in &loop_poly {
                add_term(&mut next, e + 2, -c);
                add_term(&mut next, e - 2, -c);
            }
            loop_poly = next;
        }
        for (e, c) in loop_poly {
            add_term(&mut bracket, e + a - b, c);
        }
    }
    let (mut re, mut im) = (0f64, 0f64);
    for (e, c) in bracket {
        let theta = std::f64::consts::FRAC_PI_4 * e as f64;
        re += c as f64 * theta.cos();
        im += c as f64 * theta.sin();
    }
    (re * re + im * im).sqrt().round() as u64
}

#[test]
fn determinant_oracles_agree() {
    for e in standard_corpus(520) {
        let d = &e.diagram;
        let b = bracket_det(d);
        assert_eq!(goeritz(d).unwrap().det(), b, "{}", e.name);
        assert_eq!(state_sum_det(d, 14).unwrap(), b, "{}", e.name);
    }
}

fn check_triples(c: &QACertificate) {
    if let QANode::Resolve { det, det0, det1, zero, one, .. } = &c.node {
        assert_eq!(det0 + det1, *det);
        assert!(*det0 > 0 && *det1 > 0);
        check_triples(zero);
        check_triples(one);
    }
}

#[test]
fn qa_certificates_reverify() {
    for e in knot_table().into_iter().chain(standard_corpus(150)) {
        if let QAVerdict::Certified { certificate } = qa_certify(&e.diagram, 4000) {
            certificate.verify().unwrap();
            check_triples(&certificate);
            let khr = khr_ranks(&e.diagram.mirror(), &KhOptions::default()).unwrap().total as u64;
            assert_eq!(khr, goeritz(&e.diagram).unwrap().det(), "{}", e.name);
        }
    }
}

#[test]
fn alternating_table_is_thin() {
    let opts = KhOptions::default();
    for e in knot_table() {
        let det = goeritz(&e.diagram).unwrap().det() as usize;
        assert_eq!(khr_ranks(&e.diagram, &opts).unwrap().total, det, "{}", e.name);
        assert_eq!(kh_complex(&e.diagram, &opts).unwrap().total_homology(), 2 * det);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mirror_swaps_reduced_degrees(word in prop::collection::vec((1i32..4, any::<bool>()), 1..7)) {
        let w: Vec<i32> = word.iter().map(|&(g, pos)| if pos { g } else { -g }).collect();
        let d = braid_closure(4, &w).unwrap();
        let opts = KhOptions::default();
        let a = khr_ranks(&d, &opts).unwrap();
        let b = khr_ranks(&d.mirror(), &opts).unwrap();
        prop_assert_eq!(a.total, b.total);
        let flipped: BTreeMap<i32, usize> = a.ranks_h.iter().map(|(&h, &r)| (-h, r)).collect();
        prop_assert_eq!(flipped, b.ranks_h);
    }

    #[test]
    fn rank_bounds_determinant(word in prop::collection::vec((1i32..3, any::<bool>()), 1..8)) {
        let w: Vec<i32> = word.iter().map(|&(g, pos)| if pos { g } else { -g }).collect();
        let d = braid_closure(3, &w).unwrap();
        let det = goeritz(&d).unwrap().det() as usize;
        let khr = khr_ranks(&d.mirror(), &KhOptions::default()).unwrap().total;
        prop_assert!(det <= khr);
    }
}
