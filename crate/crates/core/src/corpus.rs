//! Test diagrams: a small knot table and braid-closure enumeration.

use std::collections::HashSet;

use crate::diagram::{Diagram, DiagramError};

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub diagram: Diagram,
}

/// Closure of a braid word on `strands` strands. Letter `i > 0` is σᵢ, `-i`
/// its inverse. Strands not touched by any letter become free loops.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<Diagram, DiagramError> {
    if strands == 0 {
        return Err(DiagramError::MalformedPd("braid with no strands".into()));
    }
    for &g in word {
        if g == 0 || g.unsigned_abs() as usize >= strands {
            return Err(DiagramError::MalformedPd(format!(
                "generator {g} out of range for {strands} strands"
            )));
        }
    }
    let mut pos: Vec<u32> = (1..=strands as u32).collect();
    let mut next = strands as u32 + 1;
    let mut raw = Vec::with_capacity(word.len());
    for &g in word {
        let i = g.unsigned_abs() as usize - 1;
        let (a, b) = (pos[i], pos[i + 1]);
        let (c, d) = (next, next + 1);
        next += 2;
        // corners counterclockwise: bottom-left a, bottom-right b, top-right d, top-left c
        raw.push(if g > 0 { [b, d, c, a] } else { [a, b, d, c] });
        pos[i] = c;
        pos[i + 1] = d;
    }
    let mut alias: Vec<u32> = (0..next).collect();
    for (p, &top) in pos.iter().enumerate() {
        alias[top as usize] = p as u32 + 1;
    }
    let mut untouched = 0;
    for (p, &top) in pos.iter().enumerate() {
        if top == p as u32 + 1 {
            untouched += 1;
        }
    }
    let joined: Vec<[u32; 4]> = raw.iter().map(|t| t.map(|a| alias[a as usize])).collect();
    let relabeled = crate::diagram::relabel_consecutive(&joined);
    Diagram::from_pd_normalized(&relabeled, untouched)
}

fn pd(name: &str, code: &str) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        diagram: crate::diagram::parse_pd(code, 0).expect("table PD is valid"),
    }
}

/// Alternating prime knots through six crossings.
pub fn knot_table() -> Vec<CorpusEntry> {
    vec![
        pd("3_1", "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]"),
        pd("4_1", "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]"),
        pd("5_1", "[[1,6,2,7],[3,8,4,9],[5,10,6,1],[7,2,8,3],[9,4,10,5]]"),
        pd("5_2", "[[1,4,2,5],[3,8,4,9],[5,10,6,1],[9,6,10,7],[7,2,8,3]]"),
        pd("6_1", "[[1,4,2,5],[7,10,8,11],[3,9,4,8],[9,3,10,2],[5,12,6,1],[11,6,12,7]]"),
        pd("6_2", "[[1,4,2,5],[5,10,6,11],[3,9,4,8],[9,3,10,2],[7,12,8,1],[11,6,12,7]]"),
        pd("6_3", "[[4,2,5,1],[8,4,9,3],[12,9,1,10],[10,5,11,6],[6,11,7,12],[2,8,3,7]]"),
    ]
}

/// Knot table, mirrors, Hopf link and a few connected sums.
pub fn named_links() -> Vec<CorpusEntry> {
    let table = knot_table();
    let mut out = Vec::new();
    out.push(CorpusEntry {
        name: "unknot".into(),
        diagram: Diagram::unknot(),
    });
    out.push(pd("hopf", "[[1,3,2,4],[3,1,4,2]]"));
    for e in &table {
        out.push(CorpusEntry {
            name: format!("m{}", e.name),
            diagram: e.diagram.mirror(),
        });
    }
    let t = &table[0].diagram;
    let f = &table[1].diagram;
    out.push(CorpusEntry {
        name: "3_1#3_1".into(),
        diagram: t.connected_sum(t),
    });
    out.push(CorpusEntry {
        name: "3_1#m3_1".into(),
        diagram: t.connected_sum(&t.mirror()),
    });
    out.push(CorpusEntry {
        name: "3_1#4_1".into(),
        diagram: t.connected_sum(f),
    });
    let mut all = table;
    all.extend(out);
    all
}

fn reduced(word: &[i32]) -> bool {
    let n = word.len();
    n < 2 || (0..n).all(|i| word[i] != -word[(i + 1) % n])
}

/// Connected braid closures on 2 to 4 strands with at most `max_len`
/// crossings, distinct up to diagram isomorphism, shortest first.
pub fn braid_corpus(max_len: usize, limit: usize) -> Vec<CorpusEntry> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for len in 1..=max_len {
        for strands in 2..=4usize {
            let gens: Vec<i32> = (1..strands as i32).flat_map(|g| [g, -g]).collect();
            let total = gens.len().pow(len as u32);
            for mut idx in 0..total {
                let mut word = Vec::with_capacity(len);
                for _ in 0..len {
                    word.push(gens[idx % gens.len()]);
                    idx /= gens.len();
                }
                if !reduced(&word) || !(1..strands as i32).all(|g| word.iter().any(|x| x.abs() == g)) {
                    continue;
                }
                let Ok(d) = braid_closure(strands, &word) else {
                    continue;
                };
                if !d.is_connected() || !seen.insert(d.canonical()) {
                    continue;
                }
                out.push(CorpusEntry {
                    name: format!("b{strands}{word:?}"),
                    diagram: d,
                });
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

/// Named links followed by braid closures up to seven crossings.
pub fn standard_corpus(limit: usize) -> Vec<CorpusEntry> {
    let mut out = named_links();
    let mut seen: HashSet<_> = out.iter().map(|e| e.diagram.canonical()).collect();
    for e in braid_corpus(7, limit) {
        if out.len() >= limit {
            break;
        }
        if seen.insert(e.diagram.canonical()) {
            out.push(e);
        }
    }
    out
}
