//! JSON jobs: one command plus its payload in, one JSON document out.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::branched::{self, BranchedError};
use crate::diagram::{diagram_from_lists, ArcMarking, Diagram, DiagramError};
use crate::khovanov::{self, KhError, KhOptions, DEFAULT_MAX_CROSSINGS};
use crate::linalg::LinalgError;
use crate::selftest;
use crate::surgery::{self, Framing, FramedLinkPresentation, PlumbingGraph, SurgeryError};

pub const COMMANDS: &[&str] = &[
    "kh", "khr", "twisted", "hd", "ss", "det", "h1", "qa", "rankcheck", "surgery", "plumbing", "lspace", "selftest",
];

pub const MAX_CROSSINGS_ENV: &str = "CUBEKH_MAX_CROSSINGS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    BudgetExceeded,
    Internal,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Validation => "validation",
            ErrorKind::BudgetExceeded => "budget_exceeded",
            ErrorKind::Internal => "internal",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Validation => 2,
            ErrorKind::BudgetExceeded => 3,
            ErrorKind::Internal => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}: {detail}", kind.as_str())]
pub struct JobError {
    pub kind: ErrorKind,
    pub detail: String,
}

impl JobError {
    pub fn validation(detail: impl Into<String>) -> Self {
        JobError {
            kind: ErrorKind::Validation,
            detail: detail.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind.as_str(), "detail": self.detail}})
    }
}

impl From<DiagramError> for JobError {
    fn from(e: DiagramError) -> Self {
        JobError::validation(e.to_string())
    }
}

impl From<LinalgError> for JobError {
    fn from(e: LinalgError) -> Self {
        let kind = match e {
            LinalgError::Ragged => ErrorKind::Validation,
            _ => ErrorKind::BudgetExceeded,
        };
        JobError {
            kind,
            detail: e.to_string(),
        }
    }
}

impl From<KhError> for JobError {
    fn from(e: KhError) -> Self {
        let kind = match e {
            KhError::Diagram(_) => ErrorKind::Validation,
            KhError::SizeBudgetExceeded { .. } => ErrorKind::BudgetExceeded,
            _ => ErrorKind::Internal,
        };
        JobError {
            kind,
            detail: e.to_string(),
        }
    }
}

impl From<BranchedError> for JobError {
    fn from(e: BranchedError) -> Self {
        match e {
            BranchedError::Diagram(e) => e.into(),
            BranchedError::Kh(e) => e.into(),
            BranchedError::Linalg(e) => e.into(),
            other => JobError {
                kind: ErrorKind::Internal,
                detail: other.to_string(),
            },
        }
    }
}

impl From<SurgeryError> for JobError {
    fn from(e: SurgeryError) -> Self {
        match e {
            SurgeryError::Linalg(e) => e.into(),
            other => JobError::validation(other.to_string()),
        }
    }
}

/// Settings that come from flags or the environment rather than the payload.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub max_crossings: Option<usize>,
    pub basepoint: Option<u32>,
}

/// Crossing cap: explicit value, then the environment, then the default.
pub fn resolve_max_crossings(explicit: Option<usize>) -> Result<usize, JobError> {
    if let Some(n) = explicit {
        return Ok(n);
    }
    match std::env::var(MAX_CROSSINGS_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| JobError::validation(format!("{MAX_CROSSINGS_ENV}={s:?} is not a number"))),
        Err(_) => Ok(DEFAULT_MAX_CROSSINGS),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkingSpec {
    #[serde(default)]
    arcs: Option<Vec<u8>>,
    #[serde(default)]
    marked: Option<Vec<u32>>,
    #[serde(default)]
    loops: Vec<u8>,
}

#[derive(Debug, Deserialize)]
struct LinkPayload {
    pd: Value,
    #[serde(default)]
    free_loops: Option<u32>,
    #[serde(default)]
    orientation: Option<Vec<i8>>,
    #[serde(default)]
    marking: Option<MarkingSpec>,
    #[serde(default)]
    basepoint: Option<u32>,
    #[serde(default)]
    budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct SurgeryPayload {
    linking: Vec<Vec<i64>>,
    #[serde(default)]
    frames: Option<Vec<Framing>>,
    #[serde(default)]
    component: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct PlumbingPayload {
    plumbing: PlumbingGraph,
}

#[derive(Debug, Deserialize)]
struct LSpacePayload {
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    p: Option<i64>,
    #[serde(default)]
    q: Option<i64>,
    n: i64,
}

fn payload<T: serde::de::DeserializeOwned>(job: &Value) -> Result<T, JobError> {
    serde_json::from_value(job.clone()).map_err(|e| JobError::validation(format!("invalid payload: {e}")))
}

fn pd_rows(pd: &Value) -> Result<Vec<Vec<i64>>, JobError> {
    let text;
    let pd = match pd {
        Value::String(s) => {
            text = s.replace("PD", "").replace('X', "");
            serde_json::from_str(text.trim()).map_err(|e| JobError::validation(format!("pd string: {e}")))?
        }
        other => other.clone(),
    };
    serde_json::from_value(pd).map_err(|e| JobError::validation(format!("pd must be a list of 4-tuples: {e}")))
}

fn link(job: &Value) -> Result<(Diagram, LinkPayload), JobError> {
    let p: LinkPayload = payload(job)?;
    let rows = pd_rows(&p.pd)?;
    let free_loops = p.free_loops.unwrap_or(if rows.is_empty() { 1 } else { 0 });
    let d = diagram_from_lists(&rows, free_loops, p.orientation.as_deref())?;
    Ok((d, p))
}

/// Builds the diagram described by a job's `pd`, `free_loops` and `orientation` fields.
pub fn diagram_from_job(job: &Value) -> Result<Diagram, JobError> {
    Ok(link(job)?.0)
}

fn marking(d: &Diagram, spec: Option<&MarkingSpec>) -> Result<ArcMarking, JobError> {
    let Some(spec) = spec else {
        return Ok(ArcMarking::zero(d));
    };
    let mut m = ArcMarking::zero(d);
    match (&spec.arcs, &spec.marked) {
        (Some(_), Some(_)) => return Err(JobError::validation("give marking.arcs or marking.marked, not both")),
        (Some(bits), None) => m.arcs = bits.clone(),
        (None, Some(list)) => {
            for &a in list {
                if a == 0 || a > d.arc_count() {
                    return Err(JobError::validation(format!("marked arc {a} is not an arc")));
                }
                m.arcs[a as usize - 1] ^= 1;
            }
        }
        (None, None) => {}
    }
    if spec.loops.len() > m.loops.len() {
        return Err(JobError::validation(format!(
            "{} loop bits for {} free loops",
            spec.loops.len(),
            m.loops.len()
        )));
    }
    for (i, &b) in spec.loops.iter().enumerate() {
        m.loops[i] = b;
    }
    m.check(d, None)?;
    Ok(m)
}

fn kh_options(p: &LinkPayload, opts: &RunOptions) -> Result<KhOptions, JobError> {
    Ok(KhOptions {
        basepoint: opts.basepoint.or(p.basepoint),
        max_crossings: resolve_max_crossings(opts.max_crossings)?,
        ..Default::default()
    })
}

fn keyed<K: ToString, V: Clone + Into<Value>>(m: &BTreeMap<K, V>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), v.clone().into())).collect::<Map<_, _>>())
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, JobError> {
    serde_json::to_value(x).map_err(|e| JobError {
        kind: ErrorKind::Internal,
        detail: e.to_string(),
    })
}

fn ranks_json(r: &khovanov::KhRanks) -> Value {
    json!({
        "theory": r.theory,
        "total": r.total,
        "ranks": keyed(&r.ranks_h),
        "ranks_i": keyed(&r.ranks_i),
    })
}

fn run_link(command: &str, job: &Value, opts: &RunOptions) -> Result<Value, JobError> {
    let (d, p) = link(job)?;
    let ko = kh_options(&p, opts)?;
    if let Some(b) = ko.basepoint {
        if d.crossing_count() > 0 && (b == 0 || b > d.arc_count()) {
            return Err(DiagramError::BadBasepoint(b).into());
        }
    }
    let m = marking(&d, p.marking.as_ref())?;
    Ok(match command {
        "kh" => ranks_json(&khovanov::kh_ranks(&d, &ko)?),
        "khr" => ranks_json(&khovanov::khr_ranks(&d, &ko)?),
        "twisted" => {
            let t = khovanov::twisted_ranks(&d, &m, &ko)?;
            json!({"total": t.total, "ranks": keyed(&t.ranks)})
        }
        "hd" => {
            let h = khovanov::hd_homology(&d, &m, &ko)?;
            let bigraded: BTreeMap<String, usize> =
                h.bigraded.iter().map(|((w, v), r)| (format!("{w},{v}"), *r)).collect();
            let mut out = ranks_json(&h.ranks);
            out["bigraded"] = keyed(&bigraded);
            out
        }
        "ss" => {
            let pages = khovanov::weight_ss(&d, &m, &ko)?;
            let list: Vec<Value> = (0..pages.page_count())
                .map(|r| {
                    let mut entries = BTreeMap::new();
                    for (pi, row) in pages.pages[r].iter().enumerate() {
                        for (ti, &x) in row.iter().enumerate() {
                            if x > 0 {
                                let (p, t) = (pages.p_min + pi as i32, pages.t_min + ti as i32);
                                entries.insert(format!("{p},{t}"), x);
                            }
                        }
                    }
                    json!({"r": r, "total": pages.total(r), "entries": keyed(&entries)})
                })
                .collect();
            json!({"pages": list, "stabilization_index": pages.stabilization_index})
        }
        "det" => to_value(&branched::det(&d, ko.max_crossings)?)?,
        "h1" => {
            let g = branched::h1_sigma(&d)?;
            json!({
                "group": g.to_string(),
                "invariant_factors": g.invariant_factors,
                "free_rank": g.free_rank,
                "order": g.order_or_zero() as u64,
            })
        }
        "qa" => {
            if d.crossing_count() > ko.max_crossings {
                return Err(KhError::SizeBudgetExceeded {
                    crossings: d.crossing_count(),
                    cap: ko.max_crossings,
                }
                .into());
            }
            to_value(&branched::qa_certify(&d, p.budget.unwrap_or(selftest::QA_BUDGET)))?
        }
        "rankcheck" => to_value(&branched::rank_inequality_check(&d, &ko)?)?,
        _ => unreachable!("link command"),
    })
}

fn run_surgery(job: &Value) -> Result<Value, JobError> {
    let p: SurgeryPayload = payload(job)?;
    let fl = FramedLinkPresentation::from_rows(&p.linking)?;
    let m = fl.component_count();
    let Some(frames) = p.frames else {
        let lattice = surgery::multi_framing_lattice(&fl)?;
        return Ok(json!({"lattice": to_value(&lattice)?}));
    };
    let g = surgery::surgered_h1(&fl, &frames)?;
    let mut out = json!({
        "h1": g.to_string(),
        "invariant_factors": g.invariant_factors,
        "free_rank": g.free_rank,
        "euler_char": g.order_or_zero() as u64,
    });
    if let Some(k) = p.component {
        if k >= m {
            return Err(JobError::validation(format!("component {k} out of range")));
        }
        out["triad"] = to_value(&surgery::triad_additivity_check_at(&fl, &frames, k)?)?;
    }
    Ok(out)
}

fn run_lspace(job: &Value) -> Result<Value, JobError> {
    let p: LSpacePayload = payload(job)?;
    let v = match p.family.as_deref().unwrap_or("torus") {
        "torus" => {
            let (Some(a), Some(b)) = (p.p, p.q) else {
                return Err(JobError::validation("torus family needs p and q"));
            };
            surgery::large_surgery_family(a, b, p.n)?
        }
        "p237" | "P(-2,3,7)" => surgery::pretzel_p237_family(p.n)?,
        other => return Err(JobError::validation(format!("unknown family {other:?}"))),
    };
    to_value(&v)
}

/// Runs one job. The command comes from `job["command"]`.
pub fn run(job: &Value, opts: &RunOptions) -> Result<Value, JobError> {
    let obj = job
        .as_object()
        .ok_or_else(|| JobError::validation("job must be a JSON object"))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| JobError::validation("missing string field \"command\""))?;
    match command {
        "kh" | "khr" | "twisted" | "hd" | "ss" | "det" | "h1" | "qa" | "rankcheck" => run_link(command, job, opts),
        "surgery" => run_surgery(job),
        "plumbing" => {
            let p: PlumbingPayload = payload(job)?;
            to_value(&surgery::plumbing_lspace_check(&p.plumbing)?)
        }
        "lspace" => run_lspace(job),
        "selftest" => {
            let r = selftest::run();
            let v = to_value(&r)?;
            if r.passed {
                Ok(v)
            } else {
                Err(JobError {
                    kind: ErrorKind::Internal,
                    detail: serde_json::to_string(&v).unwrap_or_default(),
                })
            }
        }
        other => Err(JobError::validation(format!(
            "unknown command {other:?}; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}

/// Parses and runs a job given as JSON text.
pub fn run_str(text: &str, command: Option<&str>, opts: &RunOptions) -> Result<Value, JobError> {
    let mut job: Value =
        serde_json::from_str(text).map_err(|e| JobError::validation(format!("input is not valid JSON: {e}")))?;
    if let Some(c) = command {
        match job.as_object_mut() {
            Some(o) => {
                o.insert("command".into(), Value::String(c.into()));
            }
            None => return Err(JobError::validation("job must be a JSON object")),
        }
    }
    run(&job, opts)
}

/// Serializes with `indent` spaces, or compactly when zero.
pub fn render(v: &Value, indent: usize) -> String {
    if indent == 0 {
        return v.to_string();
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(text: &str) -> Result<Value, JobError> {
        run_str(text, None, &RunOptions::default())
    }

    #[test]
    fn khr_trefoil() {
        let v = go(r#"{"command":"khr","pd":[[1,4,2,5],[3,6,4,1],[5,2,6,3]]}"#).unwrap();
        assert_eq!(v["total"], 3);
        assert_eq!(v["ranks"], json!({"-3": 1, "-2": 1, "0": 1}));
    }

    #[test]
    fn det_of_empty_diagram() {
        let v = go(r#"{"command":"det","pd":[],"free_loops":1}"#).unwrap();
        assert_eq!(v["det"], 1);
    }

    #[test]
    fn plumbing_a2() {
        let v = go(r#"{"command":"plumbing","plumbing":{"mult":[2,2],"edges":[[0,1]]}}"#).unwrap();
        assert_eq!(v["h1"], 3);
        assert_eq!(v["verdict"], "certified");
    }

    #[test]
    fn surgery_and_lspace() {
        let v = go(r#"{"command":"surgery","linking":[[5]],"frames":[0],"component":0}"#).unwrap();
        assert_eq!(v["euler_char"], 5);
        assert_eq!(v["triad"]["orders"], json!([1, 5, 6]));
        let v = go(r#"{"command":"lspace","p":2,"q":3,"n":6}"#).unwrap();
        assert_eq!(v["h1"], 6);
        let v = go(r#"{"command":"lspace","p":2,"q":3,"n":4}"#).unwrap();
        assert_eq!(v["verdict"], "unknown");
    }

    #[test]
    fn marked_twisted_and_hd() {
        let v = go(r#"{"command":"hd","pd":[[1,3,2,4],[3,1,4,2]],"marking":{"marked":[1,3]}}"#).unwrap();
        assert!(v["total"].is_u64());
        let e = go(r#"{"command":"hd","pd":[[1,4,2,5],[3,6,4,1],[5,2,6,3]],"marking":{"marked":[1]}}"#).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Validation);
    }

    #[test]
    fn error_kinds() {
        assert_eq!(go("{").unwrap_err().kind, ErrorKind::Validation);
        assert_eq!(go(r#"{"command":"nope"}"#).unwrap_err().kind, ErrorKind::Validation);
        assert_eq!(go(r#"{"command":"khr","pd":[[1,2,3]]}"#).unwrap_err().kind, ErrorKind::Validation);
        let big = r#"{"command":"kh","pd":[[1,4,2,5],[3,6,4,1],[5,2,6,3]]}"#;
        let opts = RunOptions {
            max_crossings: Some(2),
            ..Default::default()
        };
        let e = run_str(big, None, &opts).unwrap_err();
        assert_eq!(e.kind, ErrorKind::BudgetExceeded);
        assert_eq!(e.kind.exit_code(), 3);
        let j = e.to_json();
        assert_eq!(j["error"]["kind"], "budget_exceeded");
    }

    #[test]
    fn output_is_deterministic() {
        let text = r#"{"command":"ss","pd":[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]],"marking":{"marked":[1,2]}}"#;
        let a = render(&go(text).unwrap(), 2);
        let b = render(&go(text).unwrap(), 2);
        assert_eq!(a, b);
    }
}
