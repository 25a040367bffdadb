use serde::{Deserialize, Serialize};

use super::SurgeryError;
use crate::linalg::{cokernel_group, MatZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Certified,
    NotApplicable,
    Unknown,
}

/// How a derivation step's manifold is known to be an L-space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    /// L(p, q), including S³ = L(1, 1).
    LensSeed { p: u128 },
    /// A lens-space identification quoted from the literature, not computed.
    SeedFact { note: String },
    /// Same manifold as an earlier step.
    BlowDown { from: usize },
    /// (Y, Y₀, Y₁) triad with both earlier steps L-spaces and |H₁(Y)| = |H₁(Y₀)| + |H₁(Y₁)|.
    Triad { y0: usize, y1: usize },
    ConnectedSum { parts: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub id: usize,
    pub manifold: String,
    pub order: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<Vec<Vec<i64>>>,
    #[serde(flatten)]
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSpaceVerdict {
    pub verdict: VerdictKind,
    /// Certification is arithmetic: |H₁| bookkeeping through triads from lens seeds.
    pub basis: String,
    pub h1: u128,
    pub derivation: Vec<DerivationStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

const BASIS: &str = "h1-arithmetic";

impl LSpaceVerdict {
    pub(crate) fn certified(derivation: Vec<DerivationStep>) -> Self {
        let h1 = derivation.last().map_or(1, |s| s.order);
        LSpaceVerdict {
            verdict: VerdictKind::Certified,
            basis: BASIS.into(),
            h1,
            derivation,
            reason: None,
        }
    }

    pub(crate) fn other(verdict: VerdictKind, h1: u128, reason: impl Into<String>) -> Self {
        LSpaceVerdict {
            verdict,
            basis: BASIS.into(),
            h1,
            derivation: Vec::new(),
            reason: Some(reason.into()),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == VerdictKind::Certified
    }

    pub fn triad_steps(&self) -> usize {
        self.derivation
            .iter()
            .filter(|s| matches!(s.rule, Rule::Triad { .. }))
            .count()
    }

    /// Re-checks every step from scratch.
    pub fn verify(&self) -> Result<(), String> {
        for (i, s) in self.derivation.iter().enumerate() {
            if s.id != i {
                return Err(format!("step {i} carries id {}", s.id));
            }
            check_step(&self.derivation[..i], s)?;
        }
        if self.verdict == VerdictKind::Certified {
            let last = self.derivation.last().ok_or("certified verdict without derivation")?;
            if last.order != self.h1 {
                return Err(format!("final order {} differs from h1 {}", last.order, self.h1));
            }
        }
        Ok(())
    }
}

fn presentation_order(rows: &[Vec<i64>]) -> Result<u128, String> {
    let m = if rows.is_empty() {
        MatZ::zeros(0, 0)
    } else {
        MatZ::from_i64_rows(rows).map_err(|e| e.to_string())?
    };
    Ok(cokernel_group(&m).map_err(|e| e.to_string())?.order_or_zero())
}

fn check_step(earlier: &[DerivationStep], s: &DerivationStep) -> Result<(), String> {
    if s.order == 0 {
        return Err(format!("step {} has b1 > 0", s.id));
    }
    if let Some(rows) = &s.presentation {
        let o = presentation_order(rows)?;
        if o != s.order {
            return Err(format!("step {}: recorded order {} but presentation gives {o}", s.id, s.order));
        }
    }
    let get = |j: usize| {
        earlier
            .get(j)
            .map(|t| t.order)
            .ok_or_else(|| format!("step {} refers to later step {j}", s.id))
    };
    match &s.rule {
        Rule::LensSeed { p } => {
            if *p != s.order {
                return Err(format!("step {}: lens seed L({p}) with order {}", s.id, s.order));
            }
        }
        Rule::SeedFact { .. } => {}
        Rule::BlowDown { from } => {
            if get(*from)? != s.order {
                return Err(format!("step {}: blow-down changes the order", s.id));
            }
        }
        Rule::Triad { y0, y1 } => {
            if get(*y0)? + get(*y1)? != s.order {
                return Err(format!("step {}: triad not additive", s.id));
            }
        }
        Rule::ConnectedSum { parts } => {
            let mut prod: u128 = 1;
            for &j in parts {
                prod = prod.checked_mul(get(j)?).ok_or("order overflow")?;
            }
            if prod != s.order {
                return Err(format!("step {}: connected sum order mismatch", s.id));
            }
        }
    }
    Ok(())
}

/// Accumulates steps, checking each one as it is added.
#[derive(Default)]
pub(crate) struct Derivation {
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    pub fn push(
        &mut self,
        manifold: String,
        presentation: Option<Vec<Vec<i64>>>,
        order: Option<u128>,
        rule: Rule,
    ) -> Result<usize, String> {
        let order = match (order, &presentation) {
            (Some(o), _) => o,
            (None, Some(rows)) => presentation_order(rows)?,
            (None, None) => return Err("step without order".into()),
        };
        let step = DerivationStep {
            id: self.steps.len(),
            manifold,
            order,
            presentation,
            rule,
        };
        check_step(&self.steps, &step)?;
        self.steps.push(step);
        Ok(self.steps.len() - 1)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Extends `seed` at slope `start` through triads (S³, S³_{m−1}(K), S³_m(K)) up to `n`.
fn climb(d: &mut Derivation, knot: &str, mut prev: usize, start: i64, n: i64) -> Result<(), String> {
    let mut sphere = None;
    for m in start + 1..=n {
        let s3 = match sphere {
            Some(id) => id,
            None => {
                let id = d.push("S^3".into(), Some(Vec::new()), None, Rule::LensSeed { p: 1 })?;
                sphere = Some(id);
                id
            }
        };
        prev = d.push(
            format!("S^3_{m}({knot})"),
            Some(vec![vec![m]]),
            None,
            Rule::Triad { y0: s3, y1: prev },
        )?;
    }
    Ok(())
}

/// S³_n(T_{p,q}) for n ≥ pq − 1, seeded by the lens space S³_{pq−1}(T_{p,q}).
pub fn large_surgery_family(p: i64, q: i64, n: i64) -> Result<LSpaceVerdict, SurgeryError> {
    if p < 2 || q < 2 || gcd(p as u64, q as u64) != 1 {
        return Err(SurgeryError::InvalidParameters(format!(
            "torus knot T({p},{q}) needs coprime p, q >= 2"
        )));
    }
    let seed = p * q - 1;
    let knot = format!("T({p},{q})");
    if n < seed {
        return Ok(LSpaceVerdict::other(
            VerdictKind::Unknown,
            n.unsigned_abs() as u128,
            format!("slope {n} is below the lens-space seed {seed}"),
        ));
    }
    let mut d = Derivation::default();
    let run = |d: &mut Derivation| -> Result<(), String> {
        let s = d.push(
            format!("S^3_{seed}({knot})"),
            Some(vec![vec![seed]]),
            None,
            Rule::LensSeed { p: seed as u128 },
        )?;
        climb(d, &knot, s, seed, n)
    };
    Ok(match run(&mut d) {
        Ok(()) => LSpaceVerdict::certified(d.steps),
        Err(e) => LSpaceVerdict::other(VerdictKind::Unknown, n as u128, e),
    })
}

/// S³_n(P(−2,3,7)) for n ≥ 18 from the quoted identifications at slopes 18 and 19.
pub fn pretzel_p237_family(n: i64) -> Result<LSpaceVerdict, SurgeryError> {
    let knot = "P(-2,3,7)";
    if n < 18 {
        return Ok(LSpaceVerdict::other(
            VerdictKind::Unknown,
            n.unsigned_abs() as u128,
            format!("slope {n} is below the known lens-space slopes 18 and 19"),
        ));
    }
    let mut d = Derivation::default();
    let run = |d: &mut Derivation| -> Result<(), String> {
        let mut prev = d.push(
            format!("S^3_18({knot})"),
            Some(vec![vec![18]]),
            None,
            Rule::SeedFact {
                note: "S^3_18(P(-2,3,7)) = L(18,5)".into(),
            },
        )?;
        let mut start = 18;
        if n >= 19 {
            prev = d.push(
                format!("S^3_19({knot})"),
                Some(vec![vec![19]]),
                None,
                Rule::SeedFact {
                    note: "S^3_19(P(-2,3,7)) = L(19,7)".into(),
                },
            )?;
            start = 19;
        }
        climb(d, knot, prev, start, n)
    };
    Ok(match run(&mut d) {
        Ok(()) => LSpaceVerdict::certified(d.steps),
        Err(e) => LSpaceVerdict::other(VerdictKind::Unknown, n as u128, e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_seed_and_chain() {
        let v = large_surgery_family(2, 3, 5).unwrap();
        assert!(v.is_certified());
        assert_eq!(v.h1, 5);
        assert_eq!(v.triad_steps(), 0);
        let v = large_surgery_family(2, 3, 6).unwrap();
        assert_eq!(v.h1, 6);
        assert_eq!(v.triad_steps(), 1);
        v.verify().unwrap();
        let v = large_surgery_family(3, 5, 40).unwrap();
        assert_eq!(v.h1, 40);
        assert_eq!(v.triad_steps(), 26);
        v.verify().unwrap();
        let v = large_surgery_family(2, 3, 4).unwrap();
        assert_eq!(v.verdict, VerdictKind::Unknown);
        assert!(large_surgery_family(2, 4, 9).is_err());
    }

    #[test]
    fn pretzel_family() {
        let v = pretzel_p237_family(18).unwrap();
        assert!(v.is_certified());
        assert_eq!(v.h1, 18);
        let v = pretzel_p237_family(22).unwrap();
        assert_eq!(v.h1, 22);
        assert_eq!(v.triad_steps(), 3);
        v.verify().unwrap();
        assert_eq!(pretzel_p237_family(17).unwrap().verdict, VerdictKind::Unknown);
    }

    #[test]
    fn tampered_derivation_rejected() {
        let mut v = large_surgery_family(2, 3, 8).unwrap();
        v.verify().unwrap();
        v.derivation[2].order += 1;
        assert!(v.verify().is_err());
        let mut v = large_surgery_family(2, 3, 8).unwrap();
        v.derivation[0].rule = Rule::LensSeed { p: 4 };
        assert!(v.verify().is_err());
    }
}
