//! Qualitative testing evidence: requirements traceability, trigger
//! coverage against the three-tier test model, and the confidence gate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{TestLevel, TriggerKind};
use crate::error::{OrcasError, Result};

pub const DEFAULT_CONFIDENCE_THRESHOLD: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    Complete,
    Indirect,
    Incomplete,
}

impl Completeness {
    pub fn score(self) -> f64 {
        match self {
            Completeness::Complete => 1.0,
            Completeness::Indirect => 0.5,
            Completeness::Incomplete => 0.0,
        }
    }
}

impl fmt::Display for Completeness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Completeness::Complete => "complete",
            Completeness::Indirect => "indirect",
            Completeness::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RtmEntry {
    pub req_id: String,
    #[serde(default)]
    pub description: String,
    pub status: Completeness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestActivity {
    UnitTest,
    FunctionTest,
    SystemTest,
}

impl fmt::Display for TestActivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestActivity::UnitTest => "unit-test",
            TestActivity::FunctionTest => "function-test",
            TestActivity::SystemTest => "system-test",
        })
    }
}

/// One scored slot of the trigger coverage checklist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TcaSlot {
    pub level: TestLevel,
    pub activity: TestActivity,
    pub trigger: TriggerKind,
}

impl fmt::Display for TcaSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.level, self.activity, self.trigger)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TcaEntry {
    pub level: TestLevel,
    pub activity: TestActivity,
    pub trigger: TriggerKind,
    pub status: Completeness,
    /// Free-text note on how the slot was exercised (T-way, MCDC, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl TcaEntry {
    pub fn slot(&self) -> TcaSlot {
        TcaSlot {
            level: self.level,
            activity: self.activity,
            trigger: self.trigger,
        }
    }
}

/// The 15 slots every trigger coverage assessment is scored against.
pub fn required_tca_template() -> Vec<TcaSlot> {
    use TestActivity::*;
    use TestLevel::*;
    use TriggerKind::*;
    let groups: [(TestLevel, TestActivity, &[TriggerKind]); 7] = [
        (Component, UnitTest, &[SimplePath]),
        (Component, FunctionTest, &[Coverage, Variation, Sequence]),
        (Subsystem, UnitTest, &[SimplePath, ComplexPath]),
        (
            Subsystem,
            FunctionTest,
            &[Coverage, Variation, Sequence, Interaction],
        ),
        (System, SystemTest, &[StartupRestart]),
        (System, SystemTest, &[RecoveryException, NormalMode]),
        (System, SystemTest, &[Configuration, WorkloadStress]),
    ];
    groups
        .into_iter()
        .flat_map(|(level, activity, triggers)| {
            triggers.iter().map(move |&trigger| TcaSlot {
                level,
                activity,
                trigger,
            })
        })
        .collect()
}

/// Mean requirement score.
pub fn score_rtm(entries: &[RtmEntry]) -> Result<f64> {
    if entries.is_empty() {
        return Err(OrcasError::Evidence(
            "requirements traceability matrix is empty".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    for e in entries {
        if !seen.insert(e.req_id.as_str()) {
            return Err(OrcasError::DuplicateId(e.req_id.clone()));
        }
    }
    let total: f64 = entries.iter().map(|e| e.status.score()).sum();
    Ok(total / entries.len() as f64)
}

/// Total slot score over the template size. Entries must cover the template
/// exactly once each.
pub fn score_tca(entries: &[TcaEntry]) -> Result<f64> {
    let template = required_tca_template();
    let required: BTreeSet<TcaSlot> = template.iter().copied().collect();
    let mut scored: BTreeMap<TcaSlot, Completeness> = BTreeMap::new();
    let mut extra = Vec::new();
    for e in entries {
        let slot = e.slot();
        if !required.contains(&slot) {
            extra.push(slot.to_string());
            continue;
        }
        if scored.insert(slot, e.status).is_some() {
            return Err(OrcasError::Evidence(format!(
                "trigger slot scored twice: {slot}"
            )));
        }
    }
    if !extra.is_empty() {
        return Err(OrcasError::Evidence(format!(
            "trigger slots not in the required template: {}",
            extra.join(", ")
        )));
    }
    let missing: Vec<String> = template
        .iter()
        .filter(|s| !scored.contains_key(s))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(OrcasError::Evidence(format!(
            "unscored trigger slots: {}",
            missing.join(", ")
        )));
    }
    let total: f64 = scored.values().map(|s| s.score()).sum();
    Ok(total / template.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Proceed,
    #[serde(rename = "defer-to-BAHAMAS")]
    DeferToBahamas,
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gate::Proceed => "proceed",
            Gate::DeferToBahamas => "defer-to-BAHAMAS",
        })
    }
}

/// Weights of the confidence aggregate. Structural coverage is reported but
/// carries zero weight unless configured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceWeights {
    pub rtm: f64,
    pub tca: f64,
    #[serde(default)]
    pub structural: f64,
}

impl Default for ConfidenceWeights {
    fn default() -> Self {
        ConfidenceWeights {
            rtm: 1.0,
            tca: 1.0,
            structural: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSummary {
    pub rtm_score: f64,
    pub tca_score: f64,
    pub structural_coverage: f64,
    pub confidence: f64,
    pub threshold: f64,
    pub weights: ConfidenceWeights,
    pub gate: Gate,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(OrcasError::Evidence(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

/// Unweighted mean of the RTM and TCA scores, gated against `threshold`.
pub fn assessment_confidence(
    rtm: f64,
    tca: f64,
    structural: f64,
    threshold: f64,
) -> Result<EvidenceSummary> {
    assessment_confidence_weighted(
        rtm,
        tca,
        structural,
        threshold,
        ConfidenceWeights::default(),
    )
}

pub fn assessment_confidence_weighted(
    rtm: f64,
    tca: f64,
    structural: f64,
    threshold: f64,
    weights: ConfidenceWeights,
) -> Result<EvidenceSummary> {
    check_unit("RTM score", rtm)?;
    check_unit("TCA score", tca)?;
    check_unit("structural coverage", structural)?;
    check_unit("confidence threshold", threshold)?;
    let w = [weights.rtm, weights.tca, weights.structural];
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
        return Err(OrcasError::Evidence(format!(
            "confidence weights must be nonnegative with a positive sum, got {weights:?}"
        )));
    }
    let confidence = ((weights.rtm * rtm + weights.tca * tca + weights.structural * structural)
        / w.iter().sum::<f64>())
    .clamp(0.0, 1.0);
    Ok(EvidenceSummary {
        rtm_score: rtm,
        tca_score: tca,
        structural_coverage: structural,
        confidence,
        threshold,
        weights,
        gate: if confidence < threshold {
            Gate::DeferToBahamas
        } else {
            Gate::Proceed
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementGap {
    pub req_id: String,
    pub status: Completeness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerGap {
    pub level: TestLevel,
    pub activity: TestActivity,
    pub trigger: TriggerKind,
    pub status: Completeness,
}

/// Everything short of complete: where further testing is needed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvidenceGaps {
    pub untraced_requirements: Vec<RequirementGap>,
    pub uncovered_triggers: Vec<TriggerGap>,
}

pub fn evidence_gaps(rtm: &[RtmEntry], tca: &[TcaEntry]) -> EvidenceGaps {
    let untraced_requirements = rtm
        .iter()
        .filter(|e| e.status != Completeness::Complete)
        .map(|e| RequirementGap {
            req_id: e.req_id.clone(),
            status: e.status,
        })
        .collect();
    let order: BTreeMap<TcaSlot, usize> = required_tca_template()
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let mut uncovered: Vec<&TcaEntry> = tca
        .iter()
        .filter(|e| e.status != Completeness::Complete)
        .collect();
    uncovered.sort_by_key(|e| order.get(&e.slot()).copied().unwrap_or(usize::MAX));
    EvidenceGaps {
        untraced_requirements,
        uncovered_triggers: uncovered
            .into_iter()
            .map(|e| TriggerGap {
                level: e.level,
                activity: e.activity,
                trigger: e.trigger,
                status: e.status,
            })
            .collect(),
    }
}
