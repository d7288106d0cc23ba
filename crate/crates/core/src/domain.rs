//! Closed vocabularies and the core record types shared across the pipeline.
//!
//! Defect classes follow orthogonal defect classification: each defect is
//! sorted into exactly one class by the nature of its fix. Failure modes are
//! the four categorical unsafe control action / unsafe information flow
//! types (A: missing when needed, B: provided when not needed, C: too early,
//! too late or out of sequence, D: wrong value or held too long).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::OrcasError;

/// Orthogonal defect class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectClass {
    Function,
    Assignment,
    Algorithm,
    Checking,
    Interface,
    Relationship,
    Timing,
}

impl DefectClass {
    pub const ALL: [DefectClass; 7] = [
        DefectClass::Function,
        DefectClass::Assignment,
        DefectClass::Algorithm,
        DefectClass::Checking,
        DefectClass::Interface,
        DefectClass::Relationship,
        DefectClass::Timing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DefectClass::Function => "function",
            DefectClass::Assignment => "assignment",
            DefectClass::Algorithm => "algorithm",
            DefectClass::Checking => "checking",
            DefectClass::Interface => "interface",
            DefectClass::Relationship => "relationship",
            DefectClass::Timing => "timing",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for DefectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DefectClass {
    type Err = OrcasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let needle = s.trim().to_ascii_lowercase();
        DefectClass::ALL
            .into_iter()
            .find(|c| c.as_str() == needle)
            .ok_or_else(|| OrcasError::UnknownValue {
                kind: "defect class",
                value: s.to_string(),
            })
    }
}

/// Categorical failure mode shared by control actions and information flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FailureMode {
    A,
    B,
    C,
    D,
}

impl FailureMode {
    pub const ALL: [FailureMode; 4] = [
        FailureMode::A,
        FailureMode::B,
        FailureMode::C,
        FailureMode::D,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::A => "A",
            FailureMode::B => "B",
            FailureMode::C => "C",
            FailureMode::D => "D",
        }
    }
}

impl fmt::Display for FailureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FailureMode {
    type Err = OrcasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t
            .strip_prefix("UCA-")
            .or_else(|| t.strip_prefix("UIF-"))
            .unwrap_or(t);
        match t.to_ascii_uppercase().as_str() {
            "A" => Ok(FailureMode::A),
            "B" => Ok(FailureMode::B),
            "C" => Ok(FailureMode::C),
            "D" => Ok(FailureMode::D),
            _ => Err(OrcasError::UnknownValue {
                kind: "failure mode",
                value: s.to_string(),
            }),
        }
    }
}

/// Display label for failure modes: control actions (UCA) or information
/// flows (UIF). Has no effect on any computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeFamily {
    Control,
    Information,
}

impl ModeFamily {
    pub fn prefix(self) -> &'static str {
        match self {
            ModeFamily::Control => "UCA",
            ModeFamily::Information => "UIF",
        }
    }
}

/// Defect trigger: the condition needed to surface a defect during testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriggerKind {
    SimplePath,
    ComplexPath,
    Coverage,
    Variation,
    Sequence,
    Interaction,
    WorkloadStress,
    RecoveryException,
    Configuration,
    StartupRestart,
    NormalMode,
}

impl TriggerKind {
    pub const ALL: [TriggerKind; 11] = [
        TriggerKind::SimplePath,
        TriggerKind::ComplexPath,
        TriggerKind::Coverage,
        TriggerKind::Variation,
        TriggerKind::Sequence,
        TriggerKind::Interaction,
        TriggerKind::WorkloadStress,
        TriggerKind::RecoveryException,
        TriggerKind::Configuration,
        TriggerKind::StartupRestart,
        TriggerKind::NormalMode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TriggerKind::SimplePath => "simple-path",
            TriggerKind::ComplexPath => "complex-path",
            TriggerKind::Coverage => "coverage",
            TriggerKind::Variation => "variation",
            TriggerKind::Sequence => "sequence",
            TriggerKind::Interaction => "interaction",
            TriggerKind::WorkloadStress => "workload-stress",
            TriggerKind::RecoveryException => "recovery-exception",
            TriggerKind::Configuration => "configuration",
            TriggerKind::StartupRestart => "startup-restart",
            TriggerKind::NormalMode => "normal-mode",
        }
    }
}

impl fmt::Display for TriggerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestLevel {
    Component,
    Subsystem,
    System,
}

impl fmt::Display for TestLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestLevel::Component => "component",
            TestLevel::Subsystem => "subsystem",
            TestLevel::System => "system",
        })
    }
}

/// Unit of testing effort, and therefore of every rate derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffortUnit {
    Hours,
    Demands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateUnit {
    PerHour,
    PerDemand,
}

impl RateUnit {
    pub fn label(self) -> &'static str {
        match self {
            RateUnit::PerHour => "per hour",
            RateUnit::PerDemand => "per demand",
        }
    }
}

impl From<EffortUnit> for RateUnit {
    fn from(unit: EffortUnit) -> Self {
        match unit {
            EffortUnit::Hours => RateUnit::PerHour,
            EffortUnit::Demands => RateUnit::PerDemand,
        }
    }
}

/// One classified defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRecord {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub class: DefectClass,
    /// Cumulative effort at detection, in the project's effort unit. Absent
    /// when the detection timeline was not recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection_effort: Option<f64>,
    /// Unit `detection_effort` is expressed in; checked against the effort
    /// model at load time when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort_unit: Option<EffortUnit>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub observed_modes: BTreeSet<FailureMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<String>,
}

impl DefectRecord {
    pub fn new(id: impl Into<String>, class: DefectClass) -> Self {
        DefectRecord {
            id: id.into(),
            description: String::new(),
            class,
            detection_effort: None,
            effort_unit: None,
            observed_modes: BTreeSet::new(),
            resolution: None,
        }
    }

    pub fn with_effort(mut self, effort: f64) -> Self {
        self.detection_effort = Some(effort);
        self
    }

    pub fn with_modes(mut self, modes: impl IntoIterator<Item = FailureMode>) -> Self {
        self.observed_modes = modes.into_iter().collect();
        self
    }

    pub fn validate(&self) -> Result<(), OrcasError> {
        if self.id.trim().is_empty() {
            return Err(OrcasError::Invalid("defect record with empty id".into()));
        }
        if let Some(e) = self.detection_effort {
            if !e.is_finite() || e < 0.0 {
                return Err(OrcasError::Invalid(format!(
                    "defect {}: detection_effort must be a finite nonnegative number, got {e}",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// Checks record invariants and id uniqueness across a dataset.
pub fn validate_defects(defects: &[DefectRecord]) -> Result<(), OrcasError> {
    let mut seen = BTreeSet::new();
    for d in defects {
        d.validate()?;
        if !seen.insert(d.id.as_str()) {
            return Err(OrcasError::DuplicateId(d.id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EffortKind {
    OnDemand,
    Continuous,
}

/// How much testing was done. Valid by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEffort", into = "RawEffort")]
pub struct EffortModel {
    kind: EffortKind,
    test_count: u64,
    test_duration: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEffort {
    kind: EffortKind,
    test_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    test_duration: Option<f64>,
}

impl TryFrom<RawEffort> for EffortModel {
    type Error = OrcasError;

    fn try_from(raw: RawEffort) -> Result<Self, Self::Error> {
        match raw.kind {
            EffortKind::OnDemand => {
                if raw.test_duration.is_some() {
                    return Err(OrcasError::Invalid(
                        "test_duration only applies to continuous effort".into(),
                    ));
                }
                EffortModel::on_demand(raw.test_count)
            }
            EffortKind::Continuous => {
                let duration = raw.test_duration.ok_or_else(|| {
                    OrcasError::Invalid("continuous effort requires test_duration".into())
                })?;
                EffortModel::continuous(raw.test_count, duration)
            }
        }
    }
}

impl From<EffortModel> for RawEffort {
    fn from(m: EffortModel) -> Self {
        RawEffort {
            kind: m.kind,
            test_count: m.test_count,
            test_duration: m.test_duration,
        }
    }
}

impl EffortModel {
    pub fn on_demand(test_count: u64) -> Result<Self, OrcasError> {
        if test_count == 0 {
            return Err(OrcasError::Invalid("test_count must be positive".into()));
        }
        Ok(EffortModel {
            kind: EffortKind::OnDemand,
            test_count,
            test_duration: None,
        })
    }

    pub fn continuous(test_count: u64, test_duration: f64) -> Result<Self, OrcasError> {
        if test_count == 0 {
            return Err(OrcasError::Invalid("test_count must be positive".into()));
        }
        if !(test_duration.is_finite() && test_duration > 0.0) {
            return Err(OrcasError::Invalid(format!(
                "test_duration must be a positive number of hours, got {test_duration}"
            )));
        }
        Ok(EffortModel {
            kind: EffortKind::Continuous,
            test_count,
            test_duration: Some(test_duration),
        })
    }

    pub fn kind(&self) -> EffortKind {
        self.kind
    }

    pub fn test_count(&self) -> u64 {
        self.test_count
    }

    pub fn test_duration(&self) -> Option<f64> {
        self.test_duration
    }

    /// Demands for on-demand testing, hours for continuous testing.
    pub fn total_effort(&self) -> f64 {
        match self.kind {
            EffortKind::OnDemand => self.test_count as f64,
            EffortKind::Continuous => self.test_count as f64 * self.test_duration.unwrap_or(1.0),
        }
    }

    pub fn unit(&self) -> EffortUnit {
        match self.kind {
            EffortKind::OnDemand => EffortUnit::Demands,
            EffortKind::Continuous => EffortUnit::Hours,
        }
    }

    pub fn rate_unit(&self) -> RateUnit {
        self.unit().into()
    }
}

/// Free-function form of [`EffortModel::total_effort`].
pub fn total_effort(model: &EffortModel) -> f64 {
    model.total_effort()
}
