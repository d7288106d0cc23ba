//! Failure-history files for standalone growth-model fitting.
//!
//! Either a bare array of detection efforts, or
//! `{"events": [...], "horizon": T, "unit": "hours"}` with optional horizon
//! and unit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::EffortUnit;
use crate::error::{OrcasError, Result};
use crate::growth::srgm::validate_events;
use crate::growth::{fit_srgm, windowed_stability, SrgmFit, SrgmModel, WindowedStability};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureHistory {
    pub events: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<EffortUnit>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HistoryFile {
    Bare(Vec<f64>),
    Full(FailureHistory),
}

impl FailureHistory {
    pub fn parse(text: &str) -> Result<Self> {
        let parsed: HistoryFile = serde_json::from_str(text)
            .map_err(|e| OrcasError::Invalid(format!("failure history: {e}")))?;
        let history = match parsed {
            HistoryFile::Bare(events) => FailureHistory {
                events,
                horizon: None,
                unit: None,
            },
            HistoryFile::Full(h) => h,
        };
        validate_events(&history.events, history.horizon)?;
        Ok(history)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| OrcasError::File {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| OrcasError::File {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

/// Output of `orcas srgm fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgmReport {
    pub fit: SrgmFit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<EffortUnit>,
    /// `(t, m(t))` samples of the fitted mean value function.
    pub curve: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<WindowedStability>,
}

pub fn fit_history(
    history: &FailureHistory,
    model: SrgmModel,
    stability_windows: Option<usize>,
    stability_threshold: f64,
    curve_samples: usize,
    exec: Execution,
) -> Result<SrgmReport> {
    let fit = fit_srgm(&history.events, history.horizon, model)?;
    let stability = stability_windows
        .map(|w| {
            windowed_stability(
                &history.events,
                history.horizon,
                w,
                model,
                stability_threshold,
                exec,
            )
        })
        .transpose()?;
    let curve = fit.curve(fit.horizon, curve_samples);
    Ok(SrgmReport {
        fit,
        unit: history.unit,
        curve,
        stability,
    })
}
