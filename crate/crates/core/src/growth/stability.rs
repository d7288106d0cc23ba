//! Refit stability: a growth model is only trusted once successive refits
//! stop moving the predicted defect total by more than a relative threshold.

use serde::{Deserialize, Serialize};

use super::srgm::{fit_srgm, validate_events, SrgmFit, SrgmModel};
use crate::error::{OrcasError, Result};
use crate::par::{self, Execution};

pub const DEFAULT_STABILITY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub window_end: f64,
    pub predicted_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub series: Vec<StabilityPoint>,
    pub max_relative_step: f64,
    pub threshold: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFit {
    pub window_end: f64,
    pub fit: SrgmFit,
}

/// Stability of an ordered series of `(window_end, predicted_total)`.
pub fn stability_of_series(series: &[(f64, f64)], threshold: f64) -> Result<StabilityVerdict> {
    if series.len() < 2 {
        return Err(OrcasError::InsufficientData(format!(
            "stability needs at least 2 fits, got {}",
            series.len()
        )));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(OrcasError::Invalid(format!(
            "stability threshold must be a nonnegative number, got {threshold}"
        )));
    }
    let mut max_step: f64 = 0.0;
    for pair in series.windows(2) {
        let (end0, prev) = pair[0];
        let (end1, next) = pair[1];
        if end1 <= end0 {
            return Err(OrcasError::Invalid(format!(
                "window ends must increase: {end1} follows {end0}"
            )));
        }
        if !(prev.is_finite() && prev > 0.0 && next.is_finite()) {
            return Err(OrcasError::Invalid(format!(
                "predicted totals must be positive and finite, got {prev} then {next}"
            )));
        }
        max_step = max_step.max((next - prev).abs() / prev);
    }
    Ok(StabilityVerdict {
        series: series
            .iter()
            .map(|&(window_end, predicted_total)| StabilityPoint {
                window_end,
                predicted_total,
            })
            .collect(),
        max_relative_step: max_step,
        threshold,
        stable: max_step <= threshold,
    })
}

/// Stability of a sequence of window refits. Every fit must have converged
/// and carry a finite predicted total.
pub fn stability(fits: &[WindowFit], threshold: f64) -> Result<StabilityVerdict> {
    let series = fits
        .iter()
        .map(|w| {
            if !w.fit.converged {
                return Err(OrcasError::Unconverged(format!(
                    "window ending at {}",
                    w.window_end
                )));
            }
            w.fit
                .predicted_total
                .map(|total| (w.window_end, total))
                .ok_or_else(|| {
                    OrcasError::Invalid(format!(
                        "{:?} has no finite predicted total; stability is undefined",
                        w.fit.model()
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    stability_of_series(&series, threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedWindow {
    pub window_end: f64,
    pub reason: String,
}

/// Result of refitting a growth model on growing prefixes of the history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedStability {
    pub fits: Vec<WindowFit>,
    pub skipped: Vec<SkippedWindow>,
    /// `None` when fewer than two windows produced a usable fit.
    pub verdict: Option<StabilityVerdict>,
}

/// Refits `model` on the events observed up to each of `windows` evenly
/// spaced window ends over `(0, horizon]`, then applies the stability rule
/// to the converged fits.
pub fn windowed_stability(
    events: &[f64],
    horizon: Option<f64>,
    windows: usize,
    model: SrgmModel,
    threshold: f64,
    exec: Execution,
) -> Result<WindowedStability> {
    let horizon = validate_events(events, horizon)?;
    if windows < 2 {
        return Err(OrcasError::Invalid(
            "stability needs at least 2 windows".into(),
        ));
    }
    let ends: Vec<f64> = (1..=windows)
        .map(|k| horizon * k as f64 / windows as f64)
        .collect();
    let outcomes = par::map(&ends, exec, |&end| {
        let seen = events.partition_point(|&t| t <= end);
        match fit_srgm(&events[..seen], Some(end), model) {
            Ok(fit) if fit.converged => Ok(WindowFit {
                window_end: end,
                fit,
            }),
            Ok(fit) => Err(SkippedWindow {
                window_end: end,
                reason: fit.diagnostic.unwrap_or_else(|| "did not converge".into()),
            }),
            Err(e) => Err(SkippedWindow {
                window_end: end,
                reason: e.to_string(),
            }),
        }
    });
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(f) => fits.push(f),
            Err(s) => skipped.push(s),
        }
    }
    let verdict = if fits.len() >= 2 && model == SrgmModel::GoelOkumoto {
        Some(stability(&fits, threshold)?)
    } else {
        None
    };
    Ok(WindowedStability {
        fits,
        skipped,
        verdict,
    })
}
