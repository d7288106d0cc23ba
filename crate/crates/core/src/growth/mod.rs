//! Per-defect-class failure rates, either bounded by testing effort or read
//! off per-class reliability growth fits.

pub mod root;
pub mod srgm;
pub mod stability;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use srgm::{fit_srgm, SrgmFit, SrgmModel, SrgmParams};
pub use stability::{
    stability, stability_of_series, windowed_stability, StabilityVerdict, WindowFit,
    WindowedStability, DEFAULT_STABILITY_THRESHOLD,
};

use crate::domain::{DefectClass, DefectRecord, EffortModel, RateUnit};
use crate::error::{OrcasError, Result};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMethod {
    Bounded,
    Srgm,
}

/// Failure rate per defect class. Every class has an entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRates {
    pub rates: BTreeMap<DefectClass, f64>,
    pub unit: RateUnit,
    pub method: RateMethod,
}

impl ClassRates {
    pub fn zero(unit: RateUnit, method: RateMethod) -> Self {
        ClassRates {
            rates: DefectClass::ALL.into_iter().map(|c| (c, 0.0)).collect(),
            unit,
            method,
        }
    }

    pub fn get(&self, class: DefectClass) -> f64 {
        self.rates.get(&class).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.rates.values().sum()
    }
}

/// Defects detected per class divided by total testing effort.
pub fn bounded_class_rates(defects: &[DefectRecord], effort: &EffortModel) -> Result<ClassRates> {
    let total = effort.total_effort();
    if !(total.is_finite() && total > 0.0) {
        return Err(OrcasError::Invalid(format!(
            "total testing effort must be positive, got {total}"
        )));
    }
    let mut counts = [0u64; 7];
    for d in defects {
        counts[d.class.index()] += 1;
    }
    let mut rates = ClassRates::zero(effort.rate_unit(), RateMethod::Bounded);
    for class in DefectClass::ALL {
        rates
            .rates
            .insert(class, counts[class.index()] as f64 / total);
    }
    Ok(rates)
}

/// Fitted intensity `m'(horizon)` per class. Classes without a fit get 0.
pub fn srgm_class_rates(
    per_class_fits: &BTreeMap<DefectClass, SrgmFit>,
    horizon: f64,
    unit: RateUnit,
) -> Result<ClassRates> {
    let mut rates = ClassRates::zero(unit, RateMethod::Srgm);
    for (&class, fit) in per_class_fits {
        if !fit.converged {
            return Err(OrcasError::Unconverged(format!("class {class}")));
        }
        rates.rates.insert(class, fit.params.intensity(horizon));
    }
    Ok(rates)
}

/// Detection efforts per class, sorted.
pub fn class_histories(defects: &[DefectRecord]) -> Result<BTreeMap<DefectClass, Vec<f64>>> {
    let mut histories: BTreeMap<DefectClass, Vec<f64>> = BTreeMap::new();
    for d in defects {
        let t = d.detection_effort.ok_or_else(|| {
            OrcasError::InsufficientData(format!(
                "defect {} has no detection_effort; growth fitting needs every detection time",
                d.id
            ))
        })?;
        histories.entry(d.class).or_default().push(t);
    }
    for events in histories.values_mut() {
        events.sort_by(f64::total_cmp);
    }
    Ok(histories)
}

/// Fits one growth model per class that has detected defects.
pub fn fit_class_models(
    histories: &BTreeMap<DefectClass, Vec<f64>>,
    horizon: f64,
    model: SrgmModel,
    exec: Execution,
) -> Result<BTreeMap<DefectClass, SrgmFit>> {
    let jobs: Vec<(DefectClass, &Vec<f64>)> = histories.iter().map(|(c, e)| (*c, e)).collect();
    par::map(&jobs, exec, |&(class, events)| {
        fit_srgm(events, Some(horizon), model)
            .map(|fit| (class, fit))
            .map_err(|e| OrcasError::InsufficientData(format!("class {class}: {e}")))
    })
    .into_iter()
    .collect()
}
