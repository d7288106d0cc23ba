//! Failure-mode probabilities: for every mode X,
//! `P(X) = sum over classes c of P(X | c) * P(c)`, with the total taken over
//! the applicable modes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::causality::CausalityMatrix;
use crate::domain::{DefectClass, FailureMode, ModeFamily, RateUnit};
use crate::error::{OrcasError, Result};
use crate::growth::ClassRates;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProbabilities {
    pub per_mode: BTreeMap<FailureMode, f64>,
    /// Only classes with a positive rate appear.
    pub per_cell: BTreeMap<DefectClass, BTreeMap<FailureMode, f64>>,
    /// Row margins: sum over applicable modes per class.
    pub per_class: BTreeMap<DefectClass, f64>,
    pub total: f64,
    pub excluded_modes: BTreeSet<FailureMode>,
    pub unit: RateUnit,
}

impl ModeProbabilities {
    pub fn cell(&self, class: DefectClass, mode: FailureMode) -> f64 {
        self.per_cell
            .get(&class)
            .and_then(|row| row.get(&mode))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn mode(&self, mode: FailureMode) -> f64 {
        self.per_mode.get(&mode).copied().unwrap_or(0.0)
    }
}

/// Combines conditional mode probabilities with per-class rates. Excluded
/// modes are zeroed, not redistributed.
pub fn combine(
    matrix: &CausalityMatrix,
    rates: &ClassRates,
    excluded: &BTreeSet<FailureMode>,
) -> Result<ModeProbabilities> {
    let mut per_cell = BTreeMap::new();
    let mut per_class = BTreeMap::new();
    let mut per_mode: BTreeMap<FailureMode, f64> =
        FailureMode::ALL.into_iter().map(|m| (m, 0.0)).collect();

    for (&class, &rate) in &rates.rates {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(OrcasError::Invalid(format!(
                "rate for class {class} is {rate}"
            )));
        }
        if rate == 0.0 {
            continue;
        }
        let row = matrix.row(class)?;
        let mut cells = BTreeMap::new();
        let mut margin = 0.0;
        for mode in FailureMode::ALL {
            let p = if excluded.contains(&mode) {
                0.0
            } else {
                row[mode.index()] * rate
            };
            cells.insert(mode, p);
            margin += p;
            *per_mode.get_mut(&mode).expect("all modes present") += p;
        }
        per_cell.insert(class, cells);
        per_class.insert(class, margin);
    }
    let total = per_mode
        .iter()
        .filter(|(m, _)| !excluded.contains(m))
        .map(|(_, p)| p)
        .sum();
    Ok(ModeProbabilities {
        per_mode,
        per_cell,
        per_class,
        total,
        excluded_modes: excluded.clone(),
        unit: rates.unit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    #[default]
    Control,
    ContinuousMonitoring,
    Custom,
}

impl SystemKind {
    pub fn mode_family(self) -> ModeFamily {
        match self {
            SystemKind::ContinuousMonitoring => ModeFamily::Information,
            _ => ModeFamily::Control,
        }
    }
}

/// Modes that cannot occur for this kind of system. A monitored value is
/// always needed, so "provided when not needed" (B) is excluded for
/// continuous monitoring.
pub fn mode_applicability(
    kind: SystemKind,
    custom_excluded: Option<&BTreeSet<FailureMode>>,
) -> Result<BTreeSet<FailureMode>> {
    match (kind, custom_excluded) {
        (SystemKind::Control, None) => Ok(BTreeSet::new()),
        (SystemKind::ContinuousMonitoring, None) => Ok([FailureMode::B].into()),
        (SystemKind::Custom, Some(set)) => Ok(set.clone()),
        (SystemKind::Custom, None) => Err(OrcasError::Invalid(
            "custom system kind requires an excluded-mode set".into(),
        )),
        (_, Some(_)) => Err(OrcasError::Invalid(
            "excluded modes can only be given for the custom system kind".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::builtin_causality;
    use crate::growth::RateMethod;
    use FailureMode::*;

    fn rates(pairs: &[(DefectClass, f64)]) -> ClassRates {
        let mut r = ClassRates::zero(RateUnit::PerHour, RateMethod::Bounded);
        for &(c, v) in pairs {
            r.rates.insert(c, v);
        }
        r
    }

    #[test]
    fn vcu_cells() {
        let r = rates(&[
            (DefectClass::Algorithm, 2.0 / 10687.0),
            (DefectClass::Checking, 6.0 / 10687.0),
        ]);
        let p = combine(&builtin_causality(), &r, &[B].into()).unwrap();
        assert!((p.cell(DefectClass::Checking, A) - 2.021e-4).abs() < 5e-8);
        assert!((p.cell(DefectClass::Algorithm, C) - 6.550e-5).abs() < 5e-9);
        assert!((p.mode(A) - 2.620e-4).abs() < 5e-8);
        assert!((p.total - 5.854e-4).abs() < 5e-8);
        assert_eq!(p.mode(B), 0.0);
        assert_eq!(p.cell(DefectClass::Checking, B), 0.0);
        assert_eq!(p.per_cell.len(), 2);
    }

    #[test]
    fn zero_and_identity() {
        let p = combine(&builtin_causality(), &rates(&[]), &BTreeSet::new()).unwrap();
        assert_eq!(p.total, 0.0);
        assert!(p.per_mode.values().all(|&v| v == 0.0));
        assert!(p.per_cell.is_empty());

        let m = CausalityMatrix::from_rows([(DefectClass::Timing, [1.0, 0.0, 0.0, 0.0])], "id")
            .unwrap();
        let p = combine(
            &m,
            &rates(&[(DefectClass::Timing, 0.125)]),
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(p.mode(A), 0.125);
        assert_eq!(p.mode(B) + p.mode(C) + p.mode(D), 0.0);
        assert_eq!(p.total, 0.125);
    }

    #[test]
    fn missing_row_is_an_error() {
        let err = combine(
            &builtin_causality(),
            &rates(&[(DefectClass::Relationship, 1e-3)]),
            &BTreeSet::new(),
        )
        .unwrap_err();
        assert_eq!(err.to_string(), "no causality row: relationship");
        // Zero-rate classes never touch the matrix.
        assert!(combine(
            &builtin_causality(),
            &rates(&[(DefectClass::Relationship, 0.0)]),
            &BTreeSet::new()
        )
        .is_ok());
    }

    #[test]
    fn applicability() {
        assert_eq!(
            mode_applicability(SystemKind::ContinuousMonitoring, None).unwrap(),
            [B].into()
        );
        assert!(mode_applicability(SystemKind::Control, None)
            .unwrap()
            .is_empty());
        let custom: BTreeSet<_> = [B, D].into();
        assert_eq!(
            mode_applicability(SystemKind::Custom, Some(&custom)).unwrap(),
            custom
        );
        assert!(mode_applicability(SystemKind::Custom, None).is_err());
        assert!(mode_applicability(SystemKind::Control, Some(&custom)).is_err());
    }
}
