//! CSV to defects.json conversion.
//!
//! Columns: `id, description, class, detection_effort, observed_modes,
//! resolution`. Only `id` and `class` are required; `observed_modes` is a
//! `;`-separated list such as `A;C`.

use std::io::Read;

use serde::Deserialize;

use crate::domain::{validate_defects, DefectClass, DefectRecord, FailureMode};
use crate::error::{OrcasError, Result};

#[derive(Deserialize)]
struct Row {
    id: String,
    #[serde(default)]
    description: Option<String>,
    class: String,
    #[serde(default)]
    detection_effort: Option<f64>,
    #[serde(default)]
    observed_modes: Option<String>,
    #[serde(default)]
    resolution: Option<String>,
}

pub fn defects_from_csv<R: Read>(input: R) -> Result<Vec<DefectRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| OrcasError::Invalid(format!("csv line {line}: {e}")))?;
        let class: DefectClass = row
            .class
            .parse()
            .map_err(|e| OrcasError::Invalid(format!("csv line {line}: {e}")))?;
        let observed_modes = row
            .observed_modes
            .as_deref()
            .unwrap_or("")
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<FailureMode>())
            .collect::<Result<_>>()
            .map_err(|e| OrcasError::Invalid(format!("csv line {line}: {e}")))?;
        out.push(DefectRecord {
            id: row.id,
            description: row.description.unwrap_or_default(),
            class,
            detection_effort: row.detection_effort,
            effort_unit: None,
            observed_modes,
            resolution: row.resolution.filter(|r| !r.is_empty()),
        });
    }
    validate_defects(&out)?;
    Ok(out)
}
