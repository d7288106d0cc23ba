//! Conditional probability of each failure mode given the defect class.
//!
//! A [`CausalityMatrix`] is row-stochastic: each present row is a
//! distribution over the four failure modes. Rows may be missing for classes
//! with no supporting data, and looking one up is an error rather than a
//! silent zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{DefectClass, DefectRecord, FailureMode};
use crate::error::{OrcasError, Result};

/// Allowed deviation of a row sum from 1, wide enough for rows printed to
/// three decimals.
pub const ROW_SUM_TOLERANCE: f64 = 5e-4;

pub const BUILTIN_PROVENANCE: &str = "built-in";

/// Rows as printed, in A, B, C, D order. Derived from 402 labeled issue
/// reports across five open-source projects. No relationship row exists.
const BUILTIN_ROWS: [(DefectClass, [f64; 4]); 6] = [
    (DefectClass::Algorithm, [0.320, 0.140, 0.350, 0.190]),
    (DefectClass::Assignment, [0.288, 0.667, 0.045, 0.000]),
    (DefectClass::Checking, [0.360, 0.244, 0.256, 0.140]),
    (DefectClass::Function, [0.389, 0.222, 0.241, 0.148]),
    (DefectClass::Interface, [0.347, 0.533, 0.080, 0.040]),
    (DefectClass::Timing, [0.190, 0.048, 0.524, 0.238]),
];

const UNIFORM_ROW: [f64; 4] = [0.25; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct CausalityMatrix {
    rows: BTreeMap<DefectClass, [f64; 4]>,
    provenance: String,
    counts: Option<BTreeMap<DefectClass, [u64; 4]>>,
    uniform_filled: Vec<DefectClass>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    provenance: String,
    rows: BTreeMap<DefectClass, [f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    counts: Option<BTreeMap<DefectClass, [u64; 4]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    uniform_filled: Vec<DefectClass>,
}

impl TryFrom<RawMatrix> for CausalityMatrix {
    type Error = OrcasError;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        let m = CausalityMatrix {
            rows: raw.rows,
            provenance: raw.provenance,
            counts: raw.counts,
            uniform_filled: raw.uniform_filled,
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<CausalityMatrix> for RawMatrix {
    fn from(m: CausalityMatrix) -> Self {
        RawMatrix {
            provenance: m.provenance,
            rows: m.rows,
            counts: m.counts,
            uniform_filled: m.uniform_filled,
        }
    }
}

impl CausalityMatrix {
    /// Builds a matrix from explicit rows, checking that each row is a
    /// distribution.
    pub fn from_rows(
        rows: impl IntoIterator<Item = (DefectClass, [f64; 4])>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let m = CausalityMatrix {
            rows: rows.into_iter().collect(),
            provenance: provenance.into(),
            counts: None,
            uniform_filled: Vec::new(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn empty(provenance: impl Into<String>) -> Self {
        CausalityMatrix {
            rows: BTreeMap::new(),
            provenance: provenance.into(),
            counts: None,
            uniform_filled: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (&class, row) in &self.rows {
            if let Some(p) = row
                .iter()
                .find(|p| !(p.is_finite() && (0.0..=1.0).contains(*p)))
            {
                return Err(OrcasError::InvalidRow {
                    class,
                    reason: format!("entry {p} outside [0, 1]"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(OrcasError::InvalidRow {
                    class,
                    reason: format!("row sums to {sum}, expected 1 within {ROW_SUM_TOLERANCE}"),
                });
            }
        }
        if let Some(counts) = &self.counts {
            if let Some(class) = counts.keys().find(|c| !self.rows.contains_key(c)) {
                return Err(OrcasError::InvalidRow {
                    class: *class,
                    reason: "counts present for a class without a row".into(),
                });
            }
        }
        Ok(())
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn counts(&self) -> Option<&BTreeMap<DefectClass, [u64; 4]>> {
        self.counts.as_ref()
    }

    /// Classes whose rows were inserted by [`Self::with_uniform_missing_rows`].
    pub fn uniform_filled(&self) -> &[DefectClass] {
        &self.uniform_filled
    }

    pub fn rows(&self) -> impl Iterator<Item = (DefectClass, &[f64; 4])> {
        self.rows.iter().map(|(c, r)| (*c, r))
    }

    pub fn has_row(&self, class: DefectClass) -> bool {
        self.rows.contains_key(&class)
    }

    pub fn row(&self, class: DefectClass) -> Result<&[f64; 4]> {
        self.rows.get(&class).ok_or(OrcasError::MissingRow(class))
    }

    pub fn lookup(&self, class: DefectClass, mode: FailureMode) -> Result<f64> {
        Ok(self.row(class)?[mode.index()])
    }

    pub fn missing_classes(&self) -> Vec<DefectClass> {
        DefectClass::ALL
            .into_iter()
            .filter(|c| !self.rows.contains_key(c))
            .collect()
    }

    /// Fills every absent row with the uniform distribution. The filled
    /// classes are recorded so reports can flag them.
    pub fn with_uniform_missing_rows(mut self) -> Self {
        for class in self.missing_classes() {
            self.rows.insert(class, UNIFORM_ROW);
            self.uniform_filled.push(class);
        }
        self
    }
}

/// The matrix estimated from the labeled open-source corpus, stored exactly
/// as printed.
pub fn builtin_causality() -> CausalityMatrix {
    CausalityMatrix {
        rows: BUILTIN_ROWS.into_iter().collect(),
        provenance: BUILTIN_PROVENANCE.to_string(),
        counts: None,
        uniform_filled: Vec::new(),
    }
}

/// Estimates the matrix from labeled defect records.
///
/// Each record contributes one count per observed mode, so a record with two
/// modes lands in two cells. Rows are normalized by their total count. Classes
/// with no records get no row.
pub fn estimate_causality(
    corpus: &[DefectRecord],
    provenance: impl Into<String>,
) -> Result<CausalityMatrix> {
    if corpus.is_empty() {
        return Err(OrcasError::EmptyCorpus);
    }
    let mut counts: BTreeMap<DefectClass, [u64; 4]> = BTreeMap::new();
    for rec in corpus {
        if rec.observed_modes.is_empty() {
            return Err(OrcasError::UnlabeledRecord(rec.id.clone()));
        }
        let cells = counts.entry(rec.class).or_default();
        for mode in &rec.observed_modes {
            cells[mode.index()] += 1;
        }
    }
    let rows = counts
        .iter()
        .map(|(&class, cells)| {
            let total: u64 = cells.iter().sum();
            (class, cells.map(|c| c as f64 / total as f64))
        })
        .collect();
    Ok(CausalityMatrix {
        rows,
        provenance: provenance.into(),
        counts: Some(counts),
        uniform_filled: Vec::new(),
    })
}

/// Replaces `base` rows with `overlay` rows class by class.
pub fn merge_causality(base: &CausalityMatrix, overlay: &CausalityMatrix) -> CausalityMatrix {
    let mut rows = base.rows.clone();
    let mut counts = base.counts.clone();
    let mut uniform_filled = base.uniform_filled.clone();
    for (&class, row) in &overlay.rows {
        rows.insert(class, *row);
        uniform_filled.retain(|c| *c != class);
        match (
            &mut counts,
            overlay.counts.as_ref().and_then(|oc| oc.get(&class)),
        ) {
            (Some(c), Some(oc)) => {
                c.insert(class, *oc);
            }
            (Some(c), None) => {
                c.remove(&class);
            }
            (None, _) => {}
        }
    }
    uniform_filled.extend(overlay.uniform_filled.iter().copied());
    uniform_filled.sort();
    uniform_filled.dedup();
    let provenance = if overlay.provenance.is_empty() {
        base.provenance.clone()
    } else {
        format!("{} + {}", base.provenance, overlay.provenance)
    };
    CausalityMatrix {
        rows,
        provenance,
        counts: counts.filter(|c| !c.is_empty()),
        uniform_filled,
    }
}
