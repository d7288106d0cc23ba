//! Loading and validating an assessment directory.
//!
//! Layout (all UTF-8 JSON):
//!
//! | file          | contents                                   | required |
//! |---------------|--------------------------------------------|----------|
//! | defects.json  | array of defect records                    | yes      |
//! | effort.json   | effort model                               | yes      |
//! | rtm.json      | array of traceability entries              | yes      |
//! | tca.json      | array of trigger coverage entries          | yes      |
//! | config.json   | [`BundleConfig`]                           | yes      |
//! | matrix.json   | causality matrix                           | no       |
//! | corpus.json   | array of labeled defect records            | no       |

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::causality::CausalityMatrix;
use crate::domain::{validate_defects, DefectRecord, EffortModel, FailureMode};
use crate::error::{OrcasError, Result};
use crate::evidence::{ConfidenceWeights, RtmEntry, TcaEntry, DEFAULT_CONFIDENCE_THRESHOLD};
use crate::growth::{RateMethod, SrgmModel, DEFAULT_STABILITY_THRESHOLD};
use crate::quantify::{mode_applicability, SystemKind};

pub const DEFECTS_FILE: &str = "defects.json";
pub const EFFORT_FILE: &str = "effort.json";
pub const RTM_FILE: &str = "rtm.json";
pub const TCA_FILE: &str = "tca.json";
pub const CONFIG_FILE: &str = "config.json";
pub const MATRIX_FILE: &str = "matrix.json";
pub const CORPUS_FILE: &str = "corpus.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixChoice {
    #[default]
    Builtin,
    /// `matrix.json` in the bundle directory.
    File,
    /// Estimate from `corpus.json` in the bundle directory.
    Corpus,
}

fn default_windows() -> usize {
    5
}

fn default_confidence_threshold() -> f64 {
    DEFAULT_CONFIDENCE_THRESHOLD
}

fn default_stability_threshold() -> f64 {
    DEFAULT_STABILITY_THRESHOLD
}

fn default_rate_method() -> RateMethod {
    RateMethod::Bounded
}

fn default_model() -> SrgmModel {
    SrgmModel::GoelOkumoto
}

/// Contents of `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleConfig {
    #[serde(default)]
    pub system_kind: SystemKind,
    /// Only with `system_kind = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded_modes: Option<BTreeSet<FailureMode>>,
    pub structural_coverage: f64,
    #[serde(default = "default_confidence_threshold")]
    pub confidence_threshold: f64,
    #[serde(default)]
    pub confidence_weights: ConfidenceWeights,
    #[serde(default = "default_stability_threshold")]
    pub stability_threshold: f64,
    #[serde(default)]
    pub matrix: MatrixChoice,
    /// Lay file or corpus rows over the built-in matrix instead of replacing it.
    #[serde(default)]
    pub merge_with_builtin: bool,
    #[serde(default)]
    pub uniform_missing_rows: bool,
    #[serde(default = "default_rate_method")]
    pub rate_method: RateMethod,
    #[serde(default = "default_model")]
    pub srgm_model: SrgmModel,
    #[serde(default = "default_windows")]
    pub stability_windows: usize,
}

impl BundleConfig {
    pub fn new(structural_coverage: f64) -> Self {
        BundleConfig {
            system_kind: SystemKind::default(),
            excluded_modes: None,
            structural_coverage,
            confidence_threshold: DEFAULT_CONFIDENCE_THRESHOLD,
            confidence_weights: ConfidenceWeights::default(),
            stability_threshold: DEFAULT_STABILITY_THRESHOLD,
            matrix: MatrixChoice::Builtin,
            merge_with_builtin: false,
            uniform_missing_rows: false,
            rate_method: RateMethod::Bounded,
            srgm_model: SrgmModel::GoelOkumoto,
            stability_windows: default_windows(),
        }
    }
}

/// Where the causality matrix comes from, already parsed.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Builtin,
    File {
        name: String,
        matrix: CausalityMatrix,
    },
    Corpus {
        name: String,
        records: Vec<DefectRecord>,
    },
}

/// Command-line overrides applied on top of `config.json`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadOptions {
    pub matrix: Option<MatrixOverride>,
    pub exclude_modes: Option<BTreeSet<FailureMode>>,
    pub confidence_threshold: Option<f64>,
    pub uniform_missing_rows: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixOverride {
    Builtin,
    File(PathBuf),
    Corpus(PathBuf),
}

impl std::str::FromStr for MatrixOverride {
    type Err = OrcasError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "builtin" {
            Ok(MatrixOverride::Builtin)
        } else if let Some(path) = s.strip_prefix("corpus:") {
            Ok(MatrixOverride::Corpus(PathBuf::from(path)))
        } else if s.is_empty() {
            Err(OrcasError::Invalid("empty matrix source".into()))
        } else {
            Ok(MatrixOverride::File(PathBuf::from(s)))
        }
    }
}

/// A fully validated assessment input.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentBundle {
    pub defects: Vec<DefectRecord>,
    pub effort: EffortModel,
    pub rtm: Vec<RtmEntry>,
    pub tca: Vec<TcaEntry>,
    pub config: BundleConfig,
    pub matrix_source: MatrixSource,
    pub excluded_modes: BTreeSet<FailureMode>,
    /// SHA-256 of every file read, keyed by role and file name.
    pub input_digests: BTreeMap<String, String>,
}

struct Reader {
    digests: BTreeMap<String, String>,
}

impl Reader {
    fn read<T: DeserializeOwned>(&mut self, key: String, path: &Path) -> Result<T> {
        let bytes = fs::read(path).map_err(|e| OrcasError::File {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        self.digests
            .insert(key, hex::encode(Sha256::digest(&bytes)));
        serde_json::from_slice(&bytes).map_err(|e| OrcasError::File {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> OrcasError {
    OrcasError::File {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads and validates every input in `dir` before anything is computed.
pub fn load_bundle(dir: &Path, options: &LoadOptions) -> Result<AssessmentBundle> {
    let mut reader = Reader {
        digests: BTreeMap::new(),
    };
    let defects_path = dir.join(DEFECTS_FILE);
    let effort_path = dir.join(EFFORT_FILE);
    let config_path = dir.join(CONFIG_FILE);

    let defects: Vec<DefectRecord> = reader.read(DEFECTS_FILE.into(), &defects_path)?;
    let effort: EffortModel = reader.read(EFFORT_FILE.into(), &effort_path)?;
    let rtm: Vec<RtmEntry> = reader.read(RTM_FILE.into(), &dir.join(RTM_FILE))?;
    let tca: Vec<TcaEntry> = reader.read(TCA_FILE.into(), &dir.join(TCA_FILE))?;
    let mut config: BundleConfig = reader.read(CONFIG_FILE.into(), &config_path)?;

    validate_defects(&defects).map_err(|e| file_error(&defects_path, e))?;
    let horizon = effort.total_effort();
    for d in &defects {
        if let Some(unit) = d.effort_unit {
            if unit != effort.unit() {
                return Err(file_error(
                    &defects_path,
                    format!(
                        "defect {}: detection effort is in {unit:?} but effort.json counts {:?}",
                        d.id,
                        effort.unit()
                    ),
                ));
            }
        }
        if let Some(t) = d.detection_effort {
            if t > horizon {
                return Err(file_error(
                    &defects_path,
                    format!(
                        "defect {}: detection_effort {t} exceeds total effort {horizon}",
                        d.id
                    ),
                ));
            }
        }
    }

    if let Some(t) = options.confidence_threshold {
        config.confidence_threshold = t;
    }
    if let Some(modes) = &options.exclude_modes {
        config.system_kind = SystemKind::Custom;
        config.excluded_modes = Some(modes.clone());
    }
    config.uniform_missing_rows |= options.uniform_missing_rows;

    let check_unit = |name: &str, v: f64| {
        if v.is_finite() && (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(file_error(
                &config_path,
                format!("{name} must lie in [0, 1], got {v}"),
            ))
        }
    };
    check_unit("structural_coverage", config.structural_coverage)?;
    check_unit("confidence_threshold", config.confidence_threshold)?;
    if !(config.stability_threshold.is_finite() && config.stability_threshold >= 0.0) {
        return Err(file_error(
            &config_path,
            "stability_threshold must be nonnegative",
        ));
    }
    if config.stability_windows < 2 {
        return Err(file_error(
            &config_path,
            "stability_windows must be at least 2",
        ));
    }
    let excluded_modes = mode_applicability(config.system_kind, config.excluded_modes.as_ref())
        .map_err(|e| file_error(&config_path, e))?;

    let matrix_source = match &options.matrix {
        Some(MatrixOverride::Builtin) => MatrixSource::Builtin,
        Some(MatrixOverride::File(p)) => {
            let name = display_name(p);
            let matrix = reader.read(format!("matrix:{name}"), p)?;
            MatrixSource::File { name, matrix }
        }
        Some(MatrixOverride::Corpus(p)) => {
            let name = display_name(p);
            let records = reader.read(format!("corpus:{name}"), p)?;
            MatrixSource::Corpus { name, records }
        }
        None => match config.matrix {
            MatrixChoice::Builtin => MatrixSource::Builtin,
            MatrixChoice::File => {
                let matrix = reader.read(MATRIX_FILE.into(), &dir.join(MATRIX_FILE))?;
                MatrixSource::File {
                    name: MATRIX_FILE.into(),
                    matrix,
                }
            }
            MatrixChoice::Corpus => {
                let records = reader.read(CORPUS_FILE.into(), &dir.join(CORPUS_FILE))?;
                MatrixSource::Corpus {
                    name: CORPUS_FILE.into(),
                    records,
                }
            }
        },
    };
    if let MatrixSource::Corpus { name, records } = &matrix_source {
        let path = PathBuf::from(name);
        validate_defects(records).map_err(|e| file_error(&path, e))?;
        if records.is_empty() {
            return Err(file_error(&path, OrcasError::EmptyCorpus));
        }
        if let Some(r) = records.iter().find(|r| r.observed_modes.is_empty()) {
            return Err(file_error(&path, OrcasError::UnlabeledRecord(r.id.clone())));
        }
    }

    Ok(AssessmentBundle {
        defects,
        effort,
        rtm,
        tca,
        config,
        matrix_source,
        excluded_modes,
        input_digests: reader.digests,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| file_error(path, e))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

impl AssessmentBundle {
    /// Writes the bundle as a directory [`load_bundle`] accepts. Command-line
    /// overrides end up in `config.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_json(&dir.join(DEFECTS_FILE), &self.defects)?;
        write_json(&dir.join(EFFORT_FILE), &self.effort)?;
        write_json(&dir.join(RTM_FILE), &self.rtm)?;
        write_json(&dir.join(TCA_FILE), &self.tca)?;
        let mut config = self.config.clone();
        match &self.matrix_source {
            MatrixSource::Builtin => config.matrix = MatrixChoice::Builtin,
            MatrixSource::File { matrix, .. } => {
                config.matrix = MatrixChoice::File;
                write_json(&dir.join(MATRIX_FILE), matrix)?;
            }
            MatrixSource::Corpus { records, .. } => {
                config.matrix = MatrixChoice::Corpus;
                write_json(&dir.join(CORPUS_FILE), records)?;
            }
        }
        write_json(&dir.join(CONFIG_FILE), &config)
    }
}
