//! File formats, ingestion and report emission.

pub mod bundle;
pub mod csv_import;
pub mod history;
pub mod report;

pub use bundle::{
    load_bundle, AssessmentBundle, BundleConfig, LoadOptions, MatrixOverride, MatrixSource,
};
pub use report::{emit_report, to_canonical_json, AssessmentReport, ReportFormat};
