//! Software failure-mode quantification from classified defects.
//!
//! Defects sorted by orthogonal defect class are turned into per-class
//! failure rates (bounded by testing effort, or read off NHPP reliability
//! growth fits), combined with a class-to-failure-mode causality matrix into
//! per-mode probabilities, and paired with a confidence score built from
//! requirements traceability and trigger coverage evidence. Low confidence
//! gates the assessment.
//!
//! ```
//! use orcas::causality::builtin_causality;
//! use orcas::domain::{DefectClass, DefectRecord, EffortModel, FailureMode};
//! use orcas::growth::bounded_class_rates;
//! use orcas::quantify::combine;
//!
//! let defects = vec![
//!     DefectRecord::new("D1", DefectClass::Algorithm),
//!     DefectRecord::new("D2", DefectClass::Checking),
//! ];
//! let effort = EffortModel::continuous(1000, 1.0).unwrap();
//! let rates = bounded_class_rates(&defects, &effort).unwrap();
//! let p = combine(&builtin_causality(), &rates, &[FailureMode::B].into()).unwrap();
//! assert!(p.total < rates.sum());
//! ```

pub mod causality;
pub mod domain;
pub mod error;
pub mod evidence;
pub mod growth;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod quantify;

pub use error::{OrcasError, Result};
pub use par::Execution;
pub use pipeline::run_assessment;
