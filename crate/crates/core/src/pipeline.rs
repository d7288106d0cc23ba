//! End-to-end assessment: causality, class rates, mode probabilities,
//! evidence scoring and the confidence gate.

use std::collections::BTreeMap;

use crate::causality::{builtin_causality, estimate_causality, merge_causality, CausalityMatrix};
use crate::error::Result;
use crate::evidence::{assessment_confidence_weighted, evidence_gaps, score_rtm, score_tca};
use crate::growth::{
    bounded_class_rates, class_histories, fit_class_models, srgm_class_rates, windowed_stability,
    ClassRates, RateMethod, WindowedStability,
};
use crate::io::bundle::{AssessmentBundle, MatrixSource};
use crate::io::report::{AssessmentReport, Provenance, SrgmSection, ToolInfo};
use crate::par::Execution;
use crate::quantify::combine;

pub const ZERO_EVIDENCE_NOTE: &str =
    "no evidence; bounded at 0 by testing effort, see confidence gate";

pub const SRGM_RATE_NOTE: &str =
    "class rates are fitted failure intensities m'(T) at the assessment horizon, not demand probabilities";

pub const CONFIDENCE_NOTE: &str =
    "confidence is the weighted mean of the RTM and TCA scores; structural coverage is reported separately unless weighted";

pub fn resolve_matrix(bundle: &AssessmentBundle) -> Result<CausalityMatrix> {
    let base = match &bundle.matrix_source {
        MatrixSource::Builtin => builtin_causality(),
        MatrixSource::File { matrix, .. } => matrix.clone(),
        MatrixSource::Corpus { name, records } => {
            estimate_causality(records, format!("corpus:{name}"))?
        }
    };
    let matrix = match (&bundle.matrix_source, bundle.config.merge_with_builtin) {
        (MatrixSource::Builtin, _) | (_, false) => base,
        (_, true) => merge_causality(&builtin_causality(), &base),
    };
    Ok(if bundle.config.uniform_missing_rows {
        matrix.with_uniform_missing_rows()
    } else {
        matrix
    })
}

fn estimate_rates(
    bundle: &AssessmentBundle,
    exec: Execution,
) -> Result<(ClassRates, Option<SrgmSection>)> {
    match bundle.config.rate_method {
        RateMethod::Bounded => Ok((bounded_class_rates(&bundle.defects, &bundle.effort)?, None)),
        RateMethod::Srgm => {
            let horizon = bundle.effort.total_effort();
            let model = bundle.config.srgm_model;
            let histories = class_histories(&bundle.defects)?;
            let fits = fit_class_models(&histories, horizon, model, exec)?;
            let rates = srgm_class_rates(&fits, horizon, bundle.effort.rate_unit())?;
            let mut pooled: Vec<f64> = histories.values().flatten().copied().collect();
            pooled.sort_by(f64::total_cmp);
            let stability = if pooled.len() >= 2 {
                windowed_stability(
                    &pooled,
                    Some(horizon),
                    bundle.config.stability_windows,
                    model,
                    bundle.config.stability_threshold,
                    exec,
                )?
            } else {
                WindowedStability {
                    fits: Vec::new(),
                    skipped: Vec::new(),
                    verdict: None,
                }
            };
            Ok((
                rates,
                Some(SrgmSection {
                    model,
                    horizon,
                    fits,
                    histories,
                    stability,
                }),
            ))
        }
    }
}

/// Runs every stage on a validated bundle. Pure: the same bundle always
/// yields the same report.
pub fn run_assessment(bundle: &AssessmentBundle, exec: Execution) -> Result<AssessmentReport> {
    let matrix = resolve_matrix(bundle).map_err(|e| e.in_stage("causality"))?;
    let (rates, srgm) = estimate_rates(bundle, exec).map_err(|e| e.in_stage("rate estimation"))?;
    let probabilities = combine(&matrix, &rates, &bundle.excluded_modes)
        .map_err(|e| e.in_stage("failure-mode combination"))?;

    let evidence = (|| {
        let rtm = score_rtm(&bundle.rtm)?;
        let tca = score_tca(&bundle.tca)?;
        assessment_confidence_weighted(
            rtm,
            tca,
            bundle.config.structural_coverage,
            bundle.config.confidence_threshold,
            bundle.config.confidence_weights,
        )
    })()
    .map_err(|e| e.in_stage("evidence"))?;

    let rate_notes: BTreeMap<_, _> = rates
        .rates
        .iter()
        .filter(|(_, &r)| r == 0.0)
        .map(|(&c, _)| (c, ZERO_EVIDENCE_NOTE.to_string()))
        .collect();

    let mut notes = vec![CONFIDENCE_NOTE.to_string()];
    if srgm.is_some() {
        notes.push(SRGM_RATE_NOTE.to_string());
    }
    let mut warnings = Vec::new();
    if !matrix.uniform_filled().is_empty() {
        let classes: Vec<String> = matrix
            .uniform_filled()
            .iter()
            .map(|c| c.to_string())
            .collect();
        warnings.push(format!(
            "WARNING: no causality data for {}; uniform (0.25 each) rows were inserted by request",
            classes.join(", ")
        ));
    }
    if let Some(section) = &srgm {
        if let Some(v) = &section.stability.verdict {
            if !v.stable {
                warnings.push(format!(
                    "growth model unstable: predicted total moved by {:.1}% between windows (limit {:.1}%)",
                    100.0 * v.max_relative_step,
                    100.0 * v.threshold
                ));
            }
        } else {
            warnings.push(
                "growth model stability could not be assessed: too few converged windows".into(),
            );
        }
    }

    Ok(AssessmentReport {
        tool: ToolInfo::current(),
        provenance: Provenance {
            inputs: bundle.input_digests.clone(),
            matrix: matrix.provenance().to_string(),
            uniform_filled_rows: matrix.uniform_filled().to_vec(),
        },
        system_kind: bundle.config.system_kind,
        mode_family: bundle.config.system_kind.mode_family(),
        effort: bundle.effort,
        total_effort: bundle.effort.total_effort(),
        defect_count: bundle.defects.len(),
        rates,
        rate_notes,
        probabilities,
        evidence,
        gaps: evidence_gaps(&bundle.rtm, &bundle.tca),
        srgm,
        notes,
        warnings,
    })
}
