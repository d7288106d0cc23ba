//! The assessment report and its json, text and svg renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{DefectClass, EffortModel, FailureMode, ModeFamily};
use crate::evidence::{EvidenceGaps, EvidenceSummary, Gate};
use crate::growth::{ClassRates, SrgmFit, SrgmModel, WindowedStability};
use crate::quantify::{ModeProbabilities, SystemKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: "orcas".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 per input file.
    pub inputs: BTreeMap<String, String>,
    pub matrix: String,
    pub uniform_filled_rows: Vec<DefectClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgmSection {
    pub model: SrgmModel,
    pub horizon: f64,
    pub fits: BTreeMap<DefectClass, SrgmFit>,
    /// Detection efforts per class the fits were made on.
    pub histories: BTreeMap<DefectClass, Vec<f64>>,
    /// Refits of the pooled history on growing windows.
    pub stability: WindowedStability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub tool: ToolInfo,
    pub provenance: Provenance,
    pub system_kind: SystemKind,
    pub mode_family: ModeFamily,
    pub effort: EffortModel,
    pub total_effort: f64,
    pub defect_count: usize,
    pub rates: ClassRates,
    pub rate_notes: BTreeMap<DefectClass, String>,
    pub probabilities: ModeProbabilities,
    pub evidence: EvidenceSummary,
    pub gaps: EvidenceGaps,
    pub srgm: Option<SrgmSection>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl AssessmentReport {
    pub fn gate(&self) -> Gate {
        self.evidence.gate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
    Svg,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::error::OrcasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            "svg" | "svg-plots" => Ok(ReportFormat::Svg),
            _ => Err(crate::error::OrcasError::UnknownValue {
                kind: "report format",
                value: s.into(),
            }),
        }
    }
}

pub fn emit_report(report: &AssessmentReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => to_canonical_json(report).into_bytes(),
        ReportFormat::Text => render_text(report).into_bytes(),
        ReportFormat::Svg => render_svg(report).into_bytes(),
    }
}

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, sort_keys(v)))
                    .collect(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Pretty-printed JSON with sorted object keys and shortest round-trip
/// floats, newline terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut text = serde_json::to_string_pretty(&sort_keys(value)).expect("JSON values render");
    text.push('\n');
    text
}

/// Four significant figures in `5.989E-5` style; exact zero prints as `0`.
pub fn sig4(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.3E}")
    }
}

fn title_case(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

pub fn render_text(report: &AssessmentReport) -> String {
    let mut out = String::new();
    let p = &report.probabilities;
    let prefix = report.mode_family.prefix();
    let unit = p.unit.label();

    let _ = writeln!(
        out,
        "{} {} assessment",
        report.tool.name, report.tool.version
    );
    let _ = writeln!(out, "Causality matrix: {}", report.provenance.matrix);
    let _ = writeln!(
        out,
        "Testing effort: {} {} ({} defects detected)",
        report.total_effort,
        match report.effort.unit() {
            crate::domain::EffortUnit::Hours => "hours",
            crate::domain::EffortUnit::Demands => "demands",
        },
        report.defect_count
    );
    for w in &report.warnings {
        let _ = writeln!(out, "{w}");
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "Failure-mode probabilities ({prefix}, {unit})");
    let _ = write!(out, "{:<14}", "");
    for m in FailureMode::ALL {
        let _ = write!(out, "{:>12}", format!("{prefix}-{m}"));
    }
    let _ = writeln!(out, "{:>12}", "Total");
    for (class, cells) in &p.per_cell {
        let _ = write!(out, "{:<14}", title_case(class.as_str()));
        for m in FailureMode::ALL {
            let _ = write!(out, "{:>12}", sig4(cells[&m]));
        }
        let _ = writeln!(out, "{:>12}", sig4(p.per_class[class]));
    }
    let _ = write!(out, "{:<14}", "Total");
    for m in FailureMode::ALL {
        let _ = write!(out, "{:>12}", sig4(p.mode(m)));
    }
    let _ = writeln!(out, "{:>12}", sig4(p.total));
    if !p.excluded_modes.is_empty() {
        let modes: Vec<String> = p
            .excluded_modes
            .iter()
            .map(|m| format!("{prefix}-{m}"))
            .collect();
        let _ = writeln!(out, "Not applicable (zeroed): {}", modes.join(", "));
    }
    let _ = writeln!(out);

    let method = match report.rates.method {
        crate::growth::RateMethod::Bounded => "bounded estimation",
        crate::growth::RateMethod::Srgm => "reliability growth intensity",
    };
    let _ = writeln!(out, "Defect-class rates ({method}, {unit})");
    for (class, rate) in &report.rates.rates {
        let note = report
            .rate_notes
            .get(class)
            .map(|n| format!("  ({n})"))
            .unwrap_or_default();
        let _ = writeln!(out, "  {:<14}{:>10}{note}", class.as_str(), sig4(*rate));
    }
    let _ = writeln!(out);

    if let Some(srgm) = &report.srgm {
        let _ = writeln!(
            out,
            "Reliability growth fits ({:?}, horizon {})",
            srgm.model,
            sig4(srgm.horizon)
        );
        for (class, fit) in &srgm.fits {
            let total = fit
                .predicted_total
                .map(sig4)
                .unwrap_or_else(|| "unbounded".into());
            let _ = writeln!(
                out,
                "  {:<14}events {:>4}  predicted total {:>10}  intensity {:>10}",
                class.as_str(),
                fit.events,
                total,
                sig4(fit.current_intensity)
            );
        }
        match &srgm.stability.verdict {
            Some(v) => {
                let _ = writeln!(
                    out,
                    "  Stability: max step {:.1}% vs limit {:.1}% -> {}",
                    100.0 * v.max_relative_step,
                    100.0 * v.threshold,
                    if v.stable { "stable" } else { "unstable" }
                );
            }
            None => {
                let _ = writeln!(out, "  Stability: not assessed");
            }
        }
        let _ = writeln!(out);
    }

    let e = &report.evidence;
    let _ = writeln!(out, "Evidence");
    let _ = writeln!(out, "  RTM score            {:.4}", e.rtm_score);
    let _ = writeln!(out, "  TCA score            {:.4}", e.tca_score);
    let _ = writeln!(out, "  Structural coverage  {:.4}", e.structural_coverage);
    let _ = writeln!(
        out,
        "  Confidence           {:.4} (threshold {:.4})",
        e.confidence, e.threshold
    );
    let _ = writeln!(out, "  Gate                 {}", e.gate);
    if !report.gaps.untraced_requirements.is_empty() {
        let _ = writeln!(out, "  Requirements needing tests:");
        for g in &report.gaps.untraced_requirements {
            let _ = writeln!(out, "    {} ({})", g.req_id, g.status);
        }
    }
    if !report.gaps.uncovered_triggers.is_empty() {
        let _ = writeln!(out, "  Triggers needing tests:");
        for g in &report.gaps.uncovered_triggers {
            let _ = writeln!(
                out,
                "    {} {} {} ({})",
                g.level, g.activity, g.trigger, g.status
            );
        }
    }
    if !report.notes.is_empty() {
        let _ = writeln!(out);
        for n in &report.notes {
            let _ = writeln!(out, "Note: {n}");
        }
    }
    out
}

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 48.0;

fn svg_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Cumulative detected defects against the fitted mean value function, one
/// panel per class.
pub fn render_svg(report: &AssessmentReport) -> String {
    let fits: Vec<(&DefectClass, &SrgmFit, &[f64])> = report
        .srgm
        .iter()
        .flat_map(|s| {
            s.fits
                .iter()
                .map(move |(c, f)| (c, f, s.histories.get(c).map(Vec::as_slice).unwrap_or(&[])))
        })
        .collect();

    let mut out = String::new();
    if fits.is_empty() {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="60" viewBox="0 0 {PANEL_W} 60">"#
        );
        let _ = writeln!(
            out,
            r#"  <text x="10" y="34" font-family="sans-serif" font-size="13">No reliability growth fits in this report (rates from {}); nothing to plot.</text>"#,
            match report.rates.method {
                crate::growth::RateMethod::Bounded => "bounded estimation",
                crate::growth::RateMethod::Srgm => "growth models",
            }
        );
        out.push_str("</svg>\n");
        return out;
    }

    let height = PANEL_H * fits.len() as f64;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}">"#
    );
    for (i, (class, fit, events)) in fits.iter().enumerate() {
        let y0 = PANEL_H * i as f64;
        let t_max = fit
            .horizon
            .max(events.last().copied().unwrap_or(0.0))
            .max(f64::MIN_POSITIVE);
        let curve = fit.curve(t_max, 100);
        let y_max = curve
            .iter()
            .map(|p| p.1)
            .fold(events.len() as f64, f64::max)
            .max(1.0)
            * 1.05;
        let plot_w = PANEL_W - 2.0 * MARGIN;
        let plot_h = PANEL_H - 2.0 * MARGIN;
        let sx = |t: f64| MARGIN + plot_w * t / t_max;
        let sy = |v: f64| y0 + PANEL_H - MARGIN - plot_h * v / y_max;

        let _ = writeln!(out, r#"  <g id="{}">"#, class.as_str());
        let _ = writeln!(
            out,
            r#"    <text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="14">{} ({:?}{})</text>"#,
            y0 + 24.0,
            svg_escape(&title_case(class.as_str())),
            fit.model(),
            if fit.converged { "" } else { ", not converged" }
        );
        let _ = writeln!(
            out,
            r#"    <path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}" fill="none" stroke="black"/>"#,
            sx(0.0),
            sy(y_max),
            sx(0.0),
            sy(0.0),
            sx(t_max),
            sy(0.0)
        );
        let _ = writeln!(
            out,
            r#"    <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            sx(t_max),
            sy(0.0) + 16.0,
            sig4(t_max)
        );
        let _ = writeln!(
            out,
            r#"    <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{:.0}</text>"#,
            sx(0.0) - 4.0,
            sy(y_max) + 10.0,
            y_max
        );

        let mut step = format!("M{:.2},{:.2}", sx(0.0), sy(0.0));
        for (k, &t) in events.iter().enumerate() {
            let _ = write!(
                step,
                " L{:.2},{:.2} L{:.2},{:.2}",
                sx(t),
                sy(k as f64),
                sx(t),
                sy(k as f64 + 1.0)
            );
        }
        let _ = write!(step, " L{:.2},{:.2}", sx(t_max), sy(events.len() as f64));
        let _ = writeln!(
            out,
            r#"    <path d="{step}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#
        );

        let pts: Vec<String> = curve
            .iter()
            .map(|&(t, m)| format!("{:.2},{:.2}", sx(t), sy(m)))
            .collect();
        let _ = writeln!(
            out,
            r#"    <polyline points="{}" fill="none" stroke="firebrick" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
