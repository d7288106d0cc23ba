use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use orcas::causality::estimate_causality;
use orcas::domain::{DefectRecord, FailureMode};
use orcas::evidence::Gate;
use orcas::growth::{SrgmModel, DEFAULT_STABILITY_THRESHOLD};
use orcas::io::csv_import::defects_from_csv;
use orcas::io::history::{fit_history, FailureHistory};
use orcas::io::{
    emit_report, load_bundle, to_canonical_json, AssessmentReport, LoadOptions, MatrixOverride,
    ReportFormat,
};
use orcas::{run_assessment, Execution};

#[derive(Parser)]
#[command(name = "orcas", version)]
#[command(
    about = "Failure-mode probabilities from classified defects, with evidence-based confidence gating"
)]
struct Cli {
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an assessment directory without computing anything.
    Validate {
        dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the full assessment. Exit status 0 = proceed, 2 = defer to BAHAMAS.
    Assess {
        dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Causality matrix tools.
    Causality {
        #[command(subcommand)]
        command: CausalityCommand,
    },
    /// Reliability growth model tools.
    Srgm {
        #[command(subcommand)]
        command: SrgmCommand,
    },
    /// Re-render a saved json assessment.
    Report {
        assessment: PathBuf,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert a defects CSV into defects.json.
    ConvertDefects {
        csv: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CausalityCommand {
    /// Estimate a matrix from a labeled corpus.
    Build {
        corpus: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SrgmCommand {
    /// Fit a growth model to a failure history.
    Fit {
        history: PathBuf,
        #[arg(long, default_value = "go")]
        model: SrgmModel,
        #[arg(long)]
        stability_windows: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_STABILITY_THRESHOLD)]
        stability_threshold: f64,
        #[arg(long, default_value_t = 50)]
        curve_samples: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct Overrides {
    /// builtin, a matrix file, or corpus:<file>.
    #[arg(long)]
    matrix: Option<MatrixOverride>,
    /// Comma-separated failure modes to treat as not applicable, e.g. B or B,D.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    exclude_modes: Option<Vec<FailureMode>>,
    #[arg(long)]
    confidence_threshold: Option<f64>,
    /// Fill absent causality rows with a uniform distribution (flagged in the report).
    #[arg(long)]
    uniform_missing_rows: bool,
}

impl Overrides {
    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            matrix: self.matrix.clone(),
            exclude_modes: self
                .exclude_modes
                .as_ref()
                .map(|m| m.iter().copied().collect::<BTreeSet<_>>()),
            confidence_threshold: self.confidence_threshold,
            uniform_missing_rows: self.uniform_missing_rows,
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Validate { dir, overrides } => {
            let bundle = load_bundle(&dir, &overrides.load_options())?;
            println!(
                "ok: {} defects, effort {} {:?}, {} RTM entries, {} TCA slots",
                bundle.defects.len(),
                bundle.effort.total_effort(),
                bundle.effort.unit(),
                bundle.rtm.len(),
                bundle.tca.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Assess {
            dir,
            overrides,
            format,
            output,
        } => {
            let bundle = load_bundle(&dir, &overrides.load_options())?;
            let report = run_assessment(&bundle, exec)?;
            write_output(output.as_deref(), &emit_report(&report, format))?;
            Ok(match report.gate() {
                Gate::Proceed => ExitCode::SUCCESS,
                Gate::DeferToBahamas => {
                    eprintln!(
                        "assessment confidence {:.4} is below {:.4}: defer to BAHAMAS",
                        report.evidence.confidence, report.evidence.threshold
                    );
                    ExitCode::from(2)
                }
            })
        }
        Command::Causality {
            command: CausalityCommand::Build { corpus, output },
        } => {
            let text = fs::read_to_string(&corpus)
                .with_context(|| format!("reading {}", corpus.display()))?;
            let records: Vec<DefectRecord> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", corpus.display()))?;
            let name = corpus
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let matrix = estimate_causality(&records, format!("corpus:{name}"))?;
            write_output(output.as_deref(), to_canonical_json(&matrix).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Srgm {
            command:
                SrgmCommand::Fit {
                    history,
                    model,
                    stability_windows,
                    stability_threshold,
                    curve_samples,
                    output,
                },
        } => {
            let history = FailureHistory::load(&history)?;
            let report = fit_history(
                &history,
                model,
                stability_windows,
                stability_threshold,
                curve_samples,
                exec,
            )?;
            if !report.fit.converged {
                eprintln!(
                    "warning: fit did not converge: {}",
                    report.fit.diagnostic.as_deref().unwrap_or("no diagnostic")
                );
            }
            write_output(output.as_deref(), to_canonical_json(&report).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report {
            assessment,
            format,
            output,
        } => {
            let text = fs::read_to_string(&assessment)
                .with_context(|| format!("reading {}", assessment.display()))?;
            let report: AssessmentReport = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", assessment.display()))?;
            write_output(output.as_deref(), &emit_report(&report, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConvertDefects { csv, output } => {
            let file =
                fs::File::open(&csv).with_context(|| format!("opening {}", csv.display()))?;
            let defects = defects_from_csv(file)?;
            if defects.is_empty() {
                bail!("{} holds no defect rows", csv.display());
            }
            let mut text = serde_json::to_string_pretty(&defects)?;
            text.push('\n');
            write_output(output.as_deref(), text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // Exit status 2 is reserved for the confidence gate, so usage errors use 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
