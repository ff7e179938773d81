//! `exmine` — event-log exception analysis from the command line.
//!
//! Subcommands: `analyze` runs the whole pipeline and writes a report
//! bundle, `variants` prints the ranked variant table of a log, `classify`
//! emits the per-case exception classification, `synth` generates a
//! synthetic log with known injected exceptions.
//!
//! Exit codes: 0 on success, 1 on any input or processing error, 2 when an
//! analysis completed but no scenario was eligible for testing.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use exmine_core::log::{build_traces, extract_variants, parse_event_log_path, LogSchema, Timestamp};
use exmine_core::pipeline::GroupingPolicy;
use exmine_core::report::{classify_csv, run_pipeline, variants_csv, DurationUnit, RunConfig};
use exmine_core::scenario::{assign_scenarios, parse_policy, OutcomePolicy};
use exmine_core::synth;

#[derive(Parser)]
#[command(name = "exmine", version, about = "Business-process event-log exception analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SchemaArgs {
    /// Case-id column name
    #[arg(long, default_value = "case_id")]
    col_case: String,
    /// Activity column name
    #[arg(long, default_value = "activity")]
    col_activity: String,
    /// Timestamp column name
    #[arg(long, default_value = "timestamp")]
    col_timestamp: String,
    /// Extra column to keep as a case attribute (repeatable)
    #[arg(long = "attr")]
    attrs: Vec<String>,
}

impl SchemaArgs {
    fn schema(&self) -> LogSchema {
        LogSchema {
            case_column: self.col_case.clone(),
            activity_column: self.col_activity.clone(),
            timestamp_column: self.col_timestamp.clone(),
            attribute_columns: self.attrs.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis and write the report bundle
    Analyze {
        /// Event-log CSV
        #[arg(long)]
        log: PathBuf,
        /// Process-model file (directly-follows edges)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Outcome-policy file
        #[arg(long)]
        outcome: Option<PathBuf>,
        /// Significance level for direction calls
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Minimum eligible group size (inclusive)
        #[arg(long, default_value_t = 26)]
        min_group: usize,
        /// Maximum simultaneous exception types per included case
        #[arg(long, default_value_t = 2)]
        max_types: usize,
        /// Number of top variants to report
        #[arg(long, default_value_t = 15)]
        top: usize,
        /// Display unit for durations (seconds|minutes|hours|days|weeks)
        #[arg(long, default_value = "days")]
        unit: String,
        /// Output directory for the report bundle
        #[arg(long)]
        out: PathBuf,
        /// Keep only cases completed at or after this instant (RFC 3339 or epoch seconds)
        #[arg(long)]
        completed_from: Option<String>,
        /// Keep only cases completed before this instant (RFC 3339 or epoch seconds)
        #[arg(long)]
        completed_to: Option<String>,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Print the ranked path-variant table of a log
    Variants {
        #[arg(long)]
        log: PathBuf,
        /// Number of variants to print
        #[arg(long, default_value_t = 15)]
        top: usize,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Emit the per-case exception classification as CSV
    Classify {
        #[arg(long)]
        log: PathBuf,
        /// Outcome-policy file
        #[arg(long)]
        outcome: Option<PathBuf>,
        /// Process-model file
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        schema: SchemaArgs,
    },
    /// Generate a synthetic event log with injected exceptions
    Synth {
        /// Generator configuration file
        #[arg(long)]
        config: PathBuf,
        /// Seed override (defaults to the seed in the configuration)
        #[arg(long)]
        seed: Option<u64>,
        /// Output log CSV
        #[arg(long)]
        out: PathBuf,
        /// Output ground-truth CSV
        #[arg(long)]
        truth: PathBuf,
    },
}

fn parse_instant(text: &str) -> anyhow::Result<Timestamp> {
    if let Ok(seconds) = text.parse::<i64>() {
        return Timestamp::from_epoch_seconds(seconds)
            .with_context(|| format!("epoch seconds out of range: {text}"));
    }
    Timestamp::parse_rfc3339(text).with_context(|| format!("not a timestamp: {text}"))
}

fn load_outcome(path: &Option<PathBuf>) -> anyhow::Result<OutcomePolicy> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading outcome policy {}", p.display()))?;
            Ok(parse_policy(&text)?)
        }
        None => Ok(OutcomePolicy::LastActivity),
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            log,
            model,
            outcome,
            alpha,
            min_group,
            max_types,
            top,
            unit,
            out,
            completed_from,
            completed_to,
            schema,
        } => {
            if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
                bail!("alpha must be in (0, 1)");
            }
            if min_group == 0 || max_types == 0 || top == 0 {
                bail!("--min-group, --max-types and --top must be at least 1");
            }
            let unit = DurationUnit::parse(&unit)
                .with_context(|| format!("unknown duration unit '{unit}'"))?;
            let config = RunConfig {
                log_path: log,
                model_path: model,
                outcome_path: outcome,
                schema: schema.schema(),
                policy: GroupingPolicy { max_types, min_group_size: min_group, alpha },
                top_k: top,
                unit,
                out_dir: out,
                completed_from: completed_from.as_deref().map(parse_instant).transpose()?,
                completed_to: completed_to.as_deref().map(parse_instant).transpose()?,
            };
            let summary = run_pipeline(&config)?;
            println!(
                "analyzed {} cases ({} events); mean throughput {} {}",
                summary.case_count,
                summary.event_count,
                exmine_core::report::sig6(summary.mean_throughput_seconds / unit.seconds()),
                unit.label()
            );
            println!("report bundle written to {}", summary.out_dir.display());
            if summary.any_analyzed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("no scenario was eligible for statistical analysis");
                Ok(ExitCode::from(2))
            }
        }
        Command::Variants { log, top, out, schema } => {
            if top == 0 {
                bail!("--top must be at least 1");
            }
            let parsed = parse_event_log_path(&log, &schema.schema())?;
            let traces = build_traces(&parsed)?;
            let variants = extract_variants(&traces);
            let below = if variants.is_empty() {
                0.0
            } else {
                variants.iter().filter(|v| v.case_share < 0.01).count() as f64
                    / variants.len() as f64
            };
            emit(&out, &variants_csv(&variants, top))?;
            eprintln!(
                "{} variants; share of variants below 1% of cases: {}",
                variants.len(),
                exmine_core::report::sig6(below)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { log, outcome, model, out, schema } => {
            let parsed = parse_event_log_path(&log, &schema.schema())?;
            let traces = build_traces(&parsed)?;
            let policy = load_outcome(&outcome)?;
            let model = match model {
                Some(path) => Some(exmine_core::conformance::parse_model_path(&path)?),
                None => None,
            };
            let scenarios = assign_scenarios(traces, &policy)?;
            emit(&out, &classify_csv(&scenarios, model.as_ref()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth { config, seed, out, truth } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading synth config {}", config.display()))?;
            let mut parsed = synth::parse_config(&text)?;
            if let Some(seed) = seed {
                parsed.seed = seed;
            }
            let (log, truths) = synth::generate_log(&parsed)?;
            std::fs::write(&out, synth::write_log_csv(&log))
                .with_context(|| format!("writing {}", out.display()))?;
            std::fs::write(&truth, synth::write_truth_csv(&truths))
                .with_context(|| format!("writing {}", truth.display()))?;
            println!(
                "generated {} cases ({} events) into {}",
                log.cases.len(),
                log.event_count(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
