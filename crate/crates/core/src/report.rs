//! End-to-end run orchestration and report rendering.
//!
//! One run produces `report.md`, a machine-readable `summary.json` and a
//! `tables/` directory of CSVs: descriptives, scenario path counts,
//! expected/unexpected path counts, type frequencies, the two direction
//! tables and the ranked-variant plot data. Rendering is pure and
//! byte-deterministic: identical inputs and configuration yield identical
//! bundles. Every number shown in the markdown also appears in a CSV.
//!
//! All numeric output is formatted at six significant digits with
//! round-half-even rounding (the rounding Rust's float formatter performs).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::conformance::{classify_expectedness, Expectedness, ProcessModel};
use crate::error::{Error, Result};
use crate::log::{
    build_traces, extract_variants, filter_by_completion, parse_event_log_path, top_k_variants,
    LogSchema, Timestamp, TopVariants, Trace,
};
use crate::pipeline::{
    analyze_scenarios, AnalysisResults, CellDirection, GroupingPolicy, ScenarioAnalysis,
};
use crate::scenario::{assign_scenarios, parse_policy, OutcomePolicy, Scenario, UNLABELED};
use crate::stats::GroupStats;
use crate::Real;

/// Display unit for durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DurationUnit {
    Seconds,
    Minutes,
    Hours,
    Days,
    Weeks,
}

impl DurationUnit {
    pub fn seconds(self) -> Real {
        match self {
            DurationUnit::Seconds => 1.0,
            DurationUnit::Minutes => 60.0,
            DurationUnit::Hours => 3_600.0,
            DurationUnit::Days => 86_400.0,
            DurationUnit::Weeks => 604_800.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DurationUnit::Seconds => "seconds",
            DurationUnit::Minutes => "minutes",
            DurationUnit::Hours => "hours",
            DurationUnit::Days => "days",
            DurationUnit::Weeks => "weeks",
        }
    }

    pub fn parse(text: &str) -> Option<DurationUnit> {
        match text.to_ascii_lowercase().as_str() {
            "seconds" | "s" => Some(DurationUnit::Seconds),
            "minutes" | "m" => Some(DurationUnit::Minutes),
            "hours" | "h" => Some(DurationUnit::Hours),
            "days" | "d" => Some(DurationUnit::Days),
            "weeks" | "w" => Some(DurationUnit::Weeks),
            _ => None,
        }
    }
}

/// Format at six significant digits, round-half-even.
///
/// Plain decimal notation is used while the exponent stays in a readable
/// range; scientific notation (as produced by the standard formatter)
/// otherwise. Zero renders as `0`.
pub fn sig6(x: Real) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let formatted = format!("{:.5e}", x);
    let (mantissa, exponent) = formatted.split_once('e').expect("scientific notation");
    let exp: i32 = exponent.parse().expect("exponent");
    if !(-5..15).contains(&exp) {
        return formatted;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 6);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            out.push_str(&digits);
            for _ in 0..(point - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..point]);
            out.push('.');
            out.push_str(&digits[point..]);
        }
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut line =
        fields.iter().map(|f| quote(f)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn join_path(path: &[String]) -> String {
    path.join(";")
}

/// Full configuration of one `analyze` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub log_path: PathBuf,
    pub model_path: Option<PathBuf>,
    pub outcome_path: Option<PathBuf>,
    pub schema: LogSchema,
    pub policy: GroupingPolicy,
    pub top_k: usize,
    pub unit: DurationUnit,
    pub out_dir: PathBuf,
    pub completed_from: Option<Timestamp>,
    pub completed_to: Option<Timestamp>,
}

impl RunConfig {
    pub fn new(log_path: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            log_path: log_path.into(),
            model_path: None,
            outcome_path: None,
            schema: LogSchema::default(),
            policy: GroupingPolicy::default(),
            top_k: 15,
            unit: DurationUnit::Days,
            out_dir: out_dir.into(),
            completed_from: None,
            completed_to: None,
        }
    }
}

/// One rendered file of the bundle, path relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub path: String,
    pub bytes: Vec<u8>,
}

/// Output format selector for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    CsvBundle,
}

/// Everything the renderer needs, already analyzed.
#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub log_name: String,
    pub event_count: usize,
    pub case_count: usize,
    pub first_start: Timestamp,
    pub last_end: Timestamp,
    pub throughputs: Vec<Real>,
    pub top: TopVariants,
    pub scenarios: Vec<Scenario>,
    pub model: Option<ProcessModel>,
    pub results: AnalysisResults,
    pub unit: DurationUnit,
}

/// Outcome of a full run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub case_count: usize,
    pub event_count: usize,
    pub mean_throughput_seconds: Real,
    /// False when no scenario produced any statistical test; the CLI maps
    /// this to exit code 2.
    pub any_analyzed: bool,
}

/// Execute the whole pipeline for `config` and write the report bundle.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    let log = parse_event_log_path(&config.log_path, &config.schema)?;
    let policy = match &config.outcome_path {
        Some(path) => parse_policy(&std::fs::read_to_string(path)?)?,
        None => OutcomePolicy::LastActivity,
    };
    let model = match &config.model_path {
        Some(path) => Some(crate::conformance::parse_model_path(path)?),
        None => None,
    };
    let traces = build_traces(&log)?;
    let traces = filter_by_completion(traces, config.completed_from, config.completed_to);
    if traces.is_empty() {
        return Err(Error::Report("no cases inside the completion window".into()));
    }
    let inputs = analyze_traces(
        traces,
        &policy,
        model,
        &config.policy,
        config.top_k,
        config.unit,
        log.source.name.clone(),
        log.event_count(),
    )?;
    let bundle = render_bundle(&inputs)?;
    write_bundle(&config.out_dir, &bundle)?;
    let mean = inputs.throughputs.iter().sum::<Real>() / inputs.case_count as Real;
    Ok(RunSummary {
        out_dir: config.out_dir.clone(),
        files: bundle.iter().map(|f| f.path.clone()).collect(),
        case_count: inputs.case_count,
        event_count: inputs.event_count,
        mean_throughput_seconds: mean,
        any_analyzed: inputs.results.any_analyzed(),
    })
}

/// Analyze already-built traces into renderer inputs. Split out so tests
/// and in-memory callers can bypass the filesystem.
#[allow(clippy::too_many_arguments)]
pub fn analyze_traces(
    traces: Vec<Trace>,
    outcome: &OutcomePolicy,
    model: Option<ProcessModel>,
    policy: &GroupingPolicy,
    top_k: usize,
    unit: DurationUnit,
    log_name: String,
    event_count: usize,
) -> Result<ReportInputs> {
    if traces.is_empty() {
        return Err(Error::EmptyLog);
    }
    let case_count = traces.len();
    let first_start = traces.iter().map(|t| t.start).min().expect("non-empty traces");
    let last_end = traces.iter().map(|t| t.end).max().expect("non-empty traces");
    let throughputs: Vec<Real> = traces.iter().map(|t| t.throughput).collect();
    let variants = extract_variants(&traces);
    let top = top_k_variants(&variants, top_k);
    let scenarios = assign_scenarios(traces, outcome)?;
    let results = analyze_scenarios(&scenarios, model.as_ref(), policy);
    Ok(ReportInputs {
        log_name,
        event_count,
        case_count,
        first_start,
        last_end,
        throughputs,
        top,
        scenarios,
        model,
        results,
        unit,
    })
}

/// Render the selected part of the bundle.
pub fn render_report(inputs: &ReportInputs, format: ReportFormat) -> Result<Vec<ReportFile>> {
    let all = render_bundle(inputs)?;
    Ok(match format {
        ReportFormat::Markdown => {
            all.into_iter().filter(|f| f.path.ends_with(".md")).collect()
        }
        ReportFormat::CsvBundle => {
            all.into_iter().filter(|f| !f.path.ends_with(".md")).collect()
        }
    })
}

/// Render the full bundle: markdown, summary JSON and all table CSVs.
pub fn render_bundle(inputs: &ReportInputs) -> Result<Vec<ReportFile>> {
    let file = |path: &str, bytes: Vec<u8>| ReportFile { path: path.to_string(), bytes };
    Ok(vec![
        file("tables/table1.csv", table1(inputs)),
        file("tables/table2.csv", table2(inputs)),
        file("tables/table3.csv", table3(inputs)),
        file("tables/table4.csv", table4(inputs)),
        file("tables/table5.csv", table5(inputs)),
        file("tables/table6.csv", table6(inputs)),
        file("tables/figure2.csv", figure2(inputs)),
        file("tables/hypotheses.csv", hypotheses_csv(inputs)),
        file("summary.json", summary_json(inputs)?),
        file("report.md", report_md(inputs)),
    ])
}

/// Write a rendered bundle under `out_dir`.
pub fn write_bundle(out_dir: &Path, bundle: &[ReportFile]) -> Result<()> {
    for file in bundle {
        let path = out_dir.join(&file.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, &file.bytes)?;
    }
    Ok(())
}

fn in_unit(seconds: Real, unit: DurationUnit) -> Real {
    seconds / unit.seconds()
}

fn date_of(ts: Timestamp) -> String {
    ts.to_utc().format("%Y-%m-%d").to_string()
}

fn table1(inputs: &ReportInputs) -> Vec<u8> {
    let unit = inputs.unit;
    let stats = crate::stats::descriptive_stats(&inputs.throughputs)
        .expect("at least one trace");
    let mut out = csv_line(&[
        "log".into(),
        "start_date".into(),
        "end_date".into(),
        "cases".into(),
        "events".into(),
        format!("avg_throughput_{}", unit.label()),
        format!("std_throughput_{}", unit.label()),
        "variants_below_1pct_share".into(),
    ]);
    out.push_str(&csv_line(&[
        inputs.log_name.clone(),
        date_of(inputs.first_start),
        date_of(inputs.last_end),
        inputs.case_count.to_string(),
        inputs.event_count.to_string(),
        sig6(in_unit(stats.mean, unit)),
        sig6(in_unit(stats.std, unit)),
        sig6(inputs.top.tail_below_one_percent),
    ]));
    out.into_bytes()
}

fn table2(inputs: &ReportInputs) -> Vec<u8> {
    let mut out = csv_line(&[
        "scenario".into(),
        "type_of_path".into(),
        "nr_of_paths".into(),
        "avg_cases_per_path".into(),
    ]);
    for scenario in &inputs.scenarios {
        let normal_count = scenario
            .variants
            .iter()
            .find(|v| v.path == scenario.normal_flow)
            .map(|v| v.case_count)
            .unwrap_or(0);
        out.push_str(&csv_line(&[
            scenario.label.clone(),
            "normal".into(),
            "1".into(),
            sig6(normal_count as Real),
        ]));
        let exception_paths = scenario.variants.len().saturating_sub(1);
        let exception_cases = scenario.case_count() - normal_count;
        let avg = if exception_paths == 0 {
            0.0
        } else {
            exception_cases as Real / exception_paths as Real
        };
        out.push_str(&csv_line(&[
            scenario.label.clone(),
            "exceptions".into(),
            exception_paths.to_string(),
            sig6(avg),
        ]));
    }
    out.into_bytes()
}

fn table3(inputs: &ReportInputs) -> Vec<u8> {
    let mut out = csv_line(&[
        "scenario".into(),
        "type_of_path".into(),
        "nr_of_paths".into(),
        "avg_cases_per_path".into(),
    ]);
    let Some(model) = &inputs.model else {
        return out.into_bytes();
    };
    for scenario in &inputs.scenarios {
        let mut rows: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for variant in &scenario.variants {
            let class = if variant.path == scenario.normal_flow {
                "normal"
            } else {
                match classify_expectedness(&variant.path, model) {
                    Expectedness::Expected => "expected",
                    Expectedness::Unexpected => "unexpected",
                }
            };
            let entry = rows.entry(class).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += variant.case_count;
        }
        for class in ["normal", "expected", "unexpected"] {
            if let Some((paths, cases)) = rows.get(class) {
                out.push_str(&csv_line(&[
                    scenario.label.clone(),
                    class.into(),
                    paths.to_string(),
                    sig6(*cases as Real / *paths as Real),
                ]));
            }
        }
    }
    out.into_bytes()
}

fn table4(inputs: &ReportInputs) -> Vec<u8> {
    let mut out = csv_line(&[
        "scenario".into(),
        "exception_type".into(),
        "pct_exception_paths".into(),
        "pct_exception_cases".into(),
    ]);
    for scenario in &inputs.results.scenarios {
        for row in &scenario.type_frequency {
            out.push_str(&csv_line(&[
                scenario.label.clone(),
                row.ty.name().into(),
                sig6(row.pct_paths * 100.0),
                sig6(row.pct_cases * 100.0),
            ]));
        }
    }
    out.into_bytes()
}

fn stats_fields(stats: &GroupStats<Real>, unit: DurationUnit) -> [String; 4] {
    [
        sig6(in_unit(stats.mean, unit)),
        sig6(in_unit(stats.std, unit)),
        stats.skewness.map(sig6).unwrap_or_default(),
        stats.kurtosis.map(sig6).unwrap_or_default(),
    ]
}

fn table5(inputs: &ReportInputs) -> Vec<u8> {
    let unit = inputs.unit;
    let mut out = csv_line(&[
        "scenario".into(),
        "instances_analyzed".into(),
        format!("avg_throughput_{}", unit.label()),
        format!("std_throughput_{}", unit.label()),
        "skewness".into(),
        "kurtosis".into(),
        "group".into(),
        "n".into(),
        "direction".into(),
        "p_adjusted".into(),
    ]);
    if inputs.model.is_none() {
        return out.into_bytes();
    }
    for scenario in &inputs.results.scenarios {
        let Some(exp) = &scenario.expectedness else { continue };
        let stats = stats_fields(&exp.descriptives, unit);
        for cell in &exp.cells {
            let is_na = cell.direction == CellDirection::NotApplicable;
            out.push_str(&csv_line(&[
                scenario.label.clone(),
                exp.instances_analyzed.to_string(),
                stats[0].clone(),
                stats[1].clone(),
                stats[2].clone(),
                stats[3].clone(),
                cell.group.clone(),
                cell.n.to_string(),
                cell.direction.as_str().into(),
                if is_na { String::new() } else { sig6(cell.p_adjusted) },
            ]));
        }
    }
    out.into_bytes()
}

fn table6(inputs: &ReportInputs) -> Vec<u8> {
    let unit = inputs.unit;
    let mut out = csv_line(&[
        "scenario".into(),
        "instances_analyzed".into(),
        format!("avg_throughput_{}", unit.label()),
        format!("std_throughput_{}", unit.label()),
        "skewness".into(),
        "kurtosis".into(),
        "jarque_bera_p".into(),
        "type_set".into(),
        "n".into(),
        "direction".into(),
        "p_adjusted".into(),
        "omnibus_h".into(),
        "omnibus_p".into(),
    ]);
    for scenario in &inputs.results.scenarios {
        let Some(analysis) = &scenario.type_analysis else { continue };
        if analysis.cells.is_empty() {
            continue;
        }
        let stats = stats_fields(&analysis.descriptives, unit);
        let jb = analysis.normality.as_ref().map(|t| sig6(t.p_raw)).unwrap_or_default();
        let (h, p) = analysis
            .omnibus
            .as_ref()
            .map(|o| (sig6(o.statistic), sig6(o.p_raw)))
            .unwrap_or_default();
        for cell in &analysis.cells {
            out.push_str(&csv_line(&[
                scenario.label.clone(),
                analysis.instances_analyzed.to_string(),
                stats[0].clone(),
                stats[1].clone(),
                stats[2].clone(),
                stats[3].clone(),
                jb.clone(),
                cell.group.clone(),
                cell.n.to_string(),
                cell.direction.as_str().into(),
                sig6(cell.p_adjusted),
                h.clone(),
                p.clone(),
            ]));
        }
    }
    out.into_bytes()
}

fn figure2(inputs: &ReportInputs) -> Vec<u8> {
    let mut out = csv_line(&["rank".into(), "path".into(), "case_share".into()]);
    for entry in &inputs.top.entries {
        out.push_str(&csv_line(&[
            entry.rank.to_string(),
            join_path(&entry.path),
            sig6(entry.case_share),
        ]));
    }
    out.into_bytes()
}

fn hypotheses_csv(inputs: &ReportInputs) -> Vec<u8> {
    let mut out = csv_line(&[
        "hypothesis".into(),
        "statement".into(),
        "status".into(),
        "detail".into(),
    ]);
    for verdict in &inputs.results.verdicts {
        for line in &verdict.evidence {
            out.push_str(&csv_line(&[
                verdict.hypothesis.clone(),
                verdict.statement.clone(),
                verdict.status.as_str().into(),
                line.clone(),
            ]));
        }
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct SummaryExclusion<'a> {
    key: &'a str,
    reason: &'a str,
    cases: usize,
}

#[derive(Serialize)]
struct SummaryScenario<'a> {
    label: &'a str,
    total_cases: usize,
    eligible_cases: usize,
    excluded_cases: usize,
    skipped_cases: usize,
    skip_reason: Option<&'a str>,
    /// `None` without a model; a normal flow outside the model is reported,
    /// not rejected.
    normal_flow_expected: Option<&'static str>,
    exclusions: Vec<SummaryExclusion<'a>>,
}

#[derive(Serialize)]
struct SummaryVerdict<'a> {
    hypothesis: &'a str,
    statement: &'a str,
    status: &'a str,
    evidence: &'a [String],
}

#[derive(Serialize)]
struct SummaryPolicy {
    max_types: usize,
    min_group_size: usize,
    alpha: Real,
}

#[derive(Serialize)]
struct Summary<'a> {
    log: &'a str,
    cases: usize,
    events: usize,
    unit: &'a str,
    model_supplied: bool,
    policy: SummaryPolicy,
    scenarios: Vec<SummaryScenario<'a>>,
    verdicts: Vec<SummaryVerdict<'a>>,
}

fn summary_json(inputs: &ReportInputs) -> Result<Vec<u8>> {
    let scenarios = inputs
        .results
        .scenarios
        .iter()
        .map(|s| SummaryScenario {
            label: &s.label,
            total_cases: s.total_cases,
            eligible_cases: s.eligible_cases,
            excluded_cases: s.excluded_cases,
            skipped_cases: s.skipped_cases,
            skip_reason: s.skip_reason.as_deref(),
            normal_flow_expected: s.normal_flow_expected.map(|e| e.as_str()),
            exclusions: s
                .exclusions
                .iter()
                .map(|e| SummaryExclusion { key: &e.key, reason: &e.reason, cases: e.cases })
                .collect(),
        })
        .collect();
    let verdicts = inputs
        .results
        .verdicts
        .iter()
        .map(|v| SummaryVerdict {
            hypothesis: &v.hypothesis,
            statement: &v.statement,
            status: v.status.as_str(),
            evidence: &v.evidence,
        })
        .collect();
    let summary = Summary {
        log: &inputs.log_name,
        cases: inputs.case_count,
        events: inputs.event_count,
        unit: inputs.unit.label(),
        model_supplied: inputs.model.is_some(),
        policy: SummaryPolicy {
            max_types: inputs.results.policy.max_types,
            min_group_size: inputs.results.policy.min_group_size,
            alpha: inputs.results.policy.alpha,
        },
        scenarios,
        verdicts,
    };
    let mut bytes = serde_json::to_vec_pretty(&summary)
        .map_err(|e| Error::Report(format!("summary serialization: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn md_row(cells: &[String]) -> String {
    format!("| {} |\n", cells.join(" | "))
}

fn md_header(cells: &[&str]) -> String {
    let mut out = md_row(&cells.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    out.push_str(&format!("|{}\n", "---|".repeat(cells.len())));
    out
}

fn scenario_skip_note(scenario: &ScenarioAnalysis) -> Option<String> {
    scenario
        .skip_reason
        .as_ref()
        .map(|reason| format!("- `{}`: skipped — {}\n", scenario.label, reason))
}

fn report_md(inputs: &ReportInputs) -> Vec<u8> {
    let unit = inputs.unit;
    let unit_label = unit.label();
    let mut md = String::new();
    md.push_str("# Event-log exception analysis\n\n");
    md.push_str(&format!(
        "Source `{}`: {} cases, {} events, {} to {}.\n\n",
        inputs.log_name,
        inputs.case_count,
        inputs.event_count,
        date_of(inputs.first_start),
        date_of(inputs.last_end),
    ));
    md.push_str(&format!(
        "Policy: alpha {}, minimum group size {} (groups must be larger than {}), at most {} simultaneous exception types. Durations in {}.\n\n",
        inputs.results.policy.alpha,
        inputs.results.policy.min_group_size,
        inputs.results.policy.min_group_size - 1,
        inputs.results.policy.max_types,
        unit_label,
    ));

    // descriptives
    let stats = crate::stats::descriptive_stats(&inputs.throughputs).expect("non-empty");
    md.push_str("## Descriptive statistics\n\n");
    md.push_str(&md_header(&[
        "cases",
        "events",
        &format!("avg throughput ({unit_label})"),
        &format!("std throughput ({unit_label})"),
    ]));
    md.push_str(&md_row(&[
        inputs.case_count.to_string(),
        inputs.event_count.to_string(),
        sig6(in_unit(stats.mean, unit)),
        sig6(in_unit(stats.std, unit)),
    ]));
    md.push('\n');

    // most frequent paths
    md.push_str("## Most frequent paths\n\n");
    md.push_str(&md_header(&["rank", "path", "case share"]));
    for entry in &inputs.top.entries {
        md.push_str(&md_row(&[
            entry.rank.to_string(),
            format!("`{}`", join_path(&entry.path)),
            sig6(entry.case_share),
        ]));
    }
    md.push_str(&format!(
        "\nShare of variants below 1% of cases: {}.\n\n",
        sig6(inputs.top.tail_below_one_percent)
    ));

    // scenarios
    md.push_str("## Scenarios\n\n");
    md.push_str(&md_header(&["scenario", "type of path", "nr of paths", "avg cases per path"]));
    for scenario in &inputs.scenarios {
        let normal_count = scenario
            .variants
            .iter()
            .find(|v| v.path == scenario.normal_flow)
            .map(|v| v.case_count)
            .unwrap_or(0);
        md.push_str(&md_row(&[
            scenario.label.clone(),
            "normal".into(),
            "1".into(),
            sig6(normal_count as Real),
        ]));
        let exception_paths = scenario.variants.len().saturating_sub(1);
        let exception_cases = scenario.case_count() - normal_count;
        let avg =
            if exception_paths == 0 { 0.0 } else { exception_cases as Real / exception_paths as Real };
        md.push_str(&md_row(&[
            scenario.label.clone(),
            "exceptions".into(),
            exception_paths.to_string(),
            sig6(avg),
        ]));
    }
    md.push('\n');

    // expected/unexpected path counts
    if inputs.model.is_some() {
        md.push_str("## Expected and unexpected exception paths\n\n");
        let bytes = table3(inputs);
        md.push_str(&csv_as_md_table(&bytes));
        md.push('\n');
        for scenario in &inputs.results.scenarios {
            if scenario.normal_flow_expected == Some(Expectedness::Unexpected) {
                md.push_str(&format!(
                    "Note: the normal flow of `{}` is not described by the process model.\n\n",
                    scenario.label
                ));
            }
        }
    } else {
        md.push_str("No model supplied; expected/unexpected analysis not applicable.\n\n");
    }

    // type frequencies
    md.push_str("## Relative frequency of exception types (share of exception paths, %)\n\n");
    let mut header: Vec<&str> = vec!["scenario"];
    let names: Vec<&str> =
        crate::classify::ALL_TYPES.iter().map(|t| t.name()).collect();
    header.extend(names.iter());
    md.push_str(&md_header(&header));
    for scenario in &inputs.results.scenarios {
        if scenario.type_frequency.is_empty() {
            continue;
        }
        let mut row = vec![scenario.label.clone()];
        row.extend(scenario.type_frequency.iter().map(|r| sig6(r.pct_paths * 100.0)));
        md.push_str(&md_row(&row));
    }
    md.push('\n');

    // expectedness directions
    if inputs.model.is_some() {
        md.push_str("## Expected and unexpected exceptions vs. throughput\n\n");
        md.push_str("Legend: ↑ longer, ↓ shorter, ↔ no significant difference, blank not applicable.\n\n");
        md.push_str(&md_header(&[
            "scenario",
            "instances analyzed",
            &format!("avg ({unit_label})"),
            &format!("std ({unit_label})"),
            "skewness",
            "kurtosis",
            "expected",
            "unexpected",
            "unexpected vs expected",
        ]));
        for scenario in &inputs.results.scenarios {
            let Some(exp) = &scenario.expectedness else { continue };
            let stats = stats_fields(&exp.descriptives, unit);
            let arrow = |group: &str| {
                exp.cells
                    .iter()
                    .find(|c| c.group == group)
                    .map(|c| c.direction.arrow().to_string())
                    .unwrap_or_default()
            };
            md.push_str(&md_row(&[
                scenario.label.clone(),
                exp.instances_analyzed.to_string(),
                stats[0].clone(),
                stats[1].clone(),
                stats[2].clone(),
                stats[3].clone(),
                arrow("expected"),
                arrow("unexpected"),
                arrow("unexpected_vs_expected"),
            ]));
        }
        md.push('\n');
    }

    // per-type directions
    md.push_str("## Exception types vs. throughput\n\n");
    let screened: Vec<&ScenarioAnalysis> = inputs
        .results
        .scenarios
        .iter()
        .filter(|s| {
            s.type_analysis
                .as_ref()
                .and_then(|t| t.normality.as_ref())
                .is_some_and(|jb| jb.p_raw < 0.01)
        })
        .collect();
    if !screened.is_empty() {
        md.push_str(&format!(
            "Normality screen: throughput deviates from normality (Jarque–Bera p < 0.01) in {} of {} analyzed scenario(s); all comparisons below are rank-based.\n\n",
            screened.len(),
            inputs
                .results
                .scenarios
                .iter()
                .filter(|s| s.type_analysis.is_some())
                .count()
        ));
    }
    md.push_str("Legend: ↑ longer, ↓ shorter, ↔ no significant difference.\n\n");
    md.push_str(&md_header(&[
        "scenario",
        "instances analyzed",
        &format!("avg ({unit_label})"),
        &format!("std ({unit_label})"),
        "skewness",
        "kurtosis",
        "type set",
        "n",
        "direction",
        "p (adjusted)",
    ]));
    for scenario in &inputs.results.scenarios {
        let Some(analysis) = &scenario.type_analysis else { continue };
        let stats = stats_fields(&analysis.descriptives, unit);
        for cell in &analysis.cells {
            md.push_str(&md_row(&[
                scenario.label.clone(),
                analysis.instances_analyzed.to_string(),
                stats[0].clone(),
                stats[1].clone(),
                stats[2].clone(),
                stats[3].clone(),
                cell.group.clone(),
                cell.n.to_string(),
                cell.direction.arrow().to_string(),
                sig6(cell.p_adjusted),
            ]));
        }
    }
    md.push('\n');

    // hypotheses
    md.push_str("## Hypotheses\n\n");
    for verdict in &inputs.results.verdicts {
        md.push_str(&format!(
            "- **{}** ({}): **{}**\n",
            verdict.hypothesis, verdict.statement, verdict.status.as_str()
        ));
        for line in &verdict.evidence {
            md.push_str(&format!("  - {line}\n"));
        }
    }
    md.push('\n');

    // skips and exclusions
    let mut notes = String::new();
    for scenario in &inputs.results.scenarios {
        if let Some(note) = scenario_skip_note(scenario) {
            notes.push_str(&note);
        }
        for exclusion in &scenario.exclusions {
            notes.push_str(&format!(
                "- `{}`: excluded group `{}` ({} cases) — {}\n",
                scenario.label, exclusion.key, exclusion.cases, exclusion.reason
            ));
        }
    }
    if !notes.is_empty() {
        md.push_str("## Skipped scenarios and excluded groups\n\n");
        md.push_str(&notes);
        md.push('\n');
    }

    md.into_bytes()
}

/// Render a small CSV (as produced by the table functions) as a markdown
/// table; used to avoid stating the same numbers twice.
fn csv_as_md_table(bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes);
    let mut lines = text.lines();
    let mut out = String::new();
    if let Some(header) = lines.next() {
        let cells: Vec<&str> = header.split(',').collect();
        out.push_str(&md_header(&cells));
    }
    for line in lines {
        out.push_str(&md_row(&line.split(',').map(|s| s.to_string()).collect::<Vec<_>>()));
    }
    out
}

/// Per-case classification CSV (the `classify` subcommand output):
/// `case_id,scenario,types,alignable,expectedness`.
pub fn classify_csv(scenarios: &[Scenario], model: Option<&ProcessModel>) -> Vec<u8> {
    let mut out = csv_line(&[
        "case_id".into(),
        "scenario".into(),
        "types".into(),
        "alignable".into(),
        "expectedness".into(),
    ]);
    for scenario in scenarios {
        if scenario.label == UNLABELED {
            for trace in &scenario.traces {
                out.push_str(&csv_line(&[
                    trace.case_id.clone(),
                    UNLABELED.into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]));
            }
            continue;
        }
        let records = crate::pipeline::build_case_records(std::slice::from_ref(scenario), model);
        for record in &records {
            let types = record
                .profile
                .types
                .iter()
                .map(|t| t.name())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&csv_line(&[
                record.case_id.clone(),
                record.scenario.clone(),
                types,
                record.profile.alignable.to_string(),
                record.expectedness.map(|e| e.as_str().to_string()).unwrap_or_default(),
            ]));
        }
    }
    out.into_bytes()
}

/// Ranked variant table CSV (the `variants` subcommand output).
pub fn variants_csv(variants: &[crate::log::Variant], k: usize) -> Vec<u8> {
    let mut out = csv_line(&[
        "rank".into(),
        "path".into(),
        "case_count".into(),
        "case_share".into(),
    ]);
    for (idx, variant) in variants.iter().take(k).enumerate() {
        out.push_str(&csv_line(&[
            (idx + 1).to_string(),
            join_path(&variant.path),
            variant.case_count.to_string(),
            sig6(variant.case_share),
        ]));
    }
    out.into_bytes()
}
