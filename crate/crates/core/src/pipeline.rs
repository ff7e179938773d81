//! Grouping rules, per-scenario statistical tests and hypothesis verdicts.
//!
//! Per scenario, cases split into the normal group (empty exception
//! profile) and exception groups. Cases with more than the allowed number
//! of simultaneous exception types, unalignable cases, and undersized
//! groups are excluded and accounted for. Each eligible exception group is
//! compared against the normal group with Dunn's test in the pooled-rank
//! context of a Kruskal–Wallis omnibus, Bonferroni-adjusted over the
//! comparisons actually performed.
//!
//! Four hypotheses are aggregated over the per-scenario results:
//!
//! * H1 — paths with any exception take longer than the normal flow;
//! * H2 — unexpected exceptions take longer than expected ones;
//! * H3 — exception types that add activities lengthen throughput;
//! * H4 — exception types that remove activities shorten throughput.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::classify::{classify_path, type_set_label, ExceptionProfile, ExceptionType, ALL_TYPES};
use crate::conformance::{classify_expectedness, Expectedness, ProcessModel};
use crate::scenario::{Scenario, UNLABELED};
use crate::stats::{
    adjust_bonferroni, descriptive_stats, dunn_pairwise, jarque_bera, kruskal_wallis, Direction,
    GroupStats, TestResult,
};
use crate::Real;

/// Inclusion rules for group-based tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupingPolicy {
    /// Maximum number of simultaneous exception types per included case.
    pub max_types: usize,
    /// Minimum eligible group size, inclusive. The default of 26 realizes
    /// the "larger than 25" rule.
    pub min_group_size: usize,
    /// Significance level for direction calls, applied to adjusted p.
    pub alpha: Real,
}

impl Default for GroupingPolicy {
    fn default() -> Self {
        GroupingPolicy { max_types: 2, min_group_size: 26, alpha: 0.01 }
    }
}

/// Join of all per-case facts consumed by the analyses.
#[derive(Debug, Clone)]
pub struct CaseRecord {
    pub case_id: String,
    pub scenario: String,
    pub path: Vec<String>,
    pub profile: ExceptionProfile,
    pub expectedness: Option<Expectedness>,
    /// Seconds.
    pub throughput: Real,
}

/// Classify every case of every scenario against its scenario's normal
/// flow. Classification runs once per variant and fans out to cases.
pub fn build_case_records(scenarios: &[Scenario], model: Option<&ProcessModel>) -> Vec<CaseRecord> {
    let mut records = Vec::new();
    for scenario in scenarios {
        let throughput: BTreeMap<&str, Real> = scenario
            .traces
            .iter()
            .map(|t| (t.case_id.as_str(), t.throughput))
            .collect();
        for variant in &scenario.variants {
            let profile = classify_path(&variant.path, &scenario.normal_flow);
            let expectedness = model.map(|m| classify_expectedness(&variant.path, m));
            for case_id in &variant.case_ids {
                records.push(CaseRecord {
                    case_id: case_id.clone(),
                    scenario: scenario.label.clone(),
                    path: variant.path.clone(),
                    profile: profile.clone(),
                    expectedness,
                    throughput: *throughput.get(case_id.as_str()).expect("case in scenario"),
                });
            }
        }
    }
    records
}

/// How exception cases are keyed into groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupingMode {
    ByTypeSet,
    ByExpectedness,
    NormalVsException,
}

/// One group of throughput samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputGroup {
    pub key: String,
    /// Exception types of the group; empty for the normal group and for
    /// expectedness-keyed groups.
    pub types: BTreeSet<ExceptionType>,
    pub samples: Vec<Real>,
}

/// A group or filter bucket that did not make it into the tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub key: String,
    pub reason: String,
    pub cases: usize,
}

/// Outcome of applying the grouping policy to one scenario's cases.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedScenario {
    pub scenario: String,
    pub total_cases: usize,
    pub normal: ThroughputGroup,
    pub exception_groups: Vec<ThroughputGroup>,
    pub exclusions: Vec<Exclusion>,
    /// Set when the whole scenario is unusable (normal group too small);
    /// every case then counts as skipped.
    pub skip_reason: Option<String>,
}

impl GroupedScenario {
    /// `(eligible, excluded, skipped)`; the three always sum to
    /// `total_cases`.
    pub fn accounting(&self) -> (usize, usize, usize) {
        if self.skip_reason.is_some() {
            return (0, 0, self.total_cases);
        }
        let eligible = self.normal.samples.len()
            + self.exception_groups.iter().map(|g| g.samples.len()).sum::<usize>();
        let excluded = self.exclusions.iter().map(|e| e.cases).sum::<usize>();
        (eligible, excluded, self.total_cases - eligible - excluded)
    }
}

/// Split one scenario's cases into the normal group and keyed exception
/// groups under `policy`.
pub fn build_groups(
    cases: &[CaseRecord],
    policy: &GroupingPolicy,
    mode: GroupingMode,
) -> GroupedScenario {
    let scenario = cases.first().map(|c| c.scenario.clone()).unwrap_or_default();
    let mut normal_samples = Vec::new();
    let mut buckets: BTreeMap<String, (BTreeSet<ExceptionType>, Vec<Real>)> = BTreeMap::new();
    let mut filtered: BTreeMap<(String, String), usize> = BTreeMap::new();

    for case in cases {
        if case.profile.is_normal() {
            normal_samples.push(case.throughput);
            continue;
        }
        if !case.profile.alignable {
            *filtered
                .entry(("unalignable".into(), "path shares no activity with the normal flow".into()))
                .or_insert(0) += 1;
            continue;
        }
        if case.profile.types.len() > policy.max_types {
            *filtered
                .entry((
                    type_set_label(&case.profile.types),
                    format!("more than {} simultaneous exception types", policy.max_types),
                ))
                .or_insert(0) += 1;
            continue;
        }
        let (key, types) = match mode {
            GroupingMode::ByTypeSet => {
                (type_set_label(&case.profile.types), case.profile.types.clone())
            }
            GroupingMode::ByExpectedness => match case.expectedness {
                Some(e) => (e.as_str().to_string(), BTreeSet::new()),
                None => {
                    *filtered
                        .entry(("no-model".into(), "expectedness unavailable without a model".into()))
                        .or_insert(0) += 1;
                    continue;
                }
            },
            GroupingMode::NormalVsException => ("exception".to_string(), BTreeSet::new()),
        };
        let bucket = buckets.entry(key).or_insert_with(|| (types, Vec::new()));
        bucket.1.push(case.throughput);
    }

    let mut exclusions: Vec<Exclusion> =
        filtered.into_iter().map(|((key, reason), cases)| Exclusion { key, reason, cases }).collect();
    let mut exception_groups = Vec::new();
    for (key, (types, samples)) in buckets {
        if samples.len() < policy.min_group_size {
            exclusions.push(Exclusion {
                key,
                reason: format!(
                    "group size {} not larger than {}",
                    samples.len(),
                    policy.min_group_size.saturating_sub(1)
                ),
                cases: samples.len(),
            });
        } else {
            exception_groups.push(ThroughputGroup { key, types, samples });
        }
    }

    let skip_reason = if normal_samples.len() < policy.min_group_size {
        Some(format!(
            "normal group size {} not larger than {}",
            normal_samples.len(),
            policy.min_group_size.saturating_sub(1)
        ))
    } else {
        None
    };

    GroupedScenario {
        scenario,
        total_cases: cases.len(),
        normal: ThroughputGroup {
            key: "normal".into(),
            types: BTreeSet::new(),
            samples: normal_samples,
        },
        exception_groups,
        exclusions,
        skip_reason,
    }
}

/// Direction of a tested group against its reference, after adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellDirection {
    Longer,
    Shorter,
    NotSignificant,
    NotApplicable,
}

impl CellDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            CellDirection::Longer => "LONGER",
            CellDirection::Shorter => "SHORTER",
            CellDirection::NotSignificant => "NOT_SIGNIFICANT",
            CellDirection::NotApplicable => "NOT_APPLICABLE",
        }
    }

    /// Arrow used in the markdown rendering.
    pub fn arrow(self) -> &'static str {
        match self {
            CellDirection::Longer => "↑",
            CellDirection::Shorter => "↓",
            CellDirection::NotSignificant => "↔",
            CellDirection::NotApplicable => "",
        }
    }
}

fn significant_direction(test: &TestResult<Real>, p_adjusted: Real, alpha: Real) -> CellDirection {
    if p_adjusted < alpha {
        match test.direction {
            Some(Direction::Longer) => CellDirection::Longer,
            Some(Direction::Shorter) => CellDirection::Shorter,
            _ => CellDirection::NotSignificant,
        }
    } else {
        CellDirection::NotSignificant
    }
}

/// One direction verdict for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCell {
    pub group: String,
    pub types: BTreeSet<ExceptionType>,
    pub direction: CellDirection,
    /// Adjusted p; meaningless (kept at 1) for NOT_APPLICABLE cells.
    pub p_adjusted: Real,
    pub n: usize,
}

/// Per-scenario outcome of the type-set analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeAnalysis {
    pub scenario: String,
    pub instances_analyzed: usize,
    pub descriptives: GroupStats<Real>,
    /// Informational Jarque–Bera normality screen over the analyzed
    /// instances; the comparisons are rank-based either way.
    pub normality: Option<TestResult<Real>>,
    pub omnibus: Option<TestResult<Real>>,
    pub cells: Vec<DirectionCell>,
}

/// Omnibus Kruskal–Wallis across the eligible groups, then Dunn of every
/// exception group against the normal group with Bonferroni over the
/// performed comparisons.
pub fn run_type_analysis(grouped: &GroupedScenario, policy: &GroupingPolicy) -> TypeAnalysis {
    let mut pooled: Vec<Real> = grouped.normal.samples.clone();
    for g in &grouped.exception_groups {
        pooled.extend_from_slice(&g.samples);
    }
    let descriptives = descriptive_stats(&pooled).unwrap_or(GroupStats {
        n: 0,
        mean: 0.0,
        std: 0.0,
        skewness: None,
        kurtosis: None,
    });
    let normality = jarque_bera(&pooled).ok();

    if grouped.exception_groups.is_empty() {
        return TypeAnalysis {
            scenario: grouped.scenario.clone(),
            instances_analyzed: pooled.len(),
            descriptives,
            normality,
            omnibus: None,
            cells: Vec::new(),
        };
    }

    let mut group_refs: Vec<&[Real]> = vec![&grouped.normal.samples];
    group_refs.extend(grouped.exception_groups.iter().map(|g| g.samples.as_slice()));
    let omnibus = kruskal_wallis(&group_refs).ok();

    let m = grouped.exception_groups.len();
    let tests: Vec<TestResult<Real>> = (0..m)
        .map(|i| dunn_pairwise(&group_refs, i + 1, 0).expect("valid group pair"))
        .collect();
    let adjusted = adjust_bonferroni(&tests.iter().map(|t| t.p_raw).collect::<Vec<_>>(), m);
    let cells = grouped
        .exception_groups
        .iter()
        .zip(tests.iter().zip(adjusted))
        .map(|(group, (test, p_adj))| DirectionCell {
            group: group.key.clone(),
            types: group.types.clone(),
            direction: significant_direction(test, p_adj, policy.alpha),
            p_adjusted: p_adj,
            n: group.samples.len(),
        })
        .collect();

    TypeAnalysis {
        scenario: grouped.scenario.clone(),
        instances_analyzed: pooled.len(),
        descriptives,
        normality,
        omnibus,
        cells,
    }
}

/// Per-scenario outcome of the expected/unexpected analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectednessAnalysis {
    pub scenario: String,
    pub instances_analyzed: usize,
    pub descriptives: GroupStats<Real>,
    pub omnibus: Option<TestResult<Real>>,
    /// Cells: `expected` and `unexpected` against the normal group, plus
    /// `unexpected_vs_expected`.
    pub cells: Vec<DirectionCell>,
}

fn not_applicable(group: &str) -> DirectionCell {
    DirectionCell {
        group: group.to_string(),
        types: BTreeSet::new(),
        direction: CellDirection::NotApplicable,
        p_adjusted: 1.0,
        n: 0,
    }
}

/// All cells NOT_APPLICABLE; used when no process model was supplied.
pub fn expectedness_not_applicable(scenario: &str) -> ExpectednessAnalysis {
    ExpectednessAnalysis {
        scenario: scenario.to_string(),
        instances_analyzed: 0,
        descriptives: GroupStats { n: 0, mean: 0.0, std: 0.0, skewness: None, kurtosis: None },
        omnibus: None,
        cells: vec![
            not_applicable("expected"),
            not_applicable("unexpected"),
            not_applicable("unexpected_vs_expected"),
        ],
    }
}

/// Omnibus over normal/expected/unexpected, then the three pairwise Dunn
/// comparisons (where both sides exist), Bonferroni over the performed
/// count.
pub fn run_expectedness_analysis(
    grouped: &GroupedScenario,
    policy: &GroupingPolicy,
) -> ExpectednessAnalysis {
    let expected = grouped.exception_groups.iter().find(|g| g.key == "expected");
    let unexpected = grouped.exception_groups.iter().find(|g| g.key == "unexpected");

    let mut group_refs: Vec<&[Real]> = vec![&grouped.normal.samples];
    let mut expected_idx = None;
    let mut unexpected_idx = None;
    if let Some(g) = expected {
        expected_idx = Some(group_refs.len());
        group_refs.push(&g.samples);
    }
    if let Some(g) = unexpected {
        unexpected_idx = Some(group_refs.len());
        group_refs.push(&g.samples);
    }

    let instances_analyzed = group_refs.iter().map(|g| g.len()).sum();
    let pooled: Vec<Real> = group_refs.iter().flat_map(|g| g.iter().copied()).collect();
    let descriptives = descriptive_stats(&pooled).unwrap_or(GroupStats {
        n: 0,
        mean: 0.0,
        std: 0.0,
        skewness: None,
        kurtosis: None,
    });
    let omnibus = if group_refs.len() >= 2 { kruskal_wallis(&group_refs).ok() } else { None };

    // pairs: expected vs normal, unexpected vs normal, unexpected vs expected
    let mut planned: Vec<(&str, usize, usize, usize)> = Vec::new();
    if let Some(e) = expected_idx {
        planned.push(("expected", e, 0, expected.map_or(0, |g| g.samples.len())));
    }
    if let Some(u) = unexpected_idx {
        planned.push(("unexpected", u, 0, unexpected.map_or(0, |g| g.samples.len())));
    }
    if let (Some(u), Some(e)) = (unexpected_idx, expected_idx) {
        planned.push(("unexpected_vs_expected", u, e, unexpected.map_or(0, |g| g.samples.len())));
    }

    let tests: Vec<TestResult<Real>> = planned
        .iter()
        .map(|&(_, i, j, _)| dunn_pairwise(&group_refs, i, j).expect("valid group pair"))
        .collect();
    let m = planned.len();
    let adjusted = if m > 0 {
        adjust_bonferroni(&tests.iter().map(|t| t.p_raw).collect::<Vec<_>>(), m)
    } else {
        Vec::new()
    };

    let mut cells = Vec::new();
    for (idx, &(name, _, _, n)) in planned.iter().enumerate() {
        cells.push(DirectionCell {
            group: name.to_string(),
            types: BTreeSet::new(),
            direction: significant_direction(&tests[idx], adjusted[idx], policy.alpha),
            p_adjusted: adjusted[idx],
            n,
        });
    }
    for name in ["expected", "unexpected", "unexpected_vs_expected"] {
        if !cells.iter().any(|c| c.group == name) {
            cells.push(not_applicable(name));
        }
    }
    cells.sort_by(|a, b| a.group.cmp(&b.group));

    ExpectednessAnalysis {
        scenario: grouped.scenario.clone(),
        instances_analyzed,
        descriptives,
        omnibus,
        cells,
    }
}

/// Normal flow versus all pooled exception cases (H1 per scenario).
#[derive(Debug, Clone, PartialEq)]
pub struct PooledExceptionResult {
    pub omnibus: TestResult<Real>,
    pub cell: DirectionCell,
}

pub fn run_pooled_exception_analysis(
    grouped: &GroupedScenario,
    policy: &GroupingPolicy,
) -> Option<PooledExceptionResult> {
    let pooled = grouped.exception_groups.iter().find(|g| g.key == "exception")?;
    let refs: [&[Real]; 2] = [&grouped.normal.samples, &pooled.samples];
    let omnibus = kruskal_wallis(&refs).ok()?;
    let dunn = dunn_pairwise(&refs, 1, 0).ok()?;
    let cell = DirectionCell {
        group: "exception".into(),
        types: BTreeSet::new(),
        direction: significant_direction(&dunn, omnibus.p_raw, policy.alpha),
        p_adjusted: omnibus.p_raw,
        n: pooled.samples.len(),
    };
    Some(PooledExceptionResult { omnibus, cell })
}

/// Relative frequency of one exception type among a scenario's exception
/// paths (and cases).
#[derive(Debug, Clone, PartialEq)]
pub struct TypeFrequencyRow {
    pub ty: ExceptionType,
    /// Fraction of distinct alignable exception paths containing the type.
    pub pct_paths: Real,
    /// Fraction of alignable exception cases containing the type.
    pub pct_cases: Real,
}

/// Table-4 style frequencies. Rows can sum past 100% because a path may
/// carry several types. Unalignable paths are not counted on either basis.
pub fn type_frequency(cases: &[CaseRecord]) -> Vec<TypeFrequencyRow> {
    let mut path_types: BTreeMap<&[String], &BTreeSet<ExceptionType>> = BTreeMap::new();
    let mut case_count = 0usize;
    let mut case_hits: BTreeMap<ExceptionType, usize> = BTreeMap::new();
    for case in cases {
        if case.profile.is_normal() || !case.profile.alignable {
            continue;
        }
        path_types.insert(&case.path, &case.profile.types);
        case_count += 1;
        for &ty in &case.profile.types {
            *case_hits.entry(ty).or_insert(0) += 1;
        }
    }
    let path_count = path_types.len();
    ALL_TYPES
        .iter()
        .map(|&ty| {
            let paths_with = path_types.values().filter(|types| types.contains(&ty)).count();
            TypeFrequencyRow {
                ty,
                pct_paths: if path_count == 0 {
                    0.0
                } else {
                    paths_with as Real / path_count as Real
                },
                pct_cases: if case_count == 0 {
                    0.0
                } else {
                    *case_hits.get(&ty).unwrap_or(&0) as Real / case_count as Real
                },
            }
        })
        .collect()
}

/// Everything the pipeline knows about one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioAnalysis {
    pub label: String,
    pub total_cases: usize,
    pub skip_reason: Option<String>,
    pub eligible_cases: usize,
    pub excluded_cases: usize,
    pub skipped_cases: usize,
    pub exclusions: Vec<Exclusion>,
    /// Whether the elected normal flow is itself a walk through the model.
    /// A normal flow outside the model is legitimate and merely reported.
    pub normal_flow_expected: Option<Expectedness>,
    pub pooled_exception: Option<PooledExceptionResult>,
    pub type_analysis: Option<TypeAnalysis>,
    pub expectedness: Option<ExpectednessAnalysis>,
    pub type_frequency: Vec<TypeFrequencyRow>,
}

/// Full analysis output, scenarios in label order.
#[derive(Debug, Clone)]
pub struct AnalysisResults {
    pub scenarios: Vec<ScenarioAnalysis>,
    pub verdicts: Vec<Verdict>,
    pub policy: GroupingPolicy,
    pub model_supplied: bool,
}

impl AnalysisResults {
    /// True when at least one scenario produced at least one test.
    pub fn any_analyzed(&self) -> bool {
        self.scenarios.iter().any(|s| {
            s.pooled_exception.is_some()
                || s.type_analysis.as_ref().is_some_and(|t| !t.cells.is_empty())
        })
    }
}

/// Run the grouping rules and test plan over every scenario.
pub fn analyze_scenarios(
    scenarios: &[Scenario],
    model: Option<&ProcessModel>,
    policy: &GroupingPolicy,
) -> AnalysisResults {
    let mut out = Vec::new();
    for scenario in scenarios {
        if scenario.label == UNLABELED {
            out.push(ScenarioAnalysis {
                label: scenario.label.clone(),
                total_cases: scenario.case_count(),
                skip_reason: Some("cases without an outcome label".into()),
                eligible_cases: 0,
                excluded_cases: 0,
                skipped_cases: scenario.case_count(),
                exclusions: Vec::new(),
                normal_flow_expected: None,
                pooled_exception: None,
                type_analysis: None,
                expectedness: None,
                type_frequency: Vec::new(),
            });
            continue;
        }
        let normal_flow_expected =
            model.map(|m| classify_expectedness(&scenario.normal_flow, m));
        let records = build_case_records(std::slice::from_ref(scenario), model);
        let grouped = build_groups(&records, policy, GroupingMode::ByTypeSet);
        let (eligible, excluded, skipped) = grouped.accounting();
        let freq = type_frequency(&records);

        if grouped.skip_reason.is_some() {
            out.push(ScenarioAnalysis {
                label: scenario.label.clone(),
                total_cases: grouped.total_cases,
                skip_reason: grouped.skip_reason.clone(),
                eligible_cases: eligible,
                excluded_cases: excluded,
                skipped_cases: skipped,
                exclusions: grouped.exclusions.clone(),
                normal_flow_expected,
                pooled_exception: None,
                type_analysis: None,
                expectedness: None,
                type_frequency: freq,
            });
            continue;
        }

        let type_analysis = run_type_analysis(&grouped, policy);
        let pooled_grouped = build_groups(&records, policy, GroupingMode::NormalVsException);
        let pooled_exception = run_pooled_exception_analysis(&pooled_grouped, policy);
        let expectedness = if model.is_some() {
            let exp_grouped = build_groups(&records, policy, GroupingMode::ByExpectedness);
            Some(run_expectedness_analysis(&exp_grouped, policy))
        } else {
            Some(expectedness_not_applicable(&scenario.label))
        };

        out.push(ScenarioAnalysis {
            label: scenario.label.clone(),
            total_cases: grouped.total_cases,
            skip_reason: None,
            eligible_cases: eligible,
            excluded_cases: excluded,
            skipped_cases: skipped,
            exclusions: grouped.exclusions.clone(),
            normal_flow_expected,
            pooled_exception,
            type_analysis: Some(type_analysis),
            expectedness,
            type_frequency: freq,
        });
    }
    let verdicts = hypothesis_verdicts(&out, model.is_some());
    AnalysisResults {
        scenarios: out,
        verdicts,
        policy: *policy,
        model_supplied: model.is_some(),
    }
}

/// Outcome of one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Supported,
    Contradicted,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Supported => "SUPPORTED",
            VerdictStatus::Contradicted => "CONTRADICTED",
            VerdictStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// A hypothesis verdict with the cells that carried it.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub hypothesis: String,
    pub statement: String,
    pub status: VerdictStatus,
    pub evidence: Vec<String>,
}

fn vote(longer: usize, shorter: usize, desired: CellDirection) -> VerdictStatus {
    let (for_votes, against) = match desired {
        CellDirection::Longer => (longer, shorter),
        _ => (shorter, longer),
    };
    if for_votes > 0 && against == 0 {
        VerdictStatus::Supported
    } else if against > 0 && for_votes == 0 {
        VerdictStatus::Contradicted
    } else {
        VerdictStatus::Inconclusive
    }
}

/// Aggregated reading of one exception type across all scenarios.
#[derive(Debug, Clone)]
struct TypeAggregate {
    status: VerdictStatus,
    evidence: Vec<String>,
}

/// Qualitative aggregation of one type's direction cells.
///
/// A cell that disagrees with the type's family direction is excused when
/// the group also carries a type of the opposite family (the blame is
/// shared); a type supported only in mixed groups and contradicted in
/// others stays inconclusive. Supported therefore requires agreement from
/// a pure group or unanimity over every observed cell.
fn aggregate_type(ty: ExceptionType, scenarios: &[ScenarioAnalysis]) -> TypeAggregate {
    let desired = if ty.is_additive() { CellDirection::Longer } else { CellDirection::Shorter };
    let opposite = if ty.is_additive() { CellDirection::Shorter } else { CellDirection::Longer };

    let mut support = 0usize;
    let mut pure_support = 0usize;
    let mut contra_unexcused = 0usize;
    let mut unanimous = true;
    let mut relevant = 0usize;
    let mut evidence = Vec::new();

    for scenario in scenarios {
        let Some(analysis) = &scenario.type_analysis else { continue };
        for cell in &analysis.cells {
            if !cell.types.contains(&ty) {
                continue;
            }
            relevant += 1;
            let excused = cell
                .types
                .iter()
                .any(|other| *other != ty && other.is_additive() != ty.is_additive());
            let mut note = format!(
                "{}/{}: {} (p_adj={:.3e}, n={})",
                scenario.label,
                cell.group,
                cell.direction.as_str(),
                cell.p_adjusted,
                cell.n
            );
            if cell.direction == desired {
                support += 1;
                if cell.types.len() == 1 {
                    pure_support += 1;
                }
            } else {
                unanimous = false;
                if cell.direction == opposite {
                    if excused {
                        note.push_str(" [excused: paired with opposite-family type]");
                    } else {
                        contra_unexcused += 1;
                    }
                }
            }
            evidence.push(note);
        }
    }

    let status = if relevant == 0 {
        evidence.push("not observed in any eligible group".into());
        VerdictStatus::Inconclusive
    } else if contra_unexcused > 0 && support > 0 {
        VerdictStatus::Inconclusive
    } else if contra_unexcused > 0 {
        VerdictStatus::Contradicted
    } else if support == 0 {
        VerdictStatus::Inconclusive
    } else if pure_support > 0 || unanimous {
        VerdictStatus::Supported
    } else {
        VerdictStatus::Inconclusive
    };
    TypeAggregate { status, evidence }
}

fn family_verdict(
    hypothesis: &str,
    statement: &str,
    family: &[ExceptionType],
    scenarios: &[ScenarioAnalysis],
) -> Verdict {
    let mut supported = 0usize;
    let mut contradicted = 0usize;
    let mut evidence = Vec::new();
    for &ty in family {
        let agg = aggregate_type(ty, scenarios);
        evidence.push(format!("{}: {}", ty.name(), agg.status.as_str()));
        for line in agg.evidence {
            evidence.push(format!("  {line}"));
        }
        match agg.status {
            VerdictStatus::Supported => supported += 1,
            VerdictStatus::Contradicted => contradicted += 1,
            VerdictStatus::Inconclusive => {}
        }
    }
    let status = if supported > 0 && contradicted == 0 {
        VerdictStatus::Supported
    } else if contradicted > 0 && supported == 0 {
        VerdictStatus::Contradicted
    } else {
        VerdictStatus::Inconclusive
    };
    Verdict {
        hypothesis: hypothesis.to_string(),
        statement: statement.to_string(),
        status,
        evidence,
    }
}

/// Aggregate the per-scenario results into the four hypothesis verdicts.
pub fn hypothesis_verdicts(scenarios: &[ScenarioAnalysis], model_supplied: bool) -> Vec<Verdict> {
    // H1: pooled exceptions vs normal, per scenario
    let mut longer = 0;
    let mut shorter = 0;
    let mut h1_evidence = Vec::new();
    for scenario in scenarios {
        if let Some(result) = &scenario.pooled_exception {
            match result.cell.direction {
                CellDirection::Longer => longer += 1,
                CellDirection::Shorter => shorter += 1,
                _ => {}
            }
            h1_evidence.push(format!(
                "{}: {} (p={:.3e}, n={})",
                scenario.label,
                result.cell.direction.as_str(),
                result.cell.p_adjusted,
                result.cell.n
            ));
        }
    }
    if h1_evidence.is_empty() {
        h1_evidence.push("no scenario produced an eligible pooled-exception group".into());
    }
    let h1 = Verdict {
        hypothesis: "H1".into(),
        statement: "paths with an exception take longer than the normal flow".into(),
        status: vote(longer, shorter, CellDirection::Longer),
        evidence: h1_evidence,
    };

    // H2: unexpected vs expected, per scenario with a model
    let mut longer = 0;
    let mut shorter = 0;
    let mut h2_evidence = Vec::new();
    for scenario in scenarios {
        if let Some(exp) = &scenario.expectedness {
            for cell in &exp.cells {
                if cell.group == "unexpected_vs_expected"
                    && cell.direction != CellDirection::NotApplicable
                {
                    match cell.direction {
                        CellDirection::Longer => longer += 1,
                        CellDirection::Shorter => shorter += 1,
                        _ => {}
                    }
                    h2_evidence.push(format!(
                        "{}: {} (p_adj={:.3e}, n={})",
                        scenario.label,
                        cell.direction.as_str(),
                        cell.p_adjusted,
                        cell.n
                    ));
                }
            }
        }
    }
    if h2_evidence.is_empty() {
        h2_evidence.push(if model_supplied {
            "no scenario had both an eligible expected and unexpected group".into()
        } else {
            "no process model supplied".into()
        });
    }
    let h2 = Verdict {
        hypothesis: "H2".into(),
        statement: "unexpected exceptions take longer than expected exceptions".into(),
        status: vote(longer, shorter, CellDirection::Longer),
        evidence: h2_evidence,
    };

    let h3 = family_verdict(
        "H3",
        "exception types that add activities lengthen throughput",
        &[
            ExceptionType::Add,
            ExceptionType::LateEntry,
            ExceptionType::LateExit,
            ExceptionType::Repeat,
            ExceptionType::StepBack,
        ],
        scenarios,
    );
    let h4 = family_verdict(
        "H4",
        "exception types that remove activities shorten throughput",
        &[ExceptionType::EarlyEntry, ExceptionType::EarlyExit, ExceptionType::Skip],
        scenarios,
    );

    vec![h1, h2, h3, h4]
}
