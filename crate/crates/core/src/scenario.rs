//! Outcome scenarios and normal-flow election.
//!
//! Traces are partitioned by the outcome they reach; within each scenario
//! the most frequently taken path is the normal flow and every other path
//! is, by definition, an exception.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::log::{extract_variants, variant_cmp, Trace, Variant};

/// Label of the bucket for traces the policy could not label.
pub const UNLABELED: &str = "__UNLABELED__";

/// How the outcome of a trace is determined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutcomePolicy {
    /// The outcome is the final activity of the path.
    LastActivity,
    /// Marker activities map to outcome labels; a path's scenario is the
    /// sorted `+`-join of the outcome labels of all markers it contains.
    MarkerSet(BTreeMap<String, String>),
    /// The outcome is the value of a case attribute.
    CaseAttribute(String),
}

impl OutcomePolicy {
    pub fn validate(&self) -> Result<()> {
        match self {
            OutcomePolicy::LastActivity => Ok(()),
            OutcomePolicy::MarkerSet(map) if map.is_empty() => {
                Err(Error::Policy("marker_set mode needs at least one marker".into()))
            }
            OutcomePolicy::MarkerSet(_) => Ok(()),
            OutcomePolicy::CaseAttribute(name) if name.is_empty() => {
                Err(Error::Policy("case_attribute mode needs an attribute name".into()))
            }
            OutcomePolicy::CaseAttribute(_) => Ok(()),
        }
    }

    fn label_for(&self, trace: &Trace) -> String {
        match self {
            OutcomePolicy::LastActivity => {
                trace.path.last().cloned().unwrap_or_else(|| UNLABELED.to_string())
            }
            OutcomePolicy::MarkerSet(map) => {
                let outcomes: BTreeSet<&str> = trace
                    .path
                    .iter()
                    .filter_map(|activity| map.get(activity))
                    .map(|s| s.as_str())
                    .collect();
                if outcomes.is_empty() {
                    UNLABELED.to_string()
                } else {
                    outcomes.into_iter().collect::<Vec<_>>().join("+")
                }
            }
            OutcomePolicy::CaseAttribute(name) => match trace.attributes.get(name) {
                Some(value) if !value.is_empty() => value.clone(),
                _ => UNLABELED.to_string(),
            },
        }
    }
}

/// Parse an outcome-policy file: plain `key=value` lines.
///
/// ```text
/// mode=marker_set
/// marker.reject appeal=Rejected
/// marker.withdraw=Withdrawn
/// ```
///
/// `mode` is one of `last_activity`, `marker_set`, `case_attribute`;
/// `marker.<activity>=<outcome>` lines feed marker_set mode and
/// `attribute=<name>` feeds case_attribute mode. `#` starts a comment.
pub fn parse_policy(text: &str) -> Result<OutcomePolicy> {
    let mut mode: Option<String> = None;
    let mut markers = BTreeMap::new();
    let mut attribute: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Policy(format!("line {}: expected key=value", idx + 1)))?;
        let key = key.trim();
        let value = value.trim();
        if key == "mode" {
            mode = Some(value.to_string());
        } else if let Some(activity) = key.strip_prefix("marker.") {
            markers.insert(activity.trim().to_string(), value.to_string());
        } else if key == "attribute" {
            attribute = Some(value.to_string());
        } else {
            return Err(Error::Policy(format!("line {}: unknown key '{key}'", idx + 1)));
        }
    }
    let policy = match mode.as_deref() {
        Some("last_activity") | None => OutcomePolicy::LastActivity,
        Some("marker_set") => OutcomePolicy::MarkerSet(markers),
        Some("case_attribute") => OutcomePolicy::CaseAttribute(attribute.unwrap_or_default()),
        Some(other) => return Err(Error::Policy(format!("unknown mode '{other}'"))),
    };
    policy.validate()?;
    Ok(policy)
}

/// An outcome scenario: its traces, its variant table and its elected
/// normal flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub traces: Vec<Trace>,
    pub variants: Vec<Variant>,
    pub normal_flow: Vec<String>,
}

impl Scenario {
    pub fn case_count(&self) -> usize {
        self.traces.len()
    }
}

/// Partition traces into scenarios according to `policy` and elect each
/// scenario's normal flow. Scenarios come back sorted by label; traces the
/// policy cannot label land in the reserved [`UNLABELED`] scenario.
pub fn assign_scenarios(traces: Vec<Trace>, policy: &OutcomePolicy) -> Result<Vec<Scenario>> {
    policy.validate()?;
    let mut buckets: BTreeMap<String, Vec<Trace>> = BTreeMap::new();
    for trace in traces {
        let label = policy.label_for(&trace);
        buckets.entry(label).or_default().push(trace);
    }
    buckets
        .into_iter()
        .map(|(label, traces)| {
            let variants = extract_variants(&traces);
            let normal_flow = select_normal_flow(&variants)?;
            Ok(Scenario { label, traces, variants, normal_flow })
        })
        .collect()
}

/// The most frequently taken path of a scenario. Ties go to the shorter
/// path, then to the lexicographically smaller one, so the election is
/// deterministic.
pub fn select_normal_flow(variants: &[Variant]) -> Result<Vec<String>> {
    variants
        .iter()
        .min_by(|a, b| variant_cmp(a, b))
        .map(|v| v.path.clone())
        .ok_or_else(|| Error::Stats("cannot elect a normal flow from an empty variant table".into()))
}
