//! Event-log parsing, trace assembly and path-variant mining.
//!
//! Input is case-centric CSV: one event per row, at least a case id, an
//! activity label and a timestamp. Column names are remappable through
//! [`LogSchema`]; any further configured columns are carried along as
//! per-case attributes (the last non-empty value of a case wins).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::Real;

/// Instant with nanosecond resolution, stored as nanoseconds since the
/// Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub fn from_nanos(nanos: i64) -> Self {
        Timestamp(nanos)
    }

    pub fn from_epoch_seconds(seconds: i64) -> Option<Self> {
        seconds.checked_mul(1_000_000_000).map(Timestamp)
    }

    pub fn nanos(self) -> i64 {
        self.0
    }

    /// Seconds elapsed since `earlier` (negative if `self` is earlier).
    pub fn seconds_since(self, earlier: Timestamp) -> Real {
        (self.0 - earlier.0) as Real / 1e9
    }

    pub fn to_utc(self) -> chrono::DateTime<chrono::Utc> {
        chrono::DateTime::from_timestamp_nanos(self.0)
    }

    /// Parse an RFC 3339 instant.
    pub fn parse_rfc3339(text: &str) -> Option<Self> {
        chrono::DateTime::parse_from_rfc3339(text)
            .ok()
            .and_then(|dt| dt.timestamp_nanos_opt())
            .map(Timestamp)
    }
}

/// Timestamp encoding of one log file, fixed by its first data row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestampFormat {
    EpochSeconds,
    Rfc3339,
}

/// One executed activity of one customer case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub case_id: String,
    pub activity: String,
    pub timestamp: Timestamp,
    /// Physical 1-based line number in the source file (header is line 1);
    /// unique within one log and used as the tie-breaker for equal timestamps.
    pub row_index: u64,
}

/// Events of one case, in source-row order, plus its collected attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseEvents {
    pub case_id: String,
    pub events: Vec<Event>,
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMeta {
    pub name: String,
    pub rows: usize,
    pub timestamp_format: TimestampFormat,
}

/// A parsed event log: cases in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub source: SourceMeta,
    pub cases: Vec<CaseEvents>,
}

impl EventLog {
    pub fn event_count(&self) -> usize {
        self.cases.iter().map(|c| c.events.len()).sum()
    }
}

/// Column-name configuration for [`parse_event_log`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogSchema {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: String,
    /// Extra columns preserved as case attributes.
    pub attribute_columns: Vec<String>,
}

impl Default for LogSchema {
    fn default() -> Self {
        LogSchema {
            case_column: "case_id".into(),
            activity_column: "activity".into(),
            timestamp_column: "timestamp".into(),
            attribute_columns: Vec::new(),
        }
    }
}

fn header_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Schema { column: name.to_string() })
}

fn parse_timestamp(text: &str, format: TimestampFormat, line: u64) -> Result<Timestamp> {
    let text = text.trim();
    match format {
        TimestampFormat::EpochSeconds => text
            .parse::<i64>()
            .ok()
            .and_then(Timestamp::from_epoch_seconds)
            .ok_or_else(|| Error::Row {
                line,
                message: format!("expected integer epoch seconds, got '{text}'"),
            }),
        TimestampFormat::Rfc3339 => Timestamp::parse_rfc3339(text).ok_or_else(|| Error::Row {
            line,
            message: format!("expected RFC 3339 timestamp, got '{text}'"),
        }),
    }
}

/// Parse a CSV event log from a reader.
///
/// The timestamp encoding (integer epoch seconds or RFC 3339) is sniffed
/// from the first data row and then enforced for the whole file.
pub fn parse_event_log<R: Read>(reader: R, source_name: &str, schema: &LogSchema) -> Result<EventLog> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let case_idx = header_index(&headers, &schema.case_column)?;
    let activity_idx = header_index(&headers, &schema.activity_column)?;
    let timestamp_idx = header_index(&headers, &schema.timestamp_column)?;
    let attr_idx: Vec<(String, usize)> = schema
        .attribute_columns
        .iter()
        .map(|name| header_index(&headers, name).map(|i| (name.clone(), i)))
        .collect::<Result<_>>()?;

    let mut format: Option<TimestampFormat> = None;
    let mut case_order: HashMap<String, usize> = HashMap::new();
    let mut cases: Vec<CaseEvents> = Vec::new();
    let mut rows = 0usize;

    for record in csv_reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        rows += 1;

        let field = |idx: usize, what: &str| -> Result<&str> {
            record.get(idx).ok_or_else(|| Error::Row {
                line,
                message: format!("missing {what} field"),
            })
        };
        let case_id = field(case_idx, "case")?.trim().to_string();
        if case_id.is_empty() {
            return Err(Error::Row { line, message: "empty case id".into() });
        }
        let activity = field(activity_idx, "activity")?.trim().to_string();
        if activity.is_empty() {
            return Err(Error::Row { line, message: "empty activity".into() });
        }
        let raw_ts = field(timestamp_idx, "timestamp")?;

        let fmt = match format {
            Some(f) => f,
            None => {
                let sniffed = if raw_ts.trim().parse::<i64>().is_ok() {
                    TimestampFormat::EpochSeconds
                } else {
                    TimestampFormat::Rfc3339
                };
                format = Some(sniffed);
                sniffed
            }
        };
        let timestamp = parse_timestamp(raw_ts, fmt, line)?;

        let slot = match case_order.get(&case_id) {
            Some(&i) => i,
            None => {
                case_order.insert(case_id.clone(), cases.len());
                cases.push(CaseEvents {
                    case_id: case_id.clone(),
                    events: Vec::new(),
                    attributes: BTreeMap::new(),
                });
                cases.len() - 1
            }
        };
        for (name, idx) in &attr_idx {
            let value = field(*idx, "attribute")?.trim();
            if !value.is_empty() {
                cases[slot].attributes.insert(name.clone(), value.to_string());
            }
        }
        cases[slot].events.push(Event { case_id, activity, timestamp, row_index: line });
    }

    if rows == 0 {
        return Err(Error::EmptyLog);
    }
    Ok(EventLog {
        source: SourceMeta {
            name: source_name.to_string(),
            rows,
            timestamp_format: format.expect("format sniffed from first row"),
        },
        cases,
    })
}

/// Parse a CSV event log from a file path.
pub fn parse_event_log_path(path: &Path, schema: &LogSchema) -> Result<EventLog> {
    let file = std::fs::File::open(path)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_event_log(std::io::BufReader::new(file), &name, schema)
}

/// One customer case as an ordered activity path with its throughput time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub case_id: String,
    pub path: Vec<String>,
    pub start: Timestamp,
    pub end: Timestamp,
    /// `end - start` in seconds.
    pub throughput: Real,
    pub attributes: BTreeMap<String, String>,
}

/// Assemble one trace per case: events sorted by timestamp, source-row
/// order preserved among equal timestamps.
pub fn build_traces(log: &EventLog) -> Result<Vec<Trace>> {
    if log.cases.is_empty() {
        return Err(Error::EmptyLog);
    }
    let mut traces = Vec::with_capacity(log.cases.len());
    for case in &log.cases {
        let mut events = case.events.clone();
        // stable sort: events arrive in row order, so ties keep it
        events.sort_by_key(|e| e.timestamp);
        let start = events.first().expect("case has at least one event").timestamp;
        let end = events.last().expect("case has at least one event").timestamp;
        traces.push(Trace {
            case_id: case.case_id.clone(),
            path: events.into_iter().map(|e| e.activity).collect(),
            start,
            end,
            throughput: end.seconds_since(start),
            attributes: case.attributes.clone(),
        });
    }
    Ok(traces)
}

/// Keep only traces whose last event falls inside `[from, to)`.
///
/// This is the optional completion-date window: which cases belong to a
/// measurement period is a per-study decision, so both bounds are optional
/// and the semantics (completion time, i.e. the trace end) are fixed here.
pub fn filter_by_completion(
    traces: Vec<Trace>,
    from: Option<Timestamp>,
    to: Option<Timestamp>,
) -> Vec<Trace> {
    traces
        .into_iter()
        .filter(|t| from.is_none_or(|f| t.end >= f) && to.is_none_or(|u| t.end < u))
        .collect()
}

/// A distinct path together with the cases that followed it.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub path: Vec<String>,
    pub case_count: usize,
    pub case_ids: Vec<String>,
    /// Fraction of all cases in the variant table's scope.
    pub case_share: Real,
}

/// Ranking order of variants: descending case count, then shorter path,
/// then lexicographically smaller path.
pub fn variant_cmp(a: &Variant, b: &Variant) -> Ordering {
    b.case_count
        .cmp(&a.case_count)
        .then(a.path.len().cmp(&b.path.len()))
        .then_with(|| a.path.cmp(&b.path))
}

/// Count the distinct paths of a trace set. The result is ordered by
/// [`variant_cmp`] and shares sum to 1 over a non-empty input.
pub fn extract_variants(traces: &[Trace]) -> Vec<Variant> {
    if traces.is_empty() {
        return Vec::new();
    }
    let mut by_path: HashMap<&[String], Vec<String>> = HashMap::new();
    for trace in traces {
        by_path.entry(&trace.path).or_default().push(trace.case_id.clone());
    }
    let total = traces.len() as Real;
    let mut variants: Vec<Variant> = by_path
        .into_iter()
        .map(|(path, case_ids)| Variant {
            path: path.to_vec(),
            case_count: case_ids.len(),
            case_share: case_ids.len() as Real / total,
            case_ids,
        })
        .collect();
    variants.sort_by(variant_cmp);
    variants
}

/// One row of the ranked head of a variant table.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedVariant {
    pub rank: usize,
    pub path: Vec<String>,
    pub case_share: Real,
}

/// Head of the ranked variant table plus the long-tail statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct TopVariants {
    pub entries: Vec<RankedVariant>,
    /// Fraction of *all* variants that hold less than 1% of the cases.
    pub tail_below_one_percent: Real,
}

/// First `min(k, len)` variants of an already-ranked table.
pub fn top_k_variants(table: &[Variant], k: usize) -> TopVariants {
    assert!(k >= 1, "top_k_variants requires k >= 1");
    let entries = table
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, v)| RankedVariant { rank: i + 1, path: v.path.clone(), case_share: v.case_share })
        .collect();
    let tail_below_one_percent = if table.is_empty() {
        0.0
    } else {
        table.iter().filter(|v| v.case_share < 0.01).count() as Real / table.len() as Real
    };
    TopVariants { entries, tail_below_one_percent }
}
