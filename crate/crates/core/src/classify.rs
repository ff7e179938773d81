//! Classification of an observed path against its scenario's normal flow.
//!
//! The pipeline is fixed: immediate repetitions are extracted first (they
//! are their own exception types and must not be mistaken for insertions),
//! the repetition-free remainder is aligned with the normal flow along a
//! deterministic longest common subsequence, and every edit of the
//! alignment is then classified by where it sits relative to the matches.
//!
//! With a normal flow `A-B-C-D`:
//!
//! * removing `D` at the end is an **early exit**, removing `A` at the
//!   start an **early entry**;
//! * inserting after the last match is a **late exit**, before the first
//!   match a **late entry**;
//! * `A-B-C-C-D` is a **repeat** (one activity duplicated in place),
//!   `A-B-C-B-C-D` a **step back** (a block duplicated in place);
//! * any other insertion is an **add**, any other removal a **skip**.

use std::collections::BTreeSet;
use std::fmt;

/// The eight control-flow exception types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExceptionType {
    Add,
    EarlyEntry,
    EarlyExit,
    LateEntry,
    LateExit,
    Repeat,
    Skip,
    StepBack,
}

/// All types, in canonical (alphabetical) order.
pub const ALL_TYPES: [ExceptionType; 8] = [
    ExceptionType::Add,
    ExceptionType::EarlyEntry,
    ExceptionType::EarlyExit,
    ExceptionType::LateEntry,
    ExceptionType::LateExit,
    ExceptionType::Repeat,
    ExceptionType::Skip,
    ExceptionType::StepBack,
];

impl ExceptionType {
    pub fn name(self) -> &'static str {
        match self {
            ExceptionType::Add => "ADD",
            ExceptionType::EarlyEntry => "EARLY_ENTRY",
            ExceptionType::EarlyExit => "EARLY_EXIT",
            ExceptionType::LateEntry => "LATE_ENTRY",
            ExceptionType::LateExit => "LATE_EXIT",
            ExceptionType::Repeat => "REPEAT",
            ExceptionType::Skip => "SKIP",
            ExceptionType::StepBack => "STEP_BACK",
        }
    }

    pub fn parse(name: &str) -> Option<ExceptionType> {
        ALL_TYPES.iter().copied().find(|t| t.name().eq_ignore_ascii_case(name))
    }

    /// True for the types that add activities to the normal flow; false for
    /// the types that remove activities from it.
    pub fn is_additive(self) -> bool {
        matches!(
            self,
            ExceptionType::Add
                | ExceptionType::LateEntry
                | ExceptionType::LateExit
                | ExceptionType::Repeat
                | ExceptionType::StepBack
        )
    }
}

impl fmt::Display for ExceptionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Render a type set as a sorted `+`-joined label, e.g. `ADD+SKIP`.
pub fn type_set_label(types: &BTreeSet<ExceptionType>) -> String {
    types.iter().map(|t| t.name()).collect::<Vec<_>>().join("+")
}

/// Evidence for one classified exception.
///
/// `position` is the index where the edit was detected: for repetitions the
/// start of the duplicated block in the path as it stood when the
/// duplication was found; for insertions the start index in the
/// repetition-reduced path; for removals the start index in the normal flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditRecord {
    pub kind: ExceptionType,
    pub activities: Vec<String>,
    pub position: usize,
}

/// The classified exception types of one path, with the edit records that
/// justify them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionProfile {
    pub types: BTreeSet<ExceptionType>,
    pub records: Vec<EditRecord>,
    /// False when the path shares no activity with the normal flow; such a
    /// case cannot be typed and is excluded from the per-type analysis.
    pub alignable: bool,
}

impl ExceptionProfile {
    pub fn is_normal(&self) -> bool {
        self.alignable && self.types.is_empty()
    }
}

/// Remove immediate block repetitions, leftmost (then shortest) first,
/// until none remain.
///
/// At every step the earliest-starting, then shortest, block that is
/// immediately followed by an identical copy of itself is found; the copy
/// is deleted and a record is emitted — `REPEAT` for a single activity,
/// `STEP_BACK` for a longer block. Iterating to the fixpoint makes
/// `A-A-A` two repeats of `A` and leaves the result repetition-free.
pub fn reduce_repetitions(path: &[String]) -> (Vec<String>, Vec<EditRecord>) {
    let mut current = path.to_vec();
    let mut records = Vec::new();
    'outer: loop {
        let n = current.len();
        for start in 0..n {
            let max_len = (n - start) / 2;
            for len in 1..=max_len {
                if current[start..start + len] == current[start + len..start + 2 * len] {
                    let kind = if len == 1 { ExceptionType::Repeat } else { ExceptionType::StepBack };
                    records.push(EditRecord {
                        kind,
                        activities: current[start..start + len].to_vec(),
                        position: start,
                    });
                    current.drain(start + len..start + 2 * len);
                    continue 'outer;
                }
            }
        }
        break;
    }
    (current, records)
}

/// One step of an alignment script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignOp {
    /// `observed[obs]` matches `normal[norm]`.
    Match { obs: usize, norm: usize },
    /// `observed[obs]` is absent from the normal flow.
    Insert { obs: usize },
    /// `normal[norm]` is absent from the observed path.
    Delete { norm: usize },
}

/// A deterministic longest-common-subsequence edit script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ops: Vec<AlignOp>,
    pub lcs_len: usize,
}

/// Align the observed (repetition-reduced) path with the normal flow.
///
/// The script realizes a longest common subsequence. Where the dynamic
/// program admits several optimal scripts the choice is fixed: prefer a
/// match, otherwise consume from the observed sequence (an insertion),
/// otherwise from the normal one (a deletion). The script is therefore
/// unique for given inputs. Time and memory are
/// O(|observed| * |normal|); normal flows are short in practice.
pub fn align_lcs(observed: &[String], normal: &[String]) -> Alignment {
    let n = observed.len();
    let m = normal.len();
    // dp[i][j] = LCS length of observed[i..] and normal[j..]
    let mut dp = vec![0usize; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[at(i, j)] = if observed[i] == normal[j] {
                dp[at(i + 1, j + 1)] + 1
            } else {
                dp[at(i + 1, j)].max(dp[at(i, j + 1)])
            };
        }
    }
    let lcs_len = dp[at(0, 0)];

    let mut ops = Vec::with_capacity(n + m - lcs_len);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && observed[i] == normal[j] && dp[at(i, j)] == dp[at(i + 1, j + 1)] + 1 {
            ops.push(AlignOp::Match { obs: i, norm: j });
            i += 1;
            j += 1;
        } else if i < n && dp[at(i, j)] == dp[at(i + 1, j)] {
            ops.push(AlignOp::Insert { obs: i });
            i += 1;
        } else {
            ops.push(AlignOp::Delete { norm: j });
            j += 1;
        }
    }
    Alignment { ops, lcs_len }
}

/// Classify a path against its scenario's normal flow.
///
/// A path identical to the normal flow yields the empty profile. A path
/// whose repetition-free remainder shares nothing with the normal flow is
/// flagged unalignable and carries no types.
///
/// ```
/// use exmine_core::classify::{classify_path, ExceptionType};
///
/// let normal: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
/// let observed: Vec<String> = ["A", "B", "C", "C", "D"].iter().map(|s| s.to_string()).collect();
/// let profile = classify_path(&observed, &normal);
/// assert_eq!(profile.types.into_iter().collect::<Vec<_>>(), vec![ExceptionType::Repeat]);
/// ```
pub fn classify_path(path: &[String], normal: &[String]) -> ExceptionProfile {
    assert!(!path.is_empty() && !normal.is_empty(), "classify_path needs non-empty sequences");
    if path == normal {
        return ExceptionProfile { types: BTreeSet::new(), records: Vec::new(), alignable: true };
    }

    let (reduced, mut records) = reduce_repetitions(path);
    let alignment = align_lcs(&reduced, normal);
    if alignment.lcs_len == 0 {
        return ExceptionProfile { types: BTreeSet::new(), records: Vec::new(), alignable: false };
    }

    let first_match = alignment.ops.iter().position(|op| matches!(op, AlignOp::Match { .. }));
    let last_match = alignment.ops.iter().rposition(|op| matches!(op, AlignOp::Match { .. }));

    let mut idx = 0;
    while idx < alignment.ops.len() {
        match alignment.ops[idx] {
            AlignOp::Match { .. } => idx += 1,
            AlignOp::Insert { obs } => {
                let mut end = idx;
                while end + 1 < alignment.ops.len()
                    && matches!(alignment.ops[end + 1], AlignOp::Insert { .. })
                {
                    end += 1;
                }
                let block_len = end - idx + 1;
                let kind = if last_match.is_some_and(|lm| idx > lm) {
                    ExceptionType::LateExit
                } else if first_match.is_some_and(|fm| end < fm) {
                    ExceptionType::LateEntry
                } else {
                    ExceptionType::Add
                };
                records.push(EditRecord {
                    kind,
                    activities: reduced[obs..obs + block_len].to_vec(),
                    position: obs,
                });
                idx = end + 1;
            }
            AlignOp::Delete { norm } => {
                let mut end = idx;
                while end + 1 < alignment.ops.len()
                    && matches!(alignment.ops[end + 1], AlignOp::Delete { .. })
                {
                    end += 1;
                }
                let block_len = end - idx + 1;
                // a block holding the normal flow's first (last) activity can
                // have no match before (after) it, so containment suffices
                let kind = if norm == 0 {
                    ExceptionType::EarlyEntry
                } else if norm + block_len == normal.len() {
                    ExceptionType::EarlyExit
                } else {
                    ExceptionType::Skip
                };
                records.push(EditRecord {
                    kind,
                    activities: normal[norm..norm + block_len].to_vec(),
                    position: norm,
                });
                idx = end + 1;
            }
        }
    }

    let types = records.iter().map(|r| r.kind).collect();
    ExceptionProfile { types, records, alignable: true }
}
