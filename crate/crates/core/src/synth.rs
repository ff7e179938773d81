//! Deterministic synthetic event-log generator with injected ground truth.
//!
//! Each case of a scenario either follows the configured normal flow or
//! receives one structural edit per configured exception type (or two, when
//! a rate names a pair). The generator records the injected type set per
//! case, so generated logs double as an oracle for the classifier and the
//! analysis pipeline. Identical configurations and seeds produce
//! byte-identical logs.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::classify::{reduce_repetitions, ExceptionType};
use crate::error::{Error, Result};
use crate::log::{CaseEvents, Event, EventLog, SourceMeta, Timestamp, TimestampFormat};

/// xoshiro256** with a SplitMix64 seeder.
///
/// The generator is pinned by its update equations so independent
/// implementations can reproduce the streams exactly.
///
/// SplitMix64, advancing a 64-bit state `w`:
///
/// ```text
/// w += 0x9E3779B97F4A7C15
/// z = w; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// output = z ^ (z >> 31)
/// ```
///
/// xoshiro256** over state `(s0, s1, s2, s3)` (all wrapping arithmetic):
///
/// ```text
/// output = rotl(s1 * 5, 7) * 9
/// t = s1 << 17
/// s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
/// ```
///
/// Seeding from a 64-bit seed fills `(s0, s1, s2, s3)` with four successive
/// SplitMix64 outputs starting at that seed.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Rng {
        let mut w = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut w);
        }
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..n`. The modulo bias is below `n / 2^64` and accepted
    /// in exchange for a draw count that is independent of the data.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Exponentially distributed with the given mean, via inversion on a
    /// uniform draw from `(0, 1]`.
    pub fn next_exp(&mut self, mean: f64) -> f64 {
        let u = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        -mean * u.ln()
    }
}

/// Injection key: the set of exception types injected into a case. The
/// empty set stands for the normal flow.
pub type Injection = BTreeSet<ExceptionType>;

/// One scenario of a synthetic log.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// The normal flow; must be free of immediate repetitions.
    pub flow: Vec<String>,
    pub cases: usize,
    /// Injection rates; must sum to 1 together and include the normal key.
    pub rates: BTreeMap<Injection, f64>,
    /// Additive throughput effect in seconds, per additive exception type.
    pub effects: BTreeMap<ExceptionType, f64>,
}

/// Full generator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Mean of the exponential inter-activity delay, in seconds.
    pub delay_mean: f64,
    /// Scenarios in name order; the position is the scenario index used for
    /// seed derivation.
    pub scenarios: Vec<ScenarioConfig>,
}

/// Ground truth for one generated case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseTruth {
    pub case_id: String,
    pub scenario: String,
    pub injected: Injection,
}

fn parse_injection(key: &str) -> Result<Injection> {
    if key == "normal" {
        return Ok(Injection::new());
    }
    let mut set = Injection::new();
    for part in key.split('+') {
        let ty = ExceptionType::parse(part.trim())
            .ok_or_else(|| Error::Config(format!("unknown exception type '{part}'")))?;
        if !set.insert(ty) {
            return Err(Error::Config(format!("duplicate type in rate key '{key}'")));
        }
    }
    if set.len() > 2 {
        return Err(Error::Config(format!("rate key '{key}' names more than two types")));
    }
    Ok(set)
}

/// Parse a generator configuration: plain `key=value` lines.
///
/// ```text
/// seed = 42
/// delay_mean = 3600
/// scenario.S1.flow = A;B;C;D
/// scenario.S1.cases = 1000
/// scenario.S1.rate.normal = 0.8
/// scenario.S1.rate.repeat = 0.1
/// scenario.S1.rate.add+skip = 0.1
/// scenario.S1.effect.add = 7200
/// ```
pub fn parse_config(text: &str) -> Result<SynthConfig> {
    let mut seed: Option<u64> = None;
    let mut delay_mean: Option<f64> = None;
    let mut scenarios: BTreeMap<String, ScenarioConfig> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected key=value")))?;
        let key = key.trim();
        let value = value.trim();
        if key == "seed" {
            seed = Some(
                value
                    .parse()
                    .map_err(|_| Error::Config(format!("line {line_no}: bad seed '{value}'")))?,
            );
            continue;
        }
        if key == "delay_mean" {
            delay_mean = Some(
                value
                    .parse()
                    .map_err(|_| Error::Config(format!("line {line_no}: bad delay '{value}'")))?,
            );
            continue;
        }
        let Some(rest) = key.strip_prefix("scenario.") else {
            return Err(Error::Config(format!("line {line_no}: unknown key '{key}'")));
        };
        let (name, field) = rest
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected scenario.<name>.<field>")))?;
        let scenario = scenarios.entry(name.to_string()).or_insert_with(|| ScenarioConfig {
            name: name.to_string(),
            flow: Vec::new(),
            cases: 0,
            rates: BTreeMap::new(),
            effects: BTreeMap::new(),
        });
        if field == "flow" {
            scenario.flow = value.split(';').map(|s| s.trim().to_string()).collect();
        } else if field == "cases" {
            scenario.cases = value
                .parse()
                .map_err(|_| Error::Config(format!("line {line_no}: bad case count '{value}'")))?;
        } else if let Some(rate_key) = field.strip_prefix("rate.") {
            let injection = parse_injection(rate_key)?;
            let rate: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("line {line_no}: bad rate '{value}'")))?;
            scenario.rates.insert(injection, rate);
        } else if let Some(effect_key) = field.strip_prefix("effect.") {
            let ty = ExceptionType::parse(effect_key)
                .ok_or_else(|| Error::Config(format!("line {line_no}: unknown type '{effect_key}'")))?;
            let effect: f64 = value
                .parse()
                .map_err(|_| Error::Config(format!("line {line_no}: bad effect '{value}'")))?;
            scenario.effects.insert(ty, effect);
        } else {
            return Err(Error::Config(format!("line {line_no}: unknown field '{field}'")));
        }
    }

    let config = SynthConfig {
        seed: seed.ok_or_else(|| Error::Config("missing seed".into()))?,
        delay_mean: delay_mean.unwrap_or(3600.0),
        scenarios: scenarios.into_values().collect(),
    };
    validate_config(&config)?;
    Ok(config)
}

/// A structural edit planned against the original flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edit {
    Repeat { at: usize },
    StepBack { at: usize },
    Add { slot: usize },
    Skip { at: usize },
    EarlyEntry,
    EarlyExit,
    LateEntry,
    LateExit,
}

impl Edit {
    /// Interval of original flow indices the edit reads or touches.
    fn footprint(self, flow_len: usize) -> (i64, i64) {
        let m = flow_len as i64;
        match self {
            Edit::Repeat { at } => (at as i64, at as i64),
            Edit::StepBack { at } => (at as i64, at as i64 + 1),
            Edit::Add { slot } => (slot as i64 - 1, slot as i64),
            Edit::Skip { at } => (at as i64 - 1, at as i64 + 1),
            Edit::EarlyEntry => (0, 0),
            Edit::EarlyExit => (m - 1, m - 1),
            Edit::LateEntry => (-1, -1),
            Edit::LateExit => (m, m),
        }
    }
}

/// All positions at which a type can be injected into `flow` so that the
/// edit, on its own, classifies back to exactly that type.
fn candidate_edits(ty: ExceptionType, flow: &[String]) -> Vec<Edit> {
    let m = flow.len();
    match ty {
        ExceptionType::Repeat => (0..m).map(|at| Edit::Repeat { at }).collect(),
        ExceptionType::StepBack => {
            if m >= 2 {
                (0..m - 1).map(|at| Edit::StepBack { at }).collect()
            } else {
                Vec::new()
            }
        }
        ExceptionType::Add => {
            if m >= 2 {
                (1..m).map(|slot| Edit::Add { slot }).collect()
            } else {
                Vec::new()
            }
        }
        ExceptionType::Skip => {
            if m >= 3 {
                // removing flow[at] must not bring two equal labels together
                (1..m - 1)
                    .filter(|&at| flow[at - 1] != flow[at + 1])
                    .map(|at| Edit::Skip { at })
                    .collect()
            } else {
                Vec::new()
            }
        }
        ExceptionType::EarlyEntry => {
            if m >= 2 {
                vec![Edit::EarlyEntry]
            } else {
                Vec::new()
            }
        }
        ExceptionType::EarlyExit => {
            if m >= 2 {
                vec![Edit::EarlyExit]
            } else {
                Vec::new()
            }
        }
        ExceptionType::LateEntry => vec![Edit::LateEntry],
        ExceptionType::LateExit => vec![Edit::LateExit],
    }
}

/// Edit pairs whose footprints are separated by at least one untouched
/// activity; such pairs cannot interact and classify back to both types.
fn candidate_pairs(a: ExceptionType, b: ExceptionType, flow: &[String]) -> Vec<(Edit, Edit)> {
    let mut pairs = Vec::new();
    for &first in &candidate_edits(a, flow) {
        for &second in &candidate_edits(b, flow) {
            let (s1, e1) = first.footprint(flow.len());
            let (s2, e2) = second.footprint(flow.len());
            let separated = e1 + 2 <= s2 || e2 + 2 <= s1;
            if separated {
                pairs.push((first, second));
            }
        }
    }
    pairs
}

fn validate_scenario(scenario: &ScenarioConfig) -> Result<()> {
    if scenario.flow.is_empty() {
        return Err(Error::Config(format!("scenario {}: empty flow", scenario.name)));
    }
    if scenario.cases == 0 {
        return Err(Error::Config(format!("scenario {}: zero cases", scenario.name)));
    }
    let (_, repetitions) = reduce_repetitions(&scenario.flow);
    if !repetitions.is_empty() {
        return Err(Error::Config(format!(
            "scenario {}: normal flow contains an immediate repetition",
            scenario.name
        )));
    }
    if scenario.rates.is_empty() {
        return Err(Error::Config(format!("scenario {}: no rates", scenario.name)));
    }
    let mut total = 0.0;
    for (injection, &rate) in &scenario.rates {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Config(format!(
                "scenario {}: rate out of [0,1] for '{}'",
                scenario.name,
                injection_label(injection)
            )));
        }
        total += rate;
        if rate > 0.0 {
            let feasible = match injection.len() {
                0 => true,
                1 => !candidate_edits(*injection.iter().next().unwrap(), &scenario.flow).is_empty(),
                _ => {
                    let mut it = injection.iter();
                    let a = *it.next().unwrap();
                    let b = *it.next().unwrap();
                    !candidate_pairs(a, b, &scenario.flow).is_empty()
                }
            };
            if !feasible {
                return Err(Error::Config(format!(
                    "scenario {}: injection '{}' is infeasible for the configured flow",
                    scenario.name,
                    injection_label(injection)
                )));
            }
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "scenario {}: rates sum to {total}, expected 1",
            scenario.name
        )));
    }
    for (ty, effect) in &scenario.effects {
        if !ty.is_additive() {
            return Err(Error::Config(format!(
                "scenario {}: effect configured for non-additive type {ty}",
                scenario.name
            )));
        }
        if *effect < 0.0 {
            return Err(Error::Config(format!("scenario {}: negative effect", scenario.name)));
        }
    }
    Ok(())
}

fn validate_config(config: &SynthConfig) -> Result<()> {
    if config.delay_mean <= 0.0 {
        return Err(Error::Config("delay_mean must be positive".into()));
    }
    if config.scenarios.is_empty() {
        return Err(Error::Config("no scenarios configured".into()));
    }
    for scenario in &config.scenarios {
        validate_scenario(scenario)?;
    }
    Ok(())
}

fn injection_label(injection: &Injection) -> String {
    if injection.is_empty() {
        "normal".to_string()
    } else {
        crate::classify::type_set_label(injection)
    }
}

struct FreshLabels<'a> {
    counter: usize,
    flow: &'a [String],
}

impl<'a> FreshLabels<'a> {
    fn next(&mut self) -> String {
        loop {
            self.counter += 1;
            let label = format!("X{}", self.counter);
            if !self.flow.contains(&label) {
                return label;
            }
        }
    }
}

/// Activity plus the type of the edit that introduced it, if any; the tag
/// decides where the configured extra delay lands.
type TaggedPath = Vec<(String, Option<ExceptionType>)>;

fn apply_edit(edit: Edit, path: &mut TaggedPath, fresh: &mut FreshLabels<'_>) {
    match edit {
        Edit::Repeat { at } => {
            let copy = path[at].0.clone();
            path.insert(at + 1, (copy, Some(ExceptionType::Repeat)));
        }
        Edit::StepBack { at } => {
            let first = path[at].0.clone();
            let second = path[at + 1].0.clone();
            path.insert(at + 2, (second, None));
            path.insert(at + 2, (first, Some(ExceptionType::StepBack)));
        }
        Edit::Add { slot } => {
            path.insert(slot, (fresh.next(), Some(ExceptionType::Add)));
        }
        Edit::Skip { at } => {
            path.remove(at);
        }
        Edit::EarlyEntry => {
            path.remove(0);
        }
        Edit::EarlyExit => {
            path.pop();
        }
        Edit::LateEntry => {
            path.insert(0, (fresh.next(), Some(ExceptionType::LateEntry)));
        }
        Edit::LateExit => {
            path.push((fresh.next(), Some(ExceptionType::LateExit)));
        }
    }
}

fn build_case_path(
    injection: &Injection,
    flow: &[String],
    rng: &mut Rng,
) -> Result<TaggedPath> {
    let mut edits: Vec<Edit> = match injection.len() {
        0 => Vec::new(),
        1 => {
            let ty = *injection.iter().next().unwrap();
            let candidates = candidate_edits(ty, flow);
            vec![candidates[rng.next_index(candidates.len())]]
        }
        _ => {
            let mut it = injection.iter();
            let a = *it.next().unwrap();
            let b = *it.next().unwrap();
            let pairs = candidate_pairs(a, b, flow);
            let (first, second) = pairs[rng.next_index(pairs.len())];
            vec![first, second]
        }
    };
    // apply right to left so original-flow coordinates stay valid
    edits.sort_by_key(|e| std::cmp::Reverse(e.footprint(flow.len()).0));
    let mut path: TaggedPath = flow.iter().map(|a| (a.clone(), None)).collect();
    let mut fresh = FreshLabels { counter: 0, flow };
    for edit in edits {
        apply_edit(edit, &mut path, &mut fresh);
    }
    if !injection.is_empty() && path.iter().map(|(a, _)| a.as_str()).eq(flow.iter().map(|s| s.as_str()))
    {
        return Err(Error::Config("structural edit reproduced the normal flow".into()));
    }
    Ok(path)
}

/// Base instant of generated logs: 2020-01-01T00:00:00Z.
const BASE_EPOCH: i64 = 1_577_836_800;
/// Case start spacing in seconds.
const CASE_SPACING: i64 = 60;

/// Generate an event log plus its per-case ground truth.
///
/// Scenario `k` (in name order) draws from a generator seeded with
/// `seed + k`, so scenario streams are independent of one another and of
/// the scenario count.
pub fn generate_log(config: &SynthConfig) -> Result<(EventLog, Vec<CaseTruth>)> {
    validate_config(config)?;
    let mut cases = Vec::new();
    let mut truths = Vec::new();
    let mut rows = 0usize;
    let mut row_index: u64 = 1; // header occupies line 1

    for (scenario_index, scenario) in config.scenarios.iter().enumerate() {
        let mut rng = Rng::seed_from_u64(config.seed.wrapping_add(scenario_index as u64));
        let rates: Vec<(&Injection, f64)> = scenario.rates.iter().map(|(k, &v)| (k, v)).collect();
        for case_number in 0..scenario.cases {
            let draw = rng.next_f64();
            let mut acc = 0.0;
            let mut chosen: &Injection = rates[rates.len() - 1].0;
            for (injection, rate) in &rates {
                acc += rate;
                if draw < acc {
                    chosen = injection;
                    break;
                }
            }

            let path = build_case_path(chosen, &scenario.flow, &mut rng)?;
            let case_id = format!("{}_{}", scenario.name, case_number);
            let start = BASE_EPOCH + case_number as i64 * CASE_SPACING;
            let mut clock = start as f64;
            let mut events = Vec::with_capacity(path.len());
            for (step, (activity, tag)) in path.iter().enumerate() {
                if step > 0 {
                    clock += rng.next_exp(config.delay_mean);
                    if let Some(ty) = tag {
                        clock += scenario.effects.get(ty).copied().unwrap_or(0.0);
                    }
                }
                row_index += 1;
                events.push(Event {
                    case_id: case_id.clone(),
                    activity: activity.clone(),
                    timestamp: Timestamp::from_epoch_seconds(clock.floor() as i64)
                        .expect("generated timestamp in range"),
                    row_index,
                });
                rows += 1;
            }
            let mut attributes = BTreeMap::new();
            attributes.insert("outcome".to_string(), scenario.name.clone());
            cases.push(CaseEvents { case_id: case_id.clone(), events, attributes });
            truths.push(CaseTruth {
                case_id,
                scenario: scenario.name.clone(),
                injected: chosen.clone(),
            });
        }
    }

    Ok((
        EventLog {
            source: SourceMeta {
                name: format!("synth(seed={})", config.seed),
                rows,
                timestamp_format: TimestampFormat::EpochSeconds,
            },
            cases,
        },
        truths,
    ))
}

/// Render a generated log as CSV (`case_id,activity,timestamp,outcome`,
/// integer epoch-second timestamps).
pub fn write_log_csv(log: &EventLog) -> Vec<u8> {
    let mut out = String::from("case_id,activity,timestamp,outcome\n");
    for case in &log.cases {
        let outcome = case.attributes.get("outcome").map(String::as_str).unwrap_or("");
        for event in &case.events {
            let seconds = event.timestamp.nanos() / 1_000_000_000;
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&event.case_id),
                csv_field(&event.activity),
                seconds,
                csv_field(outcome)
            ));
        }
    }
    out.into_bytes()
}

/// Render ground truth as CSV (`case_id,injected_types`, types `;`-joined
/// and sorted, empty for normal cases).
pub fn write_truth_csv(truths: &[CaseTruth]) -> Vec<u8> {
    let mut out = String::from("case_id,injected_types\n");
    for truth in truths {
        let types =
            truth.injected.iter().map(|t| t.name()).collect::<Vec<_>>().join(";");
        out.push_str(&format!("{},{}\n", csv_field(&truth.case_id), types));
    }
    out.into_bytes()
}

fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') || value.contains('\n') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}
