//! Corpus ingestion, difficulty ranking and baseline statistics for
//! allocation-game records.
//!
//! Records are pipe-delimited lines of integer triples:
//!
//! ```text
//! # counts | row values | col values | optional outcome
//! 1 1 3 | 1 3 2 | 1 0 3
//! 1 1 3 | 1 3 2 | 1 0 3 | 0 1 1
//! 2 2 1 | 2 2 2 | 1 3 2 | no_agreement
//! ```
//!
//! The optional fourth field is the row player's agreed bundle (the column
//! player holds the remainder) or the literal `no_agreement`. `#` lines
//! are comments. Valuations must normalize to the shared total against the
//! counts; violating records are rejected with a line diagnostic, never
//! repaired.

use crate::allocation::{
    difficulty, is_envy_free, is_pareto_optimal_allocation, optimal_allocations, Allocation,
    AllocationInstance, ItemCounts, ValuationVector,
};
use crate::exact::{rat, Rational};
use num_traits::Zero;
use thiserror::Error;

/// Shared total value every valuation must reach.
pub const RECORD_TOTAL: u64 = 10;
/// Number of item types in a record.
pub const RECORD_TYPES: usize = 3;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no valid records")]
    NoRecords,
    #[error("no records carry outcomes")]
    NoOutcomes,
    #[error("record has no envy-free allocation")]
    NoEnvyFreeAllocation,
}

/// One corpus record: an instance plus, optionally, the human outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetRecord {
    pub counts: ItemCounts,
    pub valuation_row: ValuationVector,
    pub valuation_col: ValuationVector,
    pub human_outcome: Option<HumanOutcome>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HumanOutcome {
    Agreed(Allocation),
    NoAgreement,
}

impl DatasetRecord {
    pub fn instance(&self) -> AllocationInstance {
        AllocationInstance::new(
            self.counts.clone(),
            self.valuation_row.clone(),
            self.valuation_col.clone(),
        )
        .expect("records are validated on construction")
    }

    pub fn difficulty(&self) -> i64 {
        difficulty(&self.instance())
    }
}

/// A per-record parse failure with its source line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordDiagnostic {
    pub line: usize,
    pub message: String,
}

/// Valid records plus diagnostics for every rejected line.
#[derive(Clone, Debug, Default)]
pub struct ParsedRecords {
    pub records: Vec<DatasetRecord>,
    pub diagnostics: Vec<RecordDiagnostic>,
}

pub fn parse_records(text: &str) -> ParsedRecords {
    let mut out = ParsedRecords::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_record_line(line) {
            Ok(record) => out.records.push(record),
            Err(message) => out.diagnostics.push(RecordDiagnostic {
                line: line_no,
                message,
            }),
        }
    }
    out
}

fn parse_u64_triple(field: &str, what: &str) -> Result<Vec<u64>, String> {
    let values: Result<Vec<u64>, _> = field.split_whitespace().map(|t| t.parse()).collect();
    let values =
        values.map_err(|_| format!("{what}: expected non-negative integers in `{field}`"))?;
    if values.len() != RECORD_TYPES {
        return Err(format!(
            "{what}: expected {RECORD_TYPES} integers, got {}",
            values.len()
        ));
    }
    Ok(values)
}

fn parse_record_line(line: &str) -> Result<DatasetRecord, String> {
    let fields: Vec<&str> = line.split('|').map(|f| f.trim()).collect();
    if fields.len() < 3 || fields.len() > 4 {
        return Err(format!(
            "expected `counts | row values | col values [| outcome]`, got {} fields",
            fields.len()
        ));
    }
    let counts_values = parse_u64_triple(fields[0], "counts")?;
    let counts_u32: Vec<u32> = counts_values
        .iter()
        .map(|&c| u32::try_from(c).map_err(|_| format!("count {c} too large")))
        .collect::<Result<_, _>>()?;
    let counts = ItemCounts::new(counts_u32).map_err(|e| e.to_string())?;
    let valuation_row = ValuationVector::normalized(
        parse_u64_triple(fields[1], "row values")?,
        &counts,
        RECORD_TOTAL,
    )
    .map_err(|e| format!("row values: {e}"))?;
    let valuation_col = ValuationVector::normalized(
        parse_u64_triple(fields[2], "col values")?,
        &counts,
        RECORD_TOTAL,
    )
    .map_err(|e| format!("col values: {e}"))?;
    let human_outcome = match fields.get(3) {
        None => None,
        Some(&"no_agreement") => Some(HumanOutcome::NoAgreement),
        Some(field) => {
            let bundle = parse_u64_triple(field, "outcome")?;
            let bundle_u32: Vec<u32> = bundle
                .iter()
                .map(|&q| u32::try_from(q).map_err(|_| format!("quantity {q} too large")))
                .collect::<Result<_, _>>()?;
            let allocation = Allocation::from_row_bundle(&counts, bundle_u32)
                .map_err(|e| format!("outcome: {e}"))?;
            Some(HumanOutcome::Agreed(allocation))
        }
    };
    Ok(DatasetRecord {
        counts,
        valuation_row,
        valuation_col,
        human_outcome,
    })
}

/// `counts | row values | col values` for an instance, the same fields a
/// record line starts with.
pub fn format_instance_line(instance: &AllocationInstance) -> String {
    let join_u32 = |v: &[u32]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let join_u64 = |v: &[u64]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "{} | {} | {}",
        join_u32(instance.counts().as_slice()),
        join_u64(instance.valuation(crate::side::Side::Row).values()),
        join_u64(instance.valuation(crate::side::Side::Col).values()),
    )
}

pub fn serialize_records(records: &[DatasetRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&format_instance_line(&record.instance()));
        match &record.human_outcome {
            None => {}
            Some(HumanOutcome::NoAgreement) => out.push_str(" | no_agreement"),
            Some(HumanOutcome::Agreed(allocation)) => {
                let bundle: Vec<String> = allocation
                    .bundle(crate::side::Side::Row)
                    .iter()
                    .map(|q| q.to_string())
                    .collect();
                out.push_str(&format!(" | {}", bundle.join(" ")));
            }
        }
        out.push('\n');
    }
    out
}

/// The `n` hardest records: sorted by difficulty descending (closest to 0
/// first), stable on ties, so equal-difficulty records keep their input
/// order. `n` larger than the corpus returns everything.
pub fn rank_by_difficulty(records: &[DatasetRecord], n: usize) -> Vec<DatasetRecord> {
    let mut sorted: Vec<DatasetRecord> = records.to_vec();
    sorted.sort_by_key(|r| std::cmp::Reverse(r.difficulty()));
    sorted.truncate(n);
    sorted
}

/// Keeps the records that admit at least one envy-free allocation.
pub fn ef_filter(records: &[DatasetRecord]) -> Vec<DatasetRecord> {
    records
        .iter()
        .filter(|r| !optimal_allocations(&r.instance()).is_empty())
        .cloned()
        .collect()
}

/// One row of the human-baseline table: rates over all records at least as
/// hard as the threshold, with non-agreements counted as failures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineRow {
    pub threshold: i64,
    pub datapoints: usize,
    pub agreement_rate: Rational,
    pub envy_free_rate: Rational,
    pub pareto_optimal_rate: Rational,
    pub envy_free_pareto_rate: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaselineTable {
    pub rows: Vec<BaselineRow>,
}

impl BaselineTable {
    pub const CSV_HEADER: &'static str =
        "threshold,datapoints,agreement_rate,envy_free_rate,pareto_optimal_rate,envy_free_pareto_rate";

    pub fn to_csv(&self) -> String {
        use crate::exact::format_rational_fixed;
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.threshold,
                row.datapoints,
                format_rational_fixed(&row.agreement_rate, 4),
                format_rational_fixed(&row.envy_free_rate, 4),
                format_rational_fixed(&row.pareto_optimal_rate, 4),
                format_rational_fixed(&row.envy_free_pareto_rate, 4),
            ));
        }
        out
    }
}

/// Cumulative human-outcome rates for thresholds -2 down to -11.
///
/// A record lands in every bucket whose threshold its difficulty meets, so
/// datapoint counts grow as the threshold loosens.
pub fn human_baseline(records: &[DatasetRecord]) -> Result<BaselineTable, DatasetError> {
    let with_outcomes: Vec<&DatasetRecord> = records
        .iter()
        .filter(|r| r.human_outcome.is_some())
        .collect();
    if with_outcomes.is_empty() {
        return Err(DatasetError::NoOutcomes);
    }
    let rows = (2..=11)
        .map(|k| {
            let threshold = -(k as i64);
            let bucket: Vec<&&DatasetRecord> = with_outcomes
                .iter()
                .filter(|r| r.difficulty() >= threshold)
                .collect();
            let n = bucket.len();
            let rate = |hits: usize| {
                if n == 0 {
                    Rational::zero()
                } else {
                    rat(hits as i64) / rat(n as i64)
                }
            };
            let mut agreed = 0;
            let mut ef = 0;
            let mut po = 0;
            let mut ef_po = 0;
            for record in &bucket {
                if let Some(HumanOutcome::Agreed(allocation)) = &record.human_outcome {
                    agreed += 1;
                    let instance = record.instance();
                    let is_ef = is_envy_free(&instance, allocation);
                    let is_po = is_pareto_optimal_allocation(&instance, allocation);
                    ef += is_ef as usize;
                    po += is_po as usize;
                    ef_po += (is_ef && is_po) as usize;
                }
            }
            BaselineRow {
                threshold,
                datapoints: n,
                agreement_rate: rate(agreed),
                envy_free_rate: rate(ef),
                pareto_optimal_rate: rate(po),
                envy_free_pareto_rate: rate(ef_po),
            }
        })
        .collect();
    Ok(BaselineTable { rows })
}

/// The best achievable agreement on a record: envy-free, total-maximal,
/// first in enumeration order among ties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestOutcome {
    pub allocation: Allocation,
    pub score_row: u64,
    pub score_col: u64,
    pub total: u64,
}

pub fn best_possible(record: &DatasetRecord) -> Result<BestOutcome, DatasetError> {
    best_possible_of_instance(&record.instance())
}

pub fn best_possible_of_instance(
    instance: &AllocationInstance,
) -> Result<BestOutcome, DatasetError> {
    let optimal = optimal_allocations(instance);
    let allocation = optimal
        .into_iter()
        .next()
        .ok_or(DatasetError::NoEnvyFreeAllocation)?;
    let (score_row, score_col) = allocation.utilities(instance);
    Ok(BestOutcome {
        total: score_row + score_col,
        allocation,
        score_row,
        score_col,
    })
}

/// Deterministic generator for hard synthetic corpora: item counts between
/// 1 and 4 per type with 5 to 7 items overall, valuations drawn uniformly
/// from the feasible space, kept when the difficulty is at least
/// `min_difficulty` and an envy-free allocation exists. Replaces the
/// original human corpus in suites that only need hard instances.
pub fn synthesize_hard_set(n: usize, seed: u64, min_difficulty: i64) -> Vec<DatasetRecord> {
    let mut rng = crate::rng::SplitMix64::new(seed);
    let mut records = Vec::new();
    while records.len() < n {
        let counts = loop {
            let candidate: Vec<u32> = (0..RECORD_TYPES)
                .map(|_| (rng.below(4) + 1) as u32)
                .collect();
            let items: u32 = candidate.iter().sum();
            if (5..=7).contains(&items) {
                break ItemCounts::new(candidate).expect("counts are positive");
            }
        };
        let space = crate::allocation::enumerate_valuations(&counts, RECORD_TOTAL);
        if space.is_empty() {
            continue;
        }
        let valuation_row = space[rng.below(space.len() as u64) as usize].clone();
        let valuation_col = space[rng.below(space.len() as u64) as usize].clone();
        let record = DatasetRecord {
            counts,
            valuation_row,
            valuation_col,
            human_outcome: None,
        };
        if record.difficulty() < min_difficulty {
            continue;
        }
        if optimal_allocations(&record.instance()).is_empty() {
            continue;
        }
        if records.contains(&record) {
            continue;
        }
        records.push(record);
    }
    records
}
