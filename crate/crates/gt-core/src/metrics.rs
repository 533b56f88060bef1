//! Scoring of negotiation outcomes and of opponent-valuation estimates.

use crate::allocation::{
    indistinguishable_set, is_envy_free, is_pareto_optimal_allocation, AllocationError,
    AllocationInstance, ItemCounts, ValuationVector,
};
use crate::exact::{format_rational_fixed, rat, Rational};
use crate::negotiation::{NegotiationTranscript, SessionOutcome};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("estimation metrics need a non-empty support")]
    EmptySupport,
    #[error("prior size {prior} is smaller than the support size {support}")]
    PriorSmallerThanSupport { prior: usize, support: usize },
    #[error("cannot aggregate an empty record list")]
    EmptyRecordList,
    #[error(transparent)]
    Allocation(#[from] AllocationError),
}

/// Outcome scores for one session, under the true valuations. Flags and
/// scores are all zero when no agreement was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeMetrics {
    pub rounds: u32,
    pub agreement: bool,
    pub score_row: u64,
    pub score_col: u64,
    pub pareto_optimal: bool,
    pub envy_free: bool,
    pub total: u64,
}

/// Scores a finished transcript. Pareto optimality is evaluated over all
/// allocations by enumeration, envy-freeness under both true valuations.
pub fn score_outcome(
    instance: &AllocationInstance,
    transcript: &NegotiationTranscript,
) -> OutcomeMetrics {
    match &transcript.outcome {
        SessionOutcome::Agreed(allocation) => {
            let (score_row, score_col) = allocation.utilities(instance);
            OutcomeMetrics {
                rounds: transcript.rounds_used,
                agreement: true,
                score_row,
                score_col,
                pareto_optimal: is_pareto_optimal_allocation(instance, allocation),
                envy_free: is_envy_free(instance, allocation),
                total: score_row + score_col,
            }
        }
        SessionOutcome::NoAgreement => OutcomeMetrics {
            rounds: transcript.rounds_used,
            agreement: false,
            score_row: 0,
            score_col: 0,
            pareto_optimal: false,
            envy_free: false,
            total: 0,
        },
    }
}

/// Quality of an estimated opponent-valuation set against the truth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstimationMetrics {
    /// Whether the true valuation is in the estimated set.
    pub precision: bool,
    /// The membership indicator divided by the set size.
    pub recall: Rational,
    /// Relative shrinkage of the set versus the prior.
    pub reduction: Rational,
    /// Whether the set meets the indistinguishable set of the truth.
    pub precision_indist: bool,
    /// Fraction of the set indistinguishable from the truth.
    pub recall_indist: Rational,
}

pub fn estimation_metrics(
    support: &[ValuationVector],
    true_val: &ValuationVector,
    prior_size: usize,
    own: &ValuationVector,
    counts: &ItemCounts,
) -> Result<EstimationMetrics, MetricsError> {
    if support.is_empty() {
        return Err(MetricsError::EmptySupport);
    }
    if prior_size < support.len() {
        return Err(MetricsError::PriorSmallerThanSupport {
            prior: prior_size,
            support: support.len(),
        });
    }
    let size = rat(support.len() as i64);
    let precision = support.contains(true_val);
    let recall = if precision {
        size.recip()
    } else {
        Rational::zero()
    };
    let reduction = rat(1) - &size / rat(prior_size as i64);
    let indist = indistinguishable_set(own, true_val, counts)?;
    let overlap = support.iter().filter(|v| indist.contains(v)).count();
    Ok(EstimationMetrics {
        precision,
        recall,
        reduction,
        precision_indist: overlap > 0,
        recall_indist: rat(overlap as i64) / size,
    })
}

/// Arithmetic means of outcome records, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSummary {
    pub count: usize,
    pub rounds: Rational,
    pub agreement: Rational,
    pub score_row: Rational,
    pub score_col: Rational,
    pub pareto_optimal: Rational,
    pub envy_free: Rational,
    pub total: Rational,
}

pub fn aggregate_outcomes(records: &[OutcomeMetrics]) -> Result<OutcomeSummary, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecordList);
    }
    let n = rat(records.len() as i64);
    let mean = |f: &dyn Fn(&OutcomeMetrics) -> i64| -> Rational {
        records.iter().map(|r| rat(f(r))).sum::<Rational>() / &n
    };
    Ok(OutcomeSummary {
        count: records.len(),
        rounds: mean(&|r| r.rounds as i64),
        agreement: mean(&|r| r.agreement as i64),
        score_row: mean(&|r| r.score_row as i64),
        score_col: mean(&|r| r.score_col as i64),
        pareto_optimal: mean(&|r| r.pareto_optimal as i64),
        envy_free: mean(&|r| r.envy_free as i64),
        total: mean(&|r| r.total as i64),
    })
}

/// Arithmetic means of estimation records, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EstimationSummary {
    pub count: usize,
    pub precision: Rational,
    pub recall: Rational,
    pub reduction: Rational,
    pub precision_indist: Rational,
    pub recall_indist: Rational,
}

pub fn aggregate_estimations(
    records: &[EstimationMetrics],
) -> Result<EstimationSummary, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecordList);
    }
    let n = rat(records.len() as i64);
    let mean = |f: &dyn Fn(&EstimationMetrics) -> Rational| -> Rational {
        records.iter().map(f).sum::<Rational>() / &n
    };
    Ok(EstimationSummary {
        count: records.len(),
        precision: mean(&|r| rat(r.precision as i64)),
        recall: mean(&|r| r.recall.clone()),
        reduction: mean(&|r| r.reduction.clone()),
        precision_indist: mean(&|r| rat(r.precision_indist as i64)),
        recall_indist: mean(&|r| r.recall_indist.clone()),
    })
}

pub const OUTCOME_CSV_HEADER: &str = "rounds,agreement,score_row,score_col,po,ef,total";

impl OutcomeMetrics {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.rounds,
            self.agreement as u8,
            self.score_row,
            self.score_col,
            self.pareto_optimal as u8,
            self.envy_free as u8,
            self.total
        )
    }
}

impl OutcomeSummary {
    /// A report row in the fixed column order, means to four decimals.
    pub fn to_csv_row(&self) -> String {
        [
            &self.rounds,
            &self.agreement,
            &self.score_row,
            &self.score_col,
            &self.pareto_optimal,
            &self.envy_free,
            &self.total,
        ]
        .iter()
        .map(|r| format_rational_fixed(r, 4))
        .collect::<Vec<_>>()
        .join(",")
    }
}

pub const ESTIMATION_CSV_HEADER: &str = "precision,recall,reduction,precision_indist,recall_indist";

impl EstimationSummary {
    pub fn to_csv_row(&self) -> String {
        [
            &self.precision,
            &self.recall,
            &self.reduction,
            &self.precision_indist,
            &self.recall_indist,
        ]
        .iter()
        .map(|r| format_rational_fixed(r, 4))
        .collect::<Vec<_>>()
        .join(",")
    }
}
