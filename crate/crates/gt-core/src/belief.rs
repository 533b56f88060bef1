//! Belief distributions over the opponent's private valuation, the
//! chance-constrained proposal search, and the Bayesian rejection update.
//!
//! Probabilities are exact rationals end to end: the update formula mixes
//! the prior and the posterior with weight `lambda`, and exactness keeps
//! total mass at 1 with no renormalization drift. A Monte-Carlo estimator
//! exists only as a cross-check of the exact expectation.

use crate::allocation::{
    enumerate_allocations, enumerate_valuations, Allocation, ItemCounts, ValuationVector,
};
use crate::exact::{rat, Rational};
use crate::side::Side;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BeliefError {
    #[error("the valuation space for these counts and total is empty")]
    EmptyValuationSpace,
    #[error("belief probabilities must sum to 1, got {0}")]
    MassNotOne(String),
    #[error("valuation {0:?} is outside the feasible space")]
    OutsideSpace(Vec<u64>),
    #[error("{name} must lie in [0, 1], got {value}")]
    ParamOutOfRange { name: &'static str, value: String },
    #[error("malformed belief document: {0}")]
    Format(String),
}

/// Hyperparameters of the rejection model: `lambda` mixes the prior with
/// the Bayesian posterior, `gamma` is the probability that the opponent
/// holds out for a better offer even when the current one is acceptable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateParams {
    lambda: Rational,
    gamma: Rational,
}

impl UpdateParams {
    pub fn new(lambda: Rational, gamma: Rational) -> Result<Self, BeliefError> {
        for (name, value) in [("lambda", &lambda), ("gamma", &gamma)] {
            if *value < Rational::zero() || *value > Rational::one() {
                return Err(BeliefError::ParamOutOfRange {
                    name,
                    value: crate::exact::format_rational(value),
                });
            }
        }
        Ok(UpdateParams { lambda, gamma })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }
}

impl Default for UpdateParams {
    /// The scripted agent's defaults: a full Bayesian step and an opponent
    /// assumed to hold out with any positive probability.
    fn default() -> Self {
        UpdateParams {
            lambda: rat(1),
            gamma: rat(1),
        }
    }
}

/// A rejected offer, the evidence consumed by [`bayesian_update`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectedOffer {
    pub offer: Allocation,
    pub proposer: Side,
}

/// A probability mass function over the feasible opponent valuations.
///
/// The map always covers the full feasible space; zero-mass entries are
/// kept so snapshots and replays line up entry for entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Belief {
    probs: BTreeMap<ValuationVector, Rational>,
    counts: ItemCounts,
    total: u64,
}

impl Belief {
    pub fn new(
        probs: BTreeMap<ValuationVector, Rational>,
        counts: ItemCounts,
        total: u64,
    ) -> Result<Self, BeliefError> {
        let space = enumerate_valuations(&counts, total);
        for key in probs.keys() {
            if !space.contains(key) {
                return Err(BeliefError::OutsideSpace(key.values().to_vec()));
            }
        }
        let mass: Rational = probs.values().sum();
        if !mass.is_one() {
            return Err(BeliefError::MassNotOne(crate::exact::format_rational(
                &mass,
            )));
        }
        Ok(Belief {
            probs,
            counts,
            total,
        })
    }

    pub fn counts(&self) -> &ItemCounts {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// All tracked valuations with their probabilities, zeros included.
    pub fn entries(&self) -> impl Iterator<Item = (&ValuationVector, &Rational)> {
        self.probs.iter()
    }

    /// The positive-mass support.
    pub fn support(&self) -> impl Iterator<Item = (&ValuationVector, &Rational)> {
        self.probs.iter().filter(|(_, p)| !p.is_zero())
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    pub fn probability(&self, valuation: &ValuationVector) -> Rational {
        self.probs
            .get(valuation)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// The uniform prior over the feasible valuation space.
pub fn uniform_belief(counts: &ItemCounts, total: u64) -> Result<Belief, BeliefError> {
    let space = enumerate_valuations(counts, total);
    if space.is_empty() {
        return Err(BeliefError::EmptyValuationSpace);
    }
    let share = Rational::new(1.into(), (space.len() as i64).into());
    let probs = space.into_iter().map(|v| (v, share.clone())).collect();
    Belief::new(probs, counts.clone(), total)
}

/// Probability that the offer is envy-free, taken over the belief.
///
/// The proposer's own side is checked against its true valuation; the
/// opponent side is the exact expectation of the envy-freeness indicator
/// under the belief. No sampling is involved.
pub fn envy_free_probability(
    own: &ValuationVector,
    allocation: &Allocation,
    own_side: Side,
    belief: &Belief,
) -> Rational {
    let own_bundle = allocation.bundle(own_side);
    let opp_bundle = allocation.bundle(own_side.other());
    if own.dot(own_bundle) < own.dot(opp_bundle) {
        return Rational::zero();
    }
    belief
        .entries()
        .filter(|(v, _)| v.dot(opp_bundle) >= v.dot(own_bundle))
        .map(|(_, p)| p)
        .sum()
}

/// Monte-Carlo estimate of [`envy_free_probability`], used to cross-check
/// the exact sum. Returns the hit fraction.
pub fn envy_free_probability_sampled<R: Rng>(
    own: &ValuationVector,
    allocation: &Allocation,
    own_side: Side,
    belief: &Belief,
    rng: &mut R,
    samples: usize,
) -> f64 {
    let own_bundle = allocation.bundle(own_side);
    let opp_bundle = allocation.bundle(own_side.other());
    let own_ok = own.dot(own_bundle) >= own.dot(opp_bundle);
    if !own_ok {
        return 0.0;
    }
    let table: Vec<(&ValuationVector, f64)> = belief
        .entries()
        .map(|(v, p)| {
            let approx = approx_ratio(p);
            (v, approx)
        })
        .collect();
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut draw: f64 = rng.gen();
        let mut picked = table.last().expect("non-empty belief").0;
        for (v, p) in &table {
            if draw < *p {
                picked = v;
                break;
            }
            draw -= p;
        }
        if picked.dot(opp_bundle) >= picked.dot(own_bundle) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

fn approx_ratio(r: &Rational) -> f64 {
    let numer: f64 = r.numer().to_string().parse().unwrap_or(0.0);
    let denom: f64 = r.denom().to_string().parse().unwrap_or(1.0);
    numer / denom
}

/// The chance-constrained proposal: among allocations with positive
/// envy-free probability, the one maximizing the proposer's utility.
///
/// Ties fall through a deterministic chain: higher envy-free probability,
/// then higher expected opponent utility under the belief, then first in
/// allocation enumeration order. Returns `None` when no allocation clears
/// the constraint, which the caller treats as a signal to concede or halt.
pub fn optimal_proposal(
    own: &ValuationVector,
    belief: &Belief,
    counts: &ItemCounts,
    own_side: Side,
) -> Option<Allocation> {
    let mut best: Option<(u64, Rational, Rational, Allocation)> = None;
    for allocation in enumerate_allocations(counts) {
        let p_ef = envy_free_probability(own, &allocation, own_side, belief);
        if p_ef.is_zero() {
            continue;
        }
        let own_utility = own.dot(allocation.bundle(own_side));
        let opp_bundle = allocation.bundle(own_side.other());
        let expected_opp: Rational = belief
            .entries()
            .map(|(v, p)| p * rat(v.dot(opp_bundle) as i64))
            .sum();
        let better = match &best {
            None => true,
            Some((u, p, e, _)) => {
                own_utility > *u
                    || (own_utility == *u && (p_ef > *p || (p_ef == *p && expected_opp > *e)))
            }
        };
        if better {
            best = Some((own_utility, p_ef, expected_opp, allocation));
        }
    }
    best.map(|(_, _, _, allocation)| allocation)
}

/// Probability that the opponent rejects `offer` assuming its valuation is
/// `candidate`.
///
/// Three disjoint cases: the offer is not envy-free for the opponent
/// (likelihood `1/(1+gamma)`); it is envy-free but some allocation that is
/// still envy-free for the opponent pays it strictly more, so it may hold
/// out (`gamma/(1+gamma)`); otherwise the offer would be accepted
/// (likelihood 0). The hold-out check uses only the candidate valuation —
/// the opponent's belief about the proposer is unobservable.
pub fn rejection_likelihood(
    offer: &Allocation,
    proposer: Side,
    candidate: &ValuationVector,
    counts: &ItemCounts,
    params: &UpdateParams,
) -> Rational {
    let opp_side = proposer.other();
    let u_offer = candidate.dot(offer.bundle(opp_side));
    let u_proposer_bundle = candidate.dot(offer.bundle(proposer));
    let one_plus_gamma = Rational::one() + params.gamma();
    if u_offer < u_proposer_bundle {
        return one_plus_gamma.recip();
    }
    let better_exists = enumerate_allocations(counts).into_iter().any(|other| {
        let u_other = candidate.dot(other.bundle(opp_side));
        u_other > u_offer && u_other >= candidate.dot(other.bundle(proposer))
    });
    if better_exists {
        params.gamma() / one_plus_gamma
    } else {
        Rational::zero()
    }
}

/// Whether an update step actually used the evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateOutcome {
    Updated,
    /// Every positive-mass valuation predicted acceptance, so the
    /// rejection has zero probability under the belief; the belief is
    /// returned unchanged. This marks an opponent deviating from the
    /// rationality model.
    DegenerateEvidence,
}

/// The rejection update: `B'(v) = (1-lambda) B(v) + lambda P(R|v) B(v) / D`
/// with `D = sum_w P(R|w) B(w)`. Exact rational arithmetic; the output
/// sums to 1 whenever the input does.
pub fn bayesian_update(
    belief: &Belief,
    rejection: &RejectedOffer,
    params: &UpdateParams,
) -> (Belief, UpdateOutcome) {
    let likelihoods: BTreeMap<ValuationVector, Rational> = belief
        .entries()
        .map(|(v, _)| {
            let p = rejection_likelihood(
                &rejection.offer,
                rejection.proposer,
                v,
                &belief.counts,
                params,
            );
            (v.clone(), p)
        })
        .collect();
    let denominator: Rational = belief.entries().map(|(v, p)| &likelihoods[v] * p).sum();
    if denominator.is_zero() {
        return (belief.clone(), UpdateOutcome::DegenerateEvidence);
    }
    let lambda = params.lambda();
    let keep = Rational::one() - lambda;
    let probs = belief
        .entries()
        .map(|(v, p)| {
            let posterior = &likelihoods[v] * p / &denominator;
            (v.clone(), &keep * p + lambda * posterior)
        })
        .collect();
    let updated = Belief::new(probs, belief.counts.clone(), belief.total)
        .expect("mixture of unit-mass distributions has unit mass");
    (updated, UpdateOutcome::Updated)
}

/// Renders a belief as the snapshot document: a `counts`/`total` header
/// followed by one `v1 v2 ... -> numerator/denominator` line per tracked
/// valuation, in lexicographic order.
pub fn serialize_belief(belief: &Belief) -> String {
    let mut out = String::new();
    let counts: Vec<String> = belief
        .counts
        .as_slice()
        .iter()
        .map(|c| c.to_string())
        .collect();
    out.push_str(&format!("counts: {}\n", counts.join(" ")));
    out.push_str(&format!("total: {}\n", belief.total));
    for (v, p) in belief.entries() {
        let values: Vec<String> = v.values().iter().map(|x| x.to_string()).collect();
        out.push_str(&format!(
            "{} -> {}/{}\n",
            values.join(" "),
            p.numer(),
            p.denom()
        ));
    }
    out
}

/// Parses the document produced by [`serialize_belief`].
pub fn parse_belief(text: &str) -> Result<Belief, BeliefError> {
    let mut counts: Option<ItemCounts> = None;
    let mut total: Option<u64> = None;
    let mut probs = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("counts:") {
            let parsed: Result<Vec<u32>, _> = rest.split_whitespace().map(|t| t.parse()).collect();
            let values = parsed.map_err(|_| BeliefError::Format(format!("bad counts `{rest}`")))?;
            counts = Some(ItemCounts::new(values).map_err(|e| BeliefError::Format(e.to_string()))?);
        } else if let Some(rest) = line.strip_prefix("total:") {
            total = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| BeliefError::Format(format!("bad total `{rest}`")))?,
            );
        } else {
            let (values_text, prob_text) = line.split_once("->").ok_or_else(|| {
                BeliefError::Format(format!("expected `values -> n/d` in `{line}`"))
            })?;
            let values: Result<Vec<u64>, _> =
                values_text.split_whitespace().map(|t| t.parse()).collect();
            let values = values
                .map_err(|_| BeliefError::Format(format!("bad valuation `{values_text}`")))?;
            let probability =
                crate::exact::parse_rational(prob_text.trim()).map_err(BeliefError::Format)?;
            let counts_ref = counts
                .as_ref()
                .ok_or_else(|| BeliefError::Format("counts must precede entries".into()))?;
            let total_ref =
                total.ok_or_else(|| BeliefError::Format("total must precede entries".into()))?;
            let valuation = ValuationVector::normalized(values, counts_ref, total_ref)
                .map_err(|e| BeliefError::Format(e.to_string()))?;
            probs.insert(valuation, probability);
        }
    }
    let counts = counts.ok_or_else(|| BeliefError::Format("missing counts".into()))?;
    let total = total.ok_or_else(|| BeliefError::Format("missing total".into()))?;
    Belief::new(probs, counts, total)
}
