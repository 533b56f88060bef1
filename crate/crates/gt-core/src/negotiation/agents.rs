//! Negotiating agents: the belief-tracking scripted agent, a greedy
//! baseline, and an always-accept test double.

use crate::allocation::{enumerate_allocations, Allocation, ItemCounts, ValuationVector};
use crate::belief::{
    bayesian_update, optimal_proposal, uniform_belief, Belief, RejectedOffer, UpdateParams,
};
use crate::exact::{rat, Rational};
use crate::negotiation::SessionOutcome;
use crate::side::Side;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("timed out after {0:?} waiting for the agent")]
    Timeout(std::time::Duration),
    #[error("agent process failed: {0}")]
    Process(String),
}

/// Public session information handed to every agent before round 1.
#[derive(Clone, Debug)]
pub struct SessionSetup {
    pub counts: ItemCounts,
    pub total: u64,
    pub side: Side,
    pub max_rounds: u32,
    pub concession_round: u32,
    /// True when this agent makes the opening offer.
    pub you_start: bool,
}

#[derive(Clone, Debug)]
pub enum ProposalOutcome {
    Offer(Allocation),
    /// No allocation clears the agent's feasibility constraint.
    NoFeasible,
}

#[derive(Clone, Debug)]
pub enum ResponseOutcome {
    Accept,
    Reject {
        counter: Allocation,
    },
    /// Rejecting, but no feasible counter exists either.
    NoFeasible,
}

/// One negotiating agent. Agents hold their private valuation; the runner
/// only feeds them public information and opponent messages.
pub trait Agent {
    fn begin(&mut self, setup: &SessionSetup) -> Result<(), AgentError>;
    /// Produce the opening offer. Only called for the first mover in
    /// round 1; later offers travel as rejection counters.
    fn propose(&mut self, round: u32) -> Result<ProposalOutcome, AgentError>;
    fn respond(&mut self, round: u32, offer: &Allocation) -> Result<ResponseOutcome, AgentError>;
    /// This agent's own offer from `round` was rejected.
    fn offer_rejected(&mut self, round: u32, own_offer: &Allocation) -> Result<(), AgentError>;
    /// The agent's current belief over the opponent valuation, if any.
    fn belief(&self) -> Option<&Belief>;
    fn finish(&mut self, outcome: &SessionOutcome);
}

/// The workflow agent: proposes the utility-maximal allocation with
/// positive envy-free probability under its belief, updates the belief on
/// every rejection of its own offers, and concedes once the session
/// reaches the concession round.
pub struct ScriptedAgent {
    valuation: ValuationVector,
    params: UpdateParams,
    state: Option<ScriptedState>,
}

struct ScriptedState {
    side: Side,
    counts: ItemCounts,
    concession_round: u32,
    max_rounds: u32,
    belief: Belief,
}

impl ScriptedAgent {
    pub fn new(valuation: ValuationVector, params: UpdateParams) -> Self {
        ScriptedAgent {
            valuation,
            params,
            state: None,
        }
    }

    fn state(&self) -> &ScriptedState {
        self.state.as_ref().expect("begin() ran")
    }

    fn own_side_envy_free(&self, offer: &Allocation) -> bool {
        let side = self.state().side;
        self.valuation.dot(offer.bundle(side)) >= self.valuation.dot(offer.bundle(side.other()))
    }

    fn plan(&self) -> Option<Allocation> {
        let state = self.state();
        optimal_proposal(&self.valuation, &state.belief, &state.counts, state.side)
    }

    /// Concession mode: of the allocations that keep this agent envy-free,
    /// one maximizing the opponent's expected utility under the belief.
    ///
    /// Expected-utility ties are broken by round. While further exchanges
    /// remain, the agent keeps the tie with the highest own utility. In
    /// the final exchange pair it instead maximizes the probability that
    /// the opponent finds the offer envy-free, then concedes the most, so
    /// a symmetric instance ends on the fair split.
    fn concession(&self, round: u32) -> Allocation {
        let state = self.state();
        let side = state.side;
        let final_phase = round + 2 > state.max_rounds;
        let mut best: Option<(Rational, Rational, u64, Allocation)> = None;
        for allocation in enumerate_allocations(&state.counts) {
            let own = self.valuation.dot(allocation.bundle(side));
            let other = self.valuation.dot(allocation.bundle(side.other()));
            if own < other {
                continue;
            }
            let opp_bundle = allocation.bundle(side.other());
            let own_bundle = allocation.bundle(side);
            let mut expected = Rational::zero();
            let mut acceptance = Rational::zero();
            for (v, p) in state.belief.entries() {
                expected += p * rat(v.dot(opp_bundle) as i64);
                if v.dot(opp_bundle) >= v.dot(own_bundle) {
                    acceptance += p;
                }
            }
            let better = match &best {
                None => true,
                Some((e, a, u, _)) => {
                    if expected != *e {
                        expected > *e
                    } else if final_phase {
                        acceptance > *a || (acceptance == *a && own < *u)
                    } else {
                        own > *u
                    }
                }
            };
            if better {
                best = Some((expected, acceptance, own, allocation));
            }
        }
        best.map(|(_, _, _, a)| a)
            .expect("keeping the whole pool is always envy-free for the holder")
    }

    fn make_offer(&self, round: u32) -> ProposalOutcome {
        if round >= self.state().concession_round {
            ProposalOutcome::Offer(self.concession(round))
        } else {
            match self.plan() {
                Some(a) => ProposalOutcome::Offer(a),
                None => ProposalOutcome::NoFeasible,
            }
        }
    }
}

impl Agent for ScriptedAgent {
    fn begin(&mut self, setup: &SessionSetup) -> Result<(), AgentError> {
        let belief = uniform_belief(&setup.counts, setup.total)
            .map_err(|e| AgentError::Protocol(e.to_string()))?;
        self.state = Some(ScriptedState {
            side: setup.side,
            counts: setup.counts.clone(),
            concession_round: setup.concession_round,
            max_rounds: setup.max_rounds,
            belief,
        });
        Ok(())
    }

    fn propose(&mut self, round: u32) -> Result<ProposalOutcome, AgentError> {
        Ok(self.make_offer(round))
    }

    fn respond(&mut self, round: u32, offer: &Allocation) -> Result<ResponseOutcome, AgentError> {
        let side = self.state().side;
        let own_ok = self.own_side_envy_free(offer);
        let accept = if round >= self.state().concession_round {
            own_ok
        } else {
            own_ok
                && match self.plan() {
                    Some(plan) => {
                        self.valuation.dot(offer.bundle(side))
                            >= self.valuation.dot(plan.bundle(side))
                    }
                    // Nothing feasible beats an offer we do not envy.
                    None => true,
                }
        };
        if accept {
            return Ok(ResponseOutcome::Accept);
        }
        // The counter becomes the next round's offer, so it follows the
        // next round's proposal mode.
        match self.make_offer(round + 1) {
            ProposalOutcome::Offer(counter) => Ok(ResponseOutcome::Reject { counter }),
            ProposalOutcome::NoFeasible => Ok(ResponseOutcome::NoFeasible),
        }
    }

    fn offer_rejected(&mut self, _round: u32, own_offer: &Allocation) -> Result<(), AgentError> {
        let rejection = RejectedOffer {
            offer: own_offer.clone(),
            proposer: self.state().side,
        };
        let (updated, _) = bayesian_update(&self.state().belief, &rejection, &self.params);
        self.state.as_mut().expect("begin() ran").belief = updated;
        Ok(())
    }

    fn belief(&self) -> Option<&Belief> {
        self.state.as_ref().map(|s| &s.belief)
    }

    fn finish(&mut self, _outcome: &SessionOutcome) {}
}

/// A baseline that stands in for raw self-interested play: it always asks
/// for everything it values and only accepts offers within `slack` of its
/// maximum.
pub struct GreedyAgent {
    valuation: ValuationVector,
    slack: u64,
    state: Option<(Side, ItemCounts, u64)>,
}

impl GreedyAgent {
    pub fn new(valuation: ValuationVector, slack: u64) -> Self {
        GreedyAgent {
            valuation,
            slack,
            state: None,
        }
    }

    fn demand(&self) -> Allocation {
        let (side, counts, _) = self.state.as_ref().expect("begin() ran");
        let own: Vec<u32> = counts
            .as_slice()
            .iter()
            .zip(self.valuation.values())
            .map(|(&c, &v)| if v > 0 { c } else { 0 })
            .collect();
        match side {
            Side::Row => Allocation::from_row_bundle(counts, own).expect("bundle within counts"),
            Side::Col => {
                let to_row = counts
                    .as_slice()
                    .iter()
                    .zip(&own)
                    .map(|(&c, &o)| c - o)
                    .collect();
                Allocation::from_row_bundle(counts, to_row).expect("bundle within counts")
            }
        }
    }
}

impl Agent for GreedyAgent {
    fn begin(&mut self, setup: &SessionSetup) -> Result<(), AgentError> {
        self.state = Some((setup.side, setup.counts.clone(), setup.total));
        Ok(())
    }

    fn propose(&mut self, _round: u32) -> Result<ProposalOutcome, AgentError> {
        Ok(ProposalOutcome::Offer(self.demand()))
    }

    fn respond(&mut self, _round: u32, offer: &Allocation) -> Result<ResponseOutcome, AgentError> {
        let (side, _, total) = self.state.as_ref().expect("begin() ran");
        let utility = self.valuation.dot(offer.bundle(*side));
        if utility >= total.saturating_sub(self.slack) {
            Ok(ResponseOutcome::Accept)
        } else {
            Ok(ResponseOutcome::Reject {
                counter: self.demand(),
            })
        }
    }

    fn offer_rejected(&mut self, _round: u32, _own_offer: &Allocation) -> Result<(), AgentError> {
        Ok(())
    }

    fn belief(&self) -> Option<&Belief> {
        None
    }

    fn finish(&mut self, _outcome: &SessionOutcome) {}
}

/// Test double that accepts any offer. When forced to open, it hands the
/// whole pool to the opponent.
pub struct AlwaysAcceptAgent {
    #[allow(dead_code)]
    valuation: ValuationVector,
    state: Option<(Side, ItemCounts)>,
}

impl AlwaysAcceptAgent {
    pub fn new(valuation: ValuationVector) -> Self {
        AlwaysAcceptAgent {
            valuation,
            state: None,
        }
    }
}

impl Agent for AlwaysAcceptAgent {
    fn begin(&mut self, setup: &SessionSetup) -> Result<(), AgentError> {
        self.state = Some((setup.side, setup.counts.clone()));
        Ok(())
    }

    fn propose(&mut self, _round: u32) -> Result<ProposalOutcome, AgentError> {
        let (side, counts) = self.state.as_ref().expect("begin() ran");
        let to_row = match side {
            Side::Row => vec![0; counts.types()],
            Side::Col => counts.as_slice().to_vec(),
        };
        Ok(ProposalOutcome::Offer(
            Allocation::from_row_bundle(counts, to_row).expect("bundle within counts"),
        ))
    }

    fn respond(&mut self, _round: u32, _offer: &Allocation) -> Result<ResponseOutcome, AgentError> {
        Ok(ResponseOutcome::Accept)
    }

    fn offer_rejected(&mut self, _round: u32, _own_offer: &Allocation) -> Result<(), AgentError> {
        Ok(())
    }

    fn belief(&self) -> Option<&Belief> {
        None
    }

    fn finish(&mut self, _outcome: &SessionOutcome) {}
}
