//! The alternating-offer negotiation loop.
//!
//! One session is strictly sequential: the first mover proposes, the other
//! side accepts or rejects with a counter, the counter becomes the next
//! offer, and the rejected proposer updates its belief. Sessions terminate
//! on acceptance, at `max_rounds`, when an agent has no feasible proposal,
//! or on a protocol violation (recorded, never panicked).
//!
//! Distinct sessions share no state and may run in parallel.

mod agents;
mod wire;

pub use agents::{
    Agent, AgentError, AlwaysAcceptAgent, GreedyAgent, ProposalOutcome, ResponseOutcome,
    ScriptedAgent, SessionSetup,
};
pub use wire::{serve_agent, ExternalAgent, WireAllocation, WireMessage, DEFAULT_WIRE_TIMEOUT};

use crate::allocation::{Allocation, AllocationInstance};
use crate::belief::{Belief, UpdateParams};
use crate::side::Side;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("bad negotiation config: {0}")]
    BadConfig(String),
}

/// Session parameters. `concession_round` is the round from which agents
/// stop holding out: proposals switch to concession mode and responders
/// accept anything envy-free for themselves, which keeps sessions from
/// livelocking inside the round budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegotiationConfig {
    pub max_rounds: u32,
    pub concession_round: u32,
    pub first_mover: Side,
    pub params_row: UpdateParams,
    pub params_col: UpdateParams,
}

impl Default for NegotiationConfig {
    fn default() -> Self {
        NegotiationConfig {
            max_rounds: 20,
            concession_round: 16,
            first_mover: Side::Row,
            params_row: UpdateParams::default(),
            params_col: UpdateParams::default(),
        }
    }
}

impl NegotiationConfig {
    fn validate(&self) -> Result<(), SessionError> {
        if self.max_rounds == 0 {
            return Err(SessionError::BadConfig(
                "max_rounds must be positive".into(),
            ));
        }
        if self.concession_round == 0 || self.concession_round > self.max_rounds {
            return Err(SessionError::BadConfig(format!(
                "concession_round must lie in 1..=max_rounds, got {} with max_rounds {}",
                self.concession_round, self.max_rounds
            )));
        }
        Ok(())
    }
}

/// One recorded message: an offer or the response to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MessageRecord {
    Offer {
        round: u32,
        proposer: Side,
        allocation: Allocation,
    },
    Response {
        round: u32,
        responder: Side,
        accepted: bool,
        /// Present exactly when the response is a rejection.
        counter: Option<Allocation>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionOutcome {
    Agreed(Allocation),
    NoAgreement,
}

/// Why the session stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    Accepted,
    MaxRounds,
    /// The named side had no allocation clearing its chance constraint.
    NoFeasibleProposal(Side),
    /// The named side violated the protocol; the message says how.
    Protocol {
        side: Side,
        message: String,
    },
}

/// Belief state of one agent after a given round (round 0 is the prior).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeliefSnapshot {
    pub side: Side,
    pub round: u32,
    pub belief: Belief,
}

/// Complete, replayable record of one session.
#[derive(Clone, Debug)]
pub struct NegotiationTranscript {
    pub instance: AllocationInstance,
    pub config: NegotiationConfig,
    pub messages: Vec<MessageRecord>,
    pub belief_snapshots: Vec<BeliefSnapshot>,
    pub outcome: SessionOutcome,
    pub termination: Termination,
    /// Number of offers made; at most `max_rounds`.
    pub rounds_used: u32,
}

impl NegotiationTranscript {
    /// The last recorded belief of `side`, if that agent exposes one.
    pub fn final_belief(&self, side: Side) -> Option<&Belief> {
        self.belief_snapshots
            .iter()
            .rev()
            .find(|s| s.side == side)
            .map(|s| &s.belief)
    }

    pub fn protocol_error(&self) -> Option<&str> {
        match &self.termination {
            Termination::Protocol { message, .. } => Some(message),
            _ => None,
        }
    }
}

/// Runs one session between two agents over an instance.
///
/// Each agent is initialized with only the public pool, the shared total
/// and its seat; private valuations are baked into the agents themselves.
/// Protocol violations abort the session with the error recorded in the
/// transcript rather than returned.
pub fn run_session(
    instance: &AllocationInstance,
    agent_row: &mut dyn Agent,
    agent_col: &mut dyn Agent,
    config: &NegotiationConfig,
) -> Result<NegotiationTranscript, SessionError> {
    config.validate()?;
    let mut session = Session {
        instance,
        config,
        agents: [agent_row, agent_col],
        messages: Vec::new(),
        snapshots: Vec::new(),
    };
    let (outcome, termination, rounds_used) = session.drive();
    let transcript = NegotiationTranscript {
        instance: instance.clone(),
        config: config.clone(),
        messages: session.messages,
        belief_snapshots: session.snapshots,
        outcome,
        termination,
        rounds_used,
    };
    Ok(transcript)
}

struct Session<'a> {
    instance: &'a AllocationInstance,
    config: &'a NegotiationConfig,
    agents: [&'a mut dyn Agent; 2],
    messages: Vec<MessageRecord>,
    snapshots: Vec<BeliefSnapshot>,
}

fn seat(side: Side) -> usize {
    match side {
        Side::Row => 0,
        Side::Col => 1,
    }
}

impl<'a> Session<'a> {
    fn drive(&mut self) -> (SessionOutcome, Termination, u32) {
        let setup_for =
            |side: Side, config: &NegotiationConfig, inst: &AllocationInstance| SessionSetup {
                counts: inst.counts().clone(),
                total: inst.total(),
                side,
                max_rounds: config.max_rounds,
                concession_round: config.concession_round,
                you_start: config.first_mover == side,
            };
        for side in [Side::Row, Side::Col] {
            let setup = setup_for(side, self.config, self.instance);
            if let Err(e) = self.agents[seat(side)].begin(&setup) {
                return self.abort(side, e, 0);
            }
        }
        self.snapshot(0);

        let mut proposer = self.config.first_mover;
        let mut pending: Option<Allocation> = None;
        let mut round: u32 = 1;
        loop {
            if round > self.config.max_rounds {
                let outcome = (SessionOutcome::NoAgreement, Termination::MaxRounds);
                return self.close(outcome, self.config.max_rounds);
            }
            let offer = match pending.take() {
                Some(counter) => counter,
                None => match self.agents[seat(proposer)].propose(round) {
                    Ok(ProposalOutcome::Offer(a)) => a,
                    Ok(ProposalOutcome::NoFeasible) => {
                        let outcome = (
                            SessionOutcome::NoAgreement,
                            Termination::NoFeasibleProposal(proposer),
                        );
                        return self.close(outcome, round - 1);
                    }
                    Err(e) => return self.abort(proposer, e, round - 1),
                },
            };
            self.messages.push(MessageRecord::Offer {
                round,
                proposer,
                allocation: offer.clone(),
            });

            let responder = proposer.other();
            match self.agents[seat(responder)].respond(round, &offer) {
                Ok(ResponseOutcome::Accept) => {
                    self.messages.push(MessageRecord::Response {
                        round,
                        responder,
                        accepted: true,
                        counter: None,
                    });
                    self.snapshot(round);
                    let outcome = (SessionOutcome::Agreed(offer), Termination::Accepted);
                    return self.close(outcome, round);
                }
                Ok(ResponseOutcome::Reject { counter }) => {
                    self.messages.push(MessageRecord::Response {
                        round,
                        responder,
                        accepted: false,
                        counter: Some(counter.clone()),
                    });
                    if let Err(e) = self.agents[seat(proposer)].offer_rejected(round, &offer) {
                        return self.abort(proposer, e, round);
                    }
                    self.snapshot(round);
                    pending = Some(counter);
                    proposer = responder;
                    round += 1;
                }
                Ok(ResponseOutcome::NoFeasible) => {
                    self.snapshot(round);
                    let outcome = (
                        SessionOutcome::NoAgreement,
                        Termination::NoFeasibleProposal(responder),
                    );
                    return self.close(outcome, round);
                }
                Err(e) => return self.abort(responder, e, round),
            }
        }
    }

    fn snapshot(&mut self, round: u32) {
        for side in [Side::Row, Side::Col] {
            if let Some(belief) = self.agents[seat(side)].belief() {
                self.snapshots.push(BeliefSnapshot {
                    side,
                    round,
                    belief: belief.clone(),
                });
            }
        }
    }

    fn close(
        &mut self,
        (outcome, termination): (SessionOutcome, Termination),
        rounds_used: u32,
    ) -> (SessionOutcome, Termination, u32) {
        for agent in self.agents.iter_mut() {
            agent.finish(&outcome);
        }
        (outcome, termination, rounds_used)
    }

    fn abort(
        &mut self,
        side: Side,
        error: AgentError,
        rounds_used: u32,
    ) -> (SessionOutcome, Termination, u32) {
        let outcome = SessionOutcome::NoAgreement;
        let termination = Termination::Protocol {
            side,
            message: error.to_string(),
        };
        for agent in self.agents.iter_mut() {
            agent.finish(&outcome);
        }
        (outcome, termination, rounds_used)
    }
}

/// Recomputes every belief snapshot from the recorded message list alone.
///
/// The rejection updates are a pure function of (offer, proposer seat,
/// params), so feeding the messages through fresh uniform priors must
/// reproduce the transcript's snapshots exactly. Sides that recorded no
/// initial snapshot (agents without beliefs) are skipped.
pub fn replay_belief_snapshots(
    transcript: &NegotiationTranscript,
) -> Result<Vec<BeliefSnapshot>, SessionError> {
    use crate::belief::{bayesian_update, uniform_belief, RejectedOffer};
    let counts = transcript.instance.counts();
    let total = transcript.instance.total();
    let tracked: Vec<Side> = [Side::Row, Side::Col]
        .into_iter()
        .filter(|&s| {
            transcript
                .belief_snapshots
                .iter()
                .any(|snap| snap.side == s && snap.round == 0)
        })
        .collect();
    let mut beliefs = [
        uniform_belief(counts, total).map_err(|e| SessionError::BadConfig(e.to_string()))?,
        uniform_belief(counts, total).map_err(|e| SessionError::BadConfig(e.to_string()))?,
    ];
    let mut snapshots = Vec::new();
    let record = |round: u32, beliefs: &[Belief; 2], out: &mut Vec<BeliefSnapshot>| {
        for &side in &tracked {
            out.push(BeliefSnapshot {
                side,
                round,
                belief: beliefs[seat(side)].clone(),
            });
        }
    };
    record(0, &beliefs, &mut snapshots);

    let mut last_offer: Option<(u32, Side, Allocation)> = None;
    for message in &transcript.messages {
        match message {
            MessageRecord::Offer {
                round,
                proposer,
                allocation,
            } => {
                last_offer = Some((*round, *proposer, allocation.clone()));
            }
            MessageRecord::Response {
                round, accepted, ..
            } => {
                if !*accepted {
                    let (_, proposer, offer) =
                        last_offer.clone().expect("response follows an offer");
                    if tracked.contains(&proposer) {
                        let params = match proposer {
                            Side::Row => &transcript.config.params_row,
                            Side::Col => &transcript.config.params_col,
                        };
                        let rejection = RejectedOffer { offer, proposer };
                        let (updated, _) =
                            bayesian_update(&beliefs[seat(proposer)], &rejection, params);
                        beliefs[seat(proposer)] = updated;
                    }
                }
                record(*round, &beliefs, &mut snapshots);
            }
        }
    }
    Ok(snapshots)
}

/// Renders the canonical transcript document. The belief sections can be
/// omitted for compact logs; everything else is always present.
pub fn serialize_transcript(transcript: &NegotiationTranscript, include_beliefs: bool) -> String {
    use crate::belief::serialize_belief;
    use crate::exact::format_rational;
    let mut out = String::new();
    let inst = &transcript.instance;
    out.push_str(&format!(
        "instance: {}\n",
        crate::dataset::format_instance_line(inst)
    ));
    let cfg = &transcript.config;
    out.push_str(&format!(
        "config: max_rounds={} concession_round={} first_mover={} lambda_row={} gamma_row={} lambda_col={} gamma_col={}\n",
        cfg.max_rounds,
        cfg.concession_round,
        cfg.first_mover,
        format_rational(cfg.params_row.lambda()),
        format_rational(cfg.params_row.gamma()),
        format_rational(cfg.params_col.lambda()),
        format_rational(cfg.params_col.gamma()),
    ));
    for message in &transcript.messages {
        match message {
            MessageRecord::Offer {
                round,
                proposer,
                allocation,
            } => {
                out.push_str(&format!(
                    "offer round={round} by={proposer} allocation={}\n",
                    format_allocation(allocation)
                ));
            }
            MessageRecord::Response {
                round,
                responder,
                accepted,
                counter,
            } => match counter {
                Some(c) => out.push_str(&format!(
                    "response round={round} by={responder} reject counter={}\n",
                    format_allocation(c)
                )),
                None => out.push_str(&format!(
                    "response round={round} by={responder} {}\n",
                    if *accepted { "accept" } else { "reject" }
                )),
            },
        }
    }
    let termination = match &transcript.termination {
        Termination::Accepted => "accepted".to_string(),
        Termination::MaxRounds => "max_rounds".to_string(),
        Termination::NoFeasibleProposal(side) => format!("no_feasible_proposal by={side}"),
        Termination::Protocol { side, message } => {
            format!("protocol_error by={side}: {message}")
        }
    };
    out.push_str(&format!("termination: {termination}\n"));
    match &transcript.outcome {
        SessionOutcome::Agreed(allocation) => out.push_str(&format!(
            "outcome: agreed {}\n",
            format_allocation(allocation)
        )),
        SessionOutcome::NoAgreement => out.push_str("outcome: no_agreement\n"),
    }
    out.push_str(&format!("rounds_used: {}\n", transcript.rounds_used));
    if include_beliefs {
        for snap in &transcript.belief_snapshots {
            out.push_str(&format!(
                "belief round={} agent={}\n",
                snap.round, snap.side
            ));
            for line in serialize_belief(&snap.belief).lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
    }
    out
}

/// `[row bundle | col bundle]`, quantities space-separated.
pub fn format_allocation(allocation: &Allocation) -> String {
    let row: Vec<String> = allocation
        .bundle(Side::Row)
        .iter()
        .map(|q| q.to_string())
        .collect();
    let col: Vec<String> = allocation
        .bundle(Side::Col)
        .iter()
        .map(|q| q.to_string())
        .collect();
    format!("[{} | {}]", row.join(" "), col.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{ItemCounts, ValuationVector};
    use crate::belief::UpdateParams;

    fn example_instance() -> AllocationInstance {
        let counts = ItemCounts::new(vec![1, 1, 3]).unwrap();
        let row = ValuationVector::normalized(vec![1, 3, 2], &counts, 10).unwrap();
        let col = ValuationVector::normalized(vec![1, 0, 3], &counts, 10).unwrap();
        AllocationInstance::new(counts, row, col).unwrap()
    }

    fn scripted_pair(instance: &AllocationInstance) -> (ScriptedAgent, ScriptedAgent) {
        (
            ScriptedAgent::new(
                instance.valuation(Side::Row).clone(),
                UpdateParams::default(),
            ),
            ScriptedAgent::new(
                instance.valuation(Side::Col).clone(),
                UpdateParams::default(),
            ),
        )
    }

    #[test]
    fn running_example_reaches_an_envy_free_agreement() {
        let instance = example_instance();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        match &t.outcome {
            SessionOutcome::Agreed(allocation) => {
                assert!(crate::allocation::is_envy_free(&instance, allocation));
                let (u, v) = allocation.utilities(&instance);
                assert_eq!(u + v, 12);
            }
            other => panic!("expected agreement, got {other:?}"),
        }
        assert!(t.rounds_used <= config.max_rounds);
    }

    #[test]
    fn sessions_are_deterministic() {
        let instance = example_instance();
        let config = NegotiationConfig::default();
        let (mut row_a, mut col_a) = scripted_pair(&instance);
        let a = run_session(&instance, &mut row_a, &mut col_a, &config).unwrap();
        let (mut row_b, mut col_b) = scripted_pair(&instance);
        let b = run_session(&instance, &mut row_b, &mut col_b, &config).unwrap();
        assert_eq!(
            serialize_transcript(&a, true),
            serialize_transcript(&b, true)
        );
    }

    #[test]
    fn replay_reproduces_belief_snapshots() {
        let instance = example_instance();
        let config = NegotiationConfig::default();
        let (mut row, mut col) = scripted_pair(&instance);
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        let replayed = replay_belief_snapshots(&t).unwrap();
        assert_eq!(replayed.len(), t.belief_snapshots.len());
        for (a, b) in replayed.iter().zip(&t.belief_snapshots) {
            assert_eq!(a.side, b.side);
            assert_eq!(a.round, b.round);
            assert_eq!(a.belief, b.belief);
        }
    }

    #[test]
    fn contested_single_item_ends_without_agreement() {
        let counts = ItemCounts::new(vec![1, 0, 0]).unwrap();
        let v = ValuationVector::normalized(vec![10, 0, 0], &counts, 10).unwrap();
        let instance = AllocationInstance::new(counts, v.clone(), v).unwrap();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        assert_eq!(t.outcome, SessionOutcome::NoAgreement);
        assert_eq!(t.termination, Termination::NoFeasibleProposal(Side::Row));
    }

    #[test]
    fn identical_valuations_settle_on_the_fair_split() {
        let counts = ItemCounts::new(vec![2, 2, 2]).unwrap();
        let v = ValuationVector::normalized(vec![2, 2, 1], &counts, 10).unwrap();
        let instance = AllocationInstance::new(counts, v.clone(), v).unwrap();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        match &t.outcome {
            // With identical valuations the only envy-free agreements give
            // each side exactly half the value.
            SessionOutcome::Agreed(a) => {
                assert!(crate::allocation::is_envy_free(&instance, a));
                assert_eq!(a.utilities(&instance), (5, 5));
            }
            other => panic!("expected agreement, got {other:?}"),
        }
        assert!(t.rounds_used <= config.max_rounds);
    }

    #[test]
    fn greedy_against_greedy_with_zero_slack_stalls() {
        let instance = example_instance();
        let mut row = GreedyAgent::new(instance.valuation(Side::Row).clone(), 0);
        let mut col = GreedyAgent::new(instance.valuation(Side::Col).clone(), 0);
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        assert_eq!(t.outcome, SessionOutcome::NoAgreement);
        assert_eq!(t.termination, Termination::MaxRounds);
        assert_eq!(t.rounds_used, config.max_rounds);
    }

    #[test]
    fn accept_double_agrees_on_the_first_offer() {
        let instance = example_instance();
        let (mut row, _) = scripted_pair(&instance);
        let mut col = AlwaysAcceptAgent::new(instance.valuation(Side::Col).clone());
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        assert_eq!(t.rounds_used, 1);
        assert!(matches!(t.outcome, SessionOutcome::Agreed(_)));
    }

    #[test]
    fn agreed_outcome_is_the_last_offer_on_the_table() {
        let instance = example_instance();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig::default();
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        let last_offer = t
            .messages
            .iter()
            .rev()
            .find_map(|m| match m {
                MessageRecord::Offer { allocation, .. } => Some(allocation.clone()),
                _ => None,
            })
            .unwrap();
        assert_eq!(t.outcome, SessionOutcome::Agreed(last_offer));
    }

    #[test]
    fn config_validation_rejects_bad_rounds() {
        let instance = example_instance();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig {
            concession_round: 30,
            ..NegotiationConfig::default()
        };
        assert!(run_session(&instance, &mut row, &mut col, &config).is_err());
    }

    #[test]
    fn first_mover_is_configurable() {
        let instance = example_instance();
        let (mut row, mut col) = scripted_pair(&instance);
        let config = NegotiationConfig {
            first_mover: Side::Col,
            ..NegotiationConfig::default()
        };
        let t = run_session(&instance, &mut row, &mut col, &config).unwrap();
        match &t.messages[0] {
            MessageRecord::Offer { proposer, .. } => assert_eq!(*proposer, Side::Col),
            other => panic!("expected an offer first, got {other:?}"),
        }
    }
}
