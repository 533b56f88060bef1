//! Wire protocol for external agents: newline-delimited JSON messages over
//! the standard streams of a subprocess.
//!
//! Engine to agent: `session_init`, `respond_request`, `session_end`.
//! Agent to engine: `offer` (only the opening offer; later offers ride as
//! rejection counters) and `response` with decision `accept`, `reject`
//! (counter required) or `no_feasible` (rejecting with nothing feasible to
//! counter, which ends the session without agreement).
//!
//! `session_init` carries the public pool, the agent's own valuation and
//! seat, the round schedule, and `you_start`, which tells the first mover
//! to open without waiting for traffic. Every inbound allocation is
//! validated against the pool before it reaches the session.

use crate::allocation::{Allocation, ItemCounts, ValuationVector};
use crate::negotiation::{
    Agent, AgentError, ProposalOutcome, ResponseOutcome, SessionOutcome, SessionSetup,
};
use crate::side::Side;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

/// Per-message timeout for external agents.
pub const DEFAULT_WIRE_TIMEOUT: Duration = Duration::from_secs(30);

/// An allocation on the wire: per-type quantity lists for both sides.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WireAllocation {
    pub to_row: Vec<u32>,
    pub to_col: Vec<u32>,
}

impl WireAllocation {
    pub fn from_allocation(allocation: &Allocation) -> Self {
        WireAllocation {
            to_row: allocation.bundle(Side::Row).to_vec(),
            to_col: allocation.bundle(Side::Col).to_vec(),
        }
    }

    pub fn into_allocation(self, counts: &ItemCounts) -> Result<Allocation, AgentError> {
        Allocation::from_parts(counts, self.to_row, self.to_col)
            .map_err(|e| AgentError::Protocol(e.to_string()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireMessage {
    SessionInit {
        counts: Vec<u32>,
        total_value: u64,
        your_valuation: Vec<u64>,
        your_role: String,
        max_rounds: u32,
        concession_round: u32,
        you_start: bool,
    },
    Offer {
        round: u32,
        allocation: WireAllocation,
    },
    RespondRequest {
        round: u32,
        allocation: WireAllocation,
    },
    Response {
        decision: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        counter: Option<WireAllocation>,
    },
    SessionEnd {
        outcome: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        allocation: Option<WireAllocation>,
    },
}

impl WireMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("wire messages serialize")
    }

    pub fn parse(line: &str) -> Result<WireMessage, AgentError> {
        serde_json::from_str(line)
            .map_err(|e| AgentError::Protocol(format!("malformed message `{line}`: {e}")))
    }
}

/// Bridges the session runner to a subprocess speaking the wire protocol.
///
/// The engine supplies the agent's private valuation in `session_init`;
/// the subprocess never sees the opponent's. Every inbound message is
/// validated and every wait is bounded by the timeout.
pub struct ExternalAgent {
    command: Vec<String>,
    valuation: ValuationVector,
    timeout: Duration,
    running: Option<Running>,
}

struct Running {
    child: Child,
    stdin: std::process::ChildStdin,
    lines: mpsc::Receiver<std::io::Result<String>>,
    counts: ItemCounts,
}

impl ExternalAgent {
    /// `command` is the program and its arguments.
    pub fn new(command: Vec<String>, valuation: ValuationVector, timeout: Duration) -> Self {
        ExternalAgent {
            command,
            valuation,
            timeout,
            running: None,
        }
    }

    fn running(&mut self) -> Result<&mut Running, AgentError> {
        self.running
            .as_mut()
            .ok_or_else(|| AgentError::Protocol("agent process not started".to_string()))
    }

    fn send(&mut self, message: &WireMessage) -> Result<(), AgentError> {
        let line = message.to_line();
        let running = self.running()?;
        writeln!(running.stdin, "{line}")
            .and_then(|_| running.stdin.flush())
            .map_err(|e| AgentError::Process(format!("write failed: {e}")))
    }

    fn receive(&mut self) -> Result<WireMessage, AgentError> {
        let timeout = self.timeout;
        let running = self.running()?;
        loop {
            match running.lines.recv_timeout(timeout) {
                Ok(Ok(line)) => {
                    let trimmed = line.trim();
                    if trimmed.is_empty() {
                        continue;
                    }
                    return WireMessage::parse(trimmed);
                }
                Ok(Err(e)) => return Err(AgentError::Process(format!("read failed: {e}"))),
                Err(mpsc::RecvTimeoutError::Timeout) => return Err(AgentError::Timeout(timeout)),
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    return Err(AgentError::Process("agent closed its output".to_string()))
                }
            }
        }
    }
}

impl Agent for ExternalAgent {
    fn begin(&mut self, setup: &SessionSetup) -> Result<(), AgentError> {
        let (program, args) = self
            .command
            .split_first()
            .ok_or_else(|| AgentError::Protocol("empty agent command".to_string()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| AgentError::Process(format!("failed to spawn `{program}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (sender, lines) = mpsc::channel();
        std::thread::spawn(move || {
            let reader = std::io::BufReader::new(stdout);
            for line in reader.lines() {
                if sender.send(line).is_err() {
                    break;
                }
            }
        });
        self.running = Some(Running {
            child,
            stdin,
            lines,
            counts: setup.counts.clone(),
        });
        let init = WireMessage::SessionInit {
            counts: setup.counts.as_slice().to_vec(),
            total_value: setup.total,
            your_valuation: self.valuation.values().to_vec(),
            your_role: setup.side.to_string(),
            max_rounds: setup.max_rounds,
            concession_round: setup.concession_round,
            you_start: setup.you_start,
        };
        self.send(&init)
    }

    fn propose(&mut self, round: u32) -> Result<ProposalOutcome, AgentError> {
        match self.receive()? {
            WireMessage::Offer {
                round: sent_round,
                allocation,
            } => {
                if sent_round != round {
                    return Err(AgentError::Protocol(format!(
                        "offer for round {sent_round}, expected round {round}"
                    )));
                }
                let counts = self.running()?.counts.clone();
                Ok(ProposalOutcome::Offer(allocation.into_allocation(&counts)?))
            }
            WireMessage::Response { decision, .. } if decision == "no_feasible" => {
                Ok(ProposalOutcome::NoFeasible)
            }
            other => Err(AgentError::Protocol(format!(
                "expected an offer, got {other:?}"
            ))),
        }
    }

    fn respond(&mut self, round: u32, offer: &Allocation) -> Result<ResponseOutcome, AgentError> {
        self.send(&WireMessage::RespondRequest {
            round,
            allocation: WireAllocation::from_allocation(offer),
        })?;
        match self.receive()? {
            WireMessage::Response { decision, counter } => match decision.as_str() {
                "accept" => match counter {
                    None => Ok(ResponseOutcome::Accept),
                    Some(_) => Err(AgentError::Protocol(
                        "accept must not carry a counter".to_string(),
                    )),
                },
                "reject" => {
                    let counter = counter.ok_or_else(|| {
                        AgentError::Protocol("reject requires a counter".to_string())
                    })?;
                    let counts = self.running()?.counts.clone();
                    Ok(ResponseOutcome::Reject {
                        counter: counter.into_allocation(&counts)?,
                    })
                }
                "no_feasible" => Ok(ResponseOutcome::NoFeasible),
                other => Err(AgentError::Protocol(format!("unknown decision `{other}`"))),
            },
            other => Err(AgentError::Protocol(format!(
                "expected a response, got {other:?}"
            ))),
        }
    }

    fn offer_rejected(&mut self, _round: u32, _own_offer: &Allocation) -> Result<(), AgentError> {
        // The remote side infers the rejection from the next
        // respond_request carrying the opponent's counter.
        Ok(())
    }

    fn belief(&self) -> Option<&crate::belief::Belief> {
        None
    }

    fn finish(&mut self, outcome: &SessionOutcome) {
        let message = match outcome {
            SessionOutcome::Agreed(allocation) => WireMessage::SessionEnd {
                outcome: "agreed".to_string(),
                allocation: Some(WireAllocation::from_allocation(allocation)),
            },
            SessionOutcome::NoAgreement => WireMessage::SessionEnd {
                outcome: "no_agreement".to_string(),
                allocation: None,
            },
        };
        let _ = self.send(&message);
        if let Some(mut running) = self.running.take() {
            let deadline = std::time::Instant::now() + Duration::from_millis(500);
            loop {
                match running.child.try_wait() {
                    Ok(Some(_)) => break,
                    Ok(None) if std::time::Instant::now() < deadline => {
                        std::thread::sleep(Duration::from_millis(10));
                    }
                    _ => {
                        let _ = running.child.kill();
                        let _ = running.child.wait();
                        break;
                    }
                }
            }
        }
    }
}

impl Drop for ExternalAgent {
    fn drop(&mut self) {
        if let Some(mut running) = self.running.take() {
            let _ = running.child.kill();
            let _ = running.child.wait();
        }
    }
}

/// Runs an in-process agent behind the wire protocol on the given streams.
///
/// This is the subprocess half of the adapter: a binary reads
/// `session_init` from stdin, builds its agent from the supplied valuation
/// and seat, and then follows the protocol until `session_end`. Wrapping
/// [`super::ScriptedAgent`] this way reproduces in-process decisions
/// byte for byte.
pub fn serve_agent<A, F>(
    make: F,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
) -> Result<(), AgentError>
where
    A: Agent,
    F: FnOnce(&SessionSetup, ValuationVector) -> A,
{
    let mut lines = input.lines();
    let mut next = || -> Result<Option<WireMessage>, AgentError> {
        for line in lines.by_ref() {
            let line = line.map_err(|e| AgentError::Process(format!("read failed: {e}")))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            return WireMessage::parse(trimmed).map(Some);
        }
        Ok(None)
    };
    let mut emit = |message: &WireMessage| -> Result<(), AgentError> {
        writeln!(output, "{}", message.to_line())
            .and_then(|_| output.flush())
            .map_err(|e| AgentError::Process(format!("write failed: {e}")))
    };

    let (setup, valuation) = match next()? {
        Some(WireMessage::SessionInit {
            counts,
            total_value,
            your_valuation,
            your_role,
            max_rounds,
            concession_round,
            you_start,
        }) => {
            let counts =
                ItemCounts::new(counts).map_err(|e| AgentError::Protocol(e.to_string()))?;
            let valuation = ValuationVector::normalized(your_valuation, &counts, total_value)
                .map_err(|e| AgentError::Protocol(e.to_string()))?;
            let side: Side = your_role
                .parse()
                .map_err(|e: String| AgentError::Protocol(e))?;
            (
                SessionSetup {
                    counts,
                    total: total_value,
                    side,
                    max_rounds,
                    concession_round,
                    you_start,
                },
                valuation,
            )
        }
        other => {
            return Err(AgentError::Protocol(format!(
                "expected session_init, got {other:?}"
            )))
        }
    };

    let mut agent = make(&setup, valuation);
    agent.begin(&setup)?;
    // Our most recent outstanding offer; a respond_request arriving while
    // one is outstanding means it was rejected.
    let mut outstanding: Option<(u32, Allocation)> = None;

    if setup.you_start {
        match agent.propose(1)? {
            ProposalOutcome::Offer(allocation) => {
                emit(&WireMessage::Offer {
                    round: 1,
                    allocation: WireAllocation::from_allocation(&allocation),
                })?;
                outstanding = Some((1, allocation));
            }
            ProposalOutcome::NoFeasible => {
                emit(&WireMessage::Response {
                    decision: "no_feasible".to_string(),
                    counter: None,
                })?;
            }
        }
    }

    loop {
        match next()? {
            Some(WireMessage::RespondRequest { round, allocation }) => {
                if let Some((own_round, own_offer)) = outstanding.take() {
                    agent.offer_rejected(own_round, &own_offer)?;
                }
                let offer = allocation.into_allocation(&setup.counts)?;
                match agent.respond(round, &offer)? {
                    ResponseOutcome::Accept => emit(&WireMessage::Response {
                        decision: "accept".to_string(),
                        counter: None,
                    })?,
                    ResponseOutcome::Reject { counter } => {
                        emit(&WireMessage::Response {
                            decision: "reject".to_string(),
                            counter: Some(WireAllocation::from_allocation(&counter)),
                        })?;
                        outstanding = Some((round + 1, counter));
                    }
                    ResponseOutcome::NoFeasible => emit(&WireMessage::Response {
                        decision: "no_feasible".to_string(),
                        counter: None,
                    })?,
                }
            }
            Some(WireMessage::SessionEnd {
                outcome,
                allocation,
            }) => {
                let outcome = match (outcome.as_str(), allocation) {
                    ("agreed", Some(a)) => {
                        SessionOutcome::Agreed(a.into_allocation(&setup.counts)?)
                    }
                    _ => SessionOutcome::NoAgreement,
                };
                agent.finish(&outcome);
                return Ok(());
            }
            Some(other) => {
                return Err(AgentError::Protocol(format!(
                    "unexpected message {other:?}"
                )))
            }
            None => return Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_round_trip_as_json_lines() {
        let messages = vec![
            WireMessage::SessionInit {
                counts: vec![1, 1, 3],
                total_value: 10,
                your_valuation: vec![1, 3, 2],
                your_role: "row".to_string(),
                max_rounds: 20,
                concession_round: 16,
                you_start: true,
            },
            WireMessage::Offer {
                round: 1,
                allocation: WireAllocation {
                    to_row: vec![0, 1, 2],
                    to_col: vec![1, 0, 1],
                },
            },
            WireMessage::Response {
                decision: "accept".to_string(),
                counter: None,
            },
            WireMessage::SessionEnd {
                outcome: "no_agreement".to_string(),
                allocation: None,
            },
        ];
        for message in messages {
            let line = message.to_line();
            assert!(!line.contains('\n'));
            assert_eq!(WireMessage::parse(&line).unwrap(), message);
        }
    }

    #[test]
    fn inbound_allocations_are_validated() {
        let counts = ItemCounts::new(vec![1, 1, 3]).unwrap();
        let overflow = WireAllocation {
            to_row: vec![2, 0, 0],
            to_col: vec![0, 1, 3],
        };
        assert!(overflow.into_allocation(&counts).is_err());
        let leaky = WireAllocation {
            to_row: vec![1, 0, 0],
            to_col: vec![0, 1, 2],
        };
        assert!(leaky.into_allocation(&counts).is_err());
        let exact = WireAllocation {
            to_row: vec![1, 0, 1],
            to_col: vec![0, 1, 2],
        };
        assert!(exact.into_allocation(&counts).is_ok());
    }

    #[test]
    fn serve_agent_speaks_the_protocol_end_to_end() {
        use crate::belief::UpdateParams;
        use crate::negotiation::ScriptedAgent;
        // Scripted col-side agent: receives an offer it envies, counters,
        // then the engine ends the session.
        let init = WireMessage::SessionInit {
            counts: vec![1, 1, 3],
            total_value: 10,
            your_valuation: vec![1, 0, 3],
            your_role: "col".to_string(),
            max_rounds: 20,
            concession_round: 16,
            you_start: false,
        };
        let request = WireMessage::RespondRequest {
            round: 1,
            allocation: WireAllocation {
                to_row: vec![1, 1, 3],
                to_col: vec![0, 0, 0],
            },
        };
        let end = WireMessage::SessionEnd {
            outcome: "no_agreement".to_string(),
            allocation: None,
        };
        let script = format!(
            "{}\n{}\n{}\n",
            init.to_line(),
            request.to_line(),
            end.to_line()
        );
        let mut input = std::io::BufReader::new(script.as_bytes());
        let mut output = Vec::new();
        serve_agent(
            |_setup, valuation| ScriptedAgent::new(valuation, UpdateParams::default()),
            &mut input,
            &mut output,
        )
        .unwrap();
        let lines: Vec<String> = String::from_utf8(output)
            .unwrap()
            .lines()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(lines.len(), 1);
        match WireMessage::parse(&lines[0]).unwrap() {
            WireMessage::Response { decision, counter } => {
                assert_eq!(decision, "reject");
                assert!(counter.is_some());
            }
            other => panic!("expected a response, got {other:?}"),
        }
    }
}
