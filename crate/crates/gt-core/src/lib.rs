//! Game-theory solvers and a Bayesian negotiation engine for two-player games.
//!
//! The crate is organized around three families of machinery:
//!
//! - complete-information solvers: pure Nash equilibria, Pareto scans,
//!   dominance analysis and equilibrium-invariant perturbations for
//!   normal-form games ([`game_core`]), and backward induction for
//!   extensive-form trees ([`tree_game`]);
//! - an incomplete-information allocation game: envy-free fair division
//!   over typed item pools ([`allocation`]), belief distributions over the
//!   opponent's private valuation with chance-constrained proposal search
//!   and Bayesian updating ([`belief`]), and an alternating-offer
//!   negotiation loop with scripted, greedy and subprocess-backed agents
//!   ([`negotiation`]);
//! - scoring and corpus tooling: outcome and estimation metrics
//!   ([`metrics`]) and dataset ingestion/ranking ([`dataset`]).
//!
//! All solver arithmetic is exact: payoffs and probabilities are
//! arbitrary-precision rationals, utilities are integers. Every operation
//! is a pure function over immutable values and is safe to call from any
//! number of threads.

pub mod allocation;
pub mod belief;
pub mod dataset;
pub mod exact;
pub mod game_core;
pub mod metrics;
pub mod negotiation;
pub mod rng;
pub mod side;
pub mod tree_game;

pub use exact::Rational;
pub use side::Side;
