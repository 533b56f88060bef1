//! Two-player normal-form games and their pure-strategy analysis.
//!
//! Payoffs are exact rationals, so ties (weak equilibria, dominance with
//! equalities) are decided exactly. All operations are pure functions over
//! immutable games.

mod catalog;
mod format;

pub use catalog::{catalog_game, catalog_names, split_steal, DEFAULT_JACKPOT};
pub use format::{parse_game, serialize_game, GameFormatError};

use crate::exact::Rational;
use crate::side::Side;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("action index {index} out of range for {side} player ({len} actions)")]
    ActionOutOfRange {
        side: Side,
        index: usize,
        len: usize,
    },
    #[error("game is malformed: {0}")]
    Malformed(String),
    #[error("affine transform requires strictly positive scales")]
    NonPositiveScale,
    #[error("games have different action-set shapes: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("unknown catalog game `{0}`")]
    UnknownCatalogName(String),
}

/// A two-player game in normal form: labeled action sets for the row and
/// column player and a total payoff matrix of exact rational pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormGame {
    name: String,
    actions_row: Vec<String>,
    actions_col: Vec<String>,
    /// Row-major: `payoffs[i][j]` is `(u_row, u_col)` for profile `(i, j)`.
    payoffs: Vec<Vec<(Rational, Rational)>>,
}

impl NormalFormGame {
    /// Builds a game, checking that both action lists are non-empty with
    /// unique labels and that the payoff matrix is total.
    pub fn new(
        name: impl Into<String>,
        actions_row: Vec<String>,
        actions_col: Vec<String>,
        payoffs: Vec<Vec<(Rational, Rational)>>,
    ) -> Result<Self, GameError> {
        if actions_row.is_empty() || actions_col.is_empty() {
            return Err(GameError::Malformed("empty action set".to_string()));
        }
        for (side, actions) in [(Side::Row, &actions_row), (Side::Col, &actions_col)] {
            for (i, a) in actions.iter().enumerate() {
                if actions[..i].contains(a) {
                    return Err(GameError::Malformed(format!(
                        "duplicate {side} action label `{a}`"
                    )));
                }
            }
        }
        if payoffs.len() != actions_row.len()
            || payoffs.iter().any(|row| row.len() != actions_col.len())
        {
            return Err(GameError::Malformed(format!(
                "payoff matrix must be {}x{}",
                actions_row.len(),
                actions_col.len()
            )));
        }
        Ok(NormalFormGame {
            name: name.into(),
            actions_row,
            actions_col,
            payoffs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self, side: Side) -> &[String] {
        match side {
            Side::Row => &self.actions_row,
            Side::Col => &self.actions_col,
        }
    }

    pub fn rows(&self) -> usize {
        self.actions_row.len()
    }

    pub fn cols(&self) -> usize {
        self.actions_col.len()
    }

    pub fn payoff_pair(&self, row: usize, col: usize) -> &(Rational, Rational) {
        &self.payoffs[row][col]
    }

    /// Payoff to `side` at profile `(row, col)`.
    pub fn payoff(&self, side: Side, row: usize, col: usize) -> &Rational {
        match side {
            Side::Row => &self.payoffs[row][col].0,
            Side::Col => &self.payoffs[row][col].1,
        }
    }

    fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        (0..self.rows())
            .flat_map(move |r| (0..self.cols()).map(move |c| StrategyProfile { row: r, col: c }))
    }
}

/// One pure-strategy profile, by action index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrategyProfile {
    pub row: usize,
    pub col: usize,
}

/// Whether an equilibrium survives every unilateral deviation strictly or
/// only weakly (some deviation ties).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    Strict,
    Weak,
}

/// Result of the pure-equilibrium analysis of a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumReport {
    pub equilibria: Vec<(StrategyProfile, Strictness)>,
    pub pareto_optimal: Vec<StrategyProfile>,
    /// Intersection of the two sets above.
    pub pareto_optimal_equilibria: Vec<StrategyProfile>,
}

impl EquilibriumReport {
    pub fn equilibrium_profiles(&self) -> Vec<StrategyProfile> {
        self.equilibria.iter().map(|(p, _)| *p).collect()
    }
}

/// All actions of `side` that maximize its payoff against a fixed opponent
/// action. Never empty; contains every tie.
pub fn best_response(
    game: &NormalFormGame,
    side: Side,
    opponent_action: usize,
) -> Result<Vec<usize>, GameError> {
    let own_len = game.actions(side).len();
    let opp_len = game.actions(side.other()).len();
    if opponent_action >= opp_len {
        return Err(GameError::ActionOutOfRange {
            side: side.other(),
            index: opponent_action,
            len: opp_len,
        });
    }
    let payoff_at = |own: usize| match side {
        Side::Row => game.payoff(Side::Row, own, opponent_action),
        Side::Col => game.payoff(Side::Col, opponent_action, own),
    };
    let best = (0..own_len)
        .map(payoff_at)
        .max()
        .expect("action set is non-empty");
    Ok((0..own_len).filter(|&a| payoff_at(a) == best).collect())
}

/// Enumerates the pure Nash equilibria and the Pareto-optimal profiles.
///
/// A profile is an equilibrium iff each player's action is a best response
/// to the other's; it is strict iff both best-response sets are singletons
/// there. Weak equilibria are included (the defining inequality is `>=`).
pub fn pure_nash_equilibria(game: &NormalFormGame) -> EquilibriumReport {
    let row_best: Vec<Vec<usize>> = (0..game.cols())
        .map(|c| best_response(game, Side::Row, c).expect("index in range"))
        .collect();
    let col_best: Vec<Vec<usize>> = (0..game.rows())
        .map(|r| best_response(game, Side::Col, r).expect("index in range"))
        .collect();

    let mut equilibria = Vec::new();
    for p in game.profiles() {
        if row_best[p.col].contains(&p.row) && col_best[p.row].contains(&p.col) {
            let strict = row_best[p.col].len() == 1 && col_best[p.row].len() == 1;
            let strictness = if strict {
                Strictness::Strict
            } else {
                Strictness::Weak
            };
            equilibria.push((p, strictness));
        }
    }

    let pareto_optimal = pareto_optimal_profiles(game);
    let pareto_optimal_equilibria = equilibria
        .iter()
        .map(|(p, _)| *p)
        .filter(|p| pareto_optimal.contains(p))
        .collect();
    EquilibriumReport {
        equilibria,
        pareto_optimal,
        pareto_optimal_equilibria,
    }
}

/// Profiles not Pareto-dominated: no other profile weakly improves both
/// payoffs and strictly improves at least one.
pub fn pareto_optimal_profiles(game: &NormalFormGame) -> Vec<StrategyProfile> {
    let dominated = |p: StrategyProfile| {
        let (pu, pv) = game.payoff_pair(p.row, p.col);
        game.profiles().any(|q| {
            let (qu, qv) = game.payoff_pair(q.row, q.col);
            qu >= pu && qv >= pv && (qu > pu || qv > pv)
        })
    };
    game.profiles().filter(|&p| !dominated(p)).collect()
}

/// The action of `side` that is a best response to every opponent action,
/// if one exists. Strict iff it is the unique best response everywhere.
/// When several actions qualify (all weakly dominant), the lowest index is
/// returned.
pub fn dominant_strategy(game: &NormalFormGame, side: Side) -> Option<(usize, Strictness)> {
    let opp_len = game.actions(side.other()).len();
    let best_sets: Vec<Vec<usize>> = (0..opp_len)
        .map(|o| best_response(game, side, o).expect("index in range"))
        .collect();
    let own_len = game.actions(side).len();
    for a in 0..own_len {
        if best_sets.iter().all(|set| set.contains(&a)) {
            let strict = best_sets.iter().all(|set| set.len() == 1);
            let strictness = if strict {
                Strictness::Strict
            } else {
                Strictness::Weak
            };
            return Some((a, strictness));
        }
    }
    None
}

/// One removal performed by [`iterated_elimination`]. Indices refer to the
/// original game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationStep {
    pub side: Side,
    pub action: usize,
    pub dominated_by: usize,
}

/// Result of iterated elimination of strictly dominated actions.
#[derive(Clone, Debug)]
pub struct EliminationResult {
    pub reduced: NormalFormGame,
    pub trace: Vec<EliminationStep>,
    /// Original row/col indices that survive, in order.
    pub remaining_row: Vec<usize>,
    pub remaining_col: Vec<usize>,
}

/// Repeatedly removes strictly dominated actions until no more exist.
///
/// Each pass scans row actions then column actions in index order and
/// removes the first strictly dominated action found, so the trace is
/// deterministic. Strict elimination never removes an action that appears
/// in a pure Nash equilibrium, hence the reduced game preserves the pure
/// equilibrium set of the input.
pub fn iterated_elimination(game: &NormalFormGame) -> EliminationResult {
    let mut rows: Vec<usize> = (0..game.rows()).collect();
    let mut cols: Vec<usize> = (0..game.cols()).collect();
    let mut trace = Vec::new();

    loop {
        let found = find_strictly_dominated(game, &rows, &cols);
        match found {
            Some(step) => {
                match step.side {
                    Side::Row => rows.retain(|&r| r != step.action),
                    Side::Col => cols.retain(|&c| c != step.action),
                }
                trace.push(step);
            }
            None => break,
        }
    }

    let actions_row = rows.iter().map(|&r| game.actions_row[r].clone()).collect();
    let actions_col = cols.iter().map(|&c| game.actions_col[c].clone()).collect();
    let payoffs = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| game.payoffs[r][c].clone()).collect())
        .collect();
    let reduced = NormalFormGame::new(game.name.clone(), actions_row, actions_col, payoffs)
        .expect("reduction keeps at least one action per player");
    EliminationResult {
        reduced,
        trace,
        remaining_row: rows,
        remaining_col: cols,
    }
}

fn find_strictly_dominated(
    game: &NormalFormGame,
    rows: &[usize],
    cols: &[usize],
) -> Option<EliminationStep> {
    for &victim in rows {
        for &by in rows {
            if by == victim {
                continue;
            }
            let strict = cols
                .iter()
                .all(|&c| game.payoff(Side::Row, by, c) > game.payoff(Side::Row, victim, c));
            if strict {
                return Some(EliminationStep {
                    side: Side::Row,
                    action: victim,
                    dominated_by: by,
                });
            }
        }
    }
    for &victim in cols {
        for &by in cols {
            if by == victim {
                continue;
            }
            let strict = rows
                .iter()
                .all(|&r| game.payoff(Side::Col, r, by) > game.payoff(Side::Col, r, victim));
            if strict {
                return Some(EliminationStep {
                    side: Side::Col,
                    action: victim,
                    dominated_by: by,
                });
            }
        }
    }
    None
}

/// A per-player positive affine payoff change: `u' = scale * u + shift`.
#[derive(Clone, Debug)]
pub struct AffineTransform {
    pub scale_row: Rational,
    pub shift_row: Rational,
    pub scale_col: Rational,
    pub shift_col: Rational,
}

/// Applies a per-player positive affine transform to the payoffs.
///
/// Positive scales leave every per-player argmax set unchanged, so best
/// responses — and with them the pure equilibrium set — are identical to
/// the input game's.
pub fn ne_invariant_transform(
    game: &NormalFormGame,
    transform: &AffineTransform,
) -> Result<NormalFormGame, GameError> {
    use num_traits::Zero;
    if transform.scale_row <= Rational::zero() || transform.scale_col <= Rational::zero() {
        return Err(GameError::NonPositiveScale);
    }
    let payoffs = game
        .payoffs
        .iter()
        .map(|row| {
            row.iter()
                .map(|(u, v)| {
                    (
                        &transform.scale_row * u + &transform.shift_row,
                        &transform.scale_col * v + &transform.shift_col,
                    )
                })
                .collect()
        })
        .collect();
    NormalFormGame::new(
        game.name.clone(),
        game.actions_row.clone(),
        game.actions_col.clone(),
        payoffs,
    )
}

/// Verdict of comparing the pure equilibrium sets of two games.
#[derive(Clone, Debug)]
pub struct InvarianceVerdict {
    pub invariant: bool,
    pub ne_first: Vec<StrategyProfile>,
    pub ne_second: Vec<StrategyProfile>,
}

/// True iff both games have the same pure Nash equilibria, as index sets.
/// The games must have the same action-set shapes.
pub fn verify_ne_invariance(
    first: &NormalFormGame,
    second: &NormalFormGame,
) -> Result<InvarianceVerdict, GameError> {
    if first.rows() != second.rows() || first.cols() != second.cols() {
        return Err(GameError::ShapeMismatch(
            first.rows(),
            first.cols(),
            second.rows(),
            second.cols(),
        ));
    }
    let ne_first = pure_nash_equilibria(first).equilibrium_profiles();
    let ne_second = pure_nash_equilibria(second).equilibrium_profiles();
    Ok(InvarianceVerdict {
        invariant: ne_first == ne_second,
        ne_first,
        ne_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn profile(row: usize, col: usize) -> StrategyProfile {
        StrategyProfile { row, col }
    }

    fn by_label(game: &NormalFormGame, row: &str, col: &str) -> StrategyProfile {
        let r = game.actions(Side::Row).iter().position(|a| a == row);
        let c = game.actions(Side::Col).iter().position(|a| a == col);
        profile(r.unwrap(), c.unwrap())
    }

    #[test]
    fn best_response_prisoners_dilemma() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        // Against Cooperate the row player defects: 5 > 3.
        assert_eq!(best_response(&pd, Side::Row, 0).unwrap(), vec![1]);
        assert_eq!(best_response(&pd, Side::Row, 1).unwrap(), vec![1]);
        assert!(matches!(
            best_response(&pd, Side::Row, 7),
            Err(GameError::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn best_response_single_action_game() {
        let g = NormalFormGame::new(
            "solo",
            vec!["only".into()],
            vec!["only".into()],
            vec![vec![(rat(1), rat(2))]],
        )
        .unwrap();
        assert_eq!(best_response(&g, Side::Row, 0).unwrap(), vec![0]);
        assert_eq!(best_response(&g, Side::Col, 0).unwrap(), vec![0]);
    }

    #[test]
    fn best_response_duopolistic_competition() {
        let g = catalog_game("duopolistic_competition").unwrap();
        // Against column action 3 the row payoffs are 0, 5, 6, 3, -4, -5.
        assert_eq!(best_response(&g, Side::Row, 2).unwrap(), vec![2]);
    }

    #[test]
    fn equilibria_prisoners_dilemma() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        let report = pure_nash_equilibria(&pd);
        let dd = by_label(&pd, "Defect", "Defect");
        assert_eq!(report.equilibria, vec![(dd, Strictness::Strict)]);
        assert!(!report.pareto_optimal.contains(&dd));
        assert!(report.pareto_optimal_equilibria.is_empty());
    }

    #[test]
    fn equilibria_stag_hunt() {
        let g = catalog_game("stag_hunt").unwrap();
        let report = pure_nash_equilibria(&g);
        let ss = by_label(&g, "Stag", "Stag");
        let hh = by_label(&g, "Hare", "Hare");
        assert_eq!(report.equilibrium_profiles(), vec![ss, hh]);
        assert!(report.pareto_optimal.contains(&ss));
        assert!(!report.pareto_optimal.contains(&hh));
        assert_eq!(report.pareto_optimal_equilibria, vec![ss]);
    }

    #[test]
    fn equilibria_wait_go() {
        let g = catalog_game("wait_go").unwrap();
        let report = pure_nash_equilibria(&g);
        assert_eq!(
            report.equilibrium_profiles(),
            vec![by_label(&g, "Wait", "Go"), by_label(&g, "Go", "Wait")]
        );
    }

    #[test]
    fn equilibria_meta_sonnet() {
        let g = catalog_game("meta_sonnet").unwrap();
        let report = pure_nash_equilibria(&g);
        assert_eq!(
            report.equilibrium_profiles(),
            vec![by_label(&g, "not use", "not use")]
        );
    }

    #[test]
    fn pareto_set_duopolistic_competition() {
        let g = catalog_game("duopolistic_competition").unwrap();
        assert!(pareto_optimal_profiles(&g).contains(&profile(1, 1)));
    }

    #[test]
    fn pareto_set_all_equal_payoffs() {
        let payoffs = vec![vec![(rat(1), rat(1)); 2]; 2];
        let g = NormalFormGame::new(
            "flat",
            vec!["a".into(), "b".into()],
            vec!["a".into(), "b".into()],
            payoffs,
        )
        .unwrap();
        assert_eq!(pareto_optimal_profiles(&g).len(), 4);
    }

    #[test]
    fn pareto_set_prisoners_dilemma() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        let set = pareto_optimal_profiles(&pd);
        assert_eq!(set, vec![profile(0, 0), profile(0, 1), profile(1, 0)]);
    }

    #[test]
    fn dominant_strategy_examples() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        assert_eq!(
            dominant_strategy(&pd, Side::Row),
            Some((1, Strictness::Strict))
        );

        let gpt = catalog_game("meta_gpt4o").unwrap();
        assert_eq!(
            dominant_strategy(&gpt, Side::Row),
            Some((0, Strictness::Strict))
        );
        // The column player's best response flips between rows: no dominant action.
        assert_eq!(dominant_strategy(&gpt, Side::Col), None);

        let bos = catalog_game("battle_of_sexes").unwrap();
        assert_eq!(dominant_strategy(&bos, Side::Row), None);
        assert_eq!(dominant_strategy(&bos, Side::Col), None);
    }

    #[test]
    fn elimination_meta_gpt4o_reduces_to_use_use() {
        let g = catalog_game("meta_gpt4o").unwrap();
        let result = iterated_elimination(&g);
        assert_eq!(result.reduced.rows(), 1);
        assert_eq!(result.reduced.cols(), 1);
        assert_eq!(result.remaining_row, vec![0]);
        assert_eq!(result.remaining_col, vec![0]);
        assert_eq!(result.trace.len(), 2);
    }

    #[test]
    fn elimination_fixed_point_when_nothing_dominated() {
        let g = catalog_game("battle_of_sexes").unwrap();
        let result = iterated_elimination(&g);
        assert!(result.trace.is_empty());
        assert_eq!(result.reduced, g);
    }

    #[test]
    fn elimination_prisoners_dilemma() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        let result = iterated_elimination(&pd);
        assert_eq!(result.remaining_row, vec![1]);
        assert_eq!(result.remaining_col, vec![1]);
    }

    #[test]
    fn identity_transform_is_identity() {
        let g = catalog_game("stag_hunt").unwrap();
        let t = AffineTransform {
            scale_row: rat(1),
            shift_row: rat(0),
            scale_col: rat(1),
            shift_col: rat(0),
        };
        assert_eq!(ne_invariant_transform(&g, &t).unwrap(), g);
    }

    #[test]
    fn transform_rejects_non_positive_scale() {
        let g = catalog_game("stag_hunt").unwrap();
        let t = AffineTransform {
            scale_row: rat(0),
            shift_row: rat(0),
            scale_col: rat(1),
            shift_col: rat(0),
        };
        assert!(matches!(
            ne_invariant_transform(&g, &t),
            Err(GameError::NonPositiveScale)
        ));
    }

    #[test]
    fn transform_preserves_equilibria() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        let t = AffineTransform {
            scale_row: rat(2),
            shift_row: rat(-1),
            scale_col: ratio(1, 3),
            shift_col: rat(5),
        };
        let transformed = ne_invariant_transform(&pd, &t).unwrap();
        let verdict = verify_ne_invariance(&pd, &transformed).unwrap();
        assert!(verdict.invariant);
        assert_eq!(verdict.ne_first, vec![profile(1, 1)]);
    }

    #[test]
    fn verify_invariance_of_catalog_variations() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        for variant in ["pd_variation_1", "pd_variation_2"] {
            let v = catalog_game(variant).unwrap();
            assert!(
                verify_ne_invariance(&pd, &v).unwrap().invariant,
                "{variant}"
            );
        }
        let sh = catalog_game("stag_hunt").unwrap();
        for variant in ["stag_hunt_variation_1", "stag_hunt_variation_2"] {
            let v = catalog_game(variant).unwrap();
            assert!(
                verify_ne_invariance(&sh, &v).unwrap().invariant,
                "{variant}"
            );
        }
        assert!(verify_ne_invariance(&pd, &pd).unwrap().invariant);
        assert!(!verify_ne_invariance(&pd, &sh).unwrap().invariant);
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let pd = catalog_game("prisoners_dilemma").unwrap();
        let duo = catalog_game("duopolistic_competition").unwrap();
        assert!(matches!(
            verify_ne_invariance(&pd, &duo),
            Err(GameError::ShapeMismatch(..))
        ));
    }

    #[test]
    fn rejects_malformed_games() {
        assert!(NormalFormGame::new("bad", vec![], vec!["a".into()], vec![]).is_err());
        assert!(NormalFormGame::new(
            "bad",
            vec!["a".into(), "a".into()],
            vec!["b".into()],
            vec![vec![(rat(0), rat(0))], vec![(rat(0), rat(0))]],
        )
        .is_err());
        assert!(NormalFormGame::new(
            "bad",
            vec!["a".into()],
            vec!["b".into(), "c".into()],
            vec![vec![(rat(0), rat(0))]],
        )
        .is_err());
    }
}
