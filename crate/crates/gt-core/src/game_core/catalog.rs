//! The built-in game library.
//!
//! Each matrix is entered verbatim; two-decimal payoffs become
//! exact rationals over 100.

use super::{GameError, NormalFormGame};
use crate::exact::{rat, ratio, Rational};

/// Jackpot used when `split_steal` is requested without a size.
pub const DEFAULT_JACKPOT: i64 = 100;

/// Names accepted by [`catalog_game`].
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "prisoners_dilemma",
        "stag_hunt",
        "battle_of_sexes",
        "wait_go",
        "duopolistic_competition",
        "pd_variation_1",
        "pd_variation_2",
        "stag_hunt_variation_1",
        "stag_hunt_variation_2",
        "meta_sonnet",
        "meta_gpt4o",
        "meta_opus",
        "split_steal",
    ]
}

/// Looks up a catalog game by name. `split_steal` uses [`DEFAULT_JACKPOT`];
/// use [`split_steal`] directly for other jackpot sizes.
pub fn catalog_game(name: &str) -> Result<NormalFormGame, GameError> {
    let from_ints = |name: &str, labels: [&str; 2], cells: [[(i64, i64); 2]; 2]| {
        two_by_two(
            name,
            labels,
            labels,
            cells.map(|row| row.map(|(u, v)| (rat(u), rat(v)))),
        )
    };
    match name {
        "prisoners_dilemma" => from_ints(
            name,
            ["Cooperate", "Defect"],
            [[(3, 3), (0, 5)], [(5, 0), (1, 1)]],
        ),
        "stag_hunt" => from_ints(name, ["Stag", "Hare"], [[(3, 3), (0, 1)], [(1, 0), (1, 1)]]),
        "battle_of_sexes" => from_ints(
            name,
            ["Opera", "Football"],
            [[(2, 1), (0, 0)], [(0, 0), (1, 2)]],
        ),
        "wait_go" => from_ints(name, ["Wait", "Go"], [[(0, 0), (0, 2)], [(2, 0), (-4, -4)]]),
        "duopolistic_competition" => duopolistic_competition(),
        "pd_variation_1" => from_ints(
            name,
            ["action 1", "action 2"],
            [[(300, 300), (0, 301)], [(301, 0), (1, 1)]],
        ),
        "pd_variation_2" => from_ints(
            name,
            ["action 1", "action 2"],
            [[(3, 3), (-300, 5)], [(5, -300), (-299, -299)]],
        ),
        "stag_hunt_variation_1" => from_ints(
            name,
            ["action 1", "action 2"],
            [[(300, 300), (0, 1)], [(1, 0), (1, 1)]],
        ),
        "stag_hunt_variation_2" => from_ints(
            name,
            ["action 1", "action 2"],
            [[(3, 3), (-100, -99)], [(-99, -100), (-99, -99)]],
        ),
        "meta_sonnet" => meta_game(name, [[(582, 616), (488, 657)], [(639, 507), (555, 557)]]),
        "meta_gpt4o" => meta_game(name, [[(593, 625), (366, 618)], [(575, 414), (280, 438)]]),
        "meta_opus" => meta_game(name, [[(582, 650), (509, 553)], [(486, 457), (280, 438)]]),
        "split_steal" => split_steal(rat(DEFAULT_JACKPOT)),
        other => Err(GameError::UnknownCatalogName(other.to_string())),
    }
}

/// The split-or-steal game for a given jackpot: splitters share it equally,
/// a lone stealer takes it all, two stealers get nothing.
pub fn split_steal(jackpot: Rational) -> Result<NormalFormGame, GameError> {
    let half = &jackpot / rat(2);
    two_by_two(
        "split_steal",
        ["Split", "Steal"],
        ["Split", "Steal"],
        [
            [(half.clone(), half), (rat(0), jackpot.clone())],
            [(jackpot, rat(0)), (rat(0), rat(0))],
        ],
    )
}

/// Workflow-adoption payoff matrices; entries carry two decimal digits.
fn meta_game(name: &str, hundredths: [[(i64, i64); 2]; 2]) -> Result<NormalFormGame, GameError> {
    two_by_two(
        name,
        ["use", "not use"],
        ["use", "not use"],
        hundredths.map(|row| row.map(|(u, v)| (ratio(u, 100), ratio(v, 100)))),
    )
}

fn duopolistic_competition() -> Result<NormalFormGame, GameError> {
    let cells: [[(i64, i64); 6]; 6] = [
        [(0, 0), (0, 9), (0, 14), (0, 15), (0, 12), (0, 5)],
        [(9, 0), (7, 7), (5, 10), (3, 9), (1, 4), (-1, -5)],
        [(14, 0), (10, 5), (6, 6), (2, 3), (-2, -4), (-2, -5)],
        [(15, 0), (9, 3), (3, 2), (-3, -3), (-3, -4), (-3, -5)],
        [(12, 0), (4, 1), (-4, -2), (-4, -3), (-4, -4), (-4, -5)],
        [(5, 0), (-5, -1), (-5, -2), (-5, -3), (-5, -4), (-5, -5)],
    ];
    let actions: Vec<String> = (1..=6).map(|i| format!("action {i}")).collect();
    let payoffs = cells
        .iter()
        .map(|row| row.iter().map(|&(u, v)| (rat(u), rat(v))).collect())
        .collect();
    NormalFormGame::new("duopolistic_competition", actions.clone(), actions, payoffs)
}

fn two_by_two(
    name: &str,
    rows: [&str; 2],
    cols: [&str; 2],
    cells: [[(Rational, Rational); 2]; 2],
) -> Result<NormalFormGame, GameError> {
    NormalFormGame::new(
        name,
        rows.iter().map(|s| s.to_string()).collect(),
        cols.iter().map(|s| s.to_string()).collect(),
        cells.iter().map(|row| row.to_vec()).collect(),
    )
}
