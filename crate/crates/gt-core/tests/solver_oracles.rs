//! Brute-force oracle equivalence for the normal-form solvers on random
//! games, plus the equilibrium-invariance properties of affine transforms.
//!
//! The oracles re-derive everything from the defining inequalities with
//! plain double loops and never call the solver paths they check.

use gt_core::exact::{rat, ratio, Rational};
use gt_core::game_core::{
    best_response, iterated_elimination, ne_invariant_transform, pareto_optimal_profiles,
    pure_nash_equilibria, verify_ne_invariance, AffineTransform, NormalFormGame, StrategyProfile,
};
use gt_core::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_game(rng: &mut ChaCha8Rng) -> NormalFormGame {
    let rows = rng.gen_range(2..=6);
    let cols = rng.gen_range(2..=6);
    let payoffs = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| (rat(rng.gen_range(-20..=20)), rat(rng.gen_range(-20..=20))))
                .collect()
        })
        .collect();
    NormalFormGame::new(
        "random",
        (0..rows).map(|i| format!("r{i}")).collect(),
        (0..cols).map(|j| format!("c{j}")).collect(),
        payoffs,
    )
    .unwrap()
}

/// Nash oracle: check the two defining inequalities at every profile.
fn oracle_equilibria(game: &NormalFormGame) -> Vec<StrategyProfile> {
    let mut out = Vec::new();
    for r in 0..game.rows() {
        for c in 0..game.cols() {
            let row_ok = (0..game.rows())
                .all(|alt| game.payoff(Side::Row, alt, c) <= game.payoff(Side::Row, r, c));
            let col_ok = (0..game.cols())
                .all(|alt| game.payoff(Side::Col, r, alt) <= game.payoff(Side::Col, r, c));
            if row_ok && col_ok {
                out.push(StrategyProfile { row: r, col: c });
            }
        }
    }
    out
}

/// Pareto oracle: a profile survives iff nothing dominates it.
fn oracle_pareto(game: &NormalFormGame) -> Vec<StrategyProfile> {
    let mut out = Vec::new();
    for r in 0..game.rows() {
        for c in 0..game.cols() {
            let (u, v) = game.payoff_pair(r, c);
            let mut dominated = false;
            for r2 in 0..game.rows() {
                for c2 in 0..game.cols() {
                    let (u2, v2) = game.payoff_pair(r2, c2);
                    if u2 >= u && v2 >= v && (u2 > u || v2 > v) {
                        dominated = true;
                    }
                }
            }
            if !dominated {
                out.push(StrategyProfile { row: r, col: c });
            }
        }
    }
    out
}

#[test]
fn solvers_agree_with_brute_force_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let game = random_game(&mut rng);
        let report = pure_nash_equilibria(&game);
        assert_eq!(report.equilibrium_profiles(), oracle_equilibria(&game));
        assert_eq!(pareto_optimal_profiles(&game), oracle_pareto(&game));
        assert_eq!(
            report.pareto_optimal_equilibria,
            report
                .equilibrium_profiles()
                .into_iter()
                .filter(|p| report.pareto_optimal.contains(p))
                .collect::<Vec<_>>()
        );
    }
}

#[test]
fn best_responses_are_never_empty_and_contain_all_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let game = random_game(&mut rng);
        for side in [Side::Row, Side::Col] {
            let opp_len = game.actions(side.other()).len();
            for opp in 0..opp_len {
                let responses = best_response(&game, side, opp).unwrap();
                assert!(!responses.is_empty());
                let value_of = |a: usize| match side {
                    Side::Row => game.payoff(Side::Row, a, opp),
                    Side::Col => game.payoff(Side::Col, opp, a),
                };
                let best = responses.iter().map(|&a| value_of(a)).max().unwrap();
                for a in 0..game.actions(side).len() {
                    assert_eq!(responses.contains(&a), value_of(a) == best);
                }
            }
        }
    }
}

#[test]
fn elimination_preserves_the_equilibrium_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let game = random_game(&mut rng);
        let original = oracle_equilibria(&game);
        let result = iterated_elimination(&game);
        // No action appearing in any equilibrium is ever removed.
        for p in &original {
            assert!(result.remaining_row.contains(&p.row));
            assert!(result.remaining_col.contains(&p.col));
        }
        // The reduced game has the same equilibria, as original indices.
        let reduced: Vec<StrategyProfile> = oracle_equilibria(&result.reduced)
            .into_iter()
            .map(|p| StrategyProfile {
                row: result.remaining_row[p.row],
                col: result.remaining_col[p.col],
            })
            .collect();
        assert_eq!(reduced, original);
    }
}

#[test]
fn affine_transforms_preserve_equilibria_and_argmax_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let game = random_game(&mut rng);
        let transform = AffineTransform {
            scale_row: ratio(rng.gen_range(1..=12), rng.gen_range(1..=6)),
            shift_row: ratio(rng.gen_range(-30..=30), rng.gen_range(1..=4)),
            scale_col: ratio(rng.gen_range(1..=12), rng.gen_range(1..=6)),
            shift_col: ratio(rng.gen_range(-30..=30), rng.gen_range(1..=4)),
        };
        let transformed = ne_invariant_transform(&game, &transform).unwrap();
        let verdict = verify_ne_invariance(&game, &transformed).unwrap();
        assert!(verdict.invariant);
        // Argmax invariance, stronger than equilibrium equality.
        for side in [Side::Row, Side::Col] {
            for opp in 0..game.actions(side.other()).len() {
                assert_eq!(
                    best_response(&game, side, opp).unwrap(),
                    best_response(&transformed, side, opp).unwrap()
                );
            }
        }
    }
}

#[test]
fn noise_perturbations_are_classified_against_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut changed = 0usize;
    for _ in 0..1000 {
        let game = random_game(&mut rng);
        let noisy_payoffs: Vec<Vec<(Rational, Rational)>> = (0..game.rows())
            .map(|r| {
                (0..game.cols())
                    .map(|c| {
                        let (u, v) = game.payoff_pair(r, c);
                        (
                            u + rat(rng.gen_range(-3..=3)),
                            v + rat(rng.gen_range(-3..=3)),
                        )
                    })
                    .collect()
            })
            .collect();
        let noisy = NormalFormGame::new(
            game.name(),
            game.actions(Side::Row).to_vec(),
            game.actions(Side::Col).to_vec(),
            noisy_payoffs,
        )
        .unwrap();
        let verdict = verify_ne_invariance(&game, &noisy).unwrap();
        let expected = oracle_equilibria(&game) == oracle_equilibria(&noisy);
        assert_eq!(verdict.invariant, expected);
        if !verdict.invariant {
            changed += 1;
        }
    }
    // The noise magnitude is chosen so both classes actually occur.
    assert!(
        changed > 100,
        "only {changed} perturbations moved the equilibria"
    );
    assert!(changed < 1000);
}

#[test]
fn solvers_agree_with_brute_force_on_every_catalog_game() {
    for name in gt_core::game_core::catalog_names() {
        let game = gt_core::game_core::catalog_game(name).unwrap();
        let report = pure_nash_equilibria(&game);
        assert_eq!(
            report.equilibrium_profiles(),
            oracle_equilibria(&game),
            "{name}"
        );
        assert_eq!(
            pareto_optimal_profiles(&game),
            oracle_pareto(&game),
            "{name}"
        );
        for side in [Side::Row, Side::Col] {
            for opp in 0..game.actions(side.other()).len() {
                assert!(!best_response(&game, side, opp).unwrap().is_empty());
            }
        }
    }
}
