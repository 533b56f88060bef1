//! Backward induction against an exhaustive subgame-perfection oracle.
//!
//! The oracle enumerates every pure strategy profile (a choice at every
//! decision node, reachable or not), keeps the profiles that are optimal
//! at every node, and compares outcomes with the solver.

use gt_core::exact::{rat, Rational};
use gt_core::tree_game::{
    backward_induction, catalog_tree, parse_tree, serialize_tree, tree_names, GameTree, SolvedNode,
    TreeNode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Builds a random tree literal with depth <= 4, branching <= 3 and a
/// bounded number of decision nodes so profile enumeration stays small.
fn random_tree(rng: &mut ChaCha8Rng, payoff_range: i64) -> GameTree {
    fn node(
        rng: &mut ChaCha8Rng,
        depth: u32,
        budget: &mut u32,
        payoff_range: i64,
        out: &mut String,
        indent: usize,
    ) {
        let pad = " ".repeat(indent);
        let mover = if rng.gen_bool(0.5) { "Alice" } else { "Bob" };
        let branches = rng.gen_range(1..=3);
        *budget -= 1;
        for b in 0..branches {
            if b > 0 {
                out.push_str(",\n");
            }
            let label = format!("{pad}{mover}_choice_{}", b + 1);
            let make_leaf = depth >= 4 || *budget == 0 || rng.gen_bool(0.45);
            if make_leaf {
                out.push_str(&format!(
                    "{label}: [{}, {}]",
                    rng.gen_range(-payoff_range..=payoff_range),
                    rng.gen_range(-payoff_range..=payoff_range)
                ));
            } else {
                out.push_str(&format!("{label}: {{\n"));
                node(rng, depth + 1, budget, payoff_range, out, indent + 4);
                out.push_str(&format!("\n{pad}}}"));
            }
        }
    }
    let mut text = String::new();
    let mut budget = 8u32;
    node(rng, 1, &mut budget, payoff_range, &mut text, 0);
    parse_tree(&text).unwrap()
}

/// Flattens the decision nodes in preorder, recording each node's children
/// count, mover index and child links, so profiles are index vectors.
struct FlatTree {
    /// (mover index, child entries); a child entry is either a terminal
    /// payoff or a decision-node id.
    nodes: Vec<(usize, Vec<FlatChild>)>,
}

enum FlatChild {
    Terminal([Rational; 2]),
    Decision(usize),
}

fn flatten(tree: &GameTree) -> FlatTree {
    fn walk(
        node: &TreeNode,
        players: &[String],
        nodes: &mut Vec<(usize, Vec<FlatChild>)>,
    ) -> usize {
        match node {
            TreeNode::Terminal { .. } => unreachable!("walk is called on decision nodes"),
            TreeNode::Decision { mover, children } => {
                let mover_idx = players.iter().position(|p| p == mover).unwrap();
                let id = nodes.len();
                nodes.push((mover_idx, Vec::new()));
                let entries: Vec<FlatChild> = children
                    .iter()
                    .map(|(_, child)| match child {
                        TreeNode::Terminal { payoffs } => FlatChild::Terminal(payoffs.clone()),
                        TreeNode::Decision { .. } => {
                            FlatChild::Decision(walk(child, players, nodes))
                        }
                    })
                    .collect();
                nodes[id].1 = entries;
                id
            }
        }
    }
    let mut nodes = Vec::new();
    walk(tree.root(), tree.players(), &mut nodes);
    FlatTree { nodes }
}

fn profile_value(flat: &FlatTree, profile: &[usize], node: usize) -> [Rational; 2] {
    match &flat.nodes[node].1[profile[node]] {
        FlatChild::Terminal(payoffs) => payoffs.clone(),
        FlatChild::Decision(next) => profile_value(flat, profile, *next),
    }
}

fn child_value(flat: &FlatTree, profile: &[usize], node: usize, choice: usize) -> [Rational; 2] {
    match &flat.nodes[node].1[choice] {
        FlatChild::Terminal(payoffs) => payoffs.clone(),
        FlatChild::Decision(next) => profile_value(flat, profile, *next),
    }
}

/// All subgame-perfect profiles: optimal at every node under itself.
fn subgame_perfect_outcomes(flat: &FlatTree) -> Vec<[Rational; 2]> {
    let sizes: Vec<usize> = flat.nodes.iter().map(|(_, c)| c.len()).collect();
    let mut profile = vec![0usize; sizes.len()];
    let mut outcomes = Vec::new();
    loop {
        let perfect = (0..flat.nodes.len()).all(|node| {
            let (mover, children) = &flat.nodes[node];
            let chosen = child_value(flat, &profile, node, profile[node])[*mover].clone();
            (0..children.len()).all(|alt| child_value(flat, &profile, node, alt)[*mover] <= chosen)
        });
        if perfect {
            outcomes.push(profile_value(flat, &profile, 0));
        }
        // Mixed-radix increment.
        let mut i = 0;
        loop {
            if i == profile.len() {
                return outcomes;
            }
            profile[i] += 1;
            if profile[i] < sizes[i] {
                break;
            }
            profile[i] = 0;
            i += 1;
        }
    }
}

fn assert_value_consistency(node: &SolvedNode, players: &[String]) {
    if let SolvedNode::Decision {
        mover,
        values,
        chosen,
        children,
    } = node
    {
        let mover_idx = players.iter().position(|p| p == mover).unwrap();
        assert_eq!(values, children[*chosen].1.values());
        let best = children
            .iter()
            .map(|(_, c)| c.values()[mover_idx].clone())
            .max()
            .unwrap();
        assert_eq!(values[mover_idx], best);
        for (_, child) in children {
            assert_value_consistency(child, players);
        }
    }
}

#[test]
fn backward_induction_matches_the_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..500 {
        // A wide payoff range keeps ties rare, so the subgame-perfect
        // profile is almost always unique.
        let tree = random_tree(&mut rng, 1_000_000);
        let flat = flatten(&tree);
        let outcomes = subgame_perfect_outcomes(&flat);
        assert!(
            !outcomes.is_empty(),
            "case {case}: no subgame-perfect profile"
        );
        let solved = backward_induction(&tree);
        assert!(
            outcomes.contains(&solved.outcome),
            "case {case}: solver outcome not subgame-perfect"
        );
        if outcomes.len() == 1 {
            assert_eq!(solved.outcome, outcomes[0], "case {case}");
        }
        assert_value_consistency(&solved.root, &solved.players);
    }
}

#[test]
fn tied_trees_stay_deterministic_and_subgame_perfect() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        // A tiny payoff range forces frequent ties.
        let tree = random_tree(&mut rng, 2);
        let flat = flatten(&tree);
        let outcomes = subgame_perfect_outcomes(&flat);
        let solved = backward_induction(&tree);
        assert!(outcomes.contains(&solved.outcome));
        assert_eq!(backward_induction(&tree), solved);
        assert_value_consistency(&solved.root, &solved.players);
    }
}

#[test]
fn catalog_trees_match_the_oracle_and_round_trip() {
    let expected = [
        ("escalation", [0, 0]),
        ("monopoly", [2, 1]),
        ("hot_cold", [2, 3]),
        ("draco", [5, 5]),
        ("trigame", [4, 10]),
    ];
    for (name, outcome) in expected {
        let tree = catalog_tree(name).unwrap();
        let solved = backward_induction(&tree);
        assert_eq!(solved.outcome, [rat(outcome[0]), rat(outcome[1])], "{name}");
        let flat = flatten(&tree);
        let oracle = subgame_perfect_outcomes(&flat);
        assert!(oracle.contains(&solved.outcome), "{name}");
        assert_value_consistency(&solved.root, &solved.players);
    }
    for name in tree_names() {
        let tree = catalog_tree(name).unwrap();
        assert_eq!(parse_tree(&serialize_tree(&tree)).unwrap(), tree);
    }
}
