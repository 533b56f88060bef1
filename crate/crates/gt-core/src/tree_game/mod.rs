//! Extensive-form game trees and backward induction.
//!
//! Trees are written in a nested literal format where every choice label
//! carries its mover as a prefix (`Alice_choice_2`), so the same player may
//! move at several depths. Payoff vectors always have two entries; entry
//! order follows the order in which movers first appear in the tree.

mod catalog;
mod parse;

pub use catalog::{catalog_tree, catalog_tree_source, tree_names};
pub use parse::{parse_tree, serialize_tree};

use crate::exact::Rational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("tree is malformed: {0}")]
    Malformed(String),
    #[error("unknown catalog tree `{0}`")]
    UnknownCatalogName(String),
}

/// A node of the game tree: an inner decision point or a terminal payoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    Decision {
        mover: String,
        /// Ordered `(choice label, subtree)` pairs; labels unique per node.
        children: Vec<(String, TreeNode)>,
    },
    Terminal {
        payoffs: [Rational; 2],
    },
}

/// A finite two-player extensive-form game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTree {
    root: TreeNode,
    /// Movers in order of first appearance; payoff entry `i` belongs to
    /// `players[i]`.
    players: Vec<String>,
}

impl GameTree {
    /// Wraps a root node, checking the structural invariants: the root is a
    /// decision node, every decision node has at least one child with
    /// unique labels, and at most two distinct movers appear.
    pub fn new(root: TreeNode) -> Result<Self, TreeError> {
        let mut players = Vec::new();
        validate(&root, &mut players)?;
        if matches!(root, TreeNode::Terminal { .. }) {
            return Err(TreeError::Malformed(
                "root must be a decision node".to_string(),
            ));
        }
        Ok(GameTree { root, players })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    fn player_index(&self, mover: &str) -> usize {
        self.players
            .iter()
            .position(|p| p == mover)
            .expect("validated movers")
    }
}

fn validate(node: &TreeNode, players: &mut Vec<String>) -> Result<(), TreeError> {
    match node {
        TreeNode::Terminal { .. } => Ok(()),
        TreeNode::Decision { mover, children } => {
            if !players.iter().any(|p| p == mover) {
                players.push(mover.clone());
            }
            if players.len() > 2 {
                return Err(TreeError::Malformed(format!(
                    "more than two movers appear: {players:?}"
                )));
            }
            if children.is_empty() {
                return Err(TreeError::Malformed(format!(
                    "decision node for {mover} has no children"
                )));
            }
            for (i, (label, _)) in children.iter().enumerate() {
                if children[..i].iter().any(|(l, _)| l == label) {
                    return Err(TreeError::Malformed(format!(
                        "duplicate choice label `{label}`"
                    )));
                }
            }
            for (_, child) in children {
                validate(child, players)?;
            }
            Ok(())
        }
    }
}

/// A solved node mirrors the input tree and annotates each decision point
/// with both players' continuation values and the chosen child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolvedNode {
    Decision {
        mover: String,
        values: [Rational; 2],
        /// Index into `children` of the mover's choice.
        chosen: usize,
        children: Vec<(String, SolvedNode)>,
    },
    Terminal {
        payoffs: [Rational; 2],
    },
}

impl SolvedNode {
    pub fn values(&self) -> &[Rational; 2] {
        match self {
            SolvedNode::Decision { values, .. } => values,
            SolvedNode::Terminal { payoffs } => payoffs,
        }
    }

    pub fn chosen_label(&self) -> Option<&str> {
        match self {
            SolvedNode::Decision {
                chosen, children, ..
            } => Some(&children[*chosen].0),
            SolvedNode::Terminal { .. } => None,
        }
    }
}

/// Backward-induction solution of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvedTree {
    pub root: SolvedNode,
    pub players: Vec<String>,
    /// Choice labels from the root to the reached terminal.
    pub principal_path: Vec<String>,
    /// Payoffs at the reached terminal, indexed like `players`.
    pub outcome: [Rational; 2],
}

/// Solves the tree by folding optimal choices from the leaves to the root.
///
/// At a terminal the value is its payoff vector. At a decision node the
/// mover picks the child maximizing its own continuation value and both
/// players' values propagate through that child. Ties go to the
/// first-listed child, so the solution is deterministic.
pub fn backward_induction(tree: &GameTree) -> SolvedTree {
    let root = solve(tree, &tree.root);
    let mut principal_path = Vec::new();
    let mut node = &root;
    while let SolvedNode::Decision {
        chosen, children, ..
    } = node
    {
        principal_path.push(children[*chosen].0.clone());
        node = &children[*chosen].1;
    }
    let outcome = node.values().clone();
    SolvedTree {
        root,
        players: tree.players.clone(),
        principal_path,
        outcome,
    }
}

fn solve(tree: &GameTree, node: &TreeNode) -> SolvedNode {
    match node {
        TreeNode::Terminal { payoffs } => SolvedNode::Terminal {
            payoffs: payoffs.clone(),
        },
        TreeNode::Decision { mover, children } => {
            let solved: Vec<(String, SolvedNode)> = children
                .iter()
                .map(|(label, child)| (label.clone(), solve(tree, child)))
                .collect();
            let mover_idx = tree.player_index(mover);
            let mut chosen = 0;
            for (i, (_, child)) in solved.iter().enumerate().skip(1) {
                if child.values()[mover_idx] > solved[chosen].1.values()[mover_idx] {
                    chosen = i;
                }
            }
            let values = solved[chosen].1.values().clone();
            SolvedNode::Decision {
                mover: mover.clone(),
                values,
                chosen,
                children: solved,
            }
        }
    }
}
