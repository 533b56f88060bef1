//! The two seats of a two-player game.

use std::fmt;
use std::str::FromStr;

/// Identifies a player by seat: the row player or the column player.
///
/// The same convention is shared by the normal-form solvers (row/column of
/// the payoff matrix) and the allocation game (the two negotiating agents).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Row,
    Col,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Row => Side::Col,
            Side::Col => Side::Row,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Row => write!(f, "row"),
            Side::Col => write!(f, "col"),
        }
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "row" => Ok(Side::Row),
            "col" | "column" => Ok(Side::Col),
            other => Err(format!("unknown side `{other}` (expected row or col)")),
        }
    }
}
