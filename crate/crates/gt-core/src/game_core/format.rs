//! Text format for normal-form games.
//!
//! ```text
//! name: prisoners_dilemma
//! row_actions: Cooperate; Defect
//! col_actions: Cooperate; Defect
//! payoffs:
//! 3 3 | 0 5
//! 5 0 | 1 1
//! ```
//!
//! Each payoff line holds one matrix row; cells are `u_row u_col` pairs
//! separated by `|`. Numbers may be integers, decimals or `n/d` fractions.
//! [`serialize_game`] always emits this exact field order with LF line
//! endings, so writing is byte-stable.

use super::{GameError, NormalFormGame};
use crate::exact::{format_rational, parse_rational, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("game is invalid: {0}")]
    Invalid(#[from] GameError),
}

fn syntax(line: usize, message: impl Into<String>) -> GameFormatError {
    GameFormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_game(text: &str) -> Result<NormalFormGame, GameFormatError> {
    let mut name = None;
    let mut row_actions: Option<Vec<String>> = None;
    let mut col_actions: Option<Vec<String>> = None;
    let mut payoffs: Vec<Vec<(Rational, Rational)>> = Vec::new();
    let mut in_payoffs = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if in_payoffs {
            payoffs.push(parse_payoff_row(line, line_no)?);
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, "expected `key: value`"))?;
        match key.trim() {
            "name" => name = Some(value.trim().to_string()),
            "row_actions" => row_actions = Some(parse_labels(value)),
            "col_actions" => col_actions = Some(parse_labels(value)),
            "payoffs" => in_payoffs = true,
            other => return Err(syntax(line_no, format!("unknown field `{other}`"))),
        }
    }

    let name = name.ok_or_else(|| syntax(0, "missing `name` field"))?;
    let rows = row_actions.ok_or_else(|| syntax(0, "missing `row_actions` field"))?;
    let cols = col_actions.ok_or_else(|| syntax(0, "missing `col_actions` field"))?;
    if !in_payoffs {
        return Err(syntax(0, "missing `payoffs` section"));
    }
    Ok(NormalFormGame::new(name, rows, cols, payoffs)?)
}

fn parse_labels(value: &str) -> Vec<String> {
    value
        .split(';')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_payoff_row(
    line: &str,
    line_no: usize,
) -> Result<Vec<(Rational, Rational)>, GameFormatError> {
    line.split('|')
        .map(|cell| {
            let parts: Vec<&str> = cell.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(syntax(
                    line_no,
                    format!(
                        "payoff cell `{}` must hold exactly two numbers",
                        cell.trim()
                    ),
                ));
            }
            let u = parse_rational(parts[0]).map_err(|e| syntax(line_no, e))?;
            let v = parse_rational(parts[1]).map_err(|e| syntax(line_no, e))?;
            Ok((u, v))
        })
        .collect()
}

pub fn serialize_game(game: &NormalFormGame) -> String {
    use crate::side::Side;
    let mut out = String::new();
    out.push_str(&format!("name: {}\n", game.name()));
    out.push_str(&format!(
        "row_actions: {}\n",
        game.actions(Side::Row).join("; ")
    ));
    out.push_str(&format!(
        "col_actions: {}\n",
        game.actions(Side::Col).join("; ")
    ));
    out.push_str("payoffs:\n");
    for r in 0..game.rows() {
        let cells: Vec<String> = (0..game.cols())
            .map(|c| {
                let (u, v) = game.payoff_pair(r, c);
                format!("{} {}", format_rational(u), format_rational(v))
            })
            .collect();
        out.push_str(&cells.join(" | "));
        out.push('\n');
    }
    out
}
