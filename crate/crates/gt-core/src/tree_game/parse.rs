//! Parser and canonical serializer for the nested tree literal format.
//!
//! ```text
//! Alice_choice_1: [0, 0],
//! Alice_choice_2: {
//!     Bob_choice_1: [1, -2],
//!     Bob_choice_2: [2, 2]
//! }
//! ```
//!
//! The format is whitespace-insensitive on input. Movers are inferred from
//! the label prefix before `_choice`, never from alternation, because a
//! player may move at several depths in a row.

use super::{GameTree, TreeError, TreeNode};
use crate::exact::{format_rational, parse_rational, Rational};

/// Parses a tree literal. The top-level entries are the children of an
/// implicit root decision node.
pub fn parse_tree(text: &str) -> Result<GameTree, TreeError> {
    let mut scanner = Scanner::new(text);
    let children = parse_entries(&mut scanner)?;
    scanner.skip_whitespace();
    if !scanner.at_end() {
        return Err(scanner.error("unexpected trailing input"));
    }
    if children.is_empty() {
        return Err(scanner.error("empty tree literal"));
    }
    let mover = mover_of(&children[0].0);
    for (label, _) in &children {
        if mover_of(label) != mover {
            return Err(TreeError::Malformed(format!(
                "children of one node must share a mover, got `{}` and `{}`",
                children[0].0, label
            )));
        }
    }
    GameTree::new(TreeNode::Decision { mover, children })
}

/// Renders a tree in the canonical layout: four-space indentation, one
/// entry per line, `[p, q]` terminals. `parse_tree` inverts it exactly.
pub fn serialize_tree(tree: &GameTree) -> String {
    let mut out = String::new();
    if let TreeNode::Decision { children, .. } = tree.root() {
        write_entries(children, 0, &mut out);
    }
    out.push('\n');
    out
}

fn write_entries(entries: &[(String, TreeNode)], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (i, (label, node)) in entries.iter().enumerate() {
        if i > 0 {
            out.push_str(",\n");
        }
        match node {
            TreeNode::Terminal { payoffs } => {
                out.push_str(&format!(
                    "{pad}{label}: [{}, {}]",
                    format_rational(&payoffs[0]),
                    format_rational(&payoffs[1])
                ));
            }
            TreeNode::Decision { children, .. } => {
                out.push_str(&format!("{pad}{label}: {{\n"));
                write_entries(children, indent + 4, out);
                out.push_str(&format!("\n{pad}}}"));
            }
        }
    }
}

fn parse_entries(scanner: &mut Scanner) -> Result<Vec<(String, TreeNode)>, TreeError> {
    let mut entries = Vec::new();
    loop {
        scanner.skip_whitespace();
        let label = scanner.read_label()?;
        scanner.expect(':')?;
        scanner.skip_whitespace();
        let node = match scanner.peek() {
            Some('[') => parse_terminal(scanner)?,
            Some('{') => parse_decision(scanner)?,
            _ => return Err(scanner.error("expected `[payoffs]` or `{ children }`")),
        };
        entries.push((label, node));
        scanner.skip_whitespace();
        if scanner.peek() == Some(',') {
            scanner.advance();
            scanner.skip_whitespace();
            // Tolerate a trailing comma before a closing brace or the end.
            if scanner.peek() == Some('}') || scanner.at_end() {
                break;
            }
        } else {
            break;
        }
    }
    Ok(entries)
}

fn parse_terminal(scanner: &mut Scanner) -> Result<TreeNode, TreeError> {
    scanner.expect('[')?;
    let mut numbers: Vec<Rational> = Vec::new();
    loop {
        scanner.skip_whitespace();
        numbers.push(scanner.read_number()?);
        scanner.skip_whitespace();
        match scanner.peek() {
            Some(',') => {
                scanner.advance();
            }
            Some(']') => {
                scanner.advance();
                break;
            }
            _ => return Err(scanner.error("expected `,` or `]` in payoff vector")),
        }
    }
    if numbers.len() != 2 {
        return Err(scanner.error(format!(
            "payoff vector must have exactly 2 entries, got {}",
            numbers.len()
        )));
    }
    let mut it = numbers.into_iter();
    Ok(TreeNode::Terminal {
        payoffs: [it.next().unwrap(), it.next().unwrap()],
    })
}

fn parse_decision(scanner: &mut Scanner) -> Result<TreeNode, TreeError> {
    scanner.expect('{')?;
    let children = parse_entries(scanner)?;
    scanner.skip_whitespace();
    scanner.expect('}')?;
    if children.is_empty() {
        return Err(scanner.error("decision node has no children"));
    }
    let mover = mover_of(&children[0].0);
    for (label, _) in &children {
        if mover_of(label) != mover {
            return Err(TreeError::Malformed(format!(
                "children of one node must share a mover, got `{}` and `{}`",
                children[0].0, label
            )));
        }
        if label
            .split("_choice")
            .next()
            .map(|p| p.is_empty())
            .unwrap_or(true)
        {
            return Err(TreeError::Malformed(format!(
                "label `{label}` has no mover prefix"
            )));
        }
    }
    Ok(TreeNode::Decision { mover, children })
}

fn mover_of(label: &str) -> String {
    match label.find("_choice") {
        Some(pos) => label[..pos].to_string(),
        None => label.to_string(),
    }
}

struct Scanner<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    _text: &'a str,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            _text: text,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn advance(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.advance();
        }
    }

    fn expect(&mut self, expected: char) -> Result<(), TreeError> {
        self.skip_whitespace();
        match self.peek() {
            Some(c) if c == expected => {
                self.advance();
                Ok(())
            }
            _ => Err(self.error(format!("expected `{expected}`"))),
        }
    }

    fn read_label(&mut self) -> Result<String, TreeError> {
        self.skip_whitespace();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.advance();
        }
        if self.pos == start {
            return Err(self.error("expected a choice label"));
        }
        let label: String = self.chars[start..self.pos].iter().collect();
        if !label.contains("_choice") {
            return Err(self.error(format!(
                "label `{label}` must carry its mover as a `<mover>_choice` prefix"
            )));
        }
        Ok(label)
    }

    fn read_number(&mut self) -> Result<Rational, TreeError> {
        self.skip_whitespace();
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.advance();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.' || c == '/') {
            self.advance();
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        parse_rational(&text).map_err(|e| self.error(e))
    }

    fn error(&self, message: impl Into<String>) -> TreeError {
        TreeError::Parse {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }
}
