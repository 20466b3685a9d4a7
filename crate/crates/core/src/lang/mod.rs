//! The `.zkgc` certificate language and the `.zkx.json` explicit-graph format.
//!
//! A unit consists of an optional guarded-command `system`, an `automaton` and a
//! `ranking`. A unit without a system is a public certificate; with a table
//! ranking it certifies an explicit graph supplied separately.
//!
//! ```text
//! system {
//!   var x in [0, 3];
//!   init: x = 0;
//!   command inc: guard x <= 2 update x' = x + 1;
//! }
//! automaton {
//!   vars: x;
//!   states: q0;
//!   init: q0;
//!   aps: p := x <= 1;
//!   trans:
//!     q0 -- true --> q0;
//! }
//! ranking {
//!   at q0:
//!     case true => 0;
//! }
//! ```

mod graph;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use crate::model::{BuchiSpec, Ranking, SymbolicSystem};

pub use graph::{graph_from_json, graph_to_json, space_to_json, GraphError};
pub use printer::{print, print_certificate};

/// Line and column (1-based) of a construct in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parse or validation error anchored at a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { span, message: message.into(), expected: Vec::new() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

/// Source positions of the main constructs of a parsed unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub vars: Vec<Span>,
    pub commands: Vec<Span>,
    pub states: Vec<Span>,
    pub edges: Vec<Span>,
    /// Per automaton state, the span of its `at` block.
    pub ranking: Vec<Option<Span>>,
}

/// A parsed `.zkgc` unit in abstract form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub system: Option<SymbolicSystem>,
    pub spec: BuchiSpec,
    pub ranking: Ranking,
}

/// Parses with the default coefficient bound.
pub fn parse(text: &str) -> Result<Unit, Vec<Diagnostic>> {
    parse_with_bound(text, crate::DEFAULT_BOUND).map(|(u, _)| u)
}

/// Parses raw bytes, rejecting invalid UTF-8 with a diagnostic.
pub fn parse_bytes(bytes: &[u8]) -> Result<Unit, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => Err(vec![Diagnostic::new(Span { line: 1, col: 1 }, format!("input is not UTF-8: {e}"))]),
    }
}

/// Parses and validates, checking every integer literal against `bound`.
pub fn parse_with_bound(text: &str, bound: u64) -> Result<(Unit, SourceMap), Vec<Diagnostic>> {
    let tokens = lexer::lex(text).map_err(|d| vec![d])?;
    parser::Parser::new(tokens, bound).unit()
}
