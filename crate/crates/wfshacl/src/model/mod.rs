//! Syntax of data graphs, shape expressions, constraint sets and documents.

mod document;
mod expr;
mod graph;
mod names;
mod parse;

pub use document::{check_compatible, ConstraintSet, Document, Target, TargetSubject};
pub use expr::ShapeExpr;
pub use graph::{DataGraph, IndexedGraph};
pub use names::{ConceptName, NodeId, Role, RoleName, ShapeName};
pub use parse::{parse_document, parse_expr, parse_graph};

use thiserror::Error;

/// A syntax error with a 1-based source position (line 0 marks whole-input errors).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column number.
    pub column: usize,
    /// What went wrong.
    pub message: String,
}

impl ParseError {
    /// Builds an error at `line`:`column`.
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

/// Well-formedness and compatibility errors.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    /// A shape name heads more than one constraint.
    #[error("shape `{0}` is the head of more than one constraint")]
    DuplicateHead(ShapeName),
    /// A shape name is referenced but never defined.
    #[error("shape `{0}` is referenced but not defined")]
    UndefinedShape(ShapeName),
    /// The graph does not mention every individual of the document.
    #[error("graph is incompatible with the document: individual `{0}` does not occur in the graph")]
    IncompatibleGraph(NodeId),
}
