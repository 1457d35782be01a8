//! AST for the read-only dialect. Mutation forms do not exist here; the
//! grammar is SELECT-only by construction.

use crate::value::format_number;
use serde::{Deserialize, Serialize};

/// A parsed single-table query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryAst {
    pub table: String,
    pub projection: Projection,
    pub predicate: Predicate,
    pub order_by: Option<OrderBy>,
    pub limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Projection {
    Star,
    /// `COUNT(*)`, the only aggregate in the dialect.
    CountStar,
    Columns(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderBy {
    pub column: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Predicate {
    /// Absent WHERE clause: every row matches.
    True,
    Compare {
        column: String,
        op: CompareOp,
        literal: Literal,
    },
    In {
        column: String,
        literals: Vec<Literal>,
    },
    IsNull {
        column: String,
        negated: bool,
    },
    And(Vec<Predicate>),
    Or(Vec<Predicate>),
    Not(Box<Predicate>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Like,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Like => "LIKE",
        }
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            CompareOp::Lt | CompareOp::Le | CompareOp::Gt | CompareOp::Ge
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Literal {
    Text(String),
    Number(f64),
    Bool(bool),
}

impl Literal {
    /// The literal's text content, used by NL-rewrite coverage checks.
    /// LIKE wildcards are the caller's concern.
    pub fn coverage_text(&self) -> String {
        match self {
            Literal::Text(s) => s.trim_matches(|c| c == '%' || c == '_').to_string(),
            Literal::Number(n) => format_number(*n),
            Literal::Bool(b) => b.to_string().to_uppercase(),
        }
    }
}

impl Predicate {
    /// Depth-first iteration over every literal in the predicate tree.
    pub fn literals(&self) -> Vec<&Literal> {
        let mut out = Vec::new();
        self.collect_literals(&mut out);
        out
    }

    fn collect_literals<'a>(&'a self, out: &mut Vec<&'a Literal>) {
        match self {
            Predicate::True | Predicate::IsNull { .. } => {}
            Predicate::Compare { literal, .. } => out.push(literal),
            Predicate::In { literals, .. } => out.extend(literals.iter()),
            Predicate::And(children) | Predicate::Or(children) => {
                for child in children {
                    child.collect_literals(out);
                }
            }
            Predicate::Not(child) => child.collect_literals(out),
        }
    }

    /// All column names referenced by the predicate.
    pub fn columns(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_columns(&mut out);
        out
    }

    fn collect_columns<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Predicate::True => {}
            Predicate::Compare { column, .. }
            | Predicate::In { column, .. }
            | Predicate::IsNull { column, .. } => out.push(column),
            Predicate::And(children) | Predicate::Or(children) => {
                for child in children {
                    child.collect_columns(out);
                }
            }
            Predicate::Not(child) => child.collect_columns(out),
        }
    }
}

impl QueryAst {
    /// Every column name the query references (projection, predicate, order).
    pub fn referenced_columns(&self) -> Vec<&str> {
        let mut out = Vec::new();
        if let Projection::Columns(columns) = &self.projection {
            out.extend(columns.iter().map(String::as_str));
        }
        out.extend(self.predicate.columns());
        if let Some(order) = &self.order_by {
            out.push(order.column.as_str());
        }
        out
    }
}
