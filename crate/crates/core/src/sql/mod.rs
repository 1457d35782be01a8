//! The restricted read-only single-table query dialect.
//!
//! Grammar (documented in `docs/dialect.md`): `SELECT` with a column list,
//! `*`, or `COUNT(*)`; a single `FROM` table; `WHERE` over comparisons,
//! `LIKE`, `IN`, `IS [NOT] NULL`, and `AND`/`OR`/`NOT`; `ORDER BY` one
//! column; `LIMIT`. No joins, subqueries, writes, or other aggregates.

mod ast;
mod exec;
mod gen;
mod lex;
mod parse;
mod render;

pub use ast::{CompareOp, Direction, Literal, OrderBy, Predicate, Projection, QueryAst};
pub use exec::{execute_query, ExecError, ResultSet};
pub use gen::{random_query, ColumnProfile};
pub use lex::Token;
pub use parse::{parse_query, ParseError, ParseErrorKind};
pub use render::{render_pattern, render_query};
