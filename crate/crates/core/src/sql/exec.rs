//! Query execution over an in-memory table.
//!
//! Semantics, also documented in `docs/dialect.md`:
//! - string comparisons use canonicalized values; LIKE is case-insensitive
//!   with `%` and `_` wildcards;
//! - comparisons against a null cell are false; only `IS [NOT] NULL` sees
//!   nulls;
//! - numeric/text coercion is never implicit: a mismatch is a type error,
//!   which the augmentor treats as a rejection rather than a crash.

use super::ast::*;
use crate::table::ClinicalTable;
use crate::value::{canonical_text, CellValue};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExecError {
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("type error on column {column:?}: {detail}")]
    Type { column: String, detail: String },
}

/// Rows matched by a query: ordered keys plus the projected cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultSet {
    pub keys: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CellValue>>,
}

impl ResultSet {
    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

pub fn execute_query(ast: &QueryAst, table: &ClinicalTable) -> Result<ResultSet, ExecError> {
    for column in ast.referenced_columns() {
        if !table.has_column(column) {
            return Err(ExecError::UnknownColumn(column.to_string()));
        }
    }

    let mut matched: Vec<&crate::table::Row> = Vec::new();
    for row in table.rows() {
        if eval_predicate(&ast.predicate, row)? {
            matched.push(row);
        }
    }

    if let Some(order) = &ast.order_by {
        matched.sort_by(|a, b| {
            let ca = &a.cells[&order.column];
            let cb = &b.cells[&order.column];
            // Nulls sort last regardless of direction.
            match (ca.is_null(), cb.is_null()) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (false, false) => {
                    let ord = compare_cells(ca, cb);
                    match order.direction {
                        Direction::Asc => ord,
                        Direction::Desc => ord.reverse(),
                    }
                }
            }
        });
    }

    if let Some(limit) = ast.limit {
        matched.truncate(limit as usize);
    }

    let keys: Vec<String> = matched.iter().map(|r| r.key.clone()).collect();
    let (columns, rows) = match &ast.projection {
        Projection::Star => {
            let columns: Vec<String> = table.columns().to_vec();
            let rows = matched
                .iter()
                .map(|r| columns.iter().map(|c| r.cells[c].clone()).collect())
                .collect();
            (columns, rows)
        }
        Projection::CountStar => (
            vec!["count".to_string()],
            vec![vec![CellValue::Number(matched.len() as f64)]],
        ),
        Projection::Columns(columns) => {
            let rows = matched
                .iter()
                .map(|r| columns.iter().map(|c| r.cells[c].clone()).collect())
                .collect();
            (columns.clone(), rows)
        }
    };

    Ok(ResultSet {
        keys,
        columns,
        rows,
    })
}

fn eval_predicate(predicate: &Predicate, row: &crate::table::Row) -> Result<bool, ExecError> {
    match predicate {
        Predicate::True => Ok(true),
        Predicate::Compare {
            column,
            op,
            literal,
        } => eval_compare(&row.cells[column], column, *op, literal),
        Predicate::In { column, literals } => {
            let cell = &row.cells[column];
            for literal in literals {
                if eval_compare(cell, column, CompareOp::Eq, literal)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Predicate::IsNull { column, negated } => {
            let is_null = row.cells[column].is_null();
            Ok(is_null != *negated)
        }
        Predicate::And(children) => {
            for child in children {
                if !eval_predicate(child, row)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Predicate::Or(children) => {
            for child in children {
                if eval_predicate(child, row)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Predicate::Not(child) => Ok(!eval_predicate(child, row)?),
    }
}

fn eval_compare(
    cell: &CellValue,
    column: &str,
    op: CompareOp,
    literal: &Literal,
) -> Result<bool, ExecError> {
    // Null never satisfies a comparison; only IS NULL / IS NOT NULL sees it.
    if cell.is_null() {
        return Ok(false);
    }
    let type_err = |detail: &str| ExecError::Type {
        column: column.to_string(),
        detail: detail.to_string(),
    };

    match (cell, literal) {
        (CellValue::Number(n), Literal::Number(m)) => Ok(match op {
            CompareOp::Eq => n == m,
            CompareOp::Ne => n != m,
            CompareOp::Lt => n < m,
            CompareOp::Le => n <= m,
            CompareOp::Gt => n > m,
            CompareOp::Ge => n >= m,
            CompareOp::Like => return Err(type_err("LIKE on a numeric column")),
        }),
        (CellValue::Bool(b), Literal::Bool(l)) => match op {
            CompareOp::Eq => Ok(b == l),
            CompareOp::Ne => Ok(b != l),
            _ => Err(type_err("only = and != apply to booleans")),
        },
        (CellValue::Text(_), Literal::Text(t)) | (CellValue::List(_), Literal::Text(t)) => {
            let cell_text = canonical_text(&cell.display_text());
            let lit_text = canonical_text(t);
            Ok(match op {
                CompareOp::Eq => cell_text == lit_text,
                CompareOp::Ne => cell_text != lit_text,
                CompareOp::Lt => cell_text < lit_text,
                CompareOp::Le => cell_text <= lit_text,
                CompareOp::Gt => cell_text > lit_text,
                CompareOp::Ge => cell_text >= lit_text,
                CompareOp::Like => like_match(&cell_text, &lit_text),
            })
        }
        (CellValue::Number(_), Literal::Text(_)) => {
            Err(type_err("text literal against a numeric column"))
        }
        (CellValue::Text(_) | CellValue::List(_), Literal::Number(_)) => {
            Err(type_err("numeric literal against a text column"))
        }
        (_, _) => Err(type_err("incompatible comparison")),
    }
}

/// `%` matches any run, `_` one character; matching is over canonicalized
/// text, hence case-insensitive. Anchored at both ends.
fn like_match(text: &str, pattern: &str) -> bool {
    fn matches(text: &[char], pattern: &[char]) -> bool {
        match pattern.first() {
            None => text.is_empty(),
            Some('%') => {
                for skip in 0..=text.len() {
                    if matches(&text[skip..], &pattern[1..]) {
                        return true;
                    }
                }
                false
            }
            Some('_') => !text.is_empty() && matches(&text[1..], &pattern[1..]),
            Some(&c) => text.first() == Some(&c) && matches(&text[1..], &pattern[1..]),
        }
    }
    let text: Vec<char> = text.chars().collect();
    let pattern: Vec<char> = pattern.chars().collect();
    matches(&text, &pattern)
}

/// Value order for ORDER BY (nulls are handled by the caller): numbers
/// numerically, everything else by canonical text.
fn compare_cells(a: &CellValue, b: &CellValue) -> Ordering {
    match (a.as_number(), b.as_number()) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        _ => canonical_text(&a.display_text()).cmp(&canonical_text(&b.display_text())),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_query;
    use super::*;
    use crate::table::{load_table, TableFormat, TypeHints};

    fn toy() -> ClinicalTable {
        let mut hints = TypeHints::new();
        hints.set("phase", crate::table::CellKind::Number, false);
        hints.set("followup", crate::table::CellKind::Number, true);
        load_table(
            "k,cancer,phase,followup\n\
             A,NSCLC,3,30.5\n\
             B,Melanoma,2,\n\
             C,NSCLC,1,12\n\
             D,RCC,3,55"
                .as_bytes(),
            TableFormat::Csv,
            &hints,
            "k",
        )
        .unwrap()
    }

    fn run(table: &ClinicalTable, text: &str) -> ResultSet {
        execute_query(&parse_query(text).unwrap(), table).unwrap()
    }

    #[test]
    fn star_query_matches_all_rows() {
        let table = toy();
        let rs = run(&table, "SELECT * FROM t");
        assert_eq!(rs.keys, vec!["a", "b", "c", "d"]);
        assert_eq!(rs.columns.len(), 4);
    }

    #[test]
    fn contradictory_predicate_yields_empty() {
        let table = toy();
        let rs = run(&table, r#"SELECT * FROM t WHERE "phase" = 99"#);
        assert!(rs.is_empty());
    }

    #[test]
    fn like_is_case_insensitive_with_wildcards() {
        let table = toy();
        let rs = run(&table, r#"SELECT "k" FROM t WHERE "cancer" LIKE '%nsclc%'"#);
        assert_eq!(rs.keys, vec!["a", "c"]);
        let rs = run(&table, r#"SELECT "k" FROM t WHERE "cancer" LIKE 'R_C'"#);
        assert_eq!(rs.keys, vec!["d"]);
    }

    #[test]
    fn null_comparisons_are_false_except_is_null() {
        let table = toy();
        let rs = run(&table, r#"SELECT "k" FROM t WHERE "followup" < 100"#);
        assert_eq!(rs.keys, vec!["a", "c", "d"]);
        let rs = run(&table, r#"SELECT "k" FROM t WHERE "followup" IS NULL"#);
        assert_eq!(rs.keys, vec!["b"]);
        let rs = run(&table, r#"SELECT "k" FROM t WHERE "followup" IS NOT NULL"#);
        assert_eq!(rs.keys, vec!["a", "c", "d"]);
    }

    #[test]
    fn order_by_and_limit() {
        let table = toy();
        let rs = run(
            &table,
            r#"SELECT "k" FROM t ORDER BY "followup" DESC LIMIT 2"#,
        );
        assert_eq!(rs.keys, vec!["d", "a"]);
        // Null follow-up sorts last in both directions.
        let rs = run(&table, r#"SELECT "k" FROM t ORDER BY "followup" ASC"#);
        assert_eq!(rs.keys, vec!["c", "a", "d", "b"]);
    }

    #[test]
    fn count_star_reports_matched_rows() {
        let table = toy();
        let rs = run(&table, r#"SELECT COUNT(*) FROM t WHERE "phase" = 3"#);
        assert_eq!(rs.keys.len(), 2);
        assert_eq!(rs.rows, vec![vec![CellValue::Number(2.0)]]);
    }

    #[test]
    fn unknown_column_is_a_binding_error() {
        let table = toy();
        let err = execute_query(
            &parse_query(r#"SELECT * FROM t WHERE "nope" = 1"#).unwrap(),
            &table,
        )
        .unwrap_err();
        assert!(matches!(err, ExecError::UnknownColumn(_)));
    }

    #[test]
    fn type_mismatch_is_an_error_not_a_match() {
        let table = toy();
        let err = execute_query(
            &parse_query(r#"SELECT * FROM t WHERE "phase" = 'three'"#).unwrap(),
            &table,
        )
        .unwrap_err();
        assert!(matches!(err, ExecError::Type { .. }));
    }

    #[test]
    fn in_list_matches_any_member() {
        let table = toy();
        let rs = run(
            &table,
            r#"SELECT "k" FROM t WHERE "cancer" IN ('RCC', 'Melanoma')"#,
        );
        assert_eq!(rs.keys, vec!["b", "d"]);
    }
}
