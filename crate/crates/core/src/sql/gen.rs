//! Seeded random query generation over a column profile, used for
//! differential testing of the executor and for fuzzing the parser and
//! renderer round-trip.

use super::ast::*;
use crate::table::{CellKind, ClinicalTable, TypeHints};
use crate::value::CellValue;
use rand::seq::SliceRandom;
use rand::Rng;

/// What the generator knows about one column: its declared kind and a pool
/// of observed values to draw literals from.
#[derive(Debug, Clone)]
pub struct ColumnProfile {
    pub name: String,
    pub kind: CellKind,
    pub values: Vec<CellValue>,
}

impl ColumnProfile {
    /// Profile every column of a table using its type hints.
    pub fn from_table(table: &ClinicalTable, hints: &TypeHints) -> Vec<ColumnProfile> {
        table
            .columns()
            .iter()
            .map(|name| ColumnProfile {
                name: name.clone(),
                kind: hints.hint(name).kind,
                values: table.observed_values(name).unwrap_or_default(),
            })
            .collect()
    }
}

/// Generate a random well-typed query against the profiled columns.
pub fn random_query<R: Rng>(rng: &mut R, table_name: &str, columns: &[ColumnProfile]) -> QueryAst {
    let projection = match rng.gen_range(0..10) {
        0 => Projection::Star,
        1 => Projection::CountStar,
        _ => {
            let count = rng.gen_range(1..=2.min(columns.len()));
            let mut picks: Vec<String> = columns
                .choose_multiple(rng, count)
                .map(|c| c.name.clone())
                .collect();
            picks.sort();
            Projection::Columns(picks)
        }
    };
    let predicate = if rng.gen_bool(0.9) {
        random_predicate(rng, columns, 0)
    } else {
        Predicate::True
    };
    let order_by = if rng.gen_bool(0.3) {
        Some(OrderBy {
            column: columns.choose(rng).expect("columns non-empty").name.clone(),
            direction: if rng.gen_bool(0.5) {
                Direction::Asc
            } else {
                Direction::Desc
            },
        })
    } else {
        None
    };
    let limit = if rng.gen_bool(0.25) {
        Some(rng.gen_range(1..=30))
    } else {
        None
    };
    QueryAst {
        table: table_name.to_string(),
        projection,
        predicate,
        order_by,
        limit,
    }
}

fn random_predicate<R: Rng>(rng: &mut R, columns: &[ColumnProfile], depth: usize) -> Predicate {
    if depth < 2 && rng.gen_bool(0.35) {
        let arity = rng.gen_range(2..=3);
        let children: Vec<Predicate> = (0..arity)
            .map(|_| random_predicate(rng, columns, depth + 1))
            .collect();
        return match rng.gen_range(0..3) {
            0 => Predicate::And(children),
            1 => Predicate::Or(children),
            _ => Predicate::Not(Box::new(children.into_iter().next().expect("child"))),
        };
    }
    let column = columns.choose(rng).expect("columns non-empty");
    match column.kind {
        CellKind::Number => {
            let value = random_number(rng, column);
            let op = *[
                CompareOp::Eq,
                CompareOp::Ne,
                CompareOp::Lt,
                CompareOp::Le,
                CompareOp::Gt,
                CompareOp::Ge,
            ]
            .choose(rng)
            .expect("ops");
            Predicate::Compare {
                column: column.name.clone(),
                op,
                literal: Literal::Number(value),
            }
        }
        CellKind::Boolean => Predicate::Compare {
            column: column.name.clone(),
            op: if rng.gen_bool(0.5) {
                CompareOp::Eq
            } else {
                CompareOp::Ne
            },
            literal: Literal::Bool(rng.gen_bool(0.5)),
        },
        CellKind::Text | CellKind::List => match rng.gen_range(0..5) {
            0 => Predicate::IsNull {
                column: column.name.clone(),
                negated: rng.gen_bool(0.5),
            },
            1 => {
                let text = random_text(rng, column);
                let pattern = match rng.gen_range(0..3) {
                    0 => format!("%{}%", safe_fragment(&text)),
                    1 => format!("{}%", safe_fragment(&text)),
                    _ => format!("%{}", safe_fragment(&text)),
                };
                Predicate::Compare {
                    column: column.name.clone(),
                    op: CompareOp::Like,
                    literal: Literal::Text(pattern),
                }
            }
            2 => {
                let arity = rng.gen_range(1..=3);
                let literals = (0..arity)
                    .map(|_| Literal::Text(random_text(rng, column)))
                    .collect();
                Predicate::In {
                    column: column.name.clone(),
                    literals,
                }
            }
            _ => Predicate::Compare {
                column: column.name.clone(),
                op: if rng.gen_bool(0.7) {
                    CompareOp::Eq
                } else {
                    CompareOp::Ne
                },
                literal: Literal::Text(random_text(rng, column)),
            },
        },
    }
}

fn random_number<R: Rng>(rng: &mut R, column: &ColumnProfile) -> f64 {
    let observed: Vec<f64> = column.values.iter().filter_map(|v| v.as_number()).collect();
    if !observed.is_empty() && rng.gen_bool(0.8) {
        *observed.as_slice().choose(rng).expect("non-empty")
    } else {
        (rng.gen_range(-500..5000) as f64) / 2.0
    }
}

fn random_text<R: Rng>(rng: &mut R, column: &ColumnProfile) -> String {
    let observed: Vec<String> = column
        .values
        .iter()
        .filter_map(|v| match v {
            CellValue::Text(s) if !s.is_empty() => Some(s.clone()),
            CellValue::List(items) if !items.is_empty() => Some(items[0].clone()),
            _ => None,
        })
        .collect();
    if !observed.is_empty() && rng.gen_bool(0.8) {
        observed.as_slice().choose(rng).expect("non-empty").clone()
    } else {
        let len = rng.gen_range(1..6);
        (0..len)
            .map(|_| (b'a' + rng.gen_range(0..26)) as char)
            .collect()
    }
}

/// Take a short fragment of a value for LIKE patterns, avoiding wildcard
/// metacharacters inside the fragment.
fn safe_fragment(text: &str) -> String {
    text.chars()
        .filter(|c| *c != '%' && *c != '_')
        .take(4)
        .collect()
}
