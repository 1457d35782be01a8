//! Differential check of the query executor against a deliberately naive
//! per-row interpreter, plus parse/render round-trip fuzzing. The oracle
//! below shares no code with `scope_core::sql::exec`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scope_core::sql::{
    execute_query, parse_query, random_query, render_query, ColumnProfile, CompareOp, Direction,
    ExecError, Literal, Predicate, QueryAst,
};
use scope_core::table::{load_table, CellKind, ClinicalTable, TableFormat, TypeHints};
use scope_core::value::{canonical_text, CellValue};

fn toy_table() -> (ClinicalTable, TypeHints) {
    let mut hints = TypeHints::new();
    hints.set("phase", CellKind::Number, false);
    hints.set("size", CellKind::Number, false);
    hints.set("followup", CellKind::Number, true);
    hints.set("note", CellKind::Text, true);
    let csv = "\
k,cancer,phase,size,followup,note
T01,NSCLC,3,450,30.5,first line
T02,Melanoma,2,120,,salvage
T03,NSCLC,1,48,12,
T04,RCC,3,900,55,first line
T05,Gastric,2,210,24,combination
T06,Melanoma,3,330,48.5,first line
T07,HNSCC,1,60,9.5,
T08,RCC,2,150,36,salvage
T09,NSCLC,2,275,18,combination
T10,Ovarian,3,510,60,first line
T11,Gastric,1,80,6,
T12,HNSCC,3,420,41,combination
T13,Cervical,2,190,27,first line
T14,NSCLC,3,640,52,salvage
T15,Melanoma,1,95,11,
T16,Ovarian,2,230,33,combination
T17,RCC,1,70,8,first line
T18,Cervical,3,360,45,salvage
T19,Gastric,3,505,58,first line
T20,NSCLC,2,140,21,
";
    let table = load_table(csv.as_bytes(), TableFormat::Csv, &hints, "k").unwrap();
    (table, hints)
}

// ---------------------------------------------------------------------------
// Independent oracle: straight-line re-implementation of the dialect
// semantics over rows, written without reference to the executor.
// ---------------------------------------------------------------------------

fn oracle_keys(ast: &QueryAst, table: &ClinicalTable) -> Result<Vec<String>, ()> {
    for column in ast.referenced_columns() {
        if !table.has_column(column) {
            return Err(());
        }
    }
    let mut picked: Vec<&scope_core::table::Row> = Vec::new();
    for row in table.rows() {
        match oracle_eval(&ast.predicate, row) {
            Ok(true) => picked.push(row),
            Ok(false) => {}
            Err(()) => return Err(()),
        }
    }
    if let Some(order) = &ast.order_by {
        picked.sort_by(|a, b| {
            let x = &a.cells[&order.column];
            let y = &b.cells[&order.column];
            let rank = |c: &CellValue| if c.is_null() { 1u8 } else { 0u8 };
            rank(x).cmp(&rank(y)).then_with(|| {
                if x.is_null() || y.is_null() {
                    return std::cmp::Ordering::Equal;
                }
                let base = match (x.as_number(), y.as_number()) {
                    (Some(p), Some(q)) => p.partial_cmp(&q).unwrap(),
                    _ => canonical_text(&x.display_text()).cmp(&canonical_text(&y.display_text())),
                };
                if order.direction == Direction::Desc {
                    base.reverse()
                } else {
                    base
                }
            })
        });
    }
    let mut keys: Vec<String> = picked.iter().map(|r| r.key.clone()).collect();
    if let Some(limit) = ast.limit {
        keys.truncate(limit as usize);
    }
    Ok(keys)
}

fn oracle_eval(pred: &Predicate, row: &scope_core::table::Row) -> Result<bool, ()> {
    Ok(match pred {
        Predicate::True => true,
        Predicate::And(cs) => {
            let mut all = true;
            for c in cs {
                all &= oracle_eval(c, row)?;
            }
            all
        }
        Predicate::Or(cs) => {
            let mut any = false;
            for c in cs {
                any |= oracle_eval(c, row)?;
            }
            any
        }
        Predicate::Not(c) => !oracle_eval(c, row)?,
        Predicate::IsNull { column, negated } => row.cells[column].is_null() != *negated,
        Predicate::In { column, literals } => {
            let mut any = false;
            for lit in literals {
                any |= oracle_compare(&row.cells[column], CompareOp::Eq, lit)?;
            }
            any
        }
        Predicate::Compare {
            column,
            op,
            literal,
        } => oracle_compare(&row.cells[column], *op, literal)?,
    })
}

fn oracle_compare(cell: &CellValue, op: CompareOp, lit: &Literal) -> Result<bool, ()> {
    if cell.is_null() {
        return Ok(false);
    }
    match (cell, lit) {
        (CellValue::Number(n), Literal::Number(m)) => match op {
            CompareOp::Eq => Ok(n == m),
            CompareOp::Ne => Ok(n != m),
            CompareOp::Lt => Ok(n < m),
            CompareOp::Le => Ok(n <= m),
            CompareOp::Gt => Ok(n > m),
            CompareOp::Ge => Ok(n >= m),
            CompareOp::Like => Err(()),
        },
        (CellValue::Bool(b), Literal::Bool(m)) => match op {
            CompareOp::Eq => Ok(b == m),
            CompareOp::Ne => Ok(b != m),
            _ => Err(()),
        },
        (CellValue::Text(_) | CellValue::List(_), Literal::Text(t)) => {
            let a = canonical_text(&cell.display_text());
            let b = canonical_text(t);
            match op {
                CompareOp::Eq => Ok(a == b),
                CompareOp::Ne => Ok(a != b),
                CompareOp::Lt => Ok(a < b),
                CompareOp::Le => Ok(a <= b),
                CompareOp::Gt => Ok(a > b),
                CompareOp::Ge => Ok(a >= b),
                CompareOp::Like => Ok(oracle_like(&a, &b)),
            }
        }
        _ => Err(()),
    }
}

/// Regex-free LIKE via dynamic programming over chars.
fn oracle_like(text: &str, pattern: &str) -> bool {
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    let mut dp = vec![vec![false; t.len() + 1]; p.len() + 1];
    dp[0][0] = true;
    for i in 1..=p.len() {
        if p[i - 1] == '%' {
            dp[i][0] = dp[i - 1][0];
        }
    }
    for i in 1..=p.len() {
        for j in 1..=t.len() {
            dp[i][j] = match p[i - 1] {
                '%' => dp[i - 1][j] || dp[i][j - 1],
                '_' => dp[i - 1][j - 1],
                c => dp[i - 1][j - 1] && c == t[j - 1],
            };
        }
    }
    dp[p.len()][t.len()]
}

// ---------------------------------------------------------------------------

#[test]
fn executor_matches_brute_force_oracle_on_1000_random_queries() {
    let (table, hints) = toy_table();
    let profiles = ColumnProfile::from_table(&table, &hints);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut executed_non_empty = 0usize;
    for case in 0..1000 {
        let ast = random_query(&mut rng, "t", &profiles);
        let expected = oracle_keys(&ast, &table);
        let actual = execute_query(&ast, &table);
        match (expected, actual) {
            (Ok(keys), Ok(rs)) => {
                assert_eq!(rs.keys, keys, "case {case}: {}", render_query(&ast));
                if !rs.keys.is_empty() {
                    executed_non_empty += 1;
                }
            }
            (Err(()), Err(ExecError::Type { .. } | ExecError::UnknownColumn(_))) => {}
            (expected, actual) => panic!(
                "case {case}: oracle {expected:?} vs executor {actual:?} for {}",
                render_query(&ast)
            ),
        }
    }
    assert!(executed_non_empty > 300, "generator should hit real matches");
}

#[test]
fn parse_render_round_trip_on_random_queries() {
    let (table, hints) = toy_table();
    let profiles = ColumnProfile::from_table(&table, &hints);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let ast = random_query(&mut rng, "t", &profiles);
        let text = render_query(&ast);
        let reparsed = parse_query(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(reparsed, ast, "{text}");
        // Rendering the reparse reproduces the canonical text exactly.
        assert_eq!(render_query(&reparsed), text);
    }
}

#[test]
fn repeated_execution_is_deterministic() {
    let (table, hints) = toy_table();
    let profiles = ColumnProfile::from_table(&table, &hints);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let ast = random_query(&mut rng, "t", &profiles);
        let first = execute_query(&ast, &table);
        let second = execute_query(&ast, &table);
        match (first, second) {
            (Ok(a), Ok(b)) => assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => panic!("nondeterministic outcome"),
        }
    }
}

#[test]
fn projection_order_is_preserved() {
    let (table, _) = toy_table();
    let ast = parse_query(r#"SELECT "note", "cancer" FROM t WHERE "phase" = 3"#).unwrap();
    let rs = execute_query(&ast, &table).unwrap();
    assert_eq!(rs.columns, vec!["note".to_string(), "cancer".to_string()]);
    assert!(rs.keys.iter().all(|k| table.row_by_key(k).is_some()));
}
