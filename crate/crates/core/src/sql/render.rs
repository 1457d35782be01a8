//! Canonical text rendering. `parse_query(render_query(a))` is structurally
//! equal to `a`; `render_pattern` additionally replaces every literal with a
//! typed placeholder, giving the de-duplication key for augmentation.

use super::ast::*;
use crate::value::format_number;

enum LiteralMode {
    Verbatim,
    Placeholder,
}

pub fn render_query(ast: &QueryAst) -> String {
    render(ast, LiteralMode::Verbatim)
}

/// The pattern key: canonical text with `<str>`, `<num>`, `<bool>` standing
/// in for literal values. Queries differing only in literals share a key.
pub fn render_pattern(ast: &QueryAst) -> String {
    render(ast, LiteralMode::Placeholder)
}

fn render(ast: &QueryAst, mode: LiteralMode) -> String {
    let mut out = String::from("SELECT ");
    match &ast.projection {
        Projection::Star => out.push('*'),
        Projection::CountStar => out.push_str("COUNT(*)"),
        Projection::Columns(columns) => {
            let parts: Vec<String> = columns.iter().map(|c| quote_ident(c)).collect();
            out.push_str(&parts.join(", "));
        }
    }
    out.push_str(" FROM ");
    out.push_str(&table_ident(&ast.table));
    if ast.predicate != Predicate::True {
        out.push_str(" WHERE ");
        out.push_str(&render_predicate(&ast.predicate, &mode));
    }
    if let Some(order) = &ast.order_by {
        out.push_str(" ORDER BY ");
        out.push_str(&quote_ident(&order.column));
        out.push_str(match order.direction {
            Direction::Asc => " ASC",
            Direction::Desc => " DESC",
        });
    }
    if let Some(limit) = ast.limit {
        match mode {
            LiteralMode::Verbatim => out.push_str(&format!(" LIMIT {limit}")),
            LiteralMode::Placeholder => out.push_str(" LIMIT <num>"),
        }
    }
    out
}

fn render_predicate(predicate: &Predicate, mode: &LiteralMode) -> String {
    match predicate {
        Predicate::True => "TRUE".to_string(),
        Predicate::Compare {
            column,
            op,
            literal,
        } => format!(
            "{} {} {}",
            quote_ident(column),
            op.symbol(),
            render_literal(literal, mode)
        ),
        Predicate::In { column, literals } => {
            let parts: Vec<String> = literals.iter().map(|l| render_literal(l, mode)).collect();
            format!("{} IN ({})", quote_ident(column), parts.join(", "))
        }
        Predicate::IsNull { column, negated } => {
            if *negated {
                format!("{} IS NOT NULL", quote_ident(column))
            } else {
                format!("{} IS NULL", quote_ident(column))
            }
        }
        Predicate::And(children) => {
            let parts: Vec<String> = children.iter().map(|c| render_predicate(c, mode)).collect();
            format!("({})", parts.join(" AND "))
        }
        Predicate::Or(children) => {
            let parts: Vec<String> = children.iter().map(|c| render_predicate(c, mode)).collect();
            format!("({})", parts.join(" OR "))
        }
        Predicate::Not(child) => format!("NOT ({})", render_predicate(child, mode)),
    }
}

fn render_literal(literal: &Literal, mode: &LiteralMode) -> String {
    match mode {
        LiteralMode::Placeholder => match literal {
            Literal::Text(_) => "<str>".to_string(),
            Literal::Number(_) => "<num>".to_string(),
            Literal::Bool(_) => "<bool>".to_string(),
        },
        LiteralMode::Verbatim => match literal {
            Literal::Text(s) => format!("'{}'", s.replace('\'', "''")),
            Literal::Number(n) => format_number(*n),
            Literal::Bool(b) => if *b { "TRUE" } else { "FALSE" }.to_string(),
        },
    }
}

fn quote_ident(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\"\""))
}

fn table_ident(name: &str) -> String {
    let plain = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.chars().next().unwrap().is_ascii_digit();
    if plain {
        name.to_string()
    } else {
        quote_ident(name)
    }
}
