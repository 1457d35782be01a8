//! Recursive-descent parser. Every error carries a byte offset into the
//! input. Write statements are rejected as read-only violations before any
//! further parsing; constructs outside the dialect report which feature was
//! refused.

use super::ast::*;
use super::lex::{Lexer, Token};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Statement would mutate data (INSERT/UPDATE/DELETE/...).
    ReadOnlyViolation,
    /// Valid SQL, but outside the dialect (JOIN, subquery, SUM, ...).
    Unsupported,
    Syntax,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{message} at byte {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub position: usize,
}

const WRITE_KEYWORDS: &[&str] = &[
    "INSERT", "UPDATE", "DELETE", "DROP", "CREATE", "ALTER", "REPLACE", "TRUNCATE", "VACUUM",
    "ATTACH", "PRAGMA", "BEGIN", "COMMIT",
];

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "JOIN", "INNER", "LEFT", "RIGHT", "OUTER", "CROSS", "GROUP", "HAVING", "UNION", "EXCEPT",
    "INTERSECT", "WITH", "SUM", "AVG", "MIN", "MAX", "DISTINCT", "CASE", "EXISTS", "BETWEEN",
];

pub fn parse_query(text: &str) -> Result<QueryAst, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut parser = Parser { tokens, pos: 0 };
    parser.query()
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn current(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn error(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            kind,
            message: message.into(),
            position: self.position(),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> Result<(), ParseError> {
        match self.current() {
            Token::Keyword(k) if k == keyword => {
                self.advance();
                Ok(())
            }
            other => Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected {keyword}, found {}", other.describe()),
            )),
        }
    }

    fn eat_keyword(&mut self, keyword: &str) -> bool {
        if matches!(self.current(), Token::Keyword(k) if k == keyword) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_symbol(&mut self, symbol: &str) -> bool {
        if matches!(self.current(), Token::Symbol(s) if *s == symbol) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_symbol(&mut self, symbol: &str) -> Result<(), ParseError> {
        if self.eat_symbol(symbol) {
            Ok(())
        } else {
            Err(self.error(
                ParseErrorKind::Syntax,
                format!("expected {symbol:?}, found {}", self.current().describe()),
            ))
        }
    }

    fn check_out_of_dialect(&self) -> Result<(), ParseError> {
        if let Token::Ident(word) = self.current() {
            let upper = word.to_ascii_uppercase();
            if WRITE_KEYWORDS.contains(&upper.as_str()) {
                return Err(self.error(
                    ParseErrorKind::ReadOnlyViolation,
                    format!("{upper} statements are not allowed; the dialect is read-only"),
                ));
            }
            if UNSUPPORTED_KEYWORDS.contains(&upper.as_str()) {
                return Err(self.error(
                    ParseErrorKind::Unsupported,
                    format!("{upper} is outside the dialect"),
                ));
            }
        }
        Ok(())
    }

    fn query(&mut self) -> Result<QueryAst, ParseError> {
        self.check_out_of_dialect()?;
        self.expect_keyword("SELECT")?;
        let projection = self.projection()?;
        self.expect_keyword("FROM")?;
        let table = self.table_name()?;
        let predicate = if self.eat_keyword("WHERE") {
            self.or_expr()?
        } else {
            Predicate::True
        };
        let order_by = if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            let column = self.column_name()?;
            let direction = if self.eat_keyword("DESC") {
                Direction::Desc
            } else {
                self.eat_keyword("ASC");
                Direction::Asc
            };
            Some(OrderBy { column, direction })
        } else {
            None
        };
        let limit = if self.eat_keyword("LIMIT") {
            match self.advance() {
                Token::Num(n) if n.fract() == 0.0 && n >= 1.0 => Some(n as u64),
                _ => {
                    return Err(
                        self.error(ParseErrorKind::Syntax, "LIMIT takes a positive integer")
                    )
                }
            }
        } else {
            None
        };
        self.eat_symbol(";");
        match self.current() {
            Token::Eof => Ok(QueryAst {
                table,
                projection,
                predicate,
                order_by,
                limit,
            }),
            other => {
                self.check_out_of_dialect()?;
                Err(self.error(
                    ParseErrorKind::Syntax,
                    format!("unexpected trailing {}", other.describe()),
                ))
            }
        }
    }

    fn projection(&mut self) -> Result<Projection, ParseError> {
        if self.eat_symbol("*") {
            return Ok(Projection::Star);
        }
        if self.eat_keyword("COUNT") {
            self.expect_symbol("(")?;
            self.expect_symbol("*")?;
            self.expect_symbol(")")?;
            return Ok(Projection::CountStar);
        }
        let mut columns = vec![self.column_name()?];
        while self.eat_symbol(",") {
            columns.push(self.column_name()?);
        }
        Ok(Projection::Columns(columns))
    }

    fn table_name(&mut self) -> Result<String, ParseError> {
        if matches!(self.current(), Token::Symbol("(")) {
            return Err(self.error(
                ParseErrorKind::Unsupported,
                "subqueries in FROM are outside the dialect",
            ));
        }
        let name = self.column_name()?;
        if matches!(self.current(), Token::Symbol(",")) {
            return Err(self.error(
                ParseErrorKind::Unsupported,
                "multiple FROM tables are outside the dialect",
            ));
        }
        Ok(name)
    }

    fn column_name(&mut self) -> Result<String, ParseError> {
        self.check_out_of_dialect()?;
        match self.advance() {
            Token::Ident(name) => Ok(name),
            Token::QuotedIdent(name) => Ok(name),
            other => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("expected a column name, found {}", other.describe()),
                position: self.tokens[self.pos.saturating_sub(1)].1,
            }),
        }
    }

    fn or_expr(&mut self) -> Result<Predicate, ParseError> {
        let first = self.and_expr()?;
        if !matches!(self.current(), Token::Keyword(k) if k == "OR") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.eat_keyword("OR") {
            children.push(self.and_expr()?);
        }
        Ok(Predicate::Or(children))
    }

    fn and_expr(&mut self) -> Result<Predicate, ParseError> {
        let first = self.not_expr()?;
        if !matches!(self.current(), Token::Keyword(k) if k == "AND") {
            return Ok(first);
        }
        let mut children = vec![first];
        while self.eat_keyword("AND") {
            children.push(self.not_expr()?);
        }
        Ok(Predicate::And(children))
    }

    fn not_expr(&mut self) -> Result<Predicate, ParseError> {
        if self.eat_keyword("NOT") {
            let inner = self.not_expr()?;
            return Ok(Predicate::Not(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Predicate, ParseError> {
        if self.eat_symbol("(") {
            let inner = self.or_expr()?;
            self.expect_symbol(")")?;
            return Ok(inner);
        }
        let column = self.column_name()?;
        self.comparison(column)
    }

    fn comparison(&mut self, column: String) -> Result<Predicate, ParseError> {
        if self.eat_keyword("IS") {
            let negated = self.eat_keyword("NOT");
            self.expect_keyword("NULL")?;
            return Ok(Predicate::IsNull { column, negated });
        }
        if self.eat_keyword("NOT") {
            // `col NOT LIKE x` / `col NOT IN (...)` sugar.
            let inner = self.comparison_tail(column)?;
            return Ok(Predicate::Not(Box::new(inner)));
        }
        self.comparison_tail(column)
    }

    fn comparison_tail(&mut self, column: String) -> Result<Predicate, ParseError> {
        if self.eat_keyword("LIKE") {
            let literal = self.literal()?;
            if !matches!(literal, Literal::Text(_)) {
                return Err(self.error(ParseErrorKind::Syntax, "LIKE takes a string pattern"));
            }
            return Ok(Predicate::Compare {
                column,
                op: CompareOp::Like,
                literal,
            });
        }
        if self.eat_keyword("IN") {
            self.expect_symbol("(")?;
            let mut literals = vec![self.literal()?];
            while self.eat_symbol(",") {
                literals.push(self.literal()?);
            }
            self.expect_symbol(")")?;
            return Ok(Predicate::In { column, literals });
        }
        let op = match self.current() {
            Token::Symbol("=") => CompareOp::Eq,
            Token::Symbol("!=") => CompareOp::Ne,
            Token::Symbol("<") => CompareOp::Lt,
            Token::Symbol("<=") => CompareOp::Le,
            Token::Symbol(">") => CompareOp::Gt,
            Token::Symbol(">=") => CompareOp::Ge,
            other => {
                return Err(self.error(
                    ParseErrorKind::Syntax,
                    format!("expected a comparison operator, found {}", other.describe()),
                ))
            }
        };
        self.advance();
        let literal = self.literal()?;
        Ok(Predicate::Compare {
            column,
            op,
            literal,
        })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if matches!(self.current(), Token::Symbol("(")) {
            return Err(self.error(
                ParseErrorKind::Unsupported,
                "subquery literals are outside the dialect",
            ));
        }
        match self.advance() {
            Token::Str(s) => Ok(Literal::Text(s)),
            Token::Num(n) => Ok(Literal::Number(n)),
            Token::Keyword(k) if k == "TRUE" => Ok(Literal::Bool(true)),
            Token::Keyword(k) if k == "FALSE" => Ok(Literal::Bool(false)),
            other => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("expected a literal, found {}", other.describe()),
                position: self.tokens[self.pos.saturating_sub(1)].1,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_predicate_query() {
        let ast = parse_query(r#"SELECT "NCT" FROM t WHERE "Phase" = 3"#).unwrap();
        assert_eq!(
            ast.projection,
            Projection::Columns(vec!["NCT".to_string()])
        );
        assert_eq!(
            ast.predicate,
            Predicate::Compare {
                column: "Phase".to_string(),
                op: CompareOp::Eq,
                literal: Literal::Number(3.0),
            }
        );
    }

    #[test]
    fn star_query_has_true_predicate() {
        let ast = parse_query("SELECT * FROM t").unwrap();
        assert_eq!(ast.projection, Projection::Star);
        assert_eq!(ast.predicate, Predicate::True);
    }

    #[test]
    fn delete_is_a_read_only_violation() {
        let err = parse_query("DELETE FROM t").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ReadOnlyViolation);
    }

    #[test]
    fn join_and_sum_are_unsupported() {
        for text in [
            "SELECT * FROM a JOIN b",
            r#"SELECT SUM("n") FROM t"#,
            "SELECT * FROM (SELECT * FROM t)",
        ] {
            let err = parse_query(text).unwrap_err();
            assert_eq!(err.kind, ParseErrorKind::Unsupported, "{text}");
        }
    }

    #[test]
    fn count_star_is_the_only_aggregate() {
        let ast = parse_query("SELECT COUNT(*) FROM t").unwrap();
        assert_eq!(ast.projection, Projection::CountStar);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_query("SELECT FROM t").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.position, 7);
    }

    #[test]
    fn not_like_and_not_in_sugar() {
        let ast = parse_query(r#"SELECT * FROM t WHERE "c" NOT LIKE '%x%'"#).unwrap();
        assert!(matches!(ast.predicate, Predicate::Not(_)));
        let ast = parse_query(r#"SELECT * FROM t WHERE "c" NOT IN ('a', 'b')"#).unwrap();
        assert!(matches!(ast.predicate, Predicate::Not(_)));
    }

    #[test]
    fn nary_chains_flatten() {
        let ast = parse_query(r#"SELECT * FROM t WHERE "a" = 1 AND "b" = 2 AND "c" = 3"#).unwrap();
        match ast.predicate {
            Predicate::And(children) => assert_eq!(children.len(), 3),
            other => panic!("expected And, got {other:?}"),
        }
    }
}
