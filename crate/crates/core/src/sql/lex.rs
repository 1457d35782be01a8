//! Tokenizer for the dialect. Tracks byte offsets for parse diagnostics.

use super::parse::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Keyword(String),
    Ident(String),
    QuotedIdent(String),
    Str(String),
    Num(f64),
    Symbol(&'static str),
    Eof,
}

impl Token {
    pub fn describe(&self) -> String {
        match self {
            Token::Keyword(k) => format!("keyword {k}"),
            Token::Ident(i) => format!("identifier {i:?}"),
            Token::QuotedIdent(i) => format!("column {i:?}"),
            Token::Str(_) => "string literal".to_string(),
            Token::Num(_) => "numeric literal".to_string(),
            Token::Symbol(s) => format!("{s:?}"),
            Token::Eof => "end of input".to_string(),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "SELECT", "FROM", "WHERE", "AND", "OR", "NOT", "LIKE", "IN", "IS", "NULL", "ORDER", "BY",
    "ASC", "DESC", "LIMIT", "COUNT", "TRUE", "FALSE",
];

pub struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    /// Lex the whole input into (token, byte offset) pairs, `Eof` last.
    pub fn tokenize(mut self) -> Result<Vec<(Token, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_whitespace();
            let start = self.pos;
            if self.pos >= self.bytes.len() {
                out.push((Token::Eof, start));
                return Ok(out);
            }
            let token = self.next_token(start)?;
            out.push((token, start));
        }
    }

    fn skip_whitespace(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_token(&mut self, start: usize) -> Result<Token, ParseError> {
        let b = self.bytes[self.pos];
        match b {
            b'\'' => self.string_literal(start),
            b'"' => self.quoted_ident(start),
            b'(' | b')' | b',' | b'*' | b';' => {
                self.pos += 1;
                Ok(Token::Symbol(match b {
                    b'(' => "(",
                    b')' => ")",
                    b',' => ",",
                    b'*' => "*",
                    _ => ";",
                }))
            }
            b'=' => {
                self.pos += 1;
                Ok(Token::Symbol("="))
            }
            b'!' => {
                if self.peek(1) == Some(b'=') {
                    self.pos += 2;
                    Ok(Token::Symbol("!="))
                } else {
                    Err(self.syntax(start, "expected != after !"))
                }
            }
            b'<' => {
                self.pos += 1;
                match self.bytes.get(self.pos) {
                    Some(b'=') => {
                        self.pos += 1;
                        Ok(Token::Symbol("<="))
                    }
                    Some(b'>') => {
                        self.pos += 1;
                        Ok(Token::Symbol("!="))
                    }
                    _ => Ok(Token::Symbol("<")),
                }
            }
            b'>' => {
                self.pos += 1;
                if self.bytes.get(self.pos) == Some(&b'=') {
                    self.pos += 1;
                    Ok(Token::Symbol(">="))
                } else {
                    Ok(Token::Symbol(">"))
                }
            }
            b'-' | b'0'..=b'9' => self.number(start),
            b'.' => self.number(start),
            _ if b.is_ascii_alphabetic() || b == b'_' => Ok(self.word()),
            _ => Err(self.syntax(start, &format!("unexpected character {:?}", b as char))),
        }
    }

    fn peek(&self, ahead: usize) -> Option<u8> {
        self.bytes.get(self.pos + ahead).copied()
    }

    fn string_literal(&mut self, start: usize) -> Result<Token, ParseError> {
        self.pos += 1;
        let mut value = String::new();
        loop {
            match self.bytes.get(self.pos) {
                None => return Err(self.syntax(start, "unterminated string literal")),
                Some(b'\'') => {
                    if self.peek(1) == Some(b'\'') {
                        value.push('\'');
                        self.pos += 2;
                    } else {
                        self.pos += 1;
                        return Ok(Token::Str(value));
                    }
                }
                Some(_) => {
                    let ch = self.src[self.pos..].chars().next().expect("char at pos");
                    value.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }

    fn quoted_ident(&mut self, start: usize) -> Result<Token, ParseError> {
        self.pos += 1;
        let mut value = String::new();
        loop {
            match self.bytes.get(self.pos) {
                None => return Err(self.syntax(start, "unterminated quoted identifier")),
                Some(b'"') => {
                    if self.peek(1) == Some(b'"') {
                        value.push('"');
                        self.pos += 2;
                    } else {
                        self.pos += 1;
                        return Ok(Token::QuotedIdent(value));
                    }
                }
                Some(_) => {
                    let ch = self.src[self.pos..].chars().next().expect("char at pos");
                    value.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }

    fn number(&mut self, start: usize) -> Result<Token, ParseError> {
        let mut end = self.pos;
        if self.bytes[end] == b'-' {
            end += 1;
        }
        let mut saw_digit = false;
        let mut saw_dot = false;
        while let Some(&b) = self.bytes.get(end) {
            match b {
                b'0'..=b'9' => {
                    saw_digit = true;
                    end += 1;
                }
                b'.' if !saw_dot => {
                    saw_dot = true;
                    end += 1;
                }
                _ => break,
            }
        }
        if !saw_digit {
            return Err(self.syntax(start, "malformed numeric literal"));
        }
        let text = &self.src[self.pos..end];
        let value: f64 = text
            .parse()
            .map_err(|_| self.syntax(start, "malformed numeric literal"))?;
        self.pos = end;
        Ok(Token::Num(value))
    }

    fn word(&mut self) -> Token {
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_alphanumeric() || b == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let word = &self.src[start..self.pos];
        let upper = word.to_ascii_uppercase();
        if KEYWORDS.contains(&upper.as_str()) {
            Token::Keyword(upper)
        } else {
            Token::Ident(word.to_string())
        }
    }

    fn syntax(&self, position: usize, message: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax,
            message: message.to_string(),
            position,
        }
    }
}
