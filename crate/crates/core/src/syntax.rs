//! Tokenizer shared by the line-oriented text formats (TRS files, E-graph
//! files, dependency and instance files).

use std::fmt;

use thiserror::Error;

/// A parse failure, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    /// Re-anchor an error produced while parsing a single line.
    pub fn at_line(mut self, line: usize) -> Self {
        self.line = line;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    LParen,
    RParen,
    Comma,
    Arrow,
    Equals,
    Colon,
    Dot,
    Slash,
    Ident(String),
    /// `?name` pattern variable; the stored string excludes the `?`.
    Var(String),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::Comma => f.write_str("`,`"),
            Token::Arrow => f.write_str("`->`"),
            Token::Equals => f.write_str("`=`"),
            Token::Colon => f.write_str("`:`"),
            Token::Dot => f.write_str("`.`"),
            Token::Slash => f.write_str("`/`"),
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Var(s) => write!(f, "variable `?{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub line: usize,
    pub column: usize,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '#' | '$')
}

/// Tokenize `text`. Everything after `;` on a line is a comment.
pub fn tokenize(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (offset, raw) in text.lines().enumerate() {
        let line = first_line + offset;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let simple = |token| Spanned { token, line, column };
            match c {
                ';' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '(' => out.push(simple(Token::LParen)),
                ')' => out.push(simple(Token::RParen)),
                ',' => out.push(simple(Token::Comma)),
                '=' => out.push(simple(Token::Equals)),
                ':' => out.push(simple(Token::Colon)),
                '.' => out.push(simple(Token::Dot)),
                '/' => out.push(simple(Token::Slash)),
                '-' if chars.get(i + 1) == Some(&'>') => {
                    out.push(simple(Token::Arrow));
                    i += 2;
                    continue;
                }
                '?' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && is_ident_char(chars[end]) {
                        end += 1;
                    }
                    if end == start {
                        return Err(ParseError::new(line, column, "expected a variable name after `?`"));
                    }
                    out.push(simple(Token::Var(chars[start..end].iter().collect())));
                    i = end;
                    continue;
                }
                c if is_ident_char(c) => {
                    let mut end = i;
                    while end < chars.len() && is_ident_char(chars[end]) {
                        end += 1;
                    }
                    out.push(simple(Token::Ident(chars[i..end].iter().collect())));
                    i = end;
                    continue;
                }
                other => {
                    return Err(ParseError::new(line, column, format!("unexpected character `{other}`")));
                }
            }
            i += 1;
        }
    }
    Ok(out)
}

/// Cursor over a token stream with error helpers.
pub struct Cursor<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    /// Location reported when the input ends early.
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    pub fn new(tokens: &'a [Spanned], end_line: usize) -> Self {
        let end = tokens.last().map(|t| (t.line, t.column + 1)).unwrap_or((end_line, 1));
        Cursor { tokens, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + ahead).map(|s| &s.token)
    }

    pub fn advance(&mut self) -> Option<&'a Spanned> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(s) => ParseError::new(s.line, s.column, message),
            None => ParseError::new(self.end.0, self.end.1, message),
        }
    }

    pub fn expect(&mut self, want: &Token) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {want}, found {t}"))),
            None => Err(self.error(format!("expected {want}, found end of input"))),
        }
    }

    pub fn ident(&mut self) -> Result<&'a str, ParseError> {
        match self.peek() {
            Some(Token::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => Err(self.error(format!("expected an identifier, found {t}"))),
            None => Err(self.error("expected an identifier, found end of input")),
        }
    }

    pub fn eat(&mut self, want: &Token) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected trailing {t}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_rule_line() {
        let toks = tokenize("(f ?x a) -> (g ?x) ; trailing", 1).unwrap();
        let kinds: Vec<_> = toks.into_iter().map(|s| s.token).collect();
        assert_eq!(
            kinds,
            vec![
                Token::LParen,
                Token::Ident("f".into()),
                Token::Var("x".into()),
                Token::Ident("a".into()),
                Token::RParen,
                Token::Arrow,
                Token::LParen,
                Token::Ident("g".into()),
                Token::Var("x".into()),
                Token::RParen,
            ]
        );
    }

    #[test]
    fn reports_bad_character_location() {
        let err = tokenize("\n  f @", 1).unwrap_err();
        assert_eq!((err.line, err.column), (2, 5));
    }
}
