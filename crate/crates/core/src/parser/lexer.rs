use std::fmt;

use crate::diagnostic::{Diagnostic, DiagnosticKind, Span};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Components,
    Hosts,
    Constraintset,
    Forall,
    Exists,
    Host,
    In,
    Deployment,
    Instancesof,
    Connectsto,
    And,
    Or,
    Not,
}

impl Keyword {
    const ALL: [(&'static str, Keyword); 13] = [
        ("components", Keyword::Components),
        ("hosts", Keyword::Hosts),
        ("constraintset", Keyword::Constraintset),
        ("forall", Keyword::Forall),
        ("exists", Keyword::Exists),
        ("host", Keyword::Host),
        ("in", Keyword::In),
        ("deployment", Keyword::Deployment),
        ("instancesof", Keyword::Instancesof),
        ("connectsto", Keyword::Connectsto),
        ("and", Keyword::And),
        ("or", Keyword::Or),
        ("not", Keyword::Not),
    ];

    pub fn lookup(word: &str) -> Option<Keyword> {
        Self::ALL.iter().find(|(w, _)| *w == word).map(|(_, k)| *k)
    }

    pub fn as_str(self) -> &'static str {
        Self::ALL.iter().find(|(_, k)| *k == self).map(|(w, _)| *w).unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Symbol {
    pub fn as_str(self) -> &'static str {
        match self {
            Symbol::LParen => "(",
            Symbol::RParen => ")",
            Symbol::LBrace => "{",
            Symbol::RBrace => "}",
            Symbol::Comma => ",",
            Symbol::Dot => ".",
            Symbol::Colon => ":",
            Symbol::Eq => "=",
            Symbol::Ne => "!=",
            Symbol::Le => "<=",
            Symbol::Lt => "<",
            Symbol::Ge => ">=",
            Symbol::Gt => ">",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Keyword(Keyword),
    Int,
    Symbol(Symbol),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident => f.write_str("identifier"),
            TokenKind::Int => f.write_str("integer"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Symbol(s) => write!(f, "`{}`", s.as_str()),
        }
    }
}

/// Splits Deladas source into tokens. Whitespace and `//` comments are dropped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1u32, 1u32);

    while let Some(&c) = chars.peek() {
        let start = Span::new(line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c == '/' {
            chars.next();
            column += 1;
            if chars.peek() == Some(&'/') {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
                continue;
            }
            return Err(illegal('/', start));
        }
        if c.is_ascii_alphabetic() {
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    text.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let kind = Keyword::lookup(&text).map_or(TokenKind::Ident, TokenKind::Keyword);
            tokens.push(Token { kind, text, span: start });
            continue;
        }
        if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token {
                kind: TokenKind::Int,
                text,
                span: start,
            });
            continue;
        }
        chars.next();
        column += 1;
        let followed_by_eq = chars.peek() == Some(&'=');
        let symbol = match c {
            '(' => Symbol::LParen,
            ')' => Symbol::RParen,
            '{' => Symbol::LBrace,
            '}' => Symbol::RBrace,
            ',' => Symbol::Comma,
            '.' => Symbol::Dot,
            ':' => Symbol::Colon,
            '=' => Symbol::Eq,
            '!' if followed_by_eq => Symbol::Ne,
            '<' if followed_by_eq => Symbol::Le,
            '>' if followed_by_eq => Symbol::Ge,
            '<' => Symbol::Lt,
            '>' => Symbol::Gt,
            other => return Err(illegal(other, start)),
        };
        if matches!(symbol, Symbol::Ne | Symbol::Le | Symbol::Ge) {
            chars.next();
            column += 1;
        }
        tokens.push(Token {
            kind: TokenKind::Symbol(symbol),
            text: symbol.as_str().to_string(),
            span: start,
        });
    }
    Ok(tokens)
}

fn illegal(c: char, span: Span) -> Diagnostic {
    Diagnostic::error(
        DiagnosticKind::IllegalCharacter,
        span,
        format!("illegal character `{}`", c.escape_default()),
    )
}
