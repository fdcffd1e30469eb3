//! Tokenizer for the `.bc` dialect. `%` starts a line comment. Identifiers
//! starting with an uppercase letter are variables; apostrophes are allowed
//! in identifier tails (`ab'`, `L'`).

use crate::diag::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    DotDot,
    Colon,
    Eq,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Var(s) => format!("variable `{}`", s),
            Tok::Int(n) => format!("`{}`", n),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($tok:expr, $span:expr) => {
            tokens.push(Token { tok: $tok, span: $span })
        };
    }

    while let Some(&ch) = chars.peek() {
        let span = Span::new(line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, span);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, span);
            }
            '{' => {
                chars.next();
                col += 1;
                push!(Tok::LBrace, span);
            }
            '}' => {
                chars.next();
                col += 1;
                push!(Tok::RBrace, span);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, span);
            }
            ':' => {
                chars.next();
                col += 1;
                push!(Tok::Colon, span);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, span);
            }
            '-' => {
                chars.next();
                col += 1;
                push!(Tok::Minus, span);
            }
            '.' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'.') {
                    chars.next();
                    col += 1;
                    push!(Tok::DotDot, span);
                } else {
                    push!(Tok::Dot, span);
                }
            }
            '=' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::EqEq, span);
                } else {
                    push!(Tok::Eq, span);
                }
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ne, span);
                } else {
                    return Err(Diagnostic::error(span, "expected `=` after `!`"));
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Le, span);
                } else {
                    push!(Tok::Lt, span);
                }
            }
            '>' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ge, span);
                } else {
                    push!(Tok::Gt, span);
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let n: i64 = s
                    .parse()
                    .map_err(|_| Diagnostic::error(span, format!("integer `{}` out of range", s)))?;
                push!(Tok::Int(n), span);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                if s.chars().next().unwrap().is_uppercase() {
                    push!(Tok::Var(s), span);
                } else {
                    push!(Tok::Ident(s), span);
                }
            }
            other => {
                return Err(Diagnostic::error(
                    span,
                    format!("unexpected character `{}`", other),
                ));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_range_and_dots() {
        let toks = lex("sort slot = 1..4.").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("sort".into()),
                Tok::Ident("slot".into()),
                Tok::Eq,
                Tok::Int(1),
                Tok::DotDot,
                Tok::Int(4),
                Tok::Dot,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn lexes_primed_identifiers() {
        let toks = lex("ab'(at(A',1))").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("ab'".into()));
        assert_eq!(toks[2].tok, Tok::Ident("at".into()));
        assert_eq!(toks[4].tok, Tok::Var("A'".into()));
    }

    #[test]
    fn reports_location() {
        let err = lex("x\n  ?").unwrap_err();
        assert_eq!(err.span, Some(Span::new(2, 3)));
    }
}
