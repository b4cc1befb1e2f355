//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' '-'? number)?
//! base   := number | ident | '(' expr ')' | ident '(' expr ')'
//! ident  := [a-z][a-z0-9']*
//! ```

use super::{Func, Node};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|n| (Tok::Num(n), start));
        }
        if c.is_ascii_lowercase() {
            let rest = &self.src[start..];
            let len = rest
                .char_indices()
                .find(|(_, ch)| !(ch.is_ascii_lowercase() || ch.is_ascii_digit() || *ch == '\''))
                .map_or(rest.len(), |(i, _)| i);
            self.pos += len;
            return Ok((Tok::Ident(rest[..len].to_string()), start));
        }
        if "+-*/^()".contains(c) {
            self.pos += 1;
            return Ok((Tok::Op(c), start));
        }
        Err(Error::Syntax {
            position: start,
            message: format!("unexpected character `{c}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<f64> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
        };
        digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            digits(&mut i);
        }
        // Exponent only when followed by a digit, so `2e` stays a syntax error later.
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                i = j;
                digits(&mut i);
            }
        }
        let text = &self.src[start..i];
        self.pos = i;
        text.parse::<f64>().map_err(|_| Error::Syntax {
            position: start,
            message: format!("malformed number `{text}`"),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_pos: usize,
    vars: &'a [&'a str],
}

pub(super) fn parse(source: &str, vars: &[&str]) -> Result<Node> {
    let mut lexer = Lexer {
        src: source,
        pos: 0,
    };
    let (tok, tok_pos) = lexer.next()?;
    let mut p = Parser {
        lexer,
        tok,
        tok_pos,
        vars,
    };
    let node = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected());
    }
    Ok(node)
}

impl Parser<'_> {
    fn advance(&mut self) -> Result<()> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.tok_pos = pos;
        Ok(())
    }

    fn unexpected(&self) -> Error {
        let message = match &self.tok {
            Tok::End => "unexpected end of input".to_string(),
            Tok::Num(n) => format!("unexpected number {n}"),
            Tok::Ident(s) => format!("unexpected identifier `{s}`"),
            Tok::Op(c) => format!("unexpected `{c}`"),
        };
        Error::Syntax {
            position: self.tok_pos,
            message,
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.tok != Tok::Op(op) {
            return Err(Error::Syntax {
                position: self.tok_pos,
                message: format!("expected `{op}`"),
            });
        }
        self.advance()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let ctor: fn(Box<Node>, Box<Node>) -> Node = match self.tok {
                Tok::Op('+') => Node::Add,
                Tok::Op('-') => Node::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = ctor(Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            let ctor: fn(Box<Node>, Box<Node>) -> Node = match self.tok {
                Tok::Op('*') => Node::Mul,
                Tok::Op('/') => Node::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.factor()?;
            lhs = ctor(Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.advance()?;
        let negative = self.tok == Tok::Op('-');
        if negative {
            self.advance()?;
        }
        let Tok::Num(n) = self.tok else {
            return Err(Error::Syntax {
                position: self.tok_pos,
                message: "exponent must be a numeric constant".into(),
            });
        };
        self.advance()?;
        Ok(Node::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn base(&mut self) -> Result<Node> {
        match self.tok.clone() {
            Tok::Num(n) => {
                self.advance()?;
                Ok(Node::Const(n))
            }
            Tok::Op('(') => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let position = self.tok_pos;
                self.advance()?;
                if self.tok == Tok::Op('(') {
                    let func =
                        Func::from_name(&name).ok_or(Error::UnknownFunction { name, position })?;
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Node::Var(i)),
                    None => Err(Error::UnknownVariable { name, position }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}
