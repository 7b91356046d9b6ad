//! Recursive-descent parser.
//!
//! ```plain
//! expr   -> term (('+' | '-') term)*
//! term   -> factor (('*' | '/') factor)*
//! factor -> NUMBER | 't' | 'pi' | 'e' | IDENT '(' expr ')' | '(' expr ')' | '-' factor
//! ```

use super::ast::{BinOp, Constant, Expr, Func};
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| ParseError::BadNumber { offset: start, text: text.to_string() })?;
                if !value.is_finite() {
                    return Err(ParseError::BadNumber { offset: start, text: text.to_string() });
                }
                out.push(Spanned { tok: Tok::Num(value), offset: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned { tok: Tok::Ident(src[start..i].to_string()), offset: start });
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::UnexpectedChar { offset: i, ch });
            }
        };
        out.push(Spanned { tok, offset: start });
        i += 1;
    }
    Ok(out)
}

/// Decimal literal with optional fraction and exponent.
fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |s| s.offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        tok
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::RParen) => Ok(()),
            Some(_) => Err(ParseError::Expected { offset, what: "')'" }),
            None => Err(ParseError::UnexpectedEnd { offset }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            None => Err(ParseError::UnexpectedEnd { offset }),
            Some(Tok::Num(v)) => Ok(Expr::Number(v)),
            Some(Tok::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(Constant::Pi)),
                "e" => Ok(Expr::Const(Constant::E)),
                _ => {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(if self.peek() == Some(&Tok::LParen) {
                            ParseError::UnknownFunction { offset, name }
                        } else {
                            ParseError::UnknownIdentifier { offset, name }
                        });
                    };
                    let open = self.offset();
                    match self.bump() {
                        Some(Tok::LParen) => {}
                        Some(_) => return Err(ParseError::Expected { offset: open, what: "'('" }),
                        None => return Err(ParseError::UnexpectedEnd { offset: open }),
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
            },
            Some(_) => Err(ParseError::Expected { offset, what: "a number, 't', a constant, a call or '('" }),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(src)?;
    let mut parser = Parser { toks, pos: 0, end: src.len() };
    let expr = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(ParseError::Trailing { offset: parser.offset() });
    }
    Ok(expr)
}
