use num_traits::Zero;
use thiserror::Error;

use crate::poly::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown variable `{name}`")]
    UnknownVariable { line: usize, column: usize, name: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(num_bigint::BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if c.is_whitespace() {
            advance(&mut chars);
            continue;
        }
        let token = if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(d);
                advance(&mut chars);
            }
            Token::Number(digits.parse().expect("ascii digits"))
        } else if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || **d == '_') {
                name.push(d);
                advance(&mut chars);
            }
            Token::Ident(name)
        } else {
            let t = match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '*' => Token::Star,
                '/' => Token::Slash,
                '^' => Token::Caret,
                '(' => Token::Open,
                ')' => Token::Close,
                other => {
                    return Err(ParseError::Syntax { line: l, column: col, message: format!("unexpected character `{other}`") })
                }
            };
            advance(&mut chars);
            t
        };
        out.push(Spanned { token, line: l, column: col });
    }
    out.push(Spanned { token: Token::End, line, column });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        if t.token != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, at: &Spanned, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: at.line, column: at.column, message: message.into() })
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().token {
                Token::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().token {
                Token::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Token::Slash => {
                    self.bump();
                    let at = self.peek().clone();
                    let divisor = self.unary()?;
                    match divisor.constant_value() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::from_integer(1.into()) / c)),
                        Some(_) => return self.error(&at, "division by zero"),
                        None => return self.error(&at, "only division by a nonzero constant is allowed"),
                    }
                }
                Token::Number(_) | Token::Ident(_) | Token::Open => {
                    let at = self.peek().clone();
                    return self.error(&at, "implicit multiplication is not allowed; use `*`");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        if self.peek().token == Token::Minus {
            self.bump();
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if self.peek().token != Token::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.bump();
        match at.token {
            Token::Number(ref n) => match u32::try_from(n) {
                Ok(e) => Ok(base.pow(e)),
                Err(_) => self.error(&at, "exponent too large"),
            },
            _ => self.error(&at, "exponent must be a non-negative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let nvars = self.names.len();
        let at = self.bump();
        match at.token {
            Token::Number(n) => Ok(Poly::constant(nvars, Rational::from_integer(n))),
            Token::Ident(ref name) => match self.names.iter().position(|v| v == name) {
                Some(i) => Ok(Poly::var(nvars, i)),
                None => Err(ParseError::UnknownVariable { line: at.line, column: at.column, name: name.clone() }),
            },
            Token::Open => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.token != Token::Close {
                    return self.error(&close, "expected `)`");
                }
                Ok(inner)
            }
            Token::End => self.error(&at, "unexpected end of input"),
            _ => self.error(&at, "expected a number, a variable or `(`"),
        }
    }
}

/// Parses `text` over the variables `names` (in chart order).
pub fn parse_poly(text: &str, names: &[String]) -> Result<Poly, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, pos: 0, names };
    let poly = parser.expr()?;
    let rest = parser.peek().clone();
    if rest.token != Token::End {
        return parser.error(&rest, "unexpected trailing input");
    }
    Ok(poly)
}

/// Parses a rational literal `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let p = parse_poly(text, &[])?;
    Ok(p.constant_value().expect("no variables"))
}
