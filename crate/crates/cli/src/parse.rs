//! Parsing for command-line values: rationals like `-9/16`, points like
//! `1/4,-3/4`, and expressions in t like `t^2+2t` or `(t+1)/(t^2-1)`.

use henon::funcfield::poly::Poly;
use henon::funcfield::ratfunc::RatFunc;
use henon::Field;
use henon::Rational;
use num_bigint::BigInt;

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    T,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Int(digits.parse().expect("digits")));
            }
            't' => {
                chars.next();
                out.push(Token::T);
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            other => return Err(ParseError(format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFunc, ParseError> {
        let mut acc = self.unary()?;
        loop {
            // implicit multiplication: `2t`, `2(t+1)`, `t(t-1)`
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let divisor = self.unary()?;
                    let inv = divisor
                        .inv()
                        .ok_or_else(|| ParseError("division by zero".into()))?;
                    acc = acc.mul(&inv);
                }
                Some(Token::Int(_)) | Some(Token::T) | Some(Token::Open) => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFunc, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let exp = match self.advance() {
                Some(Token::Int(n)) => u32::try_from(n.clone())
                    .map_err(|_| ParseError(format!("exponent {n} out of range")))?,
                other => return Err(ParseError(format!("expected exponent, found {other:?}"))),
            };
            let mut acc = RatFunc::constant(Rational::from_integer(1.into()));
            for _ in 0..exp {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, ParseError> {
        match self.advance() {
            Some(Token::Int(n)) => Ok(RatFunc::constant(Rational::from_integer(n))),
            Some(Token::T) => Ok(RatFunc::from_poly(Poly::t())),
            Some(Token::Open) => {
                let inner = self.expr()?;
                if self.advance() != Some(Token::Close) {
                    return Err(ParseError("unbalanced parentheses".into()));
                }
                Ok(inner)
            }
            other => Err(ParseError(format!("expected a value, found {other:?}"))),
        }
    }
}

/// Parse an expression in t into a rational function.
pub fn parse_ratfunc(input: &str) -> Result<RatFunc, ParseError> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(ParseError("empty expression".into()));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(ParseError(format!("trailing input in {input:?}")));
    }
    Ok(value)
}

/// Parse a plain rational like `-9/16` or `3` (an expression in t that must
/// be constant).
pub fn parse_rational(input: &str) -> Result<Rational, ParseError> {
    let f = parse_ratfunc(input)?;
    f.as_constant()
        .ok_or_else(|| ParseError(format!("{input:?} is not a constant rational")))
}

/// Parse `x,y` into a pair of expressions in t.
pub fn parse_point_ratfunc(input: &str) -> Result<(RatFunc, RatFunc), ParseError> {
    let (x, y) = input
        .split_once(',')
        .ok_or_else(|| ParseError(format!("point {input:?} must be written as x,y")))?;
    Ok((parse_ratfunc(x)?, parse_ratfunc(y)?))
}

/// Parse `x,y` into a pair of rationals.
pub fn parse_point_rational(input: &str) -> Result<(Rational, Rational), ParseError> {
    let (x, y) = parse_point_ratfunc(input)?;
    match (x.as_constant(), y.as_constant()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(ParseError(format!("point {input:?} must have constant coordinates"))),
    }
}

/// Parse a comma-separated list of rationals.
pub fn parse_rational_list(input: &str) -> Result<Vec<Rational>, ParseError> {
    input.split(',').map(parse_rational).collect()
}
