//! Lexer, recursive-descent parser and printer for the functional language.

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::piecewise::{Piecewise, Poly};
use super::preference::{Criterion, Direction, Preference};
use super::Functional;
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Bar,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out: Vec<(Tok, usize)> = Vec::new();
    let mut i = 0;
    let is_num_start = |c: u8| c.is_ascii_digit() || c == b'.';
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let prefix_position = !matches!(
            out.last(),
            Some((Tok::Num(_), _)) | Some((Tok::Ident(_), _)) | Some((Tok::RParen, _)) | Some((Tok::RBracket, _))
        );
        let signed_number = c == b'-' && prefix_position && bytes.get(i + 1).is_some_and(|&n| is_num_start(n));
        if is_num_start(c) || signed_number {
            let start = i;
            if signed_number {
                i += 1;
            }
            let scan = |i: &mut usize| {
                while *i < bytes.len() && is_num_start(bytes[*i]) {
                    *i += 1;
                }
            };
            scan(&mut i);
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                scan(&mut i);
            }
            let text = &src[start..i];
            let r = parse_rational(text).map_err(|e| ParseError { pos: start, message: e.to_string() })?;
            out.push((Tok::Num(r), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_ascii_lowercase()), start));
            continue;
        }
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'|' => Tok::Bar,
            _ => {
                return Err(ParseError { pos: i, message: format!("unexpected character {:?}", c as char) });
            }
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.offset(), message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        match self.peek() {
            Some(Tok::Num(_)) => match self.bump() {
                Some(Tok::Num(r)) => Ok(r),
                _ => unreachable!(),
            },
            Some(Tok::Minus) if matches!(self.toks.get(self.pos + 1), Some((Tok::Num(_), _))) => {
                self.pos += 1;
                Ok(-self.number()?)
            }
            _ => self.err("expected a number"),
        }
    }

    fn expr(&mut self) -> Result<Functional, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Functional::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Functional::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Functional, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Functional::mul(lhs, self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = Functional::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Functional, ParseError> {
        let start = self.offset();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(Functional::Const(r)),
            Some(Tok::Minus) => Ok(Functional::Neg(Box::new(self.factor()?))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.named(&name, start),
            _ => {
                self.pos -= 1;
                self.err("expected a functional")
            }
        }
    }

    fn paren_number(&mut self) -> Result<Rational, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let r = self.number()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(r)
    }

    fn named(&mut self, name: &str, start: usize) -> Result<Functional, ParseError> {
        Ok(match name {
            "mean" => Functional::Mean,
            "var" => Functional::Var,
            "esssup" => Functional::EssSup,
            "essinf" => Functional::EssInf,
            "quantile" => {
                let t = self.paren_number()?;
                if !(t.is_positive() && t < Rational::one()) {
                    return Err(ParseError { pos: start, message: format!("quantile level {t} outside (0,1)") });
                }
                Functional::Quantile(t)
            }
            "stoploss" => Functional::StopLoss(self.paren_number()?),
            "expmom" => Functional::ExpMoment(self.paren_number()?),
            "eu" | "dual" => {
                self.expect(Tok::LParen, "'('")?;
                let pw = self.piecewise()?;
                self.expect(Tok::RParen, "')'")?;
                if name == "eu" {
                    Functional::Eu(pw)
                } else {
                    Functional::Dual(pw)
                }
            }
            "abs" => {
                self.expect(Tok::LParen, "'('")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Functional::abs(e)
            }
            "pow" => {
                self.expect(Tok::LParen, "'('")?;
                let e = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let p = self.number()?;
                self.expect(Tok::RParen, "')'")?;
                Functional::pow(e, p)
            }
            other => {
                return Err(ParseError { pos: start, message: format!("unknown functional {other:?}") });
            }
        })
    }

    fn piecewise(&mut self) -> Result<Piecewise, ParseError> {
        let start = self.offset();
        let mut pieces = vec![self.poly()?];
        let mut breaks = Vec::new();
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            breaks.push(self.number()?);
            self.expect(Tok::Bar, "'|'")?;
            pieces.push(self.poly()?);
        }
        Piecewise::new(breaks, pieces).map_err(|message| ParseError { pos: start, message })
    }

    fn poly(&mut self) -> Result<Poly, ParseError> {
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            negate = true;
        }
        loop {
            let (c, k) = self.monomial()?;
            let c = if negate { -c } else { c };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] += c;
            match self.peek() {
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(Poly::new(coeffs))
    }

    fn monomial(&mut self) -> Result<(Rational, usize), ParseError> {
        let coef = match self.peek() {
            Some(Tok::Num(_)) => Some(self.number()?),
            _ => None,
        };
        if coef.is_some() {
            if self.peek() != Some(&Tok::Star) {
                return Ok((coef.unwrap_or_else(Rational::one), 0));
            }
            self.pos += 1;
        }
        match self.bump() {
            Some(Tok::Ident(v)) if v == "x" || v == "t" => {}
            _ => {
                self.pos -= 1;
                return self.err("expected polynomial variable x or t");
            }
        }
        let mut degree = 1usize;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.number()?;
            degree = match (e.is_integer(), e.to_integer().to_usize()) {
                (true, Some(d)) if d <= 64 => d,
                _ => return self.err("polynomial exponent must be a small nonnegative integer"),
            };
        }
        Ok((coef.unwrap_or_else(Rational::one), degree))
    }

    fn direction(&mut self) -> Result<Direction, ParseError> {
        match self.bump() {
            Some(Tok::Ident(d)) if d == "higher" => Ok(Direction::Higher),
            Some(Tok::Ident(d)) if d == "lower" => Ok(Direction::Lower),
            _ => {
                self.pos -= 1;
                self.err("expected 'higher' or 'lower'")
            }
        }
    }

    fn criterion(&mut self) -> Result<Criterion, ParseError> {
        let spec = self.expr()?;
        self.expect(Tok::Comma, "','")?;
        let direction = self.direction()?;
        Ok(Criterion { spec, direction })
    }

    fn preference(&mut self) -> Result<Preference, ParseError> {
        let start = self.offset();
        match self.bump() {
            Some(Tok::Ident(k)) if k == "total" => {
                self.expect(Tok::LParen, "'('")?;
                let c = self.criterion()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Preference::Total(c))
            }
            Some(Tok::Ident(k)) if k == "pareto" => {
                self.expect(Tok::LParen, "'('")?;
                self.expect(Tok::LBracket, "'['")?;
                let mut list = Vec::new();
                loop {
                    self.expect(Tok::LParen, "'('")?;
                    list.push(self.criterion()?);
                    self.expect(Tok::RParen, "')'")?;
                    if self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBracket, "']'")?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Preference::Pareto(list))
            }
            _ => Err(ParseError { pos: start, message: "expected total(...) or pareto([...])".into() }),
        }
    }
}

pub fn parse_functional(src: &str) -> Result<Functional, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.expr()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_preference(src: &str) -> Result<Preference, ParseError> {
    let mut p = Parser::new(src)?;
    let pref = p.preference()?;
    p.finish()?;
    Ok(pref)
}

/// Context levels: 0 anywhere, 1 operand of `+`/`-`, 2 operand of `*`/`/`.
fn render_at(f: &Functional, level: u8, out: &mut String) {
    use Functional::*;
    match f {
        Mean => out.push_str("mean"),
        Var => out.push_str("var"),
        EssSup => out.push_str("esssup"),
        EssInf => out.push_str("essinf"),
        Quantile(t) => out.push_str(&format!("quantile({})", format_rational(t))),
        StopLoss(k) => out.push_str(&format!("stoploss({})", format_rational(k))),
        ExpMoment(a) => out.push_str(&format!("expmom({})", format_rational(a))),
        Eu(pw) => out.push_str(&format!("eu({})", pw.render("x"))),
        Dual(pw) => out.push_str(&format!("dual({})", pw.render("t"))),
        Const(c) => out.push_str(&format_rational(c)),
        Neg(inner) => {
            if matches!(**inner, Const(_)) {
                out.push_str("-(");
                render_at(inner, 0, out);
                out.push(')');
            } else {
                out.push('-');
                render_at(inner, 2, out);
            }
        }
        Abs(inner) => {
            out.push_str("abs(");
            render_at(inner, 0, out);
            out.push(')');
        }
        Pow(inner, e) => {
            out.push_str("pow(");
            render_at(inner, 0, out);
            out.push_str(&format!(", {})", format_rational(e)));
        }
        Sum(a, b) => {
            let wrap = level >= 1;
            if wrap {
                out.push('(');
            }
            render_at(a, 0, out);
            match &**b {
                Neg(inner) => {
                    out.push_str(" - ");
                    render_at(inner, 1, out);
                }
                other => {
                    out.push_str(" + ");
                    render_at(other, 1, out);
                }
            }
            if wrap {
                out.push(')');
            }
        }
        Product(a, b) | Quotient(a, b) => {
            let wrap = level >= 2;
            if wrap {
                out.push('(');
            }
            render_at(a, 1, out);
            out.push_str(if matches!(f, Product(..)) { " * " } else { " / " });
            render_at(b, 2, out);
            if wrap {
                out.push(')');
            }
        }
    }
}

pub(super) fn render(f: &Functional) -> String {
    let mut out = String::new();
    render_at(f, 0, &mut out);
    out
}
