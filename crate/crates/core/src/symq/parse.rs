//! Parser for the plain-text rendering of [`QPoly`] and [`QRat`].
//!
//! The grammar accepts exactly what the `Display` implementations produce
//! (`q^4 - 3*q^3 + 1/2*q`, `(q^2 + 1)/(q^3 - q)`) plus the obvious
//! generalizations: arbitrary nesting, explicit `*`, and integer exponents on
//! any parenthesized subexpression.  All arithmetic is exact, so parsing and
//! printing round-trip.

use super::{QPoly, QRat};
use crate::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;

/// Parses a rational function in `q` from its canonical (or any equivalent)
/// plain-text form.
pub fn parse_qrat(text: &str) -> Result<QRat> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let value = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected trailing input at token {} in {text:?}",
            p.pos
        )));
    }
    Ok(value)
}

/// Parses a polynomial in `q`; errors if the expression has a nontrivial
/// denominator.
pub fn parse_qpoly(text: &str) -> Result<QPoly> {
    let r = parse_qrat(text)?;
    r.as_poly().cloned().ok_or_else(|| {
        Error::Parse(format!("expected a polynomial but {text:?} has a denominator"))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Q,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'q' => {
                out.push(Tok::Q);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n = BigInt::parse_bytes(digits.as_bytes(), 10).ok_or_else(|| {
                    Error::Parse(format!("invalid integer literal {digits:?}"))
                })?;
                out.push(Tok::Int(n));
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character {c:?} at byte {i} in {text:?}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<QRat> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc + &rhs;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = &acc - &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<QRat> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc = &acc / &rhs;
                }
                // Implicit multiplication: the canonical form never produces
                // it, but `2q` or `(q+1)(q-1)` are unambiguous, so accept them.
                Some(Tok::Q) | Some(Tok::LParen) | Some(Tok::Int(_)) => {
                    let rhs = self.factor()?;
                    acc = &acc * &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<QRat> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let inner = self.factor()?;
                Ok(-&inner)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.factor()
            }
            _ => {
                let base = self.atom()?;
                if matches!(self.peek(), Some(Tok::Caret)) {
                    self.bump();
                    let exp = self.exponent()?;
                    Ok(base.pow(exp))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.bump() {
            Some(Tok::Int(n)) => u32::try_from(&n)
                .map_err(|_| Error::Parse(format!("exponent {n} out of range"))),
            other => Err(Error::Parse(format!(
                "expected an integer exponent, found {other:?}"
            ))),
        }
    }

    fn atom(&mut self) -> Result<QRat> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(QRat::from_rational(BigRational::new(n, BigInt::one()))),
            Some(Tok::Q) => Ok(QRat::from_poly(QPoly::q())),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    other => Err(Error::Parse(format!(
                        "expected ')', found {other:?}"
                    ))),
                }
            }
            other => Err(Error::Parse(format!(
                "expected a number, 'q', or '(', found {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symq::{br, brq};
    use proptest::prelude::*;

    fn p(coeffs: &[i64]) -> QPoly {
        QPoly::from_int_coeffs(coeffs)
    }

    #[test]
    fn parses_canonical_polynomials() {
        assert_eq!(
            parse_qpoly("q^4 - 3*q^3 + 5*q^2 - 6*q + 3").unwrap(),
            p(&[3, -6, 5, -3, 1])
        );
        assert_eq!(parse_qpoly("0").unwrap(), QPoly::zero());
        assert_eq!(parse_qpoly("-q").unwrap(), p(&[0, -1]));
        assert_eq!(
            parse_qpoly("1/2*q + 1").unwrap(),
            QPoly::from_coeffs(vec![br(1), brq(1, 2)])
        );
    }

    #[test]
    fn parses_rational_functions() {
        let r = parse_qrat("(q^2 + 1)/(q^3 - q)").unwrap();
        assert_eq!(r, QRat::new(p(&[1, 0, 1]), p(&[0, -1, 0, 1])));
        // Reduction happens on construction.
        assert_eq!(
            parse_qrat("(q^2 - 1)/(q - 1)").unwrap(),
            QRat::from_poly(p(&[1, 1]))
        );
        assert_eq!(parse_qrat("1/(q+1)").unwrap(), QRat::new(p(&[1]), p(&[1, 1])));
    }

    #[test]
    fn arithmetic_conventions() {
        // Left-associative division and tight exponentiation.
        assert_eq!(parse_qrat("4/2/2").unwrap(), QRat::from_int(1));
        assert_eq!(parse_qrat("2^3").unwrap(), QRat::from_int(8));
        assert_eq!(parse_qrat("-q^2").unwrap(), QRat::from_poly(p(&[0, 0, -1])));
        assert_eq!(parse_qrat("(q+1)(q-1)").unwrap(), QRat::from_poly(p(&[-1, 0, 1])));
        assert_eq!(parse_qrat("2q").unwrap(), QRat::from_poly(p(&[0, 2])));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_qrat("").is_err());
        assert!(parse_qrat("q +").is_err());
        assert!(parse_qrat("(q").is_err());
        assert!(parse_qrat("x + 1").is_err());
        assert!(parse_qrat("q^q").is_err());
        assert!(parse_qrat("1/0").is_err());
        assert!(parse_qrat("1/(q - q)").is_err());
    }

    proptest! {
        #[test]
        fn polynomial_display_round_trips(coeffs in prop::collection::vec(-9i64..=9, 0..7)) {
            let poly = QPoly::from_int_coeffs(&coeffs);
            let text = poly.to_string();
            prop_assert_eq!(parse_qpoly(&text).unwrap(), poly);
        }

        #[test]
        fn rational_display_round_trips(
            num in prop::collection::vec(-9i64..=9, 0..5),
            den in prop::collection::vec(-9i64..=9, 1..5),
        ) {
            let d = QPoly::from_int_coeffs(&den);
            prop_assume!(!d.is_zero());
            let r = QRat::new(QPoly::from_int_coeffs(&num), d);
            let text = r.to_string();
            prop_assert_eq!(parse_qrat(&text).unwrap(), r);
        }
    }
}
