//! Text syntax for expressions.
//!
//! ```text
//! expr     := ["+"|"-"] term { ("+"|"-") term }
//! term     := int | [int "*"] factor { "*" factor }
//! factor   := "eta" | "h" | "[" rational { "," rational } "]" | "<" rational ">"
//! rational := ["-"] int ["/" positive-int]
//! ```
//!
//! `<a>` is `1 + eta*[a]` and `h` is `2 + eta*[-1]`. Positions are byte offsets.

use mwk_core::{MwExpr, Rational};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{CliError, CliResult};

pub fn parse(text: &str) -> CliResult<MwExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(e)
}

pub fn parse_rational(text: &str) -> CliResult<Rational> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.ws();
    let r = p.rational()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.error("trailing input after rational"));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> CliError {
        CliError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> CliResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> CliResult<MwExpr> {
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            let sign = match self.peek() {
                Some(b'+') => 1,
                Some(b'-') => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?;
            acc = if sign > 0 { acc.try_add(&t)? } else { acc.try_sub(&t)? };
        }
    }

    fn term(&mut self) -> CliResult<MwExpr> {
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let start = self.pos;
            let n = self.natural()?;
            let c = n.to_i64().ok_or(CliError::Parse {
                position: start,
                message: "coefficient does not fit in 64 bits".into(),
            })?;
            if !self.eat(b'*') {
                return Ok(MwExpr::constant(c));
            }
            return Ok(self.product()?.scale(c));
        }
        self.product()
    }

    fn product(&mut self) -> CliResult<MwExpr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> CliResult<MwExpr> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut entries = vec![self.rational()?];
                while self.eat(b',') {
                    entries.push(self.rational()?);
                }
                self.expect(b']')?;
                Ok(MwExpr::symbol(entries)?)
            }
            Some(b'<') => {
                self.pos += 1;
                let a = self.rational()?;
                self.expect(b'>')?;
                Ok(MwExpr::angle(a)?)
            }
            Some(b'h') if !self.word_follows(1) => {
                self.pos += 1;
                Ok(MwExpr::hyperbolic())
            }
            Some(b'e') if self.src[self.pos..].starts_with(b"eta") && !self.word_follows(3) => {
                self.pos += 3;
                Ok(MwExpr::eta())
            }
            _ => Err(self.error("expected 'eta', 'h', '[' or '<'")),
        }
    }

    fn word_follows(&self, len: usize) -> bool {
        self.src
            .get(self.pos + len)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn natural(&mut self) -> CliResult<BigInt> {
        self.ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("decimal digits"))
    }

    fn rational(&mut self) -> CliResult<Rational> {
        let negative = self.eat(b'-');
        let mut num = self.natural()?;
        if negative {
            num = -num;
        }
        if !self.eat(b'/') {
            return Ok(Rational::from_integer(num));
        }
        let at = self.pos;
        let den = self.natural()?;
        if den.is_zero() {
            return Err(CliError::Parse {
                position: at,
                message: "zero denominator".into(),
            });
        }
        Ok(Rational::new(num, den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mwk_core::arith::int;
    use mwk_core::mwcore::is_zero;
    use mwk_core::MwError;

    #[test]
    fn examples() {
        let e = parse("[ -1, -1 ]").unwrap();
        assert_eq!(e, MwExpr::symbol_ints(&[-1, -1]).unwrap());
        let e = parse("[6] - [2] - [3] - eta*[2,3]").unwrap();
        assert_eq!(e.degree(), 1);
        assert!(is_zero(&e).unwrap());
        assert!(matches!(
            parse("[2] + [3,5]"),
            Err(CliError::Domain(MwError::DegreeMismatch { .. }))
        ));
    }

    #[test]
    fn sugar() {
        assert_eq!(parse("h").unwrap(), MwExpr::hyperbolic());
        assert_eq!(parse("<3/2>").unwrap(), MwExpr::angle(Rational::new(3.into(), 2.into())).unwrap());
        assert_eq!(parse("2*eta*[5]").unwrap(), MwExpr::term(2, 1, vec![int(5)]).unwrap());
        assert_eq!(parse("-3").unwrap(), MwExpr::constant(-3));
        assert_eq!(parse("eta*eta").unwrap(), MwExpr::eta_power(2));
    }

    #[test]
    fn errors_carry_positions() {
        match parse("[2] + x") {
            Err(CliError::Parse { position, .. }) => assert_eq!(position, 6),
            other => panic!("{other:?}"),
        }
        match parse("[1/0]") {
            Err(CliError::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("[2"), Err(CliError::Parse { position: 2, .. })));
        assert!(matches!(parse("[0]"), Err(CliError::Domain(MwError::ZeroEntry))));
        assert!(matches!(parse("2*3"), Err(CliError::Parse { .. })));
        assert!(matches!(parse("etab"), Err(CliError::Parse { position: 0, .. })));
    }
}
