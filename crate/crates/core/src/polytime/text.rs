//! Canonical text form `c * t[γ,n]^e * …` and its parser.

use super::poly::{Exponents, MultiPoly};
use super::timevar::TimeVar;
use crate::Q;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty polynomial text")]
    Empty,
    #[error("unexpected character {found:?} at byte {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("malformed number at byte {pos}")]
    BadNumber { pos: usize },
    #[error("zero denominator at byte {pos}")]
    ZeroDenominator { pos: usize },
    #[error("variable {var} is not in the declared variable set")]
    UnknownVariable { var: TimeVar },
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let vars = self.vars().clone();
        for (i, (e, c)) in self.terms().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{mag}")?;
            for (k, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                write!(f, " * {}", vars[k])?;
                if p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == b => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(ParseError::Unexpected { pos: self.pos, found: c as char }),
            None => Err(ParseError::Unexpected { pos: self.pos, found: '\0' }),
        }
    }

    fn integer(&mut self, signed: bool) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if signed && self.pos < self.s.len() && self.s[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| ParseError::BadNumber { pos: start })?;
        text.parse::<BigInt>().map_err(|_| ParseError::BadNumber { pos: start })
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        let num = self.integer(false)?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.integer(false)?;
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator { pos: at });
            }
            Ok(Q::new(num, den))
        } else {
            Ok(Q::from_integer(num))
        }
    }

    fn var(&mut self) -> Result<TimeVar, ParseError> {
        self.expect(b't')?;
        self.expect(b'[')?;
        let g = self.integer(true)?;
        self.expect(b',')?;
        let n = self.integer(false)?;
        self.expect(b']')?;
        let gamma: i32 = i32::try_from(g).map_err(|_| ParseError::BadNumber { pos: self.pos })?;
        let n: u32 = u32::try_from(n).map_err(|_| ParseError::BadNumber { pos: self.pos })?;
        Ok(TimeVar::new(gamma, n))
    }
}

type RawTerm = (Q, Vec<(TimeVar, u16)>);

fn parse_raw(text: &str) -> Result<Vec<RawTerm>, ParseError> {
    let mut c = Cursor { s: text.as_bytes(), pos: 0 };
    if c.peek().is_none() {
        return Err(ParseError::Empty);
    }
    let mut out = Vec::new();
    let mut first = true;
    loop {
        let mut negative = false;
        match c.peek() {
            None if !first => break,
            Some(b'+') if !first => c.pos += 1,
            Some(b'-') => {
                c.pos += 1;
                negative = true;
            }
            Some(b) if !first => return Err(ParseError::Unexpected { pos: c.pos, found: b as char }),
            _ => {}
        }
        first = false;
        let mut coeff = Q::one();
        let mut factors = Vec::new();
        let mut need_factor = true;
        while need_factor {
            match c.peek() {
                Some(b) if b.is_ascii_digit() => coeff *= c.rational()?,
                Some(b't') => {
                    let v = c.var()?;
                    let mut e: u16 = 1;
                    if c.peek() == Some(b'^') {
                        c.pos += 1;
                        let k = c.integer(false)?;
                        e = u16::try_from(k).map_err(|_| ParseError::BadNumber { pos: c.pos })?;
                    }
                    factors.push((v, e));
                }
                Some(b) => return Err(ParseError::Unexpected { pos: c.pos, found: b as char }),
                None => return Err(ParseError::Unexpected { pos: c.pos, found: '\0' }),
            }
            need_factor = c.peek() == Some(b'*');
            if need_factor {
                c.pos += 1;
            }
        }
        out.push((if negative { -coeff } else { coeff }, factors));
    }
    Ok(out)
}

/// Parses the canonical text form over an explicit variable set.
pub fn parse_poly(text: &str, vars: &Arc<[TimeVar]>) -> Result<MultiPoly, ParseError> {
    if text.trim() == "0" {
        return Ok(MultiPoly::zero(vars.clone()));
    }
    let raw = parse_raw(text)?;
    let mut terms = Vec::with_capacity(raw.len());
    for (c, factors) in raw {
        let mut e: Exponents = SmallVec::from_elem(0, vars.len());
        for (v, k) in factors {
            let idx = vars.binary_search(&v).map_err(|_| ParseError::UnknownVariable { var: v })?;
            e[idx] += k;
        }
        terms.push((e, c));
    }
    Ok(MultiPoly::from_terms(vars.clone(), terms))
}

/// Parses the canonical text form over exactly the variables it mentions.
pub fn parse_poly_infer(text: &str) -> Result<MultiPoly, ParseError> {
    if text.trim() == "0" {
        return Ok(MultiPoly::zero(Arc::from(Vec::new())));
    }
    let raw = parse_raw(text)?;
    let mut vs: Vec<TimeVar> = raw.iter().flat_map(|(_, f)| f.iter().map(|(v, _)| *v)).collect();
    vs.sort();
    vs.dedup();
    parse_poly(text, &Arc::from(vs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytime::TimeSet;
    use crate::Signature;

    #[test]
    fn round_trip() {
        let vars = TimeSet::primary(Signature::new(2, 1)).vars();
        let text = "1/2 * t[2,0]^2 - 3 * t[1,0] * t[0,0] + 7";
        let p = parse_poly(text, &vars).unwrap();
        let again = parse_poly(&p.to_string(), &vars).unwrap();
        assert_eq!(p, again);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn zero_and_errors() {
        let vars = TimeSet::primary(Signature::new(1, 1)).vars();
        assert!(parse_poly("0", &vars).unwrap().is_zero());
        assert_eq!(parse_poly("", &vars), Err(ParseError::Empty));
        assert!(matches!(parse_poly("t[5,0]", &vars), Err(ParseError::UnknownVariable { .. })));
        assert!(matches!(parse_poly("1/0", &vars), Err(ParseError::ZeroDenominator { .. })));
        assert!(parse_poly("2 * * t[1,0]", &vars).is_err());
    }

    #[test]
    fn leading_sign_and_implicit_coefficient() {
        let p = parse_poly_infer("-t[1,0]^3 + t[0,0]").unwrap();
        assert_eq!(p.to_string(), "1 * t[0,0] - 1 * t[1,0]^3");
    }
}
