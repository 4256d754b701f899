//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := ('+' | '-')* power
//! power   := primary ('^' integer)?
//! primary := number | number 'i' | variable | '(' expr ')'
//! ```
//!
//! Multiplication must be explicit; whitespace is ignored.

use super::{MultiPoly, C64};
use crate::error::{Error, Result};

/// Parses `text` as a polynomial in `variables` (in that order).
pub fn parse(text: &str, variables: &[&str]) -> Result<MultiPoly> {
    if variables.is_empty() || variables.len() > super::MAX_VARS {
        return Err(Error::Invalid(format!(
            "between 1 and {} variables required",
            super::MAX_VARS
        )));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars: variables,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses a bare complex literal such as `2`, `-1.5i`, `(1-2i)` or `3+4i`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let p = parse(text, &["x1"])?;
    if !p.is_constant() {
        return Err(Error::Invalid(format!("`{text}` is not a number")));
    }
    Ok(p.coeff(&super::Monomial::one()))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn syntax(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.primary()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            let k = self.exponent()?;
            if base.total_degree() as u64 * k as u64 > super::MAX_DEGREE as u64 {
                return Err(Error::Invalid(format!(
                    "total degree exceeds {}",
                    super::MAX_DEGREE
                )));
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits_end = self.pos;
        // Anything number-like that continues the literal makes it non-integral.
        if start == digits_end
            || matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E' | b'i'))
        {
            return Err(Error::BadExponent { offset: start });
        }
        std::str::from_utf8(&self.src[start..digits_end])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or(Error::BadExponent { offset: start })
    }

    fn primary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => self.number(),
            Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => self.variable(),
            Some(_) => Err(self.syntax("expected a number, variable or `(`")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<MultiPoly> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let lit = std::str::from_utf8(&s[start..i]).expect("ascii");
        let value: f64 = lit.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("bad numeric literal `{lit}`"),
        })?;
        self.pos = i;
        let imaginary = self.src.get(self.pos) == Some(&b'i')
            && !self
                .src
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
        let c = if imaginary {
            self.pos += 1;
            C64::new(0.0, value)
        } else {
            C64::new(value, 0.0)
        };
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Syntax {
                offset: start,
                message: "literal overflows".into(),
            });
        }
        Ok(MultiPoly::constant(self.nvars(), c))
    }

    fn variable(&mut self) -> Result<MultiPoly> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match self.vars.iter().position(|v| *v == name) {
            Some(i) => Ok(MultiPoly::var(self.nvars(), i)),
            None => Err(Error::UnknownVariable {
                name: name.to_string(),
                offset: start,
            }),
        }
    }
}
