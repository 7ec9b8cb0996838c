//! Recursive-descent parser for the function mini-language:
//!
//! ```text
//! F := poly:c0,c1,...  | sqrt | log | exp | recip
//!    | moebius:a,b,c,d | gap:n
//!    | compose(F;F)    | quot(F) | shift0(F) | integ(F;x0)
//! ```
//!
//! Whitespace is ignored everywhere. Error positions are byte offsets into
//! the original text.

use crate::error::{Error, Result};

use super::expr::{Builtin, FnExpr};
use super::gap_coefficients;

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Self { src, chars, pos: 0 }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map(|(i, _)| *i).unwrap_or(self.src.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn error(&self, expected: &str) -> Error {
        let found = match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        Error::Parse { position: self.offset(), expected: expected.to_string(), found }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() && !(s.is_empty() && c.is_ascii_digit()) {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let sign_ok = (c == '+' || c == '-')
                && (s.is_empty() || s.ends_with('e') || s.ends_with('E'));
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || sign_ok {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                Err(self.error("a finite number"))
            }
        }
    }

    fn number_list(&mut self) -> Result<Vec<f64>> {
        let mut out = vec![self.number()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.number()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<FnExpr> {
        let start = self.pos;
        let name = self.ident();
        match name.as_str() {
            "poly" => {
                self.expect(':')?;
                Ok(FnExpr::Polynomial(self.number_list()?))
            }
            "moebius" => {
                self.expect(':')?;
                let at = self.pos;
                let v = self.number_list()?;
                if v.len() != 4 {
                    self.pos = at;
                    return Err(self.error("exactly four moebius coefficients a,b,c,d"));
                }
                if v[2] == 0.0 && v[3] == 0.0 {
                    self.pos = at;
                    return Err(self.error("a nonzero moebius denominator c*t + d"));
                }
                Ok(FnExpr::Moebius { a: v[0], b: v[1], c: v[2], d: v[3] })
            }
            "gap" => {
                self.expect(':')?;
                let at = self.pos;
                let v = self.number()?;
                if v < 1.0 || v.fract() != 0.0 || v > 64.0 {
                    self.pos = at;
                    return Err(self.error("a positive integer order"));
                }
                Ok(FnExpr::Polynomial(gap_coefficients(v as usize)))
            }
            "sqrt" => Ok(FnExpr::Builtin(Builtin::Sqrt)),
            "log" => Ok(FnExpr::Builtin(Builtin::Log)),
            "exp" => Ok(FnExpr::Builtin(Builtin::Exp)),
            "recip" => Ok(FnExpr::Builtin(Builtin::Reciprocal)),
            "compose" => {
                self.expect('(')?;
                let outer = self.expr()?;
                self.expect(';')?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(FnExpr::Compose(Box::new(outer), Box::new(inner)))
            }
            "quot" | "shift0" => {
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(if name == "quot" {
                    FnExpr::QuotientByT(Box::new(inner))
                } else {
                    FnExpr::ShiftedToZero(Box::new(inner))
                })
            }
            "integ" => {
                self.expect('(')?;
                let at = self.pos;
                let inner = self.expr()?;
                if !inner.has_primitive() {
                    self.pos = at;
                    return Err(self.error("a function with a closed-form antiderivative"));
                }
                self.expect(';')?;
                let base = self.number()?;
                self.expect(')')?;
                Ok(FnExpr::Antiderivative(Box::new(inner), base))
            }
            _ => {
                self.pos = start;
                Err(self.error("one of poly, moebius, gap, sqrt, log, exp, recip, compose, quot, shift0, integ"))
            }
        }
    }
}

pub fn parse_expr(src: &str) -> Result<FnExpr> {
    let mut p = Parser::new(src);
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error("end of input"));
    }
    Ok(e)
}
