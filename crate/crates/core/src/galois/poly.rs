//! Integer polynomials and their text and JSON surface syntax.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{invalid, Error, Result};

/// Largest exponent accepted by the text parser.
pub const MAX_PARSE_DEGREE: usize = 100_000;

/// Polynomial in `Z[x]`, constant term first, with nonzero leading
/// coefficient and degree at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

/// Coefficients that fit in `i64` serialize as JSON numbers, larger ones as
/// decimal strings.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            match i64::try_from(c) {
                Ok(v) => seq.serialize_element(&v)?,
                Err(_) => seq.serialize_element(&c.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        Self::from_json_value(value).map_err(serde::de::Error::custom)
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        match coeffs.len() {
            0 => Err(invalid("zero polynomial")),
            1 => Err(invalid("polynomial must have degree at least 1")),
            _ => Ok(Self { coeffs }),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    /// Accepts either surface syntax such as `x^16 - x - 1` or a JSON array of
    /// integer coefficients, constant term first.
    pub fn parse(input: &str) -> Result<Self> {
        let trimmed = input.trim_start();
        if trimmed.starts_with('[') {
            Self::parse_json(trimmed)
        } else {
            Self::parse_text(input)
        }
    }

    pub fn parse_json(input: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(input).map_err(|e| Error::Parse {
            position: e.column().saturating_sub(1),
            message: e.to_string(),
        })?;
        Self::from_json_value(value)
    }

    fn from_json_value(value: Value) -> Result<Self> {
        let Value::Array(items) = value else {
            return Err(Error::Parse {
                position: 0,
                message: "expected a JSON array of coefficients".into(),
            });
        };
        if items.is_empty() {
            return Err(Error::Parse {
                position: 0,
                message: "empty coefficient array".into(),
            });
        }
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(i, v)| {
                json_integer(v).ok_or_else(|| Error::Parse {
                    position: i,
                    message: format!("coefficient {i} is not an integer: {v}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        TextParser::new(input).parse()
    }
}

fn json_integer(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

struct TextParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> TextParser<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
    }

    fn parse(mut self) -> Result<IntPolynomial> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let negative = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                None if !first => break,
                _ if first => false,
                _ => return self.err("expected '+' or '-'"),
            };
            first = false;
            self.skip_ws();
            let (mut c, e) = self.term()?;
            if negative {
                c = -c;
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, BigInt::zero());
            }
            coeffs[e] += c;
        }
        IntPolynomial::new(coeffs)
    }

    fn term(&mut self) -> Result<(BigInt, usize)> {
        let coefficient = match self.digits() {
            Some(d) => {
                if self.peek() == Some(b'.') {
                    return self.err("non-integer coefficient");
                }
                Some(d.parse::<BigInt>().expect("ascii digits"))
            }
            None => None,
        };
        self.skip_ws();
        if coefficient.is_some() && self.peek() == Some(b'*') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() != Some(b'x') {
                return self.err("expected 'x' after '*'");
            }
        }
        if self.peek() != Some(b'x') {
            return match coefficient {
                Some(c) => Ok((c, 0)),
                None => self.err("expected a coefficient or 'x'"),
            };
        }
        self.pos += 1;
        self.skip_ws();
        let mut exponent = 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let Some(d) = self.digits() else {
                return self.err("expected exponent after '^'");
            };
            exponent = match d.parse::<usize>() {
                Ok(e) if e <= MAX_PARSE_DEGREE => e,
                _ => {
                    self.pos = at;
                    return self.err(format!("exponent exceeds {MAX_PARSE_DEGREE}"));
                }
            };
        }
        Ok((coefficient.unwrap_or_else(BigInt::one), exponent))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if !mag.is_one() || e == 0 {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{e}")?,
            }
        }
        Ok(())
    }
}
