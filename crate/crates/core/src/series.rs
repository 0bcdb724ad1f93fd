//! Scalar functions as truncated power series with exact coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ncpoly::NcPoly;
use crate::Rational;

/// Default truncation degree for series work.
pub const DEFAULT_TRUNCATION: usize = 8;

/// `f(x) = sum_k c_k x^k` for `k <= truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSeries {
    coeffs: Vec<Rational>,
    truncation: usize,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

impl ScalarSeries {
    /// Fails with `TruncationExceeded` when a nonzero coefficient lies above
    /// the truncation degree.
    pub fn new(coeffs: Vec<Rational>, truncation: usize) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() > truncation + 1 {
            return Err(Error::TruncationExceeded { degree: coeffs.len() - 1, truncation });
        }
        Ok(ScalarSeries { coeffs, truncation })
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        let truncation = DEFAULT_TRUNCATION.max(coeffs.len().saturating_sub(1));
        ScalarSeries::new(coeffs.iter().map(|&c| int(c)).collect(), truncation).expect("truncation covers the degree")
    }

    /// `x^m`, with the truncation raised to `m` if needed.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); m + 1];
        coeffs[m] = Rational::one();
        ScalarSeries { coeffs, truncation: DEFAULT_TRUNCATION.max(m) }
    }

    /// Taylor polynomial of `exp` through degree `truncation`.
    pub fn exp(truncation: usize) -> Self {
        let coeffs = (0..=truncation).map(|k| factorial(k).recip()).collect();
        ScalarSeries { coeffs, truncation }
    }

    /// Taylor polynomial of `log(1 + x)` through degree `truncation`.
    pub fn log1p(truncation: usize) -> Self {
        let mut coeffs = vec![Rational::zero()];
        for k in 1..=truncation as i64 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            coeffs.push(Rational::new(BigInt::from(sign), BigInt::from(k)));
        }
        ScalarSeries::new(coeffs, truncation).expect("degree equals truncation")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Degree of the polynomial, `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect();
        ScalarSeries::new(coeffs, self.truncation).expect("degree only drops")
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// `f(p)` in the free algebra.
    pub fn eval_poly(&self, p: &NcPoly) -> NcPoly {
        let mut acc = NcPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * p) + &NcPoly::constant(c.clone());
        }
        acc
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)).collect()
    }

    /// Parses `"x^2"`, `"1 + x + 1/2 x^2"`, `"3*x^3 - x"` or the presets
    /// `"exp"` and `"log1p"`.
    pub fn parse(text: &str, truncation: usize) -> Result<Self> {
        match text.trim() {
            "exp" => return Ok(ScalarSeries::exp(truncation)),
            "log1p" => return Ok(ScalarSeries::log1p(truncation)),
            _ => {}
        }
        let mut coeffs: Vec<Rational> = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let number = |i: &mut usize| -> Option<BigInt> {
            let start = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            (start < *i).then(|| text[start..*i].parse().expect("digits"))
        };
        let err = |offset: usize, message: &str| Error::Syntax { offset, message: message.to_string() };

        let mut first = true;
        loop {
            skip_ws(&mut i);
            if i == bytes.len() {
                if first {
                    return Err(err(i, "empty series"));
                }
                break;
            }
            let mut sign = int(1);
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = int(-1);
                }
                i += 1;
                skip_ws(&mut i);
            } else if !first {
                return Err(err(i, "expected `+` or `-`"));
            }
            first = false;

            let mut coeff = None;
            if let Some(num) = number(&mut i) {
                let mut c = Rational::from_integer(num);
                if i < bytes.len() && bytes[i] == b'/' {
                    i += 1;
                    let at = i;
                    let den = number(&mut i).ok_or_else(|| err(at, "expected denominator"))?;
                    if den.is_zero() {
                        return Err(err(at, "zero denominator"));
                    }
                    c /= Rational::from_integer(den);
                }
                coeff = Some(c);
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b'*' {
                    i += 1;
                    skip_ws(&mut i);
                }
            }

            let mut power = 0usize;
            if i < bytes.len() && bytes[i] == b'x' {
                i += 1;
                power = 1;
                skip_ws(&mut i);
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    skip_ws(&mut i);
                    let at = i;
                    power = number(&mut i).and_then(|n| n.to_usize()).ok_or_else(|| err(at, "expected exponent"))?;
                }
            } else if coeff.is_none() {
                return Err(err(i, "expected a coefficient or `x`"));
            }

            let c = sign * coeff.unwrap_or_else(Rational::one);
            if coeffs.len() <= power {
                coeffs.resize(power + 1, Rational::zero());
            }
            coeffs[power] += c;
        }
        ScalarSeries::new(coeffs, truncation)
    }
}

impl fmt::Display for ScalarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{abs} {var}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_text_forms() {
        let f = ScalarSeries::parse("x^2", 8).unwrap();
        assert_eq!(f.coeffs(), &[r(0, 1), r(0, 1), r(1, 1)]);
        let g = ScalarSeries::parse("1 + x + 1/2 x^2", 8).unwrap();
        assert_eq!(g.coeffs(), &[r(1, 1), r(1, 1), r(1, 2)]);
        let h = ScalarSeries::parse("3*x^3 - x", 8).unwrap();
        assert_eq!(h.coeffs(), &[r(0, 1), r(-1, 1), r(0, 1), r(3, 1)]);
        assert_eq!(ScalarSeries::parse(" -2 ", 8).unwrap().coeffs(), &[r(-2, 1)]);
    }

    #[test]
    fn rejects_bad_text() {
        assert!(matches!(ScalarSeries::parse("", 8), Err(Error::Syntax { .. })));
        assert!(matches!(ScalarSeries::parse("x x", 8), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(ScalarSeries::parse("y", 8), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(ScalarSeries::parse("x^9", 8), Err(Error::TruncationExceeded { degree: 9, truncation: 8 })));
    }

    #[test]
    fn presets() {
        let e = ScalarSeries::parse("exp", 4).unwrap();
        assert_eq!(e.coeffs(), &[r(1, 1), r(1, 1), r(1, 2), r(1, 6), r(1, 24)]);
        let l = ScalarSeries::parse("log1p", 3).unwrap();
        assert_eq!(l.coeffs(), &[r(0, 1), r(1, 1), r(-1, 2), r(1, 3)]);
    }

    #[test]
    fn derivatives_vanish_past_the_truncation() {
        let f = ScalarSeries::exp(DEFAULT_TRUNCATION);
        assert_eq!(f.derivative().coeffs()[0], r(1, 1));
        assert!(f.nth_derivative(DEFAULT_TRUNCATION + 1).is_zero());
        assert_eq!(ScalarSeries::monomial(3).nth_derivative(2).coeffs(), &[r(0, 1), r(6, 1)]);
    }

    #[test]
    fn evaluates_on_polynomials() {
        let f = ScalarSeries::from_integers(&[1, 0, 1]);
        let a = parse("A + B").unwrap();
        assert_eq!(f.eval_poly(&a), parse("1 + A*A + A*B + B*A + B*B").unwrap());
    }

    #[test]
    fn display_round_trips() {
        let g = ScalarSeries::parse("1 + x - 1/2 x^2 + 4 x^3", 8).unwrap();
        assert_eq!(g.to_string(), "1 + x - 1/2 x^2 + 4 x^3");
        assert_eq!(ScalarSeries::parse(&g.to_string(), 8).unwrap(), g);
    }
}
