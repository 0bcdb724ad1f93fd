//! JSON form: `{"terms":[{"word":["A","B"],"coeff":"1/2"}]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{NcPoly, Symbol, Word};
use crate::Rational;

#[derive(Serialize, Deserialize)]
struct TermRepr {
    word: Vec<String>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
}

pub(crate) fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

pub(crate) fn rational_from_str(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() || s.contains('.') {
        return None;
    }
    s.parse::<Rational>().ok()
}

/// Serde adapter storing a rational as its `p/q` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&rational_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        rational_from_str(&s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`")))
    }
}

impl Serialize for NcPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .terms()
                .map(|(w, c)| TermRepr {
                    word: w.letters().iter().map(|s| s.name().to_string()).collect(),
                    coeff: rational_to_string(c),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NcPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut p = NcPoly::zero();
        for t in repr.terms {
            let c =
                rational_from_str(&t.coeff).ok_or_else(|| D::Error::custom(format!("bad rational `{}`", t.coeff)))?;
            let w: Word = t.word.iter().map(Symbol::new).collect();
            p.add_term(w, c);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use crate::ncpoly::parse;

    #[test]
    fn json_shape() {
        let p = parse("1/2*A*B - 3").unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"terms":[{"word":[],"coeff":"-3"},{"word":["A","B"],"coeff":"1/2"}]}"#);
        let back: crate::ncpoly::NcPoly = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_decimal_coefficients() {
        let bad = r#"{"terms":[{"word":["A"],"coeff":"0.5"}]}"#;
        assert!(serde_json::from_str::<crate::ncpoly::NcPoly>(bad).is_err());
    }
}
