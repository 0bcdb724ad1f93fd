//! Free-algebra polynomials with exact rational coefficients.
//!
//! An [`NcPoly`] is a finite linear combination of [`Word`]s over noncommuting
//! [`Symbol`]s. Terms are kept in graded lexicographic order and zero
//! coefficients are never stored, so structural equality is polynomial
//! equality.

mod parse;
pub mod serial;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

pub use parse::parse;

/// Whether a letter stands for an operator or for a differential such as `dA`.
///
/// Differentials are ordinary letters algebraically; the tag is bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Operator,
    Differential,
}

/// A named noncommuting letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// `dX` names (a lowercase `d` followed by an uppercase letter) are differentials.
    pub fn kind(&self) -> SymbolKind {
        let mut chars = self.0.chars();
        match (chars.next(), chars.next()) {
            (Some('d'), Some(c)) if c.is_ascii_uppercase() => SymbolKind::Differential,
            _ => SymbolKind::Operator,
        }
    }

    /// The differential letter paired with this operator, e.g. `A` -> `dA`.
    pub fn differential(&self) -> Symbol {
        Symbol::new(format!("d{}", self.0))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// An ordered product of letters; the empty word is the identity operator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Symbol>) -> Self {
        Word(letters)
    }

    pub fn letter(s: Symbol) -> Self {
        Word(vec![s])
    }

    pub fn letters(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() + other.0.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn count(&self, s: &Symbol) -> usize {
        self.0.iter().filter(|l| *l == s).count()
    }

    pub fn into_letters(self) -> Vec<Symbol> {
        self.0
    }
}

// Graded lexicographic: shorter words first, then letter by letter.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Exact element of the free algebra: a map from words to nonzero rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        NcPoly::term(Word::empty(), c)
    }

    pub fn integer(n: i64) -> Self {
        NcPoly::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn symbol(s: impl Into<Symbol>) -> Self {
        NcPoly::term(Word::letter(s.into()), Rational::one())
    }

    pub fn word(w: Word) -> Self {
        NcPoly::term(w, Rational::one())
    }

    pub fn term(w: Word, c: Rational) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(w, c);
        p
    }

    /// Product of the named letters, e.g. `NcPoly::monomial(&["A", "B"])` is `A*B`.
    pub fn monomial(names: &[&str]) -> Self {
        NcPoly::word(names.iter().map(Symbol::new).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    /// Scalar value when the polynomial is a multiple of the identity.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Word::empty()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Maximum word length, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.terms.keys().flat_map(|w| w.letters().iter().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn scale(&self, c: &Rational) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero();
        }
        NcPoly { terms: self.terms.iter().map(|(w, k)| (w.clone(), k * c)).collect() }
    }

    pub fn pow(&self, n: usize) -> NcPoly {
        let mut acc = NcPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term longer than `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> NcPoly {
        NcPoly {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= max_degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product with every term above `max_degree` discarded.
    pub fn mul_truncated(&self, other: &NcPoly, max_degree: usize) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if w1.len() + w2.len() <= max_degree {
                    out.add_term(w1.concat(w2), c1 * c2);
                }
            }
        }
        out
    }

    pub fn homogeneous_part(&self, degree: usize) -> NcPoly {
        NcPoly {
            terms: self.terms.iter().filter(|(w, _)| w.len() == degree).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// Replaces letters by polynomials; unmapped letters are kept.
    pub fn substitute(&self, map: &BTreeMap<Symbol, NcPoly>) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in &self.terms {
            let mut acc = NcPoly::constant(c.clone());
            for letter in w.letters() {
                match map.get(letter) {
                    Some(p) => acc = &acc * p,
                    None => acc = &acc * &NcPoly::symbol(letter.clone()),
                }
            }
            out += &acc;
        }
        out
    }

    /// Largest absolute value among the coefficients.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl From<Symbol> for NcPoly {
    fn from(s: Symbol) -> Self {
        NcPoly::symbol(s)
    }
}

impl AddAssign<&NcPoly> for NcPoly {
    fn add_assign(&mut self, rhs: &NcPoly) {
        for (w, c) in &rhs.terms {
            self.add_term(w.clone(), c.clone());
        }
    }
}

impl SubAssign<&NcPoly> for NcPoly {
    fn sub_assign(&mut self, rhs: &NcPoly) {
        for (w, c) in &rhs.terms {
            self.add_term(w.clone(), -c.clone());
        }
    }
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        NcPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for NcPoly {
            type Output = NcPoly;
            fn $m(self, rhs: NcPoly) -> NcPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&NcPoly> for NcPoly {
            type Output = NcPoly;
            fn $m(self, rhs: &NcPoly) -> NcPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<NcPoly> for &NcPoly {
            type Output = NcPoly;
            fn $m(self, rhs: NcPoly) -> NcPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        -&self
    }
}

/// Polynomial multiplication; bilinear extension of word concatenation.
pub fn poly_mul(p: &NcPoly, q: &NcPoly) -> NcPoly {
    p * q
}

/// Symmetrized product `{X^m Y^n}_sym`: the sum of every word with `m` letters
/// `X` and `n` letters `Y`, each with coefficient one.
///
/// Built from the compositions `k_1 + ... + k_{n+1} = m` of the `X` powers
/// between consecutive `Y`s.
pub fn sym_product(x: &Symbol, y: &Symbol, m: usize, n: usize) -> NcPoly {
    fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            compositions(total - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }

    let mut comps = Vec::new();
    compositions(m, n + 1, &mut Vec::new(), &mut comps);
    let mut out = NcPoly::zero();
    for ks in comps {
        let mut letters = Vec::with_capacity(m + n);
        for (i, k) in ks.iter().enumerate() {
            if i > 0 {
                letters.push(y.clone());
            }
            letters.extend(std::iter::repeat_n(x.clone(), *k));
        }
        out.add_term(Word::new(letters), Rational::one());
    }
    out
}

/// Independent route to `{X^m Y^n}_sym`: expand `(X + xY)^(m+n)` with a
/// commuting formal parameter `x` and read off the coefficient of `x^n`.
pub fn sym_product_oracle(x: &Symbol, y: &Symbol, m: usize, n: usize) -> NcPoly {
    // powers[k] is the coefficient of x^k
    let mut powers: Vec<NcPoly> = vec![NcPoly::one()];
    let px = NcPoly::symbol(x.clone());
    let py = NcPoly::symbol(y.clone());
    for _ in 0..m + n {
        let mut next = vec![NcPoly::zero(); powers.len() + 1];
        for (k, c) in powers.iter().enumerate() {
            next[k] += &(c * &px);
            next[k + 1] += &(c * &py);
        }
        powers = next;
    }
    powers.swap_remove(n)
}

/// One component `c * {X^m Y^n}_sym` of a symmetrized decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymComponent {
    pub m: usize,
    pub n: usize,
    pub coeff: Rational,
}

/// Splits `p` into bidegree components and checks that each is a rational
/// multiple of the symmetrized basis element. Components are returned in
/// increasing total degree, then increasing `n`.
pub fn sym_decompose(p: &NcPoly, x: &Symbol, y: &Symbol) -> Result<Vec<SymComponent>> {
    let domain_err =
        |reason: String| Error::NotInSymDomain { x: x.name().to_string(), y: y.name().to_string(), reason };
    if x == y {
        return Err(domain_err("the two letters must differ".into()));
    }
    let mut groups: BTreeMap<(usize, usize), NcPoly> = BTreeMap::new();
    for (w, c) in p.terms() {
        if let Some(bad) = w.letters().iter().find(|l| *l != x && *l != y) {
            return Err(domain_err(format!("foreign letter `{bad}`")));
        }
        let n = w.count(y);
        let m = w.len() - n;
        groups.entry((m + n, n)).or_default().add_term(w.clone(), c.clone());
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((deg, n), group) in groups {
        let m = deg - n;
        let basis = sym_product(x, y, m, n);
        let lead = basis.terms().next().map(|(w, _)| w.clone()).unwrap_or_default();
        let c = group.coefficient(&lead);
        if group != basis.scale(&c) {
            return Err(domain_err(format!(
                "bidegree ({m}, {n}) component is not proportional to the symmetrized product"
            )));
        }
        out.push(SymComponent { m, n, coeff: c });
    }
    Ok(out)
}

/// Rebuilds a polynomial from its symmetrized components.
pub fn sym_compose(components: &[SymComponent], x: &Symbol, y: &Symbol) -> NcPoly {
    let mut out = NcPoly::zero();
    for c in components {
        out += &sym_product(x, y, c.m, c.n).scale(&c.coeff);
    }
    out
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let letters: Vec<&str> = w.letters().iter().map(Symbol::name).collect();
            if w.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&letters.join("*"))?;
            } else {
                write!(f, "{abs}*{}", letters.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Symbol {
        Symbol::new(n)
    }

    fn p(text: &str) -> NcPoly {
        parse(text).unwrap()
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn multiplication_concatenates_and_distributes() {
        assert_eq!(poly_mul(&p("A"), &p("B")), p("A*B"));
        assert_eq!(poly_mul(&p("A + B"), &p("A - B")), p("A*A - A*B + B*A - B*B"));
        let q = p("2*A*B - 1/3*B + 5");
        assert_eq!(poly_mul(&NcPoly::one(), &q), q);
        assert_eq!(poly_mul(&q, &NcPoly::one()), q);
    }

    #[test]
    fn zero_coefficients_are_never_stored() {
        let q = &p("A*B + B*A") - &p("B*A");
        assert_eq!(q.len(), 1);
        assert!((&q - &q).is_zero());
    }

    #[test]
    fn symbol_kinds() {
        assert_eq!(s("dA").kind(), SymbolKind::Differential);
        assert_eq!(s("dA1").kind(), SymbolKind::Differential);
        assert_eq!(s("A").kind(), SymbolKind::Operator);
        assert_eq!(s("d").kind(), SymbolKind::Operator);
        assert_eq!(s("dx").kind(), SymbolKind::Operator);
        assert_eq!(s("A").differential(), s("dA"));
    }

    #[test]
    fn words_are_graded_lex_ordered() {
        let a: Word = [s("B")].into_iter().collect();
        let b: Word = [s("A"), s("A")].into_iter().collect();
        let c: Word = [s("A"), s("B")].into_iter().collect();
        assert!(a < b);
        assert!(b < c);
        assert!(Word::empty() < a);
    }

    #[test]
    fn sym_product_examples() {
        let (a, b) = (s("A"), s("B"));
        assert_eq!(sym_product(&a, &b, 1, 1), p("A*B + B*A"));
        assert_eq!(sym_product(&a, &b, 4, 0), p("A*A*A*A"));
        assert_eq!(sym_product(&a, &b, 2, 1), p("A*A*B + A*B*A + B*A*A"));
        assert_eq!(sym_product(&a, &b, 0, 0), NcPoly::one());
    }

    #[test]
    fn sym_oracle_examples() {
        let (a, b) = (s("A"), s("B"));
        assert_eq!(sym_product_oracle(&a, &b, 1, 1), p("A*B + B*A"));
        assert_eq!(sym_product_oracle(&a, &b, 0, 3), p("B*B*B"));
        let big = sym_product_oracle(&a, &b, 3, 2);
        assert_eq!(big.len(), 10);
        assert_eq!(big, sym_product(&a, &b, 3, 2));
    }

    #[test]
    fn sym_product_matches_oracle_and_counts() {
        let (a, b) = (s("A"), s("B"));
        for m in 0..=6 {
            for n in 0..=6 {
                let direct = sym_product(&a, &b, m, n);
                assert_eq!(direct, sym_product_oracle(&a, &b, m, n), "m={m} n={n}");
                assert_eq!(direct.len(), binomial(m + n, n));
                assert!(direct.terms().all(|(_, c)| c.is_one()));
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let (a, b) = (s("A"), s("B"));
        let r = |n: i64| Rational::from_integer(n.into());
        assert_eq!(sym_decompose(&p("A*B + B*A"), &a, &b).unwrap(), vec![SymComponent { m: 1, n: 1, coeff: r(1) }]);
        let comps = sym_decompose(&p("A*A*A + 2*(A*B + B*A)"), &a, &b).unwrap();
        assert_eq!(comps, vec![SymComponent { m: 1, n: 1, coeff: r(2) }, SymComponent { m: 3, n: 0, coeff: r(1) },]);
        assert!(matches!(sym_decompose(&p("A*B - B*A"), &a, &b), Err(Error::NotInSymDomain { .. })));
        assert!(matches!(sym_decompose(&p("A*C"), &a, &b), Err(Error::NotInSymDomain { .. })));
        assert!(sym_decompose(&NcPoly::zero(), &a, &b).unwrap().is_empty());
    }

    #[test]
    fn decompose_then_compose_is_identity() {
        let (a, b) = (s("A"), s("B"));
        let q = p("3 + 1/2*A + 2*(A*A*B + A*B*A + B*A*A) - B*B");
        let comps = sym_decompose(&q, &a, &b).unwrap();
        assert_eq!(sym_compose(&comps, &a, &b), q);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(p("B*A + A*B").to_string(), "A*B + B*A");
        assert_eq!(p("-A*B + B*A").to_string(), "-A*B + B*A");
        assert_eq!(p("1/2*A - 3/4").to_string(), "-3/4 + 1/2*A");
        assert_eq!(NcPoly::zero().to_string(), "0");
        assert_eq!(p("A^3").to_string(), "A*A*A");
    }

    #[test]
    fn substitute_replaces_letters() {
        let mut map = BTreeMap::new();
        map.insert(s("X"), p("A + B"));
        assert_eq!(p("X*X").substitute(&map), p("(A+B)^2"));
        assert_eq!(p("X*C").substitute(&map), p("A*C + B*C"));
    }

    #[test]
    fn truncated_product() {
        let q = p("1 + A + A*B");
        assert_eq!(q.mul_truncated(&q, 2), p("1 + 2*A + A*A + 2*A*B"));
        assert_eq!(q.mul_truncated(&q, 1), p("1 + 2*A"));
    }
}
