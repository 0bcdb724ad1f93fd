//! Commutative multivariate polynomials over the rationals.
//!
//! Used wherever the operators involved commute: functions of left
//! multiplication and slot derivations, and the iterated simplex integrals of
//! the integral representation, which are evaluated exactly by
//! antidifferentiation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Upper limit of a definite integral whose lower limit is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Upper {
    One,
    Var(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CommPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl CommPoly {
    pub fn zero(nvars: usize) -> Self {
        CommPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = CommPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        CommPoly::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = CommPoly::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> CommPoly {
        let mut out = CommPoly::zero(self.nvars);
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> CommPoly {
        let mut acc = CommPoly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `sum_k coeffs[k] * arg^k`, by Horner's rule.
    pub fn compose_univariate(coeffs: &[Rational], arg: &CommPoly) -> CommPoly {
        let mut acc = CommPoly::zero(arg.nvars);
        for c in coeffs.iter().rev() {
            acc = &(&acc * arg) + &CommPoly::constant(arg.nvars, c.clone());
        }
        acc
    }

    /// Definite integral in variable `var` from zero to `upper`.
    pub fn integrate(&self, var: usize, upper: Upper) -> CommPoly {
        let mut out = CommPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e[var] + 1;
            let mut ne = e.clone();
            ne[var] = 0;
            if let Upper::Var(u) = upper {
                assert_ne!(u, var, "cannot integrate a variable up to itself");
                ne[u] += k;
            }
            out.add_term(ne, c / Rational::from_integer(BigInt::from(k)));
        }
        out
    }

    /// Sets variable `var` to the rational `value`.
    pub fn evaluate_var(&self, var: usize, value: &Rational) -> CommPoly {
        let mut out = CommPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = std::mem::take(&mut ne[var]);
            let mut factor = Rational::one();
            for _ in 0..k {
                factor *= value;
            }
            out.add_term(ne, c * factor);
        }
        out
    }

    /// Keeps the first `nvars` variables. Panics if a dropped variable still
    /// carries a positive exponent.
    pub fn truncate_vars(&self, nvars: usize) -> CommPoly {
        let mut out = CommPoly::zero(nvars);
        for (e, c) in &self.terms {
            assert!(e[nvars..].iter().all(|&k| k == 0), "dropping a variable that still occurs");
            out.add_term(e[..nvars].to_vec(), c.clone());
        }
        out
    }

    /// Re-embeds into a polynomial ring with more variables.
    pub fn extend_vars(&self, nvars: usize) -> CommPoly {
        assert!(nvars >= self.nvars);
        let mut out = CommPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne.resize(nvars, 0);
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Renders with the given variable names, highest exponent vectors first.
    pub fn format_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            out.push_str(match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            });
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(v, k)| if *k == 1 { names[v].to_string() } else { format!("{}^{}", names[v], k) })
                .collect();
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&format!("{}*{}", abs, factors.join("*")));
            }
        }
        out
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.format_with(&refs))
    }
}

impl Add for &CommPoly {
    type Output = CommPoly;
    fn add(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &CommPoly {
    type Output = CommPoly;
    fn sub(self, rhs: &CommPoly) -> CommPoly {
        self + &(-rhs)
    }
}

impl Neg for &CommPoly {
    type Output = CommPoly;
    fn neg(self) -> CommPoly {
        self.scale(&-Rational::one())
    }
}

impl Mul for &CommPoly {
    type Output = CommPoly;
    fn mul(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        CommPoly { nvars: self.nvars, terms: acc }
    }
}

/// Exact value of `∫_{1 ≥ t_1 ≥ ... ≥ t_n ≥ 0} g dt` over the ordered simplex, where `g` lives in a ring whose last `n` variables are
/// `t_1, ..., t_n`. The result drops those variables.
pub fn simplex_integral(g: &CommPoly, n: usize) -> CommPoly {
    let base = g.nvars() - n;
    let mut acc = g.clone();
    for j in (0..n).rev() {
        let var = base + j;
        let upper = if j == 0 { Upper::One } else { Upper::Var(var - 1) };
        acc = acc.integrate(var, upper);
    }
    acc.truncate_vars(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn integrate_monomials() {
        // ∫_0^1 t^3 dt = 1/4
        let t = CommPoly::var(1, 0);
        let i = t.pow(3).integrate(0, Upper::One);
        assert_eq!(i, CommPoly::constant(1, r(1, 4)));
        // ∫_0^s t^2 dt = s^3/3
        let t = CommPoly::var(2, 1);
        let i = t.pow(2).integrate(1, Upper::Var(0));
        assert_eq!(i, CommPoly::var(2, 0).pow(3).scale(&r(1, 3)));
    }

    #[test]
    fn simplex_volume() {
        // Volume of the ordered 3-simplex is 1/3!
        let g = CommPoly::one(3);
        assert_eq!(simplex_integral(&g, 3), CommPoly::constant(0, r(1, 6)));
    }

    #[test]
    fn beta_integral() {
        // ∫_0^1 (1-t)^2 t^3 dt = B(4, 3) = 3! 2! / 6! = 1/60
        let t = CommPoly::var(1, 0);
        let one = CommPoly::one(1);
        let g = &(&one - &t).pow(2) * &t.pow(3);
        assert_eq!(g.integrate(0, Upper::One), CommPoly::constant(1, r(1, 60)));
    }

    #[test]
    fn compose_and_evaluate() {
        let x = CommPoly::var(2, 0);
        let y = CommPoly::var(2, 1);
        let arg = &x - &y;
        let p = CommPoly::compose_univariate(&[r(1, 1), r(0, 1), r(1, 1)], &arg);
        // 1 + (x - y)^2 at y = 2
        let at = p.evaluate_var(1, &r(2, 1));
        let expect = &CommPoly::one(2) + &(&x - &CommPoly::constant(2, r(2, 1))).pow(2);
        assert_eq!(at, expect);
    }

    #[test]
    fn formatting() {
        let a = CommPoly::var(2, 0);
        let d = CommPoly::var(2, 1);
        let p = &(&a.scale(&r(2, 1)) - &d) + &CommPoly::constant(2, r(1, 2));
        assert_eq!(p.format_with(&["a", "d"]), "2*a - d + 1/2");
    }
}
