//! Quantum derivatives of operator functions given as truncated series.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::commpoly::{simplex_integral, CommPoly, Upper};
use crate::error::{Error, Result};
use crate::hyperop::{
    apply_hyper, d_arrow_pow, delta_arrow_pow, ordered_positions, ordered_replacement, split_at_positions, HyperExpr,
};
use crate::ncpoly::{sym_product, NcPoly, Symbol};
use crate::series::ScalarSeries;
use crate::Rational;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

/// Polynomial in commuting `Â` (left multiplication by the base) and
/// `δ̂_1, ..., δ̂_n` (slot inner derivations by the base).
///
/// Variable 0 is `Â`; variable `j` is `δ̂_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingHyperPoly {
    poly: CommPoly,
}

impl CommutingHyperPoly {
    /// `poly` must have `slots + 1` variables.
    pub fn new(poly: CommPoly) -> Self {
        assert!(poly.nvars() >= 1, "need at least the Â variable");
        CommutingHyperPoly { poly }
    }

    pub fn slots(&self) -> usize {
        self.poly.nvars() - 1
    }

    pub fn poly(&self) -> &CommPoly {
        &self.poly
    }

    pub fn variable_names(&self) -> Vec<String> {
        std::iter::once("Â".to_string()).chain((1..=self.slots()).map(|j| format!("δ̂{j}"))).collect()
    }

    /// `Â^a δ̂_1^{b_1} ... ↦ LeftMul(base^a) ∘ SlotDelta(1)^{b_1} ∘ ...`.
    pub fn to_hyper_expr(&self, base: &NcPoly) -> HyperExpr {
        let terms = self
            .poly
            .terms()
            .map(|(e, c)| {
                let mut factors = Vec::new();
                if e[0] > 0 {
                    factors.push(HyperExpr::lmul(base.pow(e[0] as usize)));
                }
                for (j, &b) in e.iter().enumerate().skip(1) {
                    for _ in 0..b {
                        factors.push(HyperExpr::slot_delta(j));
                    }
                }
                let body = match factors.len() {
                    0 => HyperExpr::identity(),
                    1 => factors.pop().expect("one factor"),
                    _ => HyperExpr::product(factors),
                };
                if c.is_one() {
                    body
                } else {
                    HyperExpr::scale(c.clone(), body)
                }
            })
            .collect();
        HyperExpr::sum(terms)
    }

    /// Applies to `slots` with `base` standing for `Â`.
    pub fn apply(&self, slots: &[NcPoly], base: &NcPoly) -> Result<NcPoly> {
        if slots.len() != self.slots() {
            return Err(Error::ArityMismatch { required: self.slots(), given: slots.len() });
        }
        apply_hyper(&self.to_hyper_expr(base), slots, Some(base))
    }
}

impl fmt::Display for CommutingHyperPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.variable_names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.poly.format_with(&refs))
    }
}

/// `df(A) = sum_m c_m {A^(m-1) dA}_sym`.
pub fn differential(f: &ScalarSeries, a: &Symbol, da: &Symbol) -> NcPoly {
    nth_differential(f, 1, a, da)
}

/// `d^n f(A) = sum_m c_m n! {A^(m-n) dA^n}_sym`.
pub fn nth_differential(f: &ScalarSeries, n: usize, a: &Symbol, da: &Symbol) -> NcPoly {
    let nf = factorial(n);
    let mut out = NcPoly::zero();
    for (m, c) in f.coeffs().iter().enumerate() {
        if m >= n && !c.is_zero() {
            out += &sym_product(a, da, m - n, n).scale(&(c * &nf));
        }
    }
    out
}

/// `d^n f(A)` as the `n`-th power of the replacement derivation `d_{A -> dA}`.
pub fn nth_differential_by_replacement(f: &ScalarSeries, n: usize, a: &Symbol, da: &Symbol) -> NcPoly {
    let fa = f.eval_poly(&NcPoly::symbol(a.clone()));
    d_arrow_pow(a, &NcPoly::symbol(da.clone()), &fa, n)
}

/// Ring `[Â, δ̂_1..δ̂_n, t_1..t_n]` and the argument `Â - sum_j t_j δ̂_j`.
fn simplex_argument(n: usize) -> CommPoly {
    let nvars = 1 + 2 * n;
    let mut arg = CommPoly::var(nvars, 0);
    for j in 1..=n {
        arg = &arg - &(&CommPoly::var(nvars, n + j) * &CommPoly::var(nvars, j));
    }
    arg
}

/// `d^n f / dA^n = n! ∫_{1 ≥ t_1 ≥ ... ≥ t_n ≥ 0} f^(n)(Â - sum_j t_j δ̂_j)`,
/// integrated exactly.
pub fn derivative_hyper(f: &ScalarSeries, n: usize) -> CommutingHyperPoly {
    let fn_ = f.nth_derivative(n);
    let integrand = CommPoly::compose_univariate(fn_.coeffs(), &simplex_argument(n));
    let integral = simplex_integral(&integrand, n);
    CommutingHyperPoly::new(integral.scale(&factorial(n)))
}

/// `sum_{k_0 + ... + k_n = m - n} Â^{k_0} (Â - δ̂_1)^{k_1} ... (Â - δ̂_1 - ... - δ̂_n)^{k_n}`.
///
/// Zero when `m < n`.
pub fn composition_sum(m: usize, n: usize) -> CommutingHyperPoly {
    let nvars = n + 1;
    let mut out = CommPoly::zero(nvars);
    if m < n {
        return CommutingHyperPoly::new(out);
    }
    let mut factors = Vec::with_capacity(n + 1);
    let mut cur = CommPoly::var(nvars, 0);
    factors.push(cur.clone());
    for j in 1..=n {
        cur = &cur - &CommPoly::var(nvars, j);
        factors.push(cur.clone());
    }
    for ks in compositions(m - n, n + 1) {
        let mut term = CommPoly::one(nvars);
        for (f, k) in factors.iter().zip(&ks) {
            term = &term * &f.pow(*k as u32);
        }
        out = &out + &term;
    }
    CommutingHyperPoly::new(out)
}

/// Weak compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Difference between the two sides of the simplex recursion
///
/// `(x_1 + ... + x_n) ∫_0^t ... f^(m+1)(t x - sum t_j x_j)`
/// `= ∫_0^t ... [f^(m)(t x - sum_{j<n} t_j x_j) - f^(m)(t (x - x_1) - sum_{j<n} t_j x_{j+1})]`
///
/// in the ring `[t, x, x_1, ..., x_n]`. Identically zero for polynomial `f`.
pub fn simplex_recursion_defect(f: &ScalarSeries, n: usize, m: usize) -> CommPoly {
    assert!(n >= 1, "the recursion needs at least one integration");
    let base = 2 + n;
    let var = |nvars: usize, i: usize| CommPoly::var(nvars, i);

    // Left side: ring [t, x, x_1..x_n, t_1..t_n].
    let nv = base + n;
    let mut arg = &var(nv, 0) * &var(nv, 1);
    for j in 1..=n {
        arg = &arg - &(&var(nv, base + j - 1) * &var(nv, 1 + j));
    }
    let integrand = CommPoly::compose_univariate(f.nth_derivative(m + 1).coeffs(), &arg);
    let integral = simplex_integral_to(&integrand, n, Upper::Var(0));
    let mut xsum = CommPoly::zero(base);
    for j in 1..=n {
        xsum = &xsum + &var(base, 1 + j);
    }
    let lhs = &xsum * &integral;

    // Right side: ring [t, x, x_1..x_n, t_1..t_(n-1)].
    let k = n - 1;
    let nv = base + k;
    let fm = f.nth_derivative(m);
    let mut first = &var(nv, 0) * &var(nv, 1);
    let mut second = &var(nv, 0) * &(&var(nv, 1) - &var(nv, 2));
    for j in 1..=k {
        let tj = var(nv, base + j - 1);
        first = &first - &(&tj * &var(nv, 1 + j));
        second = &second - &(&tj * &var(nv, 2 + j));
    }
    let integrand =
        &CommPoly::compose_univariate(fm.coeffs(), &first) - &CommPoly::compose_univariate(fm.coeffs(), &second);
    let rhs = simplex_integral_to(&integrand, k, Upper::Var(0));
    &lhs - &rhs
}

/// Like [`simplex_integral`] but with outer upper limit `upper`.
fn simplex_integral_to(g: &CommPoly, n: usize, upper: Upper) -> CommPoly {
    let base = g.nvars() - n;
    let mut acc = g.clone();
    for j in (0..n).rev() {
        let v = base + j;
        let lim = if j == 0 { upper } else { Upper::Var(v - 1) };
        acc = acc.integrate(v, lim);
    }
    acc.truncate_vars(base)
}

/// Coefficients of `x^n`, `n = 0..=order`, in `f(A + x B)`: `δ_{A->B}^n f(A)`.
pub fn taylor(f: &ScalarSeries, a: &Symbol, b: &Symbol, order: usize) -> Result<Vec<NcPoly>> {
    if order > f.truncation() {
        return Err(Error::TruncationExceeded { degree: order, truncation: f.truncation() });
    }
    let fa = f.eval_poly(&NcPoly::symbol(a.clone()));
    (0..=order).map(|n| delta_arrow_pow(a, b, &fa, n)).collect()
}

/// `e^{d_{A->B}} f(A) = sum_n d_{A->B}^n f(A) / n!`, a finite sum for polynomial `f`.
pub fn shift(f: &ScalarSeries, a: &Symbol, b: &NcPoly) -> NcPoly {
    let mut term = f.eval_poly(&NcPoly::symbol(a.clone()));
    let mut out = NcPoly::zero();
    let mut n = 0usize;
    while !term.is_zero() {
        out += &term.scale(&factorial(n).recip());
        n += 1;
        term = d_arrow_pow(a, b, &term, 1);
    }
    out
}

/// One shift `A_j -> A_j + x_j B_j` of a multivariate expansion.
#[derive(Clone, Debug)]
pub struct Shift {
    pub var: Symbol,
    pub dir: NcPoly,
    pub param: Symbol,
}

impl Shift {
    pub fn new(var: &str, dir: NcPoly, param: &str) -> Self {
        Shift { var: Symbol::new(var), dir, param: Symbol::new(param) }
    }
}

/// Polynomial in commuting scalar parameters with free-algebra coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoly {
    params: Vec<Symbol>,
    terms: BTreeMap<Vec<u32>, NcPoly>,
}

impl ParamPoly {
    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &NcPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> NcPoly {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Sets each parameter to a rational value.
    pub fn evaluate(&self, values: &[Rational]) -> NcPoly {
        assert_eq!(values.len(), self.params.len());
        let mut out = NcPoly::zero();
        for (e, p) in &self.terms {
            let mut c = Rational::one();
            for (v, k) in values.iter().zip(e) {
                for _ in 0..*k {
                    c *= v;
                }
            }
            out += &p.scale(&c);
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse((*e).clone())));
        if keys.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = keys
            .into_iter()
            .map(|e| {
                let monomial: Vec<String> = e
                    .iter()
                    .zip(&self.params)
                    .filter(|(k, _)| **k > 0)
                    .map(|(k, s)| if *k == 1 { s.to_string() } else { format!("{s}^{k}") })
                    .collect();
                let coeff = &self.terms[e];
                if monomial.is_empty() {
                    coeff.to_string()
                } else {
                    format!("{}*({coeff})", monomial.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `f({A_j + x_j B_j}) = sum_n sum_{j_1..j_n} x_{j_1}...x_{j_n} d_{j_1..j_n} f`,
/// truncated at total parameter degree `order`.
pub fn multivariate_taylor(p: &NcPoly, shifts: &[Shift], order: usize) -> ParamPoly {
    let q = shifts.len();
    let mut terms: BTreeMap<Vec<u32>, NcPoly> = BTreeMap::new();
    for n in 0..=order {
        for seq in sequences(q, n) {
            let steps: Vec<(Symbol, NcPoly)> =
                seq.iter().map(|&j| (shifts[j].var.clone(), shifts[j].dir.clone())).collect();
            let part = ordered_replacement(&steps, p);
            if part.is_zero() {
                continue;
            }
            let mut e = vec![0u32; q];
            for &j in &seq {
                e[j] += 1;
            }
            let slot = terms.entry(e).or_default();
            *slot += &part;
        }
    }
    terms.retain(|_, v| !v.is_zero());
    ParamPoly { params: shifts.iter().map(|s| s.param.clone()).collect(), terms }
}

/// All sequences of length `n` over `0..q`.
fn sequences(q: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..q).map(move |j| {
                    let mut t = s.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    out
}

/// Hyperoperator `f^(n)_{j_1..j_n}` with
/// `f^(n)_{j_1..j_n} : dA_{j_1} ... dA_{j_n} = d_{j_1..j_n} p`.
///
/// Each ordered-differential term `w_0 dA_{j_1} w_1 ... dA_{j_n} w_n` is moved
/// into slot form by the rearrangement rule; terms sharing the same slot
/// commutators are merged and commutators with scalars dropped.
pub fn partial_derivative(p: &NcPoly, js: &[Symbol]) -> HyperExpr {
    let n = js.len();
    // key: per-slot commutator argument (None = no commutator) -> left factor
    let mut acc: BTreeMap<Vec<Option<NcPoly>>, NcPoly> = BTreeMap::new();
    for (w, c) in p.terms() {
        for positions in ordered_positions(w.letters(), js) {
            let segs: Vec<NcPoly> = split_at_positions(w.letters(), &positions).into_iter().map(NcPoly::word).collect();
            let fs = &segs[1..];
            let product = |from: usize, to: usize| fs[from..to].iter().fold(NcPoly::one(), |acc, f| &acc * f);
            'subsets: for mask in 0u32..1 << n {
                let set: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
                let mut key = vec![None; n];
                for (i, &j) in set.iter().enumerate() {
                    let next = set.get(i + 1).copied().unwrap_or(n);
                    let arg = product(j, next);
                    if arg.as_constant().is_some() {
                        continue 'subsets;
                    }
                    key[j] = Some(arg);
                }
                let start = set.first().copied().unwrap_or(n);
                let sign = if set.len() % 2 == 1 { -Rational::one() } else { Rational::one() };
                let left = (&segs[0] * &product(0, start)).scale(&(c * sign));
                *acc.entry(key).or_default() += &left;
            }
        }
    }
    let terms: Vec<HyperExpr> = acc
        .into_iter()
        .filter(|(_, left)| !left.is_zero())
        .map(|(key, left)| {
            let deltas: Vec<HyperExpr> =
                key.into_iter().enumerate().filter_map(|(j, f)| f.map(|f| HyperExpr::pdelta(f, j + 1))).collect();
            slot_term(left, deltas)
        })
        .collect();
    HyperExpr::sum(terms).simplified()
}

fn slot_term(left: NcPoly, deltas: Vec<HyperExpr>) -> HyperExpr {
    let negative = left.terms().all(|(_, c)| *c < Rational::zero());
    let left = if negative { -left } else { left };
    let mut factors = Vec::with_capacity(deltas.len() + 1);
    if deltas.is_empty() || left != NcPoly::one() {
        factors.push(HyperExpr::lmul(left));
    }
    factors.extend(deltas);
    let body = if factors.len() == 1 { factors.pop().expect("one factor") } else { HyperExpr::product(factors) };
    if negative {
        HyperExpr::scale(-Rational::one(), body)
    } else {
        body
    }
}

/// Partial quantum derivative `∂^n f / ∂A_{j_n} ... ∂A_{j_1} = n! f^(n)_{j_1..j_n}`.
pub fn partial_quantum_derivative(p: &NcPoly, js: &[Symbol]) -> HyperExpr {
    HyperExpr::scale(factorial(js.len()), partial_derivative(p, js)).simplified()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperop::ordered_differential;
    use crate::ncpoly::parse;

    fn p(s: &str) -> NcPoly {
        parse(s).unwrap()
    }

    fn s(n: &str) -> Symbol {
        Symbol::new(n)
    }

    fn x(k: usize) -> ScalarSeries {
        ScalarSeries::monomial(k)
    }

    #[test]
    fn differential_examples() {
        let (a, da) = (s("A"), s("dA"));
        assert_eq!(differential(&x(2), &a, &da), p("A*dA + dA*A"));
        assert_eq!(differential(&x(1), &a, &da), p("dA"));
        assert_eq!(differential(&x(3), &a, &da), p("A*A*dA + A*dA*A + dA*A*A"));
    }

    #[test]
    fn nth_differential_examples() {
        let (a, da) = (s("A"), s("dA"));
        assert_eq!(nth_differential(&x(3), 2, &a, &da), p("2*(A*dA*dA + dA*A*dA + dA*dA*A)"));
        assert!(nth_differential(&x(2), 3, &a, &da).is_zero());
        assert_eq!(nth_differential(&x(1), 1, &a, &da), p("dA"));
        for m in 0..=6 {
            for n in 1..=4 {
                assert_eq!(nth_differential(&x(m), n, &a, &da), nth_differential_by_replacement(&x(m), n, &a, &da));
            }
        }
    }

    #[test]
    fn derivative_hyper_examples() {
        let h = derivative_hyper(&x(3), 1);
        assert_eq!(h.to_string(), "3*Â^2 - 3*Â*δ̂1 + δ̂1^2");
        assert_eq!(derivative_hyper(&x(2), 1).to_string(), "2*Â - δ̂1");
        assert_eq!(derivative_hyper(&x(2), 2).to_string(), "2");
        let a = p("A");
        assert_eq!(h.apply(&[p("dA")], &a).unwrap(), p("sym(A,dA,2,1)"));
        assert_eq!(derivative_hyper(&x(3), 2).to_string(), "6*Â - 4*δ̂1 - 2*δ̂2");
    }

    #[test]
    fn lemma_a_small_case() {
        // n = 1, m = 2: Â + (Â - δ̂1) = 2Â - δ̂1
        assert_eq!(composition_sum(2, 1).to_string(), "2*Â - δ̂1");
    }

    #[test]
    fn simplex_recursion_vanishes() {
        for n in 1..=3 {
            for m in 1..=4 {
                assert!(simplex_recursion_defect(&x(5), n, m).is_zero(), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn taylor_examples() {
        let (a, b) = (s("A"), s("B"));
        let t = taylor(&x(2), &a, &b, 2).unwrap();
        assert_eq!(t, vec![p("A*A"), p("A*B + B*A"), p("B*B")]);
        let t = taylor(&x(3), &a, &b, 5).unwrap();
        assert_eq!(t[1], p("sym(A,B,2,1)"));
        assert!(t[4].is_zero());
        assert!(matches!(taylor(&x(3), &a, &b, 9), Err(Error::TruncationExceeded { .. })));
    }

    #[test]
    fn shift_examples() {
        let a = s("A");
        assert_eq!(shift(&x(2), &a, &p("B")), p("(A+B)^2"));
        assert_eq!(shift(&x(3), &a, &NcPoly::zero()), p("A^3"));
        let sum = taylor(&x(3), &a, &s("B"), 3).unwrap().iter().fold(NcPoly::zero(), |acc, c| &acc + c);
        assert_eq!(shift(&x(3), &a, &p("B")), sum);
    }

    #[test]
    fn multivariate_examples() {
        let shifts = [Shift::new("A", p("dA"), "x"), Shift::new("B", p("dB"), "y")];
        let t = multivariate_taylor(&p("A*B"), &shifts, 2);
        assert_eq!(t.coefficient(&[0, 0]), p("A*B"));
        assert_eq!(t.coefficient(&[1, 0]), p("dA*B"));
        assert_eq!(t.coefficient(&[0, 1]), p("A*dB"));
        assert_eq!(t.coefficient(&[1, 1]), p("dA*dB"));
        assert_eq!(t.to_string(), "A*B + x*(dA*B) + y*(A*dB) + x*y*(dA*dB)");

        let f = p("A*B*A^2");
        let t = multivariate_taylor(&f, &shifts, 2);
        let mixed = &ordered_differential(&[s("A"), s("B")], &f) + &ordered_differential(&[s("B"), s("A")], &f);
        assert_eq!(t.coefficient(&[1, 1]), mixed);
        assert_eq!(t.evaluate(&[Rational::zero(), Rational::zero()]), f);
    }

    #[test]
    fn partial_derivative_examples() {
        let h = partial_derivative(&p("A*B"), &[s("B")]);
        assert_eq!(h, HyperExpr::lmul(p("A")));
        assert_eq!(apply_hyper(&h, &[p("dB")], None).unwrap(), p("A*dB"));

        let h = partial_derivative(&p("A^2"), &[s("A")]);
        assert_eq!(h.to_string(), "2*A - δ[A;1]");
        let a = p("A");
        let expected = derivative_hyper(&x(2), 1).apply(&[p("Q")], &a).unwrap();
        assert_eq!(apply_hyper(&h, &[p("Q")], None).unwrap(), expected);

        let h = partial_derivative(&p("A*B*A^2"), &[s("B"), s("B")]);
        assert_eq!(h, HyperExpr::zero());
    }

    #[test]
    fn partial_derivative_reproduces_ordered_differential() {
        let f = p("A*B*A^2 - 2*B*A*B + A*A*B");
        for js in [vec![s("A")], vec![s("A"), s("B")], vec![s("B"), s("A")], vec![s("A"), s("A")]] {
            let slots: Vec<NcPoly> = js.iter().map(|j| NcPoly::symbol(j.differential())).collect();
            let h = partial_derivative(&f, &js);
            assert_eq!(apply_hyper(&h, &slots, None).unwrap(), ordered_differential(&js, &f));
        }
    }
}
