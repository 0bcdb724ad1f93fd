//! Hyperoperators: linear maps on the free algebra and slot-indexed trees.

mod expr;
mod rearrange;

use std::collections::BTreeMap;

use crate::error::Result;
use crate::ncpoly::{sym_decompose, sym_product, NcPoly, Symbol, Word};

pub use expr::{apply_hyper, HyperExpr, NormalForm, SlotAction};
pub use rearrange::rearrange;

/// `δ_X p = X p - p X`.
pub fn inner_derivation(x: &NcPoly, p: &NcPoly) -> NcPoly {
    &(x * p) - &(p * x)
}

/// Linear map `{A^m B^n}_sym -> {A^(m-1) B^(n+1)}_sym`, zero when `m = 0`.
///
/// Only defined on polynomials that decompose over the symmetrized basis.
pub fn delta_arrow(a: &Symbol, b: &Symbol, p: &NcPoly) -> Result<NcPoly> {
    let mut out = NcPoly::zero();
    for c in sym_decompose(p, a, b)? {
        if c.m > 0 {
            out += &sym_product(a, b, c.m - 1, c.n + 1).scale(&c.coeff);
        }
    }
    Ok(out)
}

/// `k`-fold power of [`delta_arrow`].
pub fn delta_arrow_pow(a: &Symbol, b: &Symbol, p: &NcPoly, k: usize) -> Result<NcPoly> {
    let mut acc = p.clone();
    for _ in 0..k {
        acc = delta_arrow(a, b, &acc)?;
    }
    Ok(acc)
}

/// Derivation replacing one occurrence of `a` by `b` at a time.
pub fn d_arrow(a: &Symbol, b: &NcPoly, p: &NcPoly) -> NcPoly {
    ordered_replacement(&[(a.clone(), b.clone())], p)
}

/// `k`-fold power of [`d_arrow`].
pub fn d_arrow_pow(a: &Symbol, b: &NcPoly, p: &NcPoly, k: usize) -> NcPoly {
    (0..k).fold(p.clone(), |acc, _| d_arrow(a, b, &acc))
}

/// Ordered differential `d_{j_1, ..., j_n} p`: each `A_{j_i}` is replaced by
/// its differential `dA_{j_i}`, at positions increasing with `i`.
pub fn ordered_differential(js: &[Symbol], p: &NcPoly) -> NcPoly {
    let steps: Vec<(Symbol, NcPoly)> = js.iter().map(|s| (s.clone(), NcPoly::symbol(s.differential()))).collect();
    ordered_replacement(&steps, p)
}

/// Sums, over positions `p_1 < ... < p_n` with `steps[i].0` at `p_i`, the
/// word with each such letter replaced by `steps[i].1`.
pub fn ordered_replacement(steps: &[(Symbol, NcPoly)], p: &NcPoly) -> NcPoly {
    let js: Vec<Symbol> = steps.iter().map(|(s, _)| s.clone()).collect();
    let mut out = NcPoly::zero();
    for (w, c) in p.terms() {
        for positions in ordered_positions(w.letters(), &js) {
            let segments = split_at_positions(w.letters(), &positions);
            let mut acc = NcPoly::word(segments[0].clone());
            for (seg, (_, repl)) in segments[1..].iter().zip(steps) {
                acc = &(&acc * repl) * &NcPoly::word(seg.clone());
            }
            out += &acc.scale(c);
        }
    }
    out
}

/// Every increasing position list `p_1 < ... < p_n` with `letters[p_i] == js[i]`.
pub fn ordered_positions(letters: &[Symbol], js: &[Symbol]) -> Vec<Vec<usize>> {
    fn go(letters: &[Symbol], js: &[Symbol], from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == js.len() {
            out.push(cur.clone());
            return;
        }
        for pos in from..letters.len() {
            if letters[pos] == js[i] {
                cur.push(pos);
                go(letters, js, pos + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(letters, js, 0, &mut Vec::with_capacity(js.len()), &mut out);
    out
}

/// Cuts `letters` around the given positions, dropping the letters there:
/// `n` positions give `n + 1` segments.
pub fn split_at_positions(letters: &[Symbol], positions: &[usize]) -> Vec<Word> {
    let mut out = Vec::with_capacity(positions.len() + 1);
    let mut start = 0;
    for &pos in positions {
        out.push(Word::new(letters[start..pos].to_vec()));
        start = pos + 1;
    }
    out.push(Word::new(letters[start..].to_vec()));
    out
}

/// Total differential `d = sum_j d_{A_j -> dA_j}` over the given letters.
pub fn total_differential(vars: &[Symbol], p: &NcPoly) -> NcPoly {
    let mut out = NcPoly::zero();
    for v in vars {
        out += &d_arrow(v, &NcPoly::symbol(v.differential()), p);
    }
    out
}

/// Substitutes `A_j -> A_j + B_j` for every pair in `shifts`.
pub fn shift_substitute(p: &NcPoly, shifts: &[(Symbol, NcPoly)]) -> NcPoly {
    let map: BTreeMap<Symbol, NcPoly> =
        shifts.iter().map(|(a, b)| (a.clone(), &NcPoly::symbol(a.clone()) + b)).collect();
    p.substitute(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse;
    use crate::Error;

    fn p(s: &str) -> NcPoly {
        parse(s).unwrap()
    }

    fn sym(s: &str) -> Symbol {
        Symbol::new(s)
    }

    #[test]
    fn inner_derivation_examples() {
        assert!(inner_derivation(&p("A"), &p("A")).is_zero());
        assert_eq!(inner_derivation(&p("A"), &p("B")), p("A*B - B*A"));
        assert_eq!(inner_derivation(&p("A"), &p("A*B")), p("A*A*B - A*B*A"));
    }

    #[test]
    fn delta_arrow_examples() {
        let (a, b) = (sym("A"), sym("B"));
        assert_eq!(delta_arrow(&a, &b, &p("A^3")).unwrap(), p("A*A*B + A*B*A + B*A*A"));
        assert_eq!(delta_arrow(&a, &b, &p("A*B + B*A")).unwrap(), p("B*B"));
        assert!(delta_arrow_pow(&a, &b, &p("A"), 2).unwrap().is_zero());
        assert!(matches!(delta_arrow(&a, &b, &p("A*B - B*A")), Err(Error::NotInSymDomain { .. })));
    }

    #[test]
    fn d_arrow_examples() {
        let (a, b) = (sym("A"), p("B"));
        assert_eq!(d_arrow(&a, &b, &p("A*B*A")), p("B*B*A + A*B*B"));
        assert_eq!(d_arrow(&a, &b, &p("A^3")), p("B*A*A + A*B*A + A*A*B"));
        assert_eq!(d_arrow(&a, &b, &p("A*B + B*A")), p("2*B*B"));
    }

    #[test]
    fn ordered_differential_examples() {
        let f = p("A*B*A^2");
        let (a, b) = (sym("A"), sym("B"));
        assert_eq!(ordered_differential(&[a.clone(), b.clone()], &f), p("dA*dB*A*A"));
        assert_eq!(ordered_differential(&[b.clone(), a.clone()], &f), p("A*dB*dA*A + A*dB*A*dA"));
        assert!(ordered_differential(&[b.clone(), b], &f).is_zero());
    }

    #[test]
    fn shift_substitution() {
        let out = shift_substitute(&p("A*B"), &[(sym("A"), p("C"))]);
        assert_eq!(out, p("A*B + C*B"));
    }
}
