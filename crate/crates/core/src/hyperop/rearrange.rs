//! Moves every `f_j` of `Q_1 f_1 ... Q_n f_n` to the left of the slots.

use num_bigint::BigInt;

use super::expr::HyperExpr;
use crate::ncpoly::NcPoly;
use crate::Rational;

/// Hyperoperator `h` with `h : Q_1 ... Q_n = Q_1 f_1 ... Q_n f_n`.
///
/// Each term picks a set `S` of slots that receive a commutator. Slot `j` in
/// `S` gets `-δ[f_j ... f_(k-1); j]` with `k` the next member of `S` (or
/// `n + 1`), and the left factor is `f_1 ... f_(s-1)` with `s = min S`.
pub fn rearrange(fs: &[NcPoly]) -> HyperExpr {
    let n = fs.len();
    let product = |from: usize, to: usize| -> NcPoly { fs[from..to].iter().fold(NcPoly::one(), |acc, f| &acc * f) };

    let mut subsets: Vec<Vec<usize>> =
        (0u32..1 << n).map(|mask| (0..n).filter(|j| mask & (1 << j) != 0).collect()).collect();
    subsets.sort_by_key(|s: &Vec<usize>| (std::cmp::Reverse(s.first().copied().unwrap_or(n)), s.len(), s.clone()));

    let terms = subsets
        .into_iter()
        .map(|set| {
            let start = set.first().copied().unwrap_or(n);
            let left = product(0, start);
            let mut factors = Vec::new();
            if set.is_empty() || left != NcPoly::one() {
                factors.push(HyperExpr::lmul(left));
            }
            for (i, &j) in set.iter().enumerate() {
                let next = set.get(i + 1).copied().unwrap_or(n);
                factors.push(HyperExpr::pdelta(product(j, next), j + 1));
            }
            let body =
                if factors.len() == 1 { factors.pop().expect("one factor") } else { HyperExpr::product(factors) };
            if set.len() % 2 == 1 {
                HyperExpr::scale(Rational::from_integer(BigInt::from(-1)), body)
            } else {
                body
            }
        })
        .collect();
    HyperExpr::sum(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperop::apply_hyper;
    use crate::ncpoly::parse;

    fn p(s: &str) -> NcPoly {
        parse(s).unwrap()
    }

    fn fs(n: usize) -> Vec<NcPoly> {
        (1..=n).map(|j| p(&format!("f{j}"))).collect()
    }

    #[test]
    fn printed_shapes() {
        assert_eq!(rearrange(&fs(1)).to_string(), "f1 - δ[f1;1]");
        assert_eq!(rearrange(&fs(2)).to_string(), "f1*f2 - f1∘δ[f2;2] - δ[f1*f2;1] + δ[f1;1]∘δ[f2;2]");
        assert_eq!(
            rearrange(&fs(3)).to_string(),
            "f1*f2*f3 - f1*f2∘δ[f3;3] - f1∘δ[f2*f3;2] + f1∘δ[f2;2]∘δ[f3;3] \
             - δ[f1*f2*f3;1] + δ[f1;1]∘δ[f2*f3;2] + δ[f1*f2;1]∘δ[f3;3] \
             - δ[f1;1]∘δ[f2;2]∘δ[f3;3]"
        );
    }

    #[test]
    fn reproduces_products() {
        for n in 1..=3 {
            let f = fs(n);
            let slots: Vec<NcPoly> = (1..=n).map(|j| p(&format!("Q{j}"))).collect();
            let mut want = NcPoly::one();
            for (q, g) in slots.iter().zip(&f) {
                want = &(&want * q) * g;
            }
            assert_eq!(apply_hyper(&rearrange(&f), &slots, None).unwrap(), want);
        }
    }
}
