use std::collections::BTreeMap;

use proptest::prelude::*;

use hyperderiv::hyperop::{d_arrow, inner_derivation};
use hyperderiv::matproof::check::{check_identity, CheckOptions};
use hyperderiv::matproof::fixtures::{make_fixture, FixtureKind};
use hyperderiv::ncpoly::{parse, sym_compose, sym_decompose, NcPoly, SymComponent, Symbol, Word};
use hyperderiv::qderiv::{derivative_hyper, nth_differential, taylor};
use hyperderiv::series::ScalarSeries;
use hyperderiv::Rational;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn poly(letters: &'static [&'static str], max_len: usize) -> impl Strategy<Value = NcPoly> {
    let word = prop::collection::vec(prop::sample::select(letters), 0..=max_len);
    prop::collection::vec((word, rational()), 0..5).prop_map(|terms| {
        let mut p = NcPoly::zero();
        for (w, c) in terms {
            p.add_term(Word::new(w.into_iter().map(Symbol::new).collect()), c);
        }
        p
    })
}

fn series(max_degree: usize) -> impl Strategy<Value = ScalarSeries> {
    prop::collection::vec(-5i64..=5, 1..=max_degree + 1).prop_map(|c| ScalarSeries::from_integers(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(p in poly(&["A", "B", "dA"], 4)) {
        prop_assert_eq!(parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn inner_derivation_obeys_leibniz(x in poly(&["A", "B"], 2), p in poly(&["A", "B", "C"], 3), q in poly(&["A", "C"], 3)) {
        let lhs = inner_derivation(&x, &(&p * &q));
        let rhs = &(&inner_derivation(&x, &p) * &q) + &(&p * &inner_derivation(&x, &q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn replacement_is_a_derivation(p in poly(&["A", "B"], 3), q in poly(&["A", "B"], 3), b in poly(&["B", "C"], 2)) {
        let a = Symbol::new("A");
        let lhs = d_arrow(&a, &b, &(&p * &q));
        let rhs = &(&d_arrow(&a, &b, &p) * &q) + &(&p * &d_arrow(&a, &b, &q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symmetrized_decomposition_round_trips(coeffs in prop::collection::btree_map((0usize..4, 0usize..4), rational(), 0..6)) {
        let (x, y) = (Symbol::new("A"), Symbol::new("B"));
        let components: Vec<SymComponent> = coeffs
            .into_iter()
            .filter(|(_, c)| *c != Rational::from_integer(0.into()))
            .map(|((m, n), coeff)| SymComponent { m, n, coeff })
            .collect();
        let p = sym_compose(&components, &x, &y);
        let back = sym_decompose(&p, &x, &y).unwrap();
        prop_assert_eq!(sym_compose(&back, &x, &y), p);
        let as_map = |cs: &[SymComponent]| -> BTreeMap<(usize, usize), Rational> {
            cs.iter().map(|c| ((c.m, c.n), c.coeff.clone())).collect()
        };
        prop_assert_eq!(as_map(&back), as_map(&components));
    }

    #[test]
    fn derivative_hyperoperator_reproduces_differential(f in series(5), n in 1usize..=3) {
        let (a, da) = (Symbol::new("A"), Symbol::new("dA"));
        let slots = vec![NcPoly::symbol(da.clone()); n];
        let applied = derivative_hyper(&f, n).apply(&slots, &NcPoly::symbol(a.clone())).unwrap();
        prop_assert_eq!(applied, nth_differential(&f, n, &a, &da));
    }

    #[test]
    fn taylor_coefficients_sum_to_the_shifted_function(f in series(6)) {
        let (a, b) = (Symbol::new("A"), Symbol::new("B"));
        let coeffs = taylor(&f, &a, &b, f.degree().unwrap_or(0)).unwrap();
        let mut sum = NcPoly::zero();
        for c in &coeffs {
            sum += c;
        }
        prop_assert_eq!(sum, f.eval_poly(&parse("A + B").unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fixtures_are_reproducible(seed in any::<u64>(), dim in 2usize..=5) {
        for kind in FixtureKind::ALL {
            let first = make_fixture(kind, dim, seed, 0.5).unwrap();
            let second = make_fixture(kind, dim, seed, 0.5).unwrap();
            for name in first.names() {
                prop_assert_eq!(first.get(name).unwrap(), second.get(name).unwrap());
            }
        }
    }

    #[test]
    fn vectorized_identities_hold_for_any_seed(seed in any::<u64>(), dim in 2usize..=6) {
        let opts = CheckOptions { trials: 2, seed, ..CheckOptions::default() };
        for name in ["lemma2", "formulaA", "derivative_invariance"] {
            let r = check_identity(name, dim, &opts).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
