//! Derivative hyperoperators of scalar functions and operator Taylor expansions.

use hyperderiv::ncpoly::{parse, NcPoly, Symbol};
use hyperderiv::qderiv::{derivative_hyper, nth_differential, shift, taylor};
use hyperderiv::series::ScalarSeries;

fn main() -> hyperderiv::Result<()> {
    let (a, da, b) = (Symbol::new("A"), Symbol::new("dA"), Symbol::new("B"));
    let f = ScalarSeries::parse("x^3", 8)?;
    for n in 1..=3 {
        let h = derivative_hyper(&f, n);
        let applied = h.apply(&vec![NcPoly::symbol(da.clone()); n], &NcPoly::symbol(a.clone()))?;
        println!("n={n}: {h}");
        println!("     expands to {applied}");
        assert_eq!(applied, nth_differential(&f, n, &a, &da));
    }

    for (k, c) in taylor(&f, &a, &b, 3)?.iter().enumerate() {
        println!("x^{k} coefficient of (A + xB)^3: {c}");
    }
    let shifted = shift(&f, &a, &parse("B")?);
    println!("shift of A^3 by B = {shifted}");

    let exp = ScalarSeries::parse("exp", 4)?;
    println!("exp truncated at 4: {exp}; first derivative hyperoperator {}", derivative_hyper(&exp, 1));
    Ok(())
}
