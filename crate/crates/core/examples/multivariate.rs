//! Ordered partial differentials and the two-variable operator Taylor expansion.

use hyperderiv::hyperop::{ordered_differential, total_differential};
use hyperderiv::ncpoly::{parse, NcPoly, Symbol};
use hyperderiv::qderiv::{multivariate_taylor, partial_derivative, Shift};
use hyperderiv::Rational;

fn main() -> hyperderiv::Result<()> {
    let (a, b) = (Symbol::new("A"), Symbol::new("B"));
    let f = parse("A*B*A*A")?;
    println!("d f = {}", total_differential(&[a.clone(), b.clone()], &f));
    for js in [[a.clone(), b.clone()], [b.clone(), a.clone()], [a.clone(), a.clone()]] {
        let names: Vec<&str> = js.iter().map(Symbol::name).collect();
        println!("d_{{{}}} f = {}", names.join(","), ordered_differential(&js, &f));
    }
    println!("∂/∂A ∂/∂B f as a hyperoperator: {}", partial_derivative(&f, &[a.clone(), b.clone()]));

    let shifts = [Shift::new("A", NcPoly::symbol("dA"), "x"), Shift::new("B", NcPoly::symbol("dB"), "y")];
    let expansion = multivariate_taylor(&parse("A*B")?, &shifts, 2);
    println!("A*B with A -> A + x dA, B -> B + y dB:\n{expansion}");
    let one = Rational::from_integer(1.into());
    println!("at x = y = 1: {}", expansion.evaluate(&[one.clone(), one]));
    Ok(())
}
