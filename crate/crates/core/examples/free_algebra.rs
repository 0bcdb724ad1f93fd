//! Parsing, canonical printing, JSON and symmetrized products.

use hyperderiv::ncpoly::{parse, sym_decompose, sym_product, Symbol};

fn main() -> hyperderiv::Result<()> {
    let p = parse("(A + B)^3 - B*A*A")?;
    println!("(A + B)^3 - B*A*A = {p}");
    println!("json: {}", serde_json::to_string(&p).expect("serializable"));

    let (a, b) = (Symbol::new("A"), Symbol::new("B"));
    println!("{{A^2 B}}_sym = {}", sym_product(&a, &b, 2, 1));
    println!("sym(A,B,1,2) parses to {}", parse("sym(A,B,1,2)")?);

    let q = parse("3*sym(A,B,2,1) - 1/2*sym(A,B,0,3)")?;
    for c in sym_decompose(&q, &a, &b)? {
        println!("component m={} n={} coeff={}", c.m, c.n, c.coeff);
    }
    match sym_decompose(&parse("A*B - B*A")?, &a, &b) {
        Err(e) => println!("A*B - B*A: {e}"),
        Ok(_) => unreachable!("a commutator is not symmetrized"),
    }
    Ok(())
}
