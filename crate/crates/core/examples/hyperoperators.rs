//! Inner derivations, replacement derivations and slot-indexed hyperoperators.

use hyperderiv::hyperop::{apply_hyper, d_arrow, delta_arrow_pow, inner_derivation, rearrange, HyperExpr};
use hyperderiv::ncpoly::{parse, NcPoly, Symbol};
use hyperderiv::Rational;

fn main() -> hyperderiv::Result<()> {
    let (a, b) = (Symbol::new("A"), Symbol::new("B"));
    println!("δ_A B = {}", inner_derivation(&parse("A")?, &parse("B")?));
    println!("d_(A->B) A*B*A = {}", d_arrow(&a, &parse("B")?, &parse("A*B*A")?));
    let f = parse("A*A*A")?;
    for k in 0..=3 {
        println!("δ_(A->B)^{k} A^3 = {}", delta_arrow_pow(&a, &b, &f, k)?);
    }

    // (A - δ_A)^2 applied to a slot operand: the operand ends up on the left.
    let h = HyperExpr::sum(vec![
        HyperExpr::lmul(parse("A")?),
        HyperExpr::scale(Rational::from_integer((-1).into()), HyperExpr::delta(parse("A")?)),
    ])
    .pow(2);
    println!("(A - δ_A)^2 : Q = {}", apply_hyper(&h, &[parse("Q")?], None)?);

    let fs = vec![parse("f1")?, parse("f2")?];
    let r = rearrange(&fs);
    println!("rearranged f1 f2 = {r}");
    let slots = vec![NcPoly::symbol("Q1"), NcPoly::symbol("Q2")];
    println!("applied to (Q1, Q2): {}", apply_hyper(&r, &slots, None)?);
    Ok(())
}
