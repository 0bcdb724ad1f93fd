//! Matrix realizations: vectorized hyperoperators and the Fréchet block oracle.

use hyperderiv::matproof::fixtures::{make_fixture, FixtureKind};
use hyperderiv::matproof::linalg::{
    ad_matrix, apply_hyper_matrix, commutator, left_mul_matrix, poly_eval, relative_residual,
};
use hyperderiv::matproof::oracles::{eval_poly, eval_series, frechet_oracle_n, integral_rep_eval};
use hyperderiv::ncpoly::Symbol;
use hyperderiv::qderiv::nth_differential;
use hyperderiv::series::ScalarSeries;

fn main() -> hyperderiv::Result<()> {
    let fx = make_fixture(FixtureKind::Random, 3, 42, 0.5)?;
    let (a, q, e) = (fx.get("A")?, fx.get("Q")?, fx.get("dA")?);
    let f = ScalarSeries::from_integers(&[1, -2, 0, 1, 0, 0, 1]);

    let left = left_mul_matrix(a);
    let shifted = &left - ad_matrix(a);
    let cs = f.to_complex();
    let vectorized = apply_hyper_matrix(&(poly_eval(&cs, &left) - poly_eval(&cs, &shifted)), q);
    let direct = commutator(&eval_series(&f, a), q);
    println!("[f(A), Q] vs (f(L_A) - f(L_A - ad_A)) Q: residual {:e}", relative_residual(&vectorized, &direct));

    for n in 1..=3 {
        let oracle = frechet_oracle_n(&f, a, e, n);
        let integral = integral_rep_eval(&f, n, a, &vec![e.clone(); n]);
        let symbolic = eval_poly(&nth_differential(&f, n, &Symbol::new("A"), &Symbol::new("dA")), &fx)?;
        println!(
            "n={n}: integral representation {:e}, symbolic differential {:e}",
            relative_residual(&integral, &oracle),
            relative_residual(&symbolic, &oracle)
        );
    }

    let aux = make_fixture(FixtureKind::AuxiliaryPair, 4, 7, 0.5)?;
    let (h, a, da) = (aux.get("H")?, aux.get("A")?, aux.get("dA")?);
    let realized = commutator(h, &eval_series(&f, a));
    let integral = integral_rep_eval(&f, 1, a, std::slice::from_ref(da));
    println!("[H, f(A)] with [H, A] = dA vs df(A): residual {:e}", relative_residual(&realized, &integral));
    Ok(())
}
