//! Quadrature BCH formulas compared with the matrix logarithm and the free-algebra series.

use hyperderiv::bch::{bch_product_checked, bch_series_symmetric, bch_symmetric_checked, DEFAULT_NODES};
use hyperderiv::matproof::fixtures::{make_fixture, FixtureKind};
use hyperderiv::matproof::linalg::{expm, logm, relative_residual};

fn main() -> hyperderiv::Result<()> {
    let fx = make_fixture(FixtureKind::Random, 4, 42, 0.3)?;
    let (a, b, c) = (fx.get("A")?, fx.get("B")?, fx.get("C")?);

    let z = bch_symmetric_checked(a, b, DEFAULT_NODES, 1e-8)?;
    let reference = logm(&(expm(a) * expm(b) * expm(a)))?;
    println!("log(e^A e^B e^A): quadrature vs logm residual {:e}", relative_residual(&z, &reference));

    let factors = [a.clone(), b.clone(), c.clone()];
    let z = bch_product_checked(&factors, DEFAULT_NODES, 1e-8)?;
    let reference = logm(&(expm(a) * expm(b) * expm(c)))?;
    println!("log(e^A e^B e^C): quadrature vs logm residual {:e}", relative_residual(&z, &reference));

    println!("symmetric series to degree 3: {}", bch_series_symmetric(3)?);
    Ok(())
}
