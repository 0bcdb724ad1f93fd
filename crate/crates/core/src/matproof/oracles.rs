//! Matrix evaluation of symbolic objects and independent derivative oracles.
//!
//! The block oracles never touch the symbolic engine: they only evaluate the
//! scalar polynomial on an enlarged block matrix.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::fixtures::MatrixAssignment;
use super::linalg::{c, commutator, identity, poly_eval, CMat};
use crate::error::Result;
use crate::ncpoly::NcPoly;
use crate::qderiv::derivative_hyper;
use crate::series::ScalarSeries;
use crate::Rational;

fn to_c(r: &Rational) -> Complex64 {
    c(r.to_f64().unwrap_or(f64::NAN))
}

/// Homomorphic evaluation of `p` under the assignment.
pub fn eval_poly(p: &NcPoly, m: &MatrixAssignment) -> Result<CMat> {
    let d = m.dim;
    let mut out = CMat::zeros(d, d);
    for (w, coeff) in p.terms() {
        let mut acc = identity(d);
        for s in w.letters() {
            acc = &acc * m.get(s.name())?;
        }
        out += acc * to_c(coeff);
    }
    Ok(out)
}

/// `f(A)` for a scalar series `f`.
pub fn eval_series(f: &ScalarSeries, a: &CMat) -> CMat {
    poly_eval(&f.to_complex(), a)
}

/// `n! ×` the `(0, n)` block of `f` applied to the block bidiagonal matrix
/// with `A` on the diagonal and `dirs` on the superdiagonal.
///
/// With all directions equal to `E` this is `d^n f(A)`; with distinct
/// directions it is `n!` times the ordered mixed derivative.
pub fn frechet_oracle_dirs(f: &ScalarSeries, a: &CMat, dirs: &[CMat]) -> CMat {
    let d = a.nrows();
    let n = dirs.len();
    let size = d * (n + 1);
    let mut big = CMat::zeros(size, size);
    for k in 0..=n {
        big.view_mut((k * d, k * d), (d, d)).copy_from(a);
    }
    for (k, e) in dirs.iter().enumerate() {
        big.view_mut((k * d, (k + 1) * d), (d, d)).copy_from(e);
    }
    let value = poly_eval(&f.to_complex(), &big);
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    value.view((0, n * d), (d, d)).into_owned() * c(factorial)
}

/// `d^n f(A)` with every direction equal to `e`.
pub fn frechet_oracle_n(f: &ScalarSeries, a: &CMat, e: &CMat, n: usize) -> CMat {
    frechet_oracle_dirs(f, a, &vec![e.clone(); n])
}

/// First directional derivative of `f` at `a` in direction `e`.
pub fn gateaux_oracle(f: &ScalarSeries, a: &CMat, e: &CMat) -> CMat {
    frechet_oracle_dirs(f, a, std::slice::from_ref(e))
}

/// Evaluates `derivative_hyper(f, n)` on `dirs`: each monomial
/// `Â^a δ̂_1^{b_1} ... δ̂_n^{b_n}` becomes `A^a (ad_A^{b_1} E_1) ... (ad_A^{b_n} E_n)`.
pub fn integral_rep_eval(f: &ScalarSeries, n: usize, a: &CMat, dirs: &[CMat]) -> CMat {
    assert_eq!(dirs.len(), n, "one direction per slot");
    let d = a.nrows();
    let hyper = derivative_hyper(f, n);
    let max_exp = hyper.poly().terms().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as usize;
    let mut a_pows = vec![identity(d)];
    for k in 1..=max_exp {
        a_pows.push(&a_pows[k - 1] * a);
    }
    let ad_pows: Vec<Vec<CMat>> = dirs
        .iter()
        .map(|e| {
            let mut v = vec![e.clone()];
            for k in 1..=max_exp {
                v.push(commutator(a, &v[k - 1]));
            }
            v
        })
        .collect();
    let mut out = CMat::zeros(d, d);
    for (exps, coeff) in hyper.poly().terms() {
        let mut acc = a_pows[exps[0] as usize].clone();
        for (j, &b) in exps[1..].iter().enumerate() {
            acc = &acc * &ad_pows[j][b as usize];
        }
        out += acc * to_c(coeff);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matproof::fixtures::{make_fixture, FixtureKind};
    use crate::matproof::linalg::relative_residual;
    use crate::ncpoly::{parse, Symbol};
    use crate::qderiv::nth_differential;

    fn fixture(kind: FixtureKind, d: usize, seed: u64) -> MatrixAssignment {
        make_fixture(kind, d, seed, 0.5).unwrap()
    }

    #[test]
    fn evaluation_basics() {
        let m = fixture(FixtureKind::Random, 3, 5);
        assert_eq!(eval_poly(&NcPoly::one(), &m).unwrap(), identity(3));
        let sym = eval_poly(&parse("sym(A,B,2,1)").unwrap(), &m).unwrap();
        let (a, b) = (m.get("A").unwrap(), m.get("B").unwrap());
        let direct = a * a * b + a * b * a + b * a * a;
        assert!(relative_residual(&sym, &direct) < 1e-15);
        let comm = fixture(FixtureKind::Commuting, 3, 5);
        let z = eval_poly(&parse("A*B - B*A").unwrap(), &comm).unwrap();
        assert!(z.iter().all(|x| x.norm() == 0.0));
        assert!(matches!(eval_poly(&parse("Z").unwrap(), &m), Err(crate::Error::UnassignedSymbol(_))));
    }

    #[test]
    fn gateaux_examples() {
        let m = fixture(FixtureKind::Random, 3, 9);
        let (a, e) = (m.get("A").unwrap(), m.get("E").unwrap());
        let sq = gateaux_oracle(&ScalarSeries::monomial(2), a, e);
        assert!(relative_residual(&sq, &(a * e + e * a)) < 1e-15);
        let lin = gateaux_oracle(&ScalarSeries::monomial(1), a, e);
        assert!(relative_residual(&lin, e) < 1e-16);
    }

    #[test]
    fn gateaux_matches_central_difference() {
        let f = ScalarSeries::from_integers(&[1, -2, 3, 1, -1, 2]);
        let m = fixture(FixtureKind::Random, 3, 10);
        let (a, e) = (m.get("A").unwrap(), m.get("E").unwrap());
        let h = 1e-5;
        let fd = (eval_series(&f, &(a + e * c(h))) - eval_series(&f, &(a - e * c(h)))) / c(2.0 * h);
        assert!(relative_residual(&gateaux_oracle(&f, a, e), &fd) < 1e-8);
    }

    #[test]
    fn frechet_examples() {
        let m = fixture(FixtureKind::Random, 3, 12);
        let (a, e) = (m.get("A").unwrap(), m.get("dA").unwrap());
        let two = frechet_oracle_n(&ScalarSeries::monomial(2), a, e, 2);
        assert!(relative_residual(&two, &(e * e * c(2.0))) < 1e-15);
        let none = frechet_oracle_n(&ScalarSeries::monomial(2), a, e, 3);
        assert!(none.iter().all(|z| z.norm() == 0.0));
        let cube = frechet_oracle_n(&ScalarSeries::monomial(3), a, e, 2);
        let sym = nth_differential(&ScalarSeries::monomial(3), 2, &Symbol::new("A"), &Symbol::new("dA"));
        assert!(relative_residual(&cube, &eval_poly(&sym, &m).unwrap()) < 1e-12);
    }

    #[test]
    fn integral_representation_examples() {
        let m = fixture(FixtureKind::Random, 3, 13);
        let (a, e) = (m.get("A").unwrap(), m.get("E").unwrap());
        let sq = integral_rep_eval(&ScalarSeries::monomial(2), 1, a, std::slice::from_ref(e));
        assert!(relative_residual(&sq, &(a * e + e * a)) < 1e-15);

        let comm = fixture(FixtureKind::Commuting, 3, 13);
        let (a, e) = (comm.get("A").unwrap(), comm.get("E").unwrap());
        let out = integral_rep_eval(&ScalarSeries::monomial(5), 1, a, std::slice::from_ref(e));
        let want = a.pow(4) * e * c(5.0);
        assert!(relative_residual(&out, &want) < 1e-14);

        let (a, e) = (m.get("A").unwrap(), m.get("E").unwrap());
        let f4 = ScalarSeries::monomial(4);
        let rep = integral_rep_eval(&f4, 2, a, &[e.clone(), e.clone()]);
        assert!(relative_residual(&rep, &frechet_oracle_n(&f4, a, e, 2)) < 1e-12);
    }

    #[test]
    fn distinct_directions_agree() {
        let m = fixture(FixtureKind::Random, 3, 14);
        let a = m.get("A").unwrap();
        let dirs = [m.get("B").unwrap().clone(), m.get("C").unwrap().clone(), m.get("Q").unwrap().clone()];
        let f = ScalarSeries::from_integers(&[0, 1, -1, 2, 1, 3, -2]);
        for n in 1..=3 {
            let rep = integral_rep_eval(&f, n, a, &dirs[..n]);
            let block = frechet_oracle_dirs(&f, a, &dirs[..n]);
            assert!(relative_residual(&rep, &block) < 1e-13, "n = {n}");
        }
    }
}
