//! Exponential-type identities: the derivative of `exp` and the
//! quadrature-based BCH formulas.

use std::sync::OnceLock;

use super::{Body, Comparison, Group, Identity, Tolerance, Trial};
use crate::bch::{
    bch_product, bch_series_symmetric, bch_symmetric, delta_cap, QuadratureRule, DEFAULT_NODES, MAX_SERIES_ORDER,
};
use crate::error::Result;
use crate::matproof::fixtures::{FixtureKind, MatrixAssignment, DEFAULT_SCALE};
use crate::matproof::linalg::{c, expm, frobenius, logm, relative_residual, CMat};
use crate::matproof::oracles::{eval_poly, gateaux_oracle};
use crate::ncpoly::NcPoly;
use crate::series::ScalarSeries;

/// `ln 3`: the rate check allows a factor of three either way.
const LN_3: f64 = 1.098_612_288_668_109_8;

const fn exponential(
    name: &'static str,
    tolerance: Tolerance,
    check: fn(&Trial) -> Result<Vec<Comparison>>,
    summary: &'static str,
) -> Identity {
    Identity { name, group: Group::Exponential, tolerance, body: Body::Numeric(check), summary }
}

pub(super) static IDENTITIES: &[Identity] = &[
    exponential("exp_derivative", Tolerance::Fixed(1e-9), exp_derivative, "d/dt e^{A + tE} at 0 = e^A Δ(-A) E"),
    exponential(
        "bch_symmetric",
        Tolerance::Fixed(1e-8),
        bch_symmetric_vs_logm,
        "integral BCH for e^A e^B e^A vs matrix logarithm",
    ),
    exponential(
        "bch_product",
        Tolerance::Fixed(1e-7),
        bch_product_vs_logm,
        "recursive BCH for r = 2, 3, 4 factors vs matrix logarithm",
    ),
    exponential(
        "quadrature_doubling",
        Tolerance::Fixed(1e-10),
        quadrature_doubling,
        "32 and 64 Gauss-Legendre nodes agree",
    ),
    exponential(
        "bch_series_truncation",
        Tolerance::Fixed(1e-6),
        bch_series_truncation,
        "degree-3 free-algebra series vs integral BCH at norm 0.05",
    ),
    exponential(
        "bch_series_rate",
        Tolerance::Fixed(LN_3),
        bch_series_rate,
        "series truncation error shrinks at the expected power when the norm halves",
    ),
];

fn pair(fx: &MatrixAssignment, x: &str, y: &str) -> Result<(CMat, CMat)> {
    Ok((fx.get(x)?.clone(), fx.get(y)?.clone()))
}

fn exp_derivative(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, e) = pair(&fx, "A", "E")?;
    let exp = ScalarSeries::exp(24);
    let rhs = expm(&a) * delta_cap(&(&a * c(-1.0)), &e)?;
    Ok(vec![Comparison::Pair(gateaux_oracle(&exp, &a, &e), rhs)])
}

fn sandwich(a: &CMat, b: &CMat) -> CMat {
    let ea = expm(a);
    &ea * expm(b) * &ea
}

fn bch_symmetric_vs_logm(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, 0.3)?;
    let (a, b) = pair(&fx, "A", "B")?;
    let quad = QuadratureRule::gauss_legendre(DEFAULT_NODES)?;
    let z = bch_symmetric(&a, &b, &quad)?;
    let target = sandwich(&a, &b);
    Ok(vec![Comparison::Pair(z.clone(), logm(&target)?), Comparison::Pair(expm(&z), target)])
}

fn factors(fx: &MatrixAssignment) -> Result<Vec<CMat>> {
    ["A", "B", "C", "Q"].iter().map(|n| fx.get(n).cloned()).collect()
}

fn product_exp(ms: &[CMat]) -> CMat {
    ms.iter().fold(CMat::identity(ms[0].nrows(), ms[0].nrows()), |acc, m| acc * expm(m))
}

fn bch_product_vs_logm(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, 0.2)?;
    let ms = factors(&fx)?;
    let quad = QuadratureRule::gauss_legendre(DEFAULT_NODES)?;
    let mut out = Vec::new();
    for r in 2..=4 {
        let z = bch_product(&ms[..r], &quad)?;
        out.push(Comparison::Pair(z.clone(), logm(&product_exp(&ms[..r]))?));
        // Left-associated pairwise reduction must agree with the r-factor recursion.
        let mut acc = ms[0].clone();
        for m in &ms[1..r] {
            acc = bch_product(&[acc, m.clone()], &quad)?;
        }
        out.push(Comparison::Pair(acc, z));
    }
    let (a, b) = (&ms[0], &ms[1]);
    out.push(Comparison::Pair(bch_product(&[a.clone(), b.clone(), a.clone()], &quad)?, bch_symmetric(a, b, &quad)?));
    Ok(out)
}

fn quadrature_doubling(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, 0.3)?;
    let ms = factors(&fx)?;
    let coarse = QuadratureRule::gauss_legendre(DEFAULT_NODES)?;
    let fine = QuadratureRule::gauss_legendre(2 * DEFAULT_NODES)?;
    let mut out = vec![Comparison::Residual(relative_residual(
        &bch_symmetric(&ms[0], &ms[1], &coarse)?,
        &bch_symmetric(&ms[0], &ms[1], &fine)?,
    ))];
    for r in [3, 4] {
        out.push(Comparison::Residual(relative_residual(
            &bch_product(&ms[..r], &coarse)?,
            &bch_product(&ms[..r], &fine)?,
        )));
    }
    Ok(out)
}

/// Free-algebra series truncated at every order `1..=MAX_SERIES_ORDER`.
fn series() -> &'static [NcPoly] {
    static SERIES: OnceLock<Vec<NcPoly>> = OnceLock::new();
    SERIES
        .get_or_init(|| (1..=MAX_SERIES_ORDER).map(|k| bch_series_symmetric(k).expect("order within limit")).collect())
}

fn scaled_pair(trial: &Trial, norm: f64) -> Result<(CMat, CMat)> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, b) = pair(&fx, "A", "B")?;
    Ok((&a * c(norm / frobenius(&a)), &b * c(norm / frobenius(&b))))
}

fn eval_series_at(p: &NcPoly, a: &CMat, b: &CMat) -> Result<CMat> {
    let mut m = MatrixAssignment::new(a.nrows(), 0, 0.0, FixtureKind::Random);
    m.insert("A", a.clone());
    m.insert("B", b.clone());
    eval_poly(p, &m)
}

fn bch_series_truncation(trial: &Trial) -> Result<Vec<Comparison>> {
    let (a, b) = scaled_pair(trial, 0.05)?;
    let quad = QuadratureRule::gauss_legendre(DEFAULT_NODES)?;
    let exact = bch_symmetric(&a, &b, &quad)?;
    Ok(vec![Comparison::Pair(eval_series_at(&series()[2], &a, &b)?, exact)])
}

/// Truncating at order `k` leaves an error whose leading degree is `k + 1`,
/// or `k + 2` for odd `k` since only odd degrees occur. Halving the norm
/// therefore divides the error by `2^{k+1}` up to a factor of 2; the
/// residual is `|ln(ratio / 2^{k+1})|`.
fn bch_series_rate(trial: &Trial) -> Result<Vec<Comparison>> {
    let quad = QuadratureRule::gauss_legendre(DEFAULT_NODES)?;
    let mut errors = Vec::new();
    for norm in [0.2, 0.1] {
        let (a, b) = scaled_pair(trial, norm)?;
        let exact = bch_symmetric(&a, &b, &quad)?;
        let errs = series()
            .iter()
            .map(|p| Ok(frobenius(&(eval_series_at(p, &a, &b)? - &exact))))
            .collect::<Result<Vec<f64>>>()?;
        errors.push(errs);
    }
    Ok((0..MAX_SERIES_ORDER)
        .map(|i| {
            let k = i + 1;
            let ratio = errors[0][i] / errors[1][i];
            Comparison::Residual((ratio / 2f64.powi(k as i32 + 1)).ln().abs())
        })
        .collect())
}
