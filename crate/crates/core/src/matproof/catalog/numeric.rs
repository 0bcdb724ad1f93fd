//! Matrix-level identities checked against the independent oracles.

use rand::Rng;

use super::{random_poly, Body, Comparison, Group, Identity, Tolerance, Trial};
use crate::error::Result;
use crate::hyperop::delta_arrow;
use crate::matproof::fixtures::{FixtureKind, MatrixAssignment, DEFAULT_SCALE};
use crate::matproof::linalg::{ad_matrix, apply_hyper_matrix, c, commutator, expm, left_mul_matrix, poly_eval, CMat};
use crate::matproof::oracles::{
    eval_poly, eval_series, frechet_oracle_dirs, frechet_oracle_n, gateaux_oracle, integral_rep_eval,
};
use crate::ncpoly::{NcPoly, Symbol};
use crate::qderiv::{multivariate_taylor, nth_differential, taylor, Shift};
use crate::series::ScalarSeries;
use crate::Rational;

const fn numeric(
    name: &'static str,
    tolerance: Tolerance,
    check: fn(&Trial) -> Result<Vec<Comparison>>,
    summary: &'static str,
) -> Identity {
    Identity { name, group: Group::Numeric, tolerance, body: Body::Numeric(check), summary }
}

pub(super) static IDENTITIES: &[Identity] = &[
    numeric(
        "derivative_invariance",
        Tolerance::Exact,
        derivative_invariance,
        "block oracle = integral representation = commutator realization",
    ),
    numeric("formulaA", Tolerance::Exact, formula_a, "Q f(A) = f(L_A - ad_A) Q on vectorized operands"),
    numeric("lemma2", Tolerance::Exact, lemma2, "[f(A), Q] = (f(L_A) - f(L_A - ad_A)) Q on vectorized operands"),
    numeric(
        "theorem4",
        Tolerance::ExactTightAtTwo(1e-12),
        theorem4,
        "simplex integral representation = block Frechet oracle",
    ),
    numeric("taylor_matrix", Tolerance::Exact, taylor_matrix, "sum_n x^n δ_{A->B}^n f(A) = f(A + x B) on matrices"),
    numeric(
        "multivariate_taylor",
        Tolerance::Exact,
        multivariate_taylor_matrix,
        "two-variable ordered expansion = shifted evaluation",
    ),
    numeric("commutative_limit", Tolerance::Exact, commutative_limit, "δ_{A->B} f(A) = f'(A) B for commuting A, B"),
    numeric(
        "auxiliary_exponential",
        Tolerance::Fixed(1e-9),
        auxiliary_exponential,
        "exp(sum x_j ad_{H_j}) f({A_j}) = f({A_j + x_j dA_j})",
    ),
    numeric(
        "parameter_chain_rule",
        Tolerance::FiniteDifference,
        parameter_chain_rule,
        "d/dt f(A_0 + t A_1) = (df/dA) : A_1",
    ),
    numeric(
        "block_vs_finite_difference",
        Tolerance::Fixed(1e-8),
        block_vs_finite_difference,
        "block oracle vs central difference, h = 1e-5",
    ),
];

/// Monomials `x^0..x^6` and a dense degree-6 polynomial.
fn functions() -> Vec<ScalarSeries> {
    let mut out: Vec<ScalarSeries> = (0..=6).map(ScalarSeries::monomial).collect();
    out.push(ScalarSeries::from_integers(&[1, -2, 3, 1, -1, 2, 1]));
    out
}

fn get<'a>(m: &'a MatrixAssignment, name: &str) -> Result<&'a CMat> {
    m.get(name)
}

fn exact_zero(m: &CMat) -> Comparison {
    Comparison::Residual(if m.iter().all(|z| z.re == 0.0 && z.im == 0.0) { 0.0 } else { 1.0 })
}

fn derivative_invariance(trial: &Trial) -> Result<Vec<Comparison>> {
    let mut out = Vec::new();
    for kind in FixtureKind::ALL {
        let fx = trial.fixture(kind, DEFAULT_SCALE)?;
        let (a, e) = (get(&fx, "A")?, get(&fx, "dA")?);
        for m in 1..=6 {
            let f = ScalarSeries::monomial(m);
            let rep = integral_rep_eval(&f, 1, a, std::slice::from_ref(e));
            out.push(Comparison::Pair(gateaux_oracle(&f, a, e), rep.clone()));
            let aux = match kind {
                FixtureKind::AuxiliaryPair => Some(("H", "A")),
                FixtureKind::MultivariateAuxiliary => Some(("HA", "A")),
                _ => None,
            };
            if let Some((h, x)) = aux {
                let (h, x) = (get(&fx, h)?, get(&fx, x)?);
                out.push(Comparison::Pair(commutator(h, &eval_series(&f, x)), rep));
            }
        }
        if kind == FixtureKind::AuxiliaryPair {
            let h = get(&fx, "H")?;
            out.push(exact_zero(&commutator(h, &commutator(h, a))));
        }
        if kind == FixtureKind::MultivariateAuxiliary {
            let (b, hb, db) = (get(&fx, "B")?, get(&fx, "HB")?, get(&fx, "dB")?);
            for m in 1..=6 {
                let f = ScalarSeries::monomial(m);
                let rep = integral_rep_eval(&f, 1, b, std::slice::from_ref(db));
                out.push(Comparison::Pair(commutator(hb, &eval_series(&f, b)), rep));
            }
        }
    }
    Ok(out)
}

fn formula_a(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, q) = (get(&fx, "A")?, get(&fx, "Q")?);
    let right = left_mul_matrix(a) - ad_matrix(a);
    Ok(functions()
        .iter()
        .map(|f| {
            let via = apply_hyper_matrix(&poly_eval(&f.to_complex(), &right), q);
            Comparison::Pair(via, q * eval_series(f, a))
        })
        .collect())
}

fn lemma2(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, q) = (get(&fx, "A")?, get(&fx, "Q")?);
    let left = left_mul_matrix(a);
    let shifted = &left - ad_matrix(a);
    Ok(functions()
        .iter()
        .map(|f| {
            let cs = f.to_complex();
            let hyper = poly_eval(&cs, &left) - poly_eval(&cs, &shifted);
            let fa = eval_series(f, a);
            Comparison::Pair(apply_hyper_matrix(&hyper, q), commutator(&fa, q))
        })
        .collect())
}

fn theorem4(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, e) = (get(&fx, "A")?, get(&fx, "dA")?);
    let dirs = [get(&fx, "B")?.clone(), get(&fx, "C")?.clone(), get(&fx, "Q")?.clone()];
    let mut out = Vec::new();
    for f in functions() {
        for n in 1..=3 {
            let same = vec![e.clone(); n];
            let oracle = frechet_oracle_n(&f, a, e, n);
            out.push(Comparison::Pair(integral_rep_eval(&f, n, a, &same), oracle.clone()));
            let symbolic = nth_differential(&f, n, &Symbol::new("A"), &Symbol::new("dA"));
            out.push(Comparison::Pair(eval_poly(&symbolic, &fx)?, oracle));
            out.push(Comparison::Pair(integral_rep_eval(&f, n, a, &dirs[..n]), frechet_oracle_dirs(&f, a, &dirs[..n])));
        }
    }
    Ok(out)
}

fn with_shifted(fx: &MatrixAssignment, shifts: &[(&str, &str, f64)]) -> Result<MatrixAssignment> {
    let mut out = fx.clone();
    for (var, dir, x) in shifts {
        let moved = get(fx, var)? + get(fx, dir)? * c(*x);
        out.insert(*var, moved);
    }
    Ok(out)
}

fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

fn taylor_matrix(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a, b) = (Symbol::new("A"), Symbol::new("B"));
    let mut out = Vec::new();
    for f in functions() {
        let coeffs = taylor(&f, &a, &b, f.degree().unwrap_or(0))?;
        let evaluated: Vec<CMat> = coeffs.iter().map(|p| eval_poly(p, &fx)).collect::<Result<_>>()?;
        for x in [Rational::new(1.into(), 2.into()), Rational::from_integer(1.into())] {
            let xf = to_f64(&x);
            let mut sum = CMat::zeros(fx.dim, fx.dim);
            for (k, m) in evaluated.iter().enumerate() {
                sum += m * c(xf.powi(k as i32));
            }
            let direct = eval_series(&f, &(get(&fx, "A")? + get(&fx, "B")? * c(xf)));
            out.push(Comparison::Pair(sum, direct));
        }
    }
    Ok(out)
}

fn multivariate_taylor_matrix(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let mut rng = trial.rng();
    let shifts = [Shift::new("A", NcPoly::symbol("dA"), "x"), Shift::new("B", NcPoly::symbol("dB"), "y")];
    let mut out = Vec::new();
    for _ in 0..3 {
        let p = random_poly(&mut rng, &["A", "B"], 4, 6);
        let expansion = multivariate_taylor(&p, &shifts, 4);
        for (x, y) in [(1, 2), (-1, 1), (2, -3)] {
            let (xr, yr) = (Rational::new(x.into(), 2.into()), Rational::new(y.into(), 4.into()));
            let lhs = eval_poly(&expansion.evaluate(&[xr.clone(), yr.clone()]), &fx)?;
            let moved = with_shifted(&fx, &[("A", "dA", to_f64(&xr)), ("B", "dB", to_f64(&yr))])?;
            out.push(Comparison::Pair(lhs, eval_poly(&p, &moved)?));
        }
    }
    Ok(out)
}

fn commutative_limit(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Commuting, DEFAULT_SCALE)?;
    let (a, b) = (Symbol::new("A"), Symbol::new("B"));
    let mut out = Vec::new();
    for f in functions() {
        let shifted = delta_arrow(&a, &b, &f.eval_poly(&NcPoly::symbol(a.clone())))?;
        let want = eval_series(&f.derivative(), get(&fx, "A")?) * get(&fx, "B")?;
        out.push(Comparison::Pair(eval_poly(&shifted, &fx)?, want));
    }
    Ok(out)
}

fn auxiliary_exponential(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::MultivariateAuxiliary, DEFAULT_SCALE)?;
    let mut rng = trial.rng();
    let (ha, hb) = (get(&fx, "HA")?, get(&fx, "HB")?);
    let mut out = Vec::new();
    for _ in 0..3 {
        let x1 = rng.random_range(-1.0..1.0);
        let x2 = rng.random_range(-1.0..1.0);
        let h = ha * c(x1) + hb * c(x2);
        let (g, g_inv) = (expm(&h), expm(&(&h * c(-1.0))));
        let moved = with_shifted(&fx, &[("A", "dA", x1), ("B", "dB", x2)])?;
        out.push(Comparison::Pair(&g * get(&fx, "A")? * &g_inv, get(&moved, "A")?.clone()));
        out.push(Comparison::Pair(&g * get(&fx, "B")? * &g_inv, get(&moved, "B")?.clone()));
        let p = random_poly(&mut rng, &["A", "B"], 4, 6);
        out.push(Comparison::Pair(&g * eval_poly(&p, &fx)? * &g_inv, eval_poly(&p, &moved)?));
    }
    Ok(out)
}

fn central_difference(f: &ScalarSeries, a: &CMat, e: &CMat, h: f64) -> CMat {
    (eval_series(f, &(a + e * c(h))) - eval_series(f, &(a - e * c(h)))) / c(2.0 * h)
}

fn parameter_chain_rule(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let (a0, a1) = (get(&fx, "A")?, get(&fx, "E")?);
    Ok(functions()
        .iter()
        .map(|f| {
            let rep = integral_rep_eval(f, 1, a0, std::slice::from_ref(a1));
            Comparison::Pair(central_difference(f, a0, a1, 1e-5), rep)
        })
        .collect())
}

fn block_vs_finite_difference(trial: &Trial) -> Result<Vec<Comparison>> {
    let fx = trial.fixture(FixtureKind::Random, DEFAULT_SCALE)?;
    let mut rng = trial.rng();
    let (a, e) = (get(&fx, "A")?, get(&fx, "E")?);
    let mut out = Vec::new();
    for _ in 0..3 {
        let coeffs: Vec<i64> = (0..=5).map(|_| rng.random_range(-3..=3)).collect();
        let f = ScalarSeries::from_integers(&coeffs);
        out.push(Comparison::Pair(central_difference(&f, a, e, 1e-5), gateaux_oracle(&f, a, e)));
    }
    Ok(out)
}
