//! Analytic functions of hyperoperator matrices.

use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use super::linalg::{apply_hyper_matrix, c, eigen, frobenius, identity, logm, poly_eval, CMat, CVec};
use crate::error::{Error, Result};
use crate::series::ScalarSeries;
use crate::Rational;

/// Eigenvector condition number above which the series path is used.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e4;

/// Scalar function applied to a matrix argument.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixFunction {
    /// `sum_k c_k z^k`.
    Polynomial(Vec<Complex64>),
    /// `(e^z - 1) / z`, equal to 1 at `z = 0`.
    Phi1,
    /// `log(z) / (z - 1)`, equal to 1 at `z = 1`.
    G1,
    /// `(z + 1) log(z) / (z - 1)`, equal to 2 at `z = 1`.
    G2,
}

/// Which evaluation route produced a matrix function value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPath {
    Direct,
    Eigen,
    Series,
}

impl MatrixFunction {
    pub fn polynomial(f: &ScalarSeries) -> Self {
        MatrixFunction::Polynomial(f.to_complex())
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatrixFunction::Polynomial(_) => "polynomial",
            MatrixFunction::Phi1 => "phi1",
            MatrixFunction::G1 => "g1",
            MatrixFunction::G2 => "g2",
        }
    }

    /// Scalar value. Near the removable singularity the Taylor series about
    /// it is summed instead of the closed form.
    pub fn scalar(&self, z: Complex64) -> Result<Complex64> {
        match self {
            MatrixFunction::Polynomial(cs) => Ok(cs.iter().rev().fold(Complex64::zero(), |acc, ck| acc * z + ck)),
            MatrixFunction::Phi1 => {
                if z.norm() < 1.0 {
                    let mut term = c(1.0);
                    let mut acc = c(1.0);
                    for k in 2..60 {
                        term = term * z / c(k as f64);
                        acc += term;
                        if term.norm() < 1e-18 {
                            break;
                        }
                    }
                    Ok(acc)
                } else {
                    Ok((z.exp() - 1.0) / z)
                }
            }
            MatrixFunction::G1 => g1_scalar(z),
            MatrixFunction::G2 => Ok((z + 1.0) * g1_scalar(z)?),
        }
    }
}

fn out_of_domain(g: &MatrixFunction, detail: impl Into<String>) -> Error {
    Error::SpectrumOutOfDomain { function: g.name().into(), detail: detail.into() }
}

fn g1_scalar(z: Complex64) -> Result<Complex64> {
    let w = z - 1.0;
    if w.norm() < 0.5 {
        // log(1 + w) / w = sum (-w)^k / (k + 1)
        let mut power = c(1.0);
        let mut acc = c(1.0);
        for k in 1..120 {
            power *= -w;
            let term = power / c((k + 1) as f64);
            acc += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        return Ok(acc);
    }
    if z.norm() == 0.0 || (z.re <= 0.0 && z.im.abs() <= 1e-14 * z.norm()) {
        return Err(out_of_domain(&MatrixFunction::G1, format!("eigenvalue {z} on the branch cut")));
    }
    Ok(z.ln() / w)
}

/// `B_k / k!` for `k = 0..=LIMIT`, with `B_1 = -1/2`.
fn bernoulli_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        const LIMIT: usize = 160;
        let fact: Vec<Rational> = (0..=LIMIT + 1)
            .scan(Rational::one(), |acc, k| {
                if k > 0 {
                    *acc *= Rational::from_integer(k.into());
                }
                Some(acc.clone())
            })
            .collect();
        // sum_{j=0}^{n} b_j / (n + 1 - j)! = 0 for n >= 1
        let mut b: Vec<Rational> = vec![Rational::one()];
        for n in 1..=LIMIT {
            let mut s = Rational::zero();
            for (j, bj) in b.iter().enumerate() {
                s += bj / &fact[n + 1 - j];
            }
            b.push(-s);
        }
        b.iter().map(|r| r.to_f64().unwrap_or(0.0)).collect()
    })
}

/// Sums `sum_k coeffs[k] L^k` until the terms stay negligible.
fn matrix_power_series(coeffs: &[f64], l: &CMat, g: &MatrixFunction) -> Result<CMat> {
    let n = l.nrows();
    let mut power = identity(n);
    let mut acc = identity(n) * c(coeffs[0]);
    let mut quiet = 0;
    for (k, ck) in coeffs.iter().enumerate().skip(1) {
        power = &power * l;
        if *ck == 0.0 {
            continue;
        }
        let term = &power * c(*ck);
        let size = frobenius(&term);
        if !size.is_finite() {
            break;
        }
        acc += &term;
        if size <= 1e-17 * frobenius(&acc).max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
        if k + 1 == coeffs.len() {
            break;
        }
    }
    Err(out_of_domain(g, "power series did not converge"))
}

fn series_path(g: &MatrixFunction, m: &CMat) -> Result<CMat> {
    match g {
        MatrixFunction::Polynomial(cs) => Ok(poly_eval(cs, m)),
        MatrixFunction::Phi1 => {
            let mut coeffs = Vec::with_capacity(400);
            let mut f = 1.0_f64;
            for k in 0..400 {
                f /= (k + 1) as f64;
                coeffs.push(f);
            }
            matrix_power_series(&coeffs, m, g)
        }
        MatrixFunction::G1 | MatrixFunction::G2 => {
            let l = logm(m).map_err(|e| match e {
                Error::SpectrumOutOfDomain { detail, .. } => out_of_domain(g, detail),
                other => other,
            })?;
            let b = bernoulli_over_factorial();
            let coeffs: Vec<f64> = if *g == MatrixFunction::G1 {
                b.to_vec()
            } else {
                b.iter().enumerate().map(|(k, bk)| if k % 2 == 0 { 2.0 * bk } else { 0.0 }).collect()
            };
            matrix_power_series(&coeffs, &l, g)
        }
    }
}

fn eigen_path(g: &MatrixFunction, m: &CMat) -> Result<Option<CMat>> {
    let Some(e) = eigen(m)? else {
        return Ok(None);
    };
    if e.condition > EIGEN_CONDITION_LIMIT {
        return Ok(None);
    }
    let values: Vec<Complex64> = e.values.iter().map(|z| g.scalar(*z)).collect::<Result<_>>()?;
    let diag = CMat::from_diagonal(&CVec::from_vec(values));
    Ok(Some(&e.vectors * diag * &e.inverse))
}

/// `g(M)` with the route taken. Polynomials are evaluated directly.
pub fn matrix_function(g: &MatrixFunction, m: &CMat) -> Result<(CMat, EvalPath)> {
    if let MatrixFunction::Polynomial(cs) = g {
        return Ok((poly_eval(cs, m), EvalPath::Direct));
    }
    if let Some(v) = eigen_path(g, m)? {
        return Ok((v, EvalPath::Eigen));
    }
    Ok((series_path(g, m)?, EvalPath::Series))
}

/// `g(M)` through a forced route; `None` if the eigen route is unusable.
pub fn matrix_function_via(g: &MatrixFunction, m: &CMat, path: EvalPath) -> Result<Option<CMat>> {
    match path {
        EvalPath::Direct => match g {
            MatrixFunction::Polynomial(cs) => Ok(Some(poly_eval(cs, m))),
            _ => Ok(None),
        },
        EvalPath::Eigen => eigen_path(g, m),
        EvalPath::Series => series_path(g, m).map(Some),
    }
}

/// `unvec(g(M) vec(X))`.
pub fn hyper_func_apply(g: &MatrixFunction, m: &CMat, x: &CMat) -> Result<CMat> {
    let (gm, _) = matrix_function(g, m)?;
    Ok(apply_hyper_matrix(&gm, x))
}
