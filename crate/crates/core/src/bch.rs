//! Exponential-product formulas evaluated by quadrature.
//!
//! All integrands are functions of `E(t) = Ad(G(t))`, `Ad(G) X = G X G⁻¹`.
//! They are applied through the eigendecomposition of the `d x d` factor
//! `G(t)`, with the `d² x d²` matrix `(G⁻¹)ᵀ ⊗ G` as the fallback.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matproof::funcs::{hyper_func_apply, matrix_function, MatrixFunction, EIGEN_CONDITION_LIMIT};
use crate::matproof::linalg::{ad_matrix, apply_hyper_matrix, c, eigen, expm, identity, kron, relative_residual, CMat};
use crate::ncpoly::NcPoly;
use crate::Rational;

pub const DEFAULT_NODES: usize = 32;

/// Largest order accepted by [`bch_series_symmetric`].
pub const MAX_SERIES_ORDER: usize = 6;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Nodes are the roots of `P_n`, found by Newton iteration from the
    /// Chebyshev guesses and polished to machine precision.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] to [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    /// Integrates a matrix-valued function. Nodes run in parallel; the
    /// weighted sum is taken in node order.
    pub fn integrate_matrix(&self, f: impl Fn(f64) -> Result<CMat> + Sync) -> Result<CMat> {
        let values: Vec<CMat> = self.nodes.par_iter().map(|t| f(*t)).collect::<Result<_>>()?;
        let mut acc = values[0].clone() * c(self.weights[0]);
        for (v, w) in values.iter().zip(&self.weights).skip(1) {
            acc += v * c(*w);
        }
        Ok(acc)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `Δ(A) X = ((e^{δ_A} - 1) / δ_A) X`.
pub fn delta_cap(a: &CMat, x: &CMat) -> Result<CMat> {
    hyper_func_apply(&MatrixFunction::Phi1, &ad_matrix(a), x)
}

/// `d² x d²` matrix of `Q -> G Q G⁻¹`.
fn conjugation_matrix(g: &CMat, g_inv: &CMat) -> CMat {
    kron(&g_inv.transpose(), g)
}

/// `g(Ad_G) X` with `Ad_G X = G X G⁻¹`.
///
/// With `G = V Λ V⁻¹` the conjugation scales entry `(i, j)` of `V⁻¹ X V` by
/// `λ_i / λ_j`, so `g` is applied entrywise in `O(d³)`. Falls back to the
/// `d² x d²` matrix function when `G` is not safely diagonalizable.
fn conjugation_apply(f: &MatrixFunction, group: &(CMat, CMat), x: &CMat) -> Result<CMat> {
    let (g, g_inv) = group;
    if let Some(e) = eigen(g)?.filter(|e| e.condition <= EIGEN_CONDITION_LIMIT) {
        let mut y = &e.inverse * x * &e.vectors;
        for j in 0..y.ncols() {
            for i in 0..y.nrows() {
                y[(i, j)] *= f.scalar(e.values[i] / e.values[j])?;
            }
        }
        return Ok(&e.vectors * y * &e.inverse);
    }
    let (m, _) = matrix_function(f, &conjugation_matrix(g, g_inv))?;
    Ok(apply_hyper_matrix(&m, x))
}

/// `G(t) = e^{t A_1} M e^{t A_r}` for the inner group element `middle`,
/// with its inverse. `E(t) = Ad(G(t))`.
fn sandwich(first: &CMat, middle: &(CMat, CMat), last: &CMat, t: f64) -> (CMat, CMat) {
    let g = expm(&(first * c(t))) * &middle.0 * expm(&(last * c(t)));
    let g_inv = expm(&(last * c(-t))) * &middle.1 * expm(&(first * c(-t)));
    (g, g_inv)
}

fn group_element(factors: &[CMat]) -> (CMat, CMat) {
    let d = factors.first().map_or(0, |m| m.nrows());
    let mut g = identity(d);
    let mut g_inv = identity(d);
    for f in factors {
        g *= expm(f);
        g_inv = expm(&(f * c(-1.0))) * g_inv;
    }
    (g, g_inv)
}

fn check_square(ms: &[&CMat]) -> Result<usize> {
    let d = ms[0].nrows();
    for m in ms {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::InvalidArgument("matrices must be square and of equal size".into()));
        }
    }
    Ok(d)
}

/// `log(e^A e^B e^A) = ∫_0^1 g₂(E(t)) A dt + B` with
/// `E(t) = e^{t δ_A} e^{δ_B} e^{t δ_A}`.
pub fn bch_symmetric(a: &CMat, b: &CMat, quad: &QuadratureRule) -> Result<CMat> {
    check_square(&[a, b])?;
    let middle = (expm(b), expm(&(b * c(-1.0))));
    let integral = quad.integrate_matrix(|t| conjugation_apply(&MatrixFunction::G2, &sandwich(a, &middle, a, t), a))?;
    Ok(integral + b)
}

/// `log(e^{A_1} ... e^{A_r})` by the recursion
/// `Φ_{1,r} = ∫_0^1 g₁(E_r(t)) (A_1 + E_r(t) A_r) dt + Φ_{2,r-1}`.
///
/// `r = 1` returns `A_1`; the empty product gives zero.
pub fn bch_product(factors: &[CMat], quad: &QuadratureRule) -> Result<CMat> {
    match factors.len() {
        0 => Err(Error::InvalidArgument("bch_product needs at least one factor".into())),
        1 => Ok(factors[0].clone()),
        r => {
            let refs: Vec<&CMat> = factors.iter().collect();
            let d = check_square(&refs)?;
            let (first, last) = (&factors[0], &factors[r - 1]);
            let inner = &factors[1..r - 1];
            let middle = if inner.is_empty() { (identity(d), identity(d)) } else { group_element(inner) };
            let integral = quad.integrate_matrix(|t| {
                let group = sandwich(first, &middle, last, t);
                let rhs = first + &group.0 * last * &group.1;
                conjugation_apply(&MatrixFunction::G1, &group, &rhs)
            })?;
            let rest = if inner.is_empty() { CMat::zeros(d, d) } else { bch_product(inner, quad)? };
            Ok(integral + rest)
        }
    }
}

/// Runs `eval` with `n` and `2n` nodes and fails when the results differ by
/// more than `tol / 10` in relative residual. Returns the `2n`-node value.
pub fn with_doubling(nodes: usize, tol: f64, eval: impl Fn(&QuadratureRule) -> Result<CMat>) -> Result<CMat> {
    let coarse = eval(&QuadratureRule::gauss_legendre(nodes)?)?;
    let fine = eval(&QuadratureRule::gauss_legendre(2 * nodes)?)?;
    let change = relative_residual(&coarse, &fine);
    if change.is_nan() || change > tol / 10.0 {
        return Err(Error::QuadratureNotConverged { change });
    }
    Ok(fine)
}

/// [`bch_symmetric`] with a node-doubling convergence check.
pub fn bch_symmetric_checked(a: &CMat, b: &CMat, nodes: usize, tol: f64) -> Result<CMat> {
    with_doubling(nodes, tol, |q| bch_symmetric(a, b, q))
}

/// [`bch_product`] with a node-doubling convergence check.
pub fn bch_product_checked(factors: &[CMat], nodes: usize, tol: f64) -> Result<CMat> {
    with_doubling(nodes, tol, |q| bch_product(factors, q))
}

/// Free-algebra `exp(x)` truncated at total degree `order`.
pub fn exp_truncated(x: &NcPoly, order: usize) -> NcPoly {
    let mut acc = NcPoly::one();
    let mut term = NcPoly::one();
    for k in 1..=order {
        term = term.mul_truncated(x, order).scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        acc += &term;
    }
    acc
}

/// Free-algebra `log(1 + y)` for `y` without constant term, truncated at
/// total degree `order`.
pub fn log1p_truncated(y: &NcPoly, order: usize) -> NcPoly {
    let mut acc = NcPoly::zero();
    let mut power = NcPoly::one();
    for k in 1..=order {
        power = power.mul_truncated(y, order);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc += &power.scale(&Rational::new(sign.into(), (k as i64).into()));
    }
    acc
}

/// `log(e^A e^B e^A)` in the free algebra over `A, B`, truncated at total
/// degree `order ≤ 6`.
pub fn bch_series_symmetric(order: usize) -> Result<NcPoly> {
    if order > MAX_SERIES_ORDER {
        return Err(Error::TruncationExceeded { degree: order, truncation: MAX_SERIES_ORDER });
    }
    let ea = exp_truncated(&NcPoly::symbol("A"), order);
    let eb = exp_truncated(&NcPoly::symbol("B"), order);
    let product = ea.mul_truncated(&eb, order).mul_truncated(&ea, order);
    Ok(log1p_truncated(&(&product - &NcPoly::one()), order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matproof::linalg::logm;
    use crate::ncpoly::parse;
    use num_complex::Complex64;

    fn sample(d: usize, norm: f64, salt: usize) -> CMat {
        let m = CMat::from_fn(d, d, |i, j| {
            let x = ((i * 7 + j * 3 + salt) as f64).sin();
            let y = ((i * 5 + j * 11 + 3 * salt) as f64).cos();
            Complex64::new(x, y)
        });
        let s = crate::matproof::linalg::spectral_norm(&m);
        m * c(norm / s)
    }

    #[test]
    fn conjugation_fast_path_matches_kronecker_form() {
        let (a, b, x) = (sample(4, 0.4, 1), sample(4, 0.3, 2), sample(4, 1.0, 3));
        let group = sandwich(&a, &(expm(&b), expm(&(&b * c(-1.0)))), &a, 0.7);
        for f in [MatrixFunction::G1, MatrixFunction::G2] {
            let fast = conjugation_apply(&f, &group, &x).unwrap();
            let (m, _) = matrix_function(&f, &conjugation_matrix(&group.0, &group.1)).unwrap();
            assert!(relative_residual(&fast, &apply_hyper_matrix(&m, &x)) < 1e-12);
        }
    }

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        for n in [1, 2, 5, 32, 64] {
            let q = QuadratureRule::gauss_legendre(n).unwrap();
            assert!((q.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for k in 0..2 * n {
                let exact = 1.0 / (k as f64 + 1.0);
                let got = q.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-14, "n {n} k {k}: {got} vs {exact}");
            }
            let deg = 2 * n;
            let got = q.integrate(|x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() > 1e-18);
        }
    }

    #[test]
    fn delta_cap_examples() {
        let a = sample(3, 0.4, 1);
        let x = sample(3, 0.7, 2);
        let zero = CMat::zeros(3, 3);
        assert!(relative_residual(&delta_cap(&zero, &x).unwrap(), &x) < 1e-16);
        let commuting = &a * &a;
        assert!(relative_residual(&delta_cap(&a, &commuting).unwrap(), &commuting) < 1e-13);
    }

    #[test]
    fn symmetric_examples() {
        let q = QuadratureRule::gauss_legendre(DEFAULT_NODES).unwrap();
        let a = sample(3, 0.3, 4);
        let b = sample(3, 0.3, 5);
        let zero = CMat::zeros(3, 3);
        let twice = bch_symmetric(&a, &zero, &q).unwrap();
        assert!(relative_residual(&twice, &(&a * c(2.0))) < 1e-13);
        let poly_b = &a * &a * c(0.5) + &a * c(-0.3);
        let comm = bch_symmetric(&a, &poly_b, &q).unwrap();
        assert!(relative_residual(&comm, &(&a * c(2.0) + &poly_b)) < 1e-13);
        let direct = logm(&(expm(&a) * expm(&b) * expm(&a))).unwrap();
        assert!(relative_residual(&bch_symmetric(&a, &b, &q).unwrap(), &direct) < 1e-8);
    }

    #[test]
    fn product_examples() {
        let q = QuadratureRule::gauss_legendre(DEFAULT_NODES).unwrap();
        let a1 = sample(3, 0.25, 6);
        let a2 = sample(3, 0.25, 7);
        let pair = bch_product(&[a1.clone(), a2.clone()], &q).unwrap();
        let direct = logm(&(expm(&a1) * expm(&a2))).unwrap();
        assert!(relative_residual(&pair, &direct) < 1e-8);
        let triple = bch_product(&[a1.clone(), a2.clone(), a1.clone()], &q).unwrap();
        let sym = bch_symmetric(&a1, &a2, &q).unwrap();
        assert!(relative_residual(&triple, &sym) < 1e-8);
        let d = CMat::from_diagonal(&crate::matproof::linalg::CVec::from_vec(vec![c(0.1), c(-0.2), c(0.05)]));
        let e = &d * &d;
        let sum = bch_product(&[d.clone(), e.clone(), d.clone()], &q).unwrap();
        assert!(relative_residual(&sum, &(&d * c(2.0) + &e)) < 1e-13);
    }

    #[test]
    fn doubling_detects_too_few_nodes() {
        let a = sample(3, 0.3, 8);
        let b = sample(3, 0.3, 9);
        assert!(bch_symmetric_checked(&a, &b, 32, 1e-8).is_ok());
        assert!(matches!(bch_symmetric_checked(&a, &b, 1, 1e-8), Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn series_low_orders() {
        assert_eq!(bch_series_symmetric(1).unwrap(), parse("2*A + B").unwrap());
        assert_eq!(bch_series_symmetric(2).unwrap(), parse("2*A + B").unwrap());
        let s6 = bch_series_symmetric(6).unwrap();
        for deg in [2, 4, 6] {
            assert!(s6.homogeneous_part(deg).is_zero(), "degree {deg}");
        }
        assert!(!s6.homogeneous_part(3).is_zero());
        assert!(bch_series_symmetric(7).is_err());
    }
}
