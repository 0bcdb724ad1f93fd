//! Dense complex linear algebra used by the numerical oracle.
//!
//! Vectorization stacks columns, so `vec(A Q) = (I ⊗ A) vec(Q)` and
//! `vec(Q A) = (Aᵀ ⊗ I) vec(Q)`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Column-stacking vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`] for a `d x d` matrix.
pub fn unvec(v: &CVec, d: usize) -> CMat {
    assert_eq!(v.len(), d * d);
    CMat::from_column_slice(d, d, v.as_slice())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `I ⊗ A`: left multiplication by `A` on vectorized operands.
pub fn left_mul_matrix(a: &CMat) -> CMat {
    kron(&identity(a.nrows()), a)
}

/// `Aᵀ ⊗ I`: right multiplication by `A` on vectorized operands.
pub fn right_mul_matrix(a: &CMat) -> CMat {
    kron(&a.transpose(), &identity(a.nrows()))
}

/// Matrix of `Q -> A Q - Q A` on column-stacked operands: `I ⊗ A - Aᵀ ⊗ I`.
pub fn ad_matrix(a: &CMat) -> CMat {
    left_mul_matrix(a) - right_mul_matrix(a)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Applies a `d² x d²` hyperoperator matrix to a `d x d` operand.
pub fn apply_hyper_matrix(m: &CMat, x: &CMat) -> CMat {
    unvec(&(m * vec_of(x)), x.nrows())
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().fold(0.0, |acc: f64, s| acc.max(*s))
}

/// `‖L - R‖_F / (1 + ‖R‖_F)`.
pub fn relative_residual(l: &CMat, r: &CMat) -> f64 {
    frobenius(&(l - r)) / (1.0 + frobenius(r))
}

/// `sum_k coeffs[k] M^k` by Horner's rule.
pub fn poly_eval(coeffs: &[Complex64], m: &CMat) -> CMat {
    let n = m.nrows();
    let mut acc = CMat::zeros(n, n);
    for ck in coeffs.iter().rev() {
        acc = &acc * m;
        for i in 0..n {
            acc[(i, i)] += ck;
        }
    }
    acc
}

/// Padé scaling-and-squaring exponential.
pub fn expm(m: &CMat) -> CMat {
    m.exp()
}

/// Complex Schur form `M = Q T Q*` with `T` upper triangular.
pub fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    // Deflation at machine epsilon can stall on clustered spectra; relax
    // the criterion gradually before giving up.
    let decomposition = [1.0, 4.0, 16.0, 64.0]
        .iter()
        .find_map(|k| Schur::try_new(m.clone(), k * f64::EPSILON, 100_000))
        .ok_or_else(|| Error::SpectrumOutOfDomain {
            function: "schur".into(),
            detail: "Schur iteration did not converge".into(),
        })?;
    let (q, mut t) = decomposition.unpack();
    for j in 0..t.ncols() {
        for i in j + 1..t.nrows() {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Principal square root of an upper-triangular matrix.
fn sqrtm_upper(t: &CMat) -> CMat {
    let n = t.nrows();
    let mut r = CMat::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// Solves `U X = B` for upper-triangular `U`.
fn solve_upper(u: &CMat, b: &CMat) -> CMat {
    u.solve_upper_triangular(b).expect("nonsingular triangular factor")
}

/// Principal logarithm by inverse scaling and squaring on the Schur form.
///
/// Fails when an eigenvalue lies on the closed negative real axis.
pub fn logm(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let (q, mut t) = schur(m)?;
    let scale = t.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())).max(1.0);
    for i in 0..n {
        let z = t[(i, i)];
        if z.norm() <= 1e-14 * scale || (z.re <= 0.0 && z.im.abs() <= 1e-14 * scale) {
            return Err(Error::SpectrumOutOfDomain {
                function: "log".into(),
                detail: format!("eigenvalue {z} on the branch cut"),
            });
        }
    }
    let eye = identity(n);
    let mut squarings = 0;
    while frobenius(&(&t - &eye)) > 0.25 {
        if squarings == 64 {
            return Err(Error::SpectrumOutOfDomain {
                function: "log".into(),
                detail: "square roots did not approach the identity".into(),
            });
        }
        t = sqrtm_upper(&t);
        squarings += 1;
    }
    // log T = 2 artanh(Z), Z = (T + I)^{-1} (T - I); ‖Z‖ stays below 0.15.
    let z = solve_upper(&(&t + &eye), &(&t - &eye));
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut acc = z.clone();
    let mut k = 1.0;
    loop {
        power = &power * &z2;
        k += 2.0;
        let term = &power / c(k);
        acc += &term;
        if frobenius(&term) <= 1e-18 * frobenius(&acc).max(1e-300) || k > 199.0 {
            break;
        }
    }
    let log_t = acc * c(2.0 * f64::powi(2.0, squarings));
    Ok(&q * log_t * q.adjoint())
}

/// Eigendecomposition `M = V diag(λ) V⁻¹` from the Schur form, with
/// unit-norm eigenvector columns.
pub struct Eigen {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
    pub inverse: CMat,
    pub condition: f64,
}

/// Eigenvectors by back substitution on the Schur factor. Near-equal
/// eigenvalue denominators are clamped to a small floor. Returns `None` when
/// the computed vectors are singular or fail the residual check.
pub fn eigen(m: &CMat) -> Result<Option<Eigen>> {
    let n = m.nrows();
    let (q, t) = schur(m)?;
    let norm = frobenius(&t).max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * norm;
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = c(1.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                s += t[(j, l)] * y[(l, k)];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < floor {
                den = c(floor);
            }
            y[(j, k)] = -s / den;
        }
    }
    let mut v = &q * y;
    for k in 0..n {
        let col_norm = v.column(k).norm();
        if col_norm == 0.0 || !col_norm.is_finite() {
            return Ok(None);
        }
        v.column_mut(k).unscale_mut(col_norm);
    }
    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let lambda = CMat::from_diagonal(&CVec::from_vec(values.clone()));
    let residual = frobenius(&(m * &v - &v * &lambda));
    if residual > 1e-11 * norm * (n as f64).sqrt() {
        return Ok(None);
    }
    let sv = v.clone().svd(false, false).singular_values;
    let smax = sv.iter().fold(0.0_f64, |a, s| a.max(*s));
    let smin = sv.iter().fold(f64::INFINITY, |a, s| a.min(*s));
    if smin == 0.0 {
        return Ok(None);
    }
    let Some(inverse) = v.clone().try_inverse() else {
        return Ok(None);
    };
    Ok(Some(Eigen { values, vectors: v, inverse, condition: smax / smin }))
}
