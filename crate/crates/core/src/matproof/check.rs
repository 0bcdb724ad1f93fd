//! Identity-check runner and reports.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::{self, Body, Comparison, Identity, Tolerance, Trial};
use super::linalg::{c, relative_residual};
use crate::error::{Error, Result};

/// Version tag written into every report.
pub const SCHEMA: &str = "hyperderiv/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub identity: String,
    pub trials: usize,
    /// Matrix dimension; 0 for exact symbolic checks.
    pub dim: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub runtime_ms: u64,
}

/// Run parameters shared by every identity of a suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    /// Overrides every catalog tolerance when set.
    pub tol: Option<f64>,
    pub tol_exact: f64,
    pub tol_fd: f64,
    /// Scales each right-hand side by `1 + ε`; a detector sanity control.
    pub perturbation: Option<f64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { trials: 20, seed: 42, tol: None, tol_exact: 1e-10, tol_fd: 1e-7, perturbation: None }
    }
}

impl CheckOptions {
    fn tolerance(&self, class: Tolerance, dim: usize) -> f64 {
        if let Some(t) = self.tol {
            return t;
        }
        match class {
            Tolerance::Symbolic => 0.0,
            Tolerance::Exact => self.tol_exact,
            Tolerance::ExactTightAtTwo(tight) if dim == 2 => self.tol_exact.min(tight),
            Tolerance::ExactTightAtTwo(_) => self.tol_exact,
            Tolerance::FiniteDifference => self.tol_fd,
            Tolerance::Fixed(t) => t,
        }
    }
}

fn residual_of(cmp: &Comparison, perturbation: Option<f64>) -> f64 {
    match cmp {
        Comparison::Pair(l, r) => match perturbation {
            Some(eps) => relative_residual(l, &(r * c(1.0 + eps))),
            None => relative_residual(l, r),
        },
        Comparison::Residual(x) => *x,
    }
}

/// Runs one registered identity. Symbolic identities run once with
/// `dim = 0`; numeric ones run `opts.trials` seeded trials at `dim`.
pub fn check_identity(name: &str, dim: usize, opts: &CheckOptions) -> Result<CheckReport> {
    let identity = catalog::find(name).ok_or_else(|| Error::UnknownIdentity(name.to_string()))?;
    run_identity(identity, dim, opts)
}

pub(crate) fn run_identity(identity: &Identity, dim: usize, opts: &CheckOptions) -> Result<CheckReport> {
    let start = Instant::now();
    let (trials, dim, max_residual) = match identity.body {
        Body::Symbolic(check) => {
            let ok = check(opts.seed)?;
            (1, 0, if ok { 0.0 } else { 1.0 })
        }
        Body::Numeric(check) => {
            let residuals: Vec<f64> = (0..opts.trials)
                .into_par_iter()
                .map(|i| {
                    let trial = Trial::new(identity.name, opts.seed, dim, i);
                    let comparisons = check(&trial)?;
                    Ok(comparisons.iter().map(|cmp| residual_of(cmp, opts.perturbation)).fold(0.0, max_nan))
                })
                .collect::<Result<_>>()?;
            (opts.trials, dim, residuals.into_iter().fold(0.0, max_nan))
        }
    };
    let tol = opts.tolerance(identity.tolerance, dim);
    Ok(CheckReport {
        schema: SCHEMA.to_string(),
        identity: identity.name.to_string(),
        trials,
        dim,
        seed: opts.seed,
        max_residual,
        tol,
        pass: max_residual <= tol,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// Maximum that propagates NaN, so a broken evaluation never passes.
fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Runs a suite over the given dimensions. A suite is `all`, a group name
/// (`symbolic`, `numeric`, `exponential`) or a single identity name.
/// Symbolic identities are reported once regardless of `dims`.
pub fn run_suite(suite: &str, dims: &[usize], opts: &CheckOptions) -> Result<Vec<CheckReport>> {
    let identities = catalog::select(suite)?;
    let mut out = Vec::new();
    for identity in identities {
        match identity.body {
            Body::Symbolic(_) => out.push(run_identity(identity, 0, opts)?),
            Body::Numeric(_) => {
                for &d in dims {
                    out.push(run_identity(identity, d, opts)?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_identity() {
        assert!(matches!(
            check_identity("no_such_identity", 3, &CheckOptions::default()),
            Err(Error::UnknownIdentity(_))
        ));
        assert!(matches!(run_suite("no_such_suite", &[3], &CheckOptions::default()), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn lemma2_passes_and_is_deterministic() {
        let opts = CheckOptions { trials: 10, ..CheckOptions::default() };
        let a = check_identity("lemma2", 3, &opts).unwrap();
        assert!(a.pass, "{a:?}");
        assert!(a.max_residual <= 1e-12, "{a:?}");
        let mut b = check_identity("lemma2", 3, &opts).unwrap();
        b.runtime_ms = a.runtime_ms;
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let opts = CheckOptions { trials: 3, tol: Some(1e-30), ..CheckOptions::default() };
        assert!(!check_identity("lemma2", 3, &opts).unwrap().pass);
    }

    #[test]
    fn perturbation_is_detected() {
        let opts = CheckOptions { trials: 5, perturbation: Some(1e-6), ..CheckOptions::default() };
        let r = check_identity("exp_derivative", 3, &opts).unwrap();
        assert!(!r.pass);
        assert!(r.max_residual > 1e-7 && r.max_residual < 1e-5, "{r:?}");
    }

    #[test]
    fn report_json_fields() {
        let r = CheckReport {
            schema: SCHEMA.into(),
            identity: "lemma2".into(),
            trials: 1,
            dim: 2,
            seed: 42,
            max_residual: 1.25e-17,
            tol: 1e-10,
            pass: true,
            runtime_ms: 3,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"schema":"hyperderiv/1","identity":"lemma2","trials":1,"dim":2,"seed":42,"max_residual":1.25e-17,"tol":1e-10,"pass":true,"runtime_ms":3}"#
        );
        let back: CheckReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
