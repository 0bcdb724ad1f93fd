//! Registry of verifiable identities.
//!
//! Symbolic entries are exact and run once. Numeric entries build fresh
//! fixtures per trial and return the comparisons whose worst relative
//! residual becomes the trial residual.

mod exponential;
mod numeric;
mod symbolic;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixtures::{make_fixture, trial_seed, FixtureKind, MatrixAssignment};
use super::linalg::CMat;
use crate::error::{Error, Result};
use crate::ncpoly::{NcPoly, Symbol, Word};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// Exact rational equality; residual is 0 or 1.
    Symbolic,
    /// Configured exact-identity tolerance.
    Exact,
    /// Exact tolerance, tightened to the given value at `d = 2`.
    ExactTightAtTwo(f64),
    /// Configured finite-difference tolerance.
    FiniteDifference,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Symbolic,
    Numeric,
    Exponential,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Symbolic => "symbolic",
            Group::Numeric => "numeric",
            Group::Exponential => "exponential",
        }
    }
}

/// One side-by-side comparison produced by a numeric trial.
#[derive(Clone, Debug)]
pub enum Comparison {
    /// `(lhs, rhs)`, scored by `‖L - R‖_F / (1 + ‖R‖_F)`.
    Pair(CMat, CMat),
    /// A precomputed nonnegative residual.
    Residual(f64),
}

#[derive(Clone, Copy)]
pub enum Body {
    /// Receives the suite seed for any randomized inputs.
    Symbolic(fn(u64) -> Result<bool>),
    Numeric(fn(&Trial) -> Result<Vec<Comparison>>),
}

#[derive(Clone, Copy)]
pub struct Identity {
    pub name: &'static str,
    pub group: Group,
    pub tolerance: Tolerance,
    pub body: Body,
    pub summary: &'static str,
}

/// Context of one numeric trial.
#[derive(Clone, Debug)]
pub struct Trial {
    pub dim: usize,
    pub index: usize,
    /// Per-trial seed derived from the suite seed, identity name and dimension.
    pub seed: u64,
}

impl Trial {
    pub fn new(identity: &str, seed: u64, dim: usize, index: usize) -> Self {
        Trial { dim, index, seed: trial_seed(seed, identity, dim, index) }
    }

    pub fn fixture(&self, kind: FixtureKind, scale: f64) -> Result<MatrixAssignment> {
        make_fixture(kind, self.dim, self.seed ^ (kind as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15), scale)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed)
    }
}

/// Every registered identity, in report order.
pub fn all() -> Vec<&'static Identity> {
    symbolic::IDENTITIES.iter().chain(numeric::IDENTITIES).chain(exponential::IDENTITIES).collect()
}

pub fn find(name: &str) -> Option<&'static Identity> {
    all().into_iter().find(|i| i.name == name)
}

/// Resolves `all`, a group name or a single identity name.
pub fn select(suite: &str) -> Result<Vec<&'static Identity>> {
    if suite == "all" {
        return Ok(all());
    }
    let group: Vec<_> = all().into_iter().filter(|i| i.group.name() == suite).collect();
    if !group.is_empty() {
        return Ok(group);
    }
    find(suite).map(|i| vec![i]).ok_or_else(|| Error::UnknownIdentity(suite.to_string()))
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Random polynomial over `letters` with `terms` words of length at most
/// `max_degree` and small rational coefficients.
pub(crate) fn random_poly(rng: &mut ChaCha8Rng, letters: &[&str], max_degree: usize, terms: usize) -> NcPoly {
    let mut out = NcPoly::zero();
    for _ in 0..terms {
        let len = rng.random_range(0..=max_degree);
        let word: Vec<Symbol> = (0..len).map(|_| Symbol::new(letters[rng.random_range(0..letters.len())])).collect();
        let num = rng.random_range(-4i64..=4);
        let den = rng.random_range(1i64..=3);
        if num != 0 {
            out.add_term(Word::new(word), Rational::new(num.into(), den.into()));
        }
    }
    out
}
