//! Seeded matrix fixtures.
//!
//! Every fixture is generated by ChaCha8 seeded through
//! [`rand_chacha::ChaCha8Rng::seed_from_u64`], so identical `(kind, dim,
//! seed, scale)` give bit-identical matrices on every platform.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::{c, commutator, identity, kron, spectral_norm, CMat, CVec};
use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Default spectral-norm bound for generated matrices.
pub const DEFAULT_SCALE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    /// Independent complex Gaussian matrices.
    Random,
    /// Simultaneously diagonal matrices.
    Commuting,
    /// `A`, `H` with `[H, [H, A]] = 0` exactly; `dA = [H, A]`.
    AuxiliaryPair,
    /// `A, B` with auxiliary `HA, HB` satisfying the two-variable
    /// auxiliary-operator conditions exactly.
    MultivariateAuxiliary,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 4] =
        [FixtureKind::Random, FixtureKind::Commuting, FixtureKind::AuxiliaryPair, FixtureKind::MultivariateAuxiliary];

    pub fn name(self) -> &'static str {
        match self {
            FixtureKind::Random => "random",
            FixtureKind::Commuting => "commuting",
            FixtureKind::AuxiliaryPair => "auxiliary_pair",
            FixtureKind::MultivariateAuxiliary => "multivariate_auxiliary",
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture kind `{s}`")))
    }
}

/// Named `d x d` complex matrices of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixAssignment {
    pub dim: usize,
    pub seed: u64,
    pub scale: f64,
    pub kind: FixtureKind,
    entries: BTreeMap<String, CMat>,
}

impl MatrixAssignment {
    pub fn new(dim: usize, seed: u64, scale: f64, kind: FixtureKind) -> Self {
        MatrixAssignment { dim, seed, scale, kind, entries: BTreeMap::new() }
    }

    /// Panics if `m` is not `dim x dim`.
    pub fn insert(&mut self, name: impl Into<String>, m: CMat) {
        assert_eq!(m.shape(), (self.dim, self.dim), "matrix dimension mismatch");
        self.entries.insert(name.into(), m);
    }

    pub fn get(&self, name: &str) -> Result<&CMat> {
        self.entries.get(name).ok_or_else(|| Error::UnassignedSymbol(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &CMat)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Derives an independent per-trial seed from a suite seed. FNV-1a over
/// the little-endian bytes keeps it platform independent.
pub fn trial_seed(seed: u64, suite: &str, dim: usize, trial: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(&seed.to_le_bytes());
    eat(suite.as_bytes());
    eat(&(dim as u64).to_le_bytes());
    eat(&(trial as u64).to_le_bytes());
    h
}

/// Names filled with independent random matrices in every fixture.
const RANDOM_NAMES: [&str; 7] = ["A", "B", "C", "E", "Q", "dA", "dB"];

fn ginibre(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMat {
    let mut m = CMat::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let norm = spectral_norm(&m);
    if norm > 0.0 {
        m *= c(scale / norm);
    }
    m
}

fn diagonal(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMat {
    let values: Vec<Complex64> = (0..d)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    let max = values.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let factor = if max > 0.0 { scale / max } else { 0.0 };
    CMat::from_diagonal(&CVec::from_vec(values.into_iter().map(|z| z * factor).collect()))
}

/// Rounds to a multiple of `2^-20`, so sums and products of a few such
/// values are exact in double precision.
fn dyadic(x: f64) -> f64 {
    (x * 1_048_576.0).round() / 1_048_576.0
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Upper shift: ones on the first superdiagonal.
fn shift(d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| if j == i + 1 { c(1.0) } else { c(0.0) })
}

/// Diagonal `alpha + k beta`, `k = 0..d`, with dyadic entries and norm at
/// most `3 scale / 4`.
fn progression(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> (CMat, f64) {
    let alpha = dyadic(uniform(rng, -0.25, 0.25) * scale);
    let mut beta = dyadic(uniform(rng, 0.125, 0.5) * scale / d as f64);
    if beta == 0.0 {
        beta = 1.0 / 1_048_576.0;
    }
    let diag: Vec<Complex64> = (0..d).map(|k| c(alpha + k as f64 * beta)).collect();
    (CMat::from_diagonal(&CVec::from_vec(diag)), beta)
}

/// `c0 I + c1 S` with dyadic coefficients, norm at most `scale / 2`.
fn shift_polynomial(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMat {
    let c0 = dyadic(uniform(rng, -0.25, 0.25) * scale);
    let c1 = dyadic(uniform(rng, 0.05, 0.25) * scale);
    identity(d) * c(c0) + shift(d) * c(c1)
}

fn add_random(out: &mut MatrixAssignment, rng: &mut ChaCha8Rng, skip: &[&str]) {
    for name in RANDOM_NAMES {
        let m = ginibre(rng, out.dim, out.scale);
        if !skip.contains(&name) {
            out.insert(name, m);
        }
    }
}

/// Builds a fixture of the given kind.
///
/// Every kind assigns `A, B, C, E, Q, dA, dB`; auxiliary kinds replace some
/// of them and add `H` (pair) or `HA, HB` (multivariate). Auxiliary
/// matrices have dyadic entries, so their defining commutator relations
/// hold exactly in floating point.
pub fn make_fixture(kind: FixtureKind, dim: usize, seed: u64, scale: f64) -> Result<MatrixAssignment> {
    let min_dim = match kind {
        FixtureKind::Random | FixtureKind::Commuting => 1,
        FixtureKind::AuxiliaryPair | FixtureKind::MultivariateAuxiliary => 2,
    };
    if dim < min_dim || dim > MAX_DIM {
        return Err(Error::BadDimension { kind: kind.name().into(), dim });
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("fixture scale must be positive, got {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = MatrixAssignment::new(dim, seed, scale, kind);
    match kind {
        FixtureKind::Random => add_random(&mut out, &mut rng, &[]),
        FixtureKind::Commuting => {
            for name in RANDOM_NAMES {
                out.insert(name, diagonal(&mut rng, dim, scale));
            }
        }
        FixtureKind::AuxiliaryPair => {
            let (a, _) = progression(&mut rng, dim, scale);
            let gamma = dyadic(uniform(&mut rng, 0.5, 1.0) * scale);
            let h = shift(dim) * c(gamma);
            out.insert("dA", commutator(&h, &a));
            out.insert("A", a);
            out.insert("H", h);
            add_random(&mut out, &mut rng, &["A", "dA"]);
        }
        FixtureKind::MultivariateAuxiliary => {
            let s = (dim as f64).sqrt().round() as usize;
            let (a, b, ha, hb) = if s * s == dim {
                // A = D1 ⊗ I + I ⊗ K, B = L ⊗ I + I ⊗ D2 with K, L in the
                // algebra of the shift, HA = γ1 S ⊗ I, HB = γ2 I ⊗ S.
                let (d1, _) = progression(&mut rng, s, scale / 2.0);
                let k = shift_polynomial(&mut rng, s, scale / 2.0);
                let (d2, _) = progression(&mut rng, s, scale / 2.0);
                let l = shift_polynomial(&mut rng, s, scale / 2.0);
                let g1 = dyadic(uniform(&mut rng, 0.5, 1.0) * scale);
                let g2 = dyadic(uniform(&mut rng, 0.5, 1.0) * scale);
                let eye = identity(s);
                (
                    kron(&d1, &eye) + kron(&eye, &k),
                    kron(&l, &eye) + kron(&eye, &d2),
                    kron(&shift(s), &eye) * c(g1),
                    kron(&eye, &shift(s)) * c(g2),
                )
            } else {
                // One active auxiliary operator; B lies in its commutant.
                let (a, _) = progression(&mut rng, dim, scale);
                let b = shift_polynomial(&mut rng, dim, scale);
                let g1 = dyadic(uniform(&mut rng, 0.5, 1.0) * scale);
                (a, b, shift(dim) * c(g1), CMat::zeros(dim, dim))
            };
            out.insert("dA", commutator(&ha, &a));
            out.insert("dB", commutator(&hb, &b));
            out.insert("A", a);
            out.insert("B", b);
            out.insert("HA", ha);
            out.insert("HB", hb);
            add_random(&mut out, &mut rng, &["A", "B", "dA", "dB"]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(m: &CMat) -> bool {
        m.iter().all(|z| *z == c(0.0))
    }

    #[test]
    fn deterministic() {
        let a = make_fixture(FixtureKind::Random, 3, 42, 0.5).unwrap();
        let b = make_fixture(FixtureKind::Random, 3, 42, 0.5).unwrap();
        assert_eq!(a, b);
        let other = make_fixture(FixtureKind::Random, 3, 43, 0.5).unwrap();
        assert_ne!(a.get("A").unwrap(), other.get("A").unwrap());
    }

    #[test]
    fn random_norms_match_scale() {
        let f = make_fixture(FixtureKind::Random, 4, 7, 0.3).unwrap();
        for (_, m) in f.entries() {
            assert!((spectral_norm(m) - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn commuting_fixture_commutes() {
        let f = make_fixture(FixtureKind::Commuting, 3, 1, 0.5).unwrap();
        let (a, b) = (f.get("A").unwrap(), f.get("B").unwrap());
        assert!(zero(&commutator(a, b)));
        assert!(spectral_norm(a) <= 0.5 + 1e-15);
    }

    #[test]
    fn auxiliary_pair_relations_are_exact() {
        for d in 2..=MAX_DIM {
            for seed in 0..5 {
                let f = make_fixture(FixtureKind::AuxiliaryPair, d, seed, 0.5).unwrap();
                let (a, h) = (f.get("A").unwrap(), f.get("H").unwrap());
                assert!(zero(&commutator(h, &commutator(h, a))));
                assert_eq!(&commutator(h, a), f.get("dA").unwrap());
                assert!(spectral_norm(a) <= 0.5);
                let diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
                assert!(diag.windows(2).all(|w| w[0] != w[1]));
            }
        }
    }

    #[test]
    fn multivariate_relations_are_exact() {
        for d in [2, 3, 4, 5, 8] {
            let f = make_fixture(FixtureKind::MultivariateAuxiliary, d, 11, 0.5).unwrap();
            let [a, b, ha, hb] = ["A", "B", "HA", "HB"].map(|n| f.get(n).unwrap());
            let (da, db) = (commutator(ha, a), commutator(hb, b));
            assert!(zero(&commutator(ha, hb)));
            assert!(zero(&commutator(ha, b)));
            assert!(zero(&commutator(hb, a)));
            assert!(zero(&commutator(ha, &db)));
            assert!(zero(&commutator(hb, &da)));
            assert!(zero(&commutator(ha, &da)));
            assert!(zero(&commutator(hb, &db)));
            assert!(!zero(&commutator(a, b)), "d = {d}");
        }
        let f = make_fixture(FixtureKind::MultivariateAuxiliary, 4, 3, 0.5).unwrap();
        assert!(!zero(f.get("HB").unwrap()));
    }

    #[test]
    fn bad_dimensions() {
        assert!(matches!(make_fixture(FixtureKind::AuxiliaryPair, 1, 0, 0.5), Err(Error::BadDimension { .. })));
        assert!(matches!(make_fixture(FixtureKind::Random, 0, 0, 0.5), Err(Error::BadDimension { .. })));
        assert!(matches!(make_fixture(FixtureKind::Random, MAX_DIM + 1, 0, 0.5), Err(Error::BadDimension { .. })));
    }

    #[test]
    fn trial_seeds_differ() {
        let a = trial_seed(42, "lemma2", 3, 0);
        assert_eq!(a, trial_seed(42, "lemma2", 3, 0));
        assert_ne!(a, trial_seed(42, "lemma2", 3, 1));
        assert_ne!(a, trial_seed(42, "theorem4", 3, 0));
    }
}
