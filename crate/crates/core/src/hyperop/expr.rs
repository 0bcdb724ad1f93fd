//! Hyperoperator expression trees and their action on slot products.
//!
//! A tree acts on an ordered list of slot operands `Q_1, ..., Q_n`. Expansion
//! yields a [`NormalForm`]: a sum of terms `L * T_1(Q_1) * ... * T_n(Q_n)`
//! where `L` is a left factor and each `T_j` is a sequence of commutators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::inner_derivation;
use crate::error::{Error, Result};
use crate::ncpoly::serial::rational_string;
use crate::ncpoly::NcPoly;
use crate::Rational;

/// Node tags follow the JSON form; slot indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum HyperExpr {
    /// Left multiplication of the assembled product.
    #[serde(rename = "lmul")]
    LeftMul { p: NcPoly },
    /// Inner derivation of the assembled product.
    #[serde(rename = "delta")]
    Delta { x: NcPoly },
    /// Inner derivation by the base operator acting on one slot.
    #[serde(rename = "slotdelta")]
    SlotDelta { slot: usize },
    /// Inner derivation by `f` acting on one slot. `f` stays unexpanded.
    #[serde(rename = "pdelta")]
    PartialDelta { f: NcPoly, slot: usize },
    #[serde(rename = "sum")]
    Sum { terms: Vec<HyperExpr> },
    /// Composition; the rightmost factor acts first.
    #[serde(rename = "prod")]
    Product { factors: Vec<HyperExpr> },
    #[serde(rename = "scale")]
    Scale {
        #[serde(with = "rational_string")]
        c: Rational,
        h: Box<HyperExpr>,
    },
}

impl HyperExpr {
    pub fn lmul(p: NcPoly) -> Self {
        HyperExpr::LeftMul { p }
    }

    pub fn identity() -> Self {
        HyperExpr::LeftMul { p: NcPoly::one() }
    }

    pub fn zero() -> Self {
        HyperExpr::Sum { terms: Vec::new() }
    }

    pub fn delta(x: NcPoly) -> Self {
        HyperExpr::Delta { x }
    }

    pub fn slot_delta(slot: usize) -> Self {
        HyperExpr::SlotDelta { slot }
    }

    pub fn pdelta(f: NcPoly, slot: usize) -> Self {
        HyperExpr::PartialDelta { f, slot }
    }

    pub fn sum(terms: Vec<HyperExpr>) -> Self {
        HyperExpr::Sum { terms }
    }

    pub fn product(factors: Vec<HyperExpr>) -> Self {
        HyperExpr::Product { factors }
    }

    pub fn scale(c: Rational, h: HyperExpr) -> Self {
        HyperExpr::Scale { c, h: Box::new(h) }
    }

    /// `h^k` as a composition.
    pub fn pow(&self, k: usize) -> Self {
        HyperExpr::product(vec![self.clone(); k])
    }

    /// Largest slot index referenced anywhere in the tree.
    pub fn required_arity(&self) -> usize {
        match self {
            HyperExpr::LeftMul { .. } | HyperExpr::Delta { .. } => 0,
            HyperExpr::SlotDelta { slot } | HyperExpr::PartialDelta { slot, .. } => *slot,
            HyperExpr::Sum { terms: hs } | HyperExpr::Product { factors: hs } => {
                hs.iter().map(HyperExpr::required_arity).max().unwrap_or(0)
            }
            HyperExpr::Scale { h, .. } => h.required_arity(),
        }
    }

    /// Flattens nested sums and folds nested scales. Zero scales and empty
    /// sums are dropped; no other rewriting is attempted.
    pub fn simplified(&self) -> HyperExpr {
        match self {
            HyperExpr::Sum { terms } => {
                let mut flat = Vec::new();
                for t in terms {
                    match t.simplified() {
                        HyperExpr::Sum { terms } => flat.extend(terms),
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 {
                    flat.pop().expect("one term")
                } else {
                    HyperExpr::Sum { terms: flat }
                }
            }
            HyperExpr::Product { factors } => {
                let fs: Vec<HyperExpr> = factors.iter().map(HyperExpr::simplified).collect();
                if fs.iter().any(HyperExpr::is_trivially_zero) {
                    return HyperExpr::zero();
                }
                if fs.len() == 1 {
                    return fs.into_iter().next().expect("one factor");
                }
                HyperExpr::Product { factors: fs }
            }
            HyperExpr::Scale { c, h } => {
                if c.is_zero() {
                    return HyperExpr::zero();
                }
                match h.simplified() {
                    HyperExpr::Scale { c: c2, h } => HyperExpr::scale(c * c2, *h).simplified(),
                    inner if inner.is_trivially_zero() => inner,
                    inner if c.is_one() => inner,
                    inner => HyperExpr::scale(c.clone(), inner),
                }
            }
            HyperExpr::LeftMul { p } if p.is_zero() => HyperExpr::zero(),
            other => other.clone(),
        }
    }

    fn is_trivially_zero(&self) -> bool {
        matches!(self, HyperExpr::Sum { terms } if terms.is_empty())
    }

    /// Expands the tree for `arity` slots.
    pub fn expand(&self, arity: usize) -> Result<NormalForm> {
        let need = self.required_arity();
        if need > arity {
            return Err(Error::ArityMismatch { required: need, given: arity });
        }
        act(self, NormalForm::identity(arity))
    }

    fn needs_base(&self) -> bool {
        match self {
            HyperExpr::SlotDelta { .. } => true,
            HyperExpr::Sum { terms: hs } | HyperExpr::Product { factors: hs } => hs.iter().any(HyperExpr::needs_base),
            HyperExpr::Scale { h, .. } => h.needs_base(),
            _ => false,
        }
    }
}

/// One commutator applied to a slot operand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotAction {
    /// Commutator with the base operator.
    Base,
    /// Commutator with a fixed polynomial.
    Commutator(NcPoly),
}

/// Sum of `L * T_1(Q_1) * ... * T_n(Q_n)`. Each key lists, per slot, the
/// commutators in the order they act (innermost first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    arity: usize,
    terms: BTreeMap<Vec<Vec<SlotAction>>, NcPoly>,
}

impl NormalForm {
    pub fn identity(arity: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![Vec::new(); arity], NcPoly::one());
        NormalForm { arity, terms }
    }

    fn empty(arity: usize) -> Self {
        NormalForm { arity, terms: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Vec<SlotAction>>, &NcPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&mut self, key: Vec<Vec<SlotAction>>, left: NcPoly) {
        if left.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += &left;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    fn merge(&mut self, other: NormalForm) {
        for (k, v) in other.terms {
            self.add(k, v);
        }
    }

    fn push_action(&self, slot: usize, action: SlotAction) -> NormalForm {
        let mut out = NormalForm::empty(self.arity);
        for (k, v) in &self.terms {
            let mut k = k.clone();
            k[slot].push(action.clone());
            out.add(k, v.clone());
        }
        out
    }

    /// Evaluates on concrete operands.
    pub fn apply(&self, slots: &[NcPoly], base: Option<&NcPoly>) -> Result<NcPoly> {
        if slots.len() != self.arity {
            return Err(Error::ArityMismatch { required: self.arity, given: slots.len() });
        }
        let mut out = NcPoly::zero();
        for (key, left) in &self.terms {
            let mut acc = left.clone();
            for (actions, q) in key.iter().zip(slots) {
                let mut t = q.clone();
                for a in actions {
                    let x = match a {
                        SlotAction::Base => base.ok_or(Error::MissingBase)?,
                        SlotAction::Commutator(f) => f,
                    };
                    t = inner_derivation(x, &t);
                }
                acc = &acc * &t;
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        Ok(out)
    }
}

fn act(h: &HyperExpr, nf: NormalForm) -> Result<NormalForm> {
    let arity = nf.arity;
    let slot_index = |slot: usize| -> Result<usize> {
        if slot == 0 || slot > arity {
            Err(Error::ArityMismatch { required: slot.max(1), given: arity })
        } else {
            Ok(slot - 1)
        }
    };
    Ok(match h {
        HyperExpr::LeftMul { p } => {
            let mut out = NormalForm::empty(arity);
            for (k, v) in nf.terms {
                out.add(k, p * &v);
            }
            out
        }
        HyperExpr::Delta { x } => {
            let mut out = NormalForm::empty(arity);
            if x.as_constant().is_some() {
                return Ok(out);
            }
            for (k, v) in &nf.terms {
                out.add(k.clone(), inner_derivation(x, v));
            }
            for j in 0..arity {
                out.merge(nf.push_action(j, SlotAction::Commutator(x.clone())));
            }
            out
        }
        HyperExpr::SlotDelta { slot } => nf.push_action(slot_index(*slot)?, SlotAction::Base),
        HyperExpr::PartialDelta { f, slot } => {
            let j = slot_index(*slot)?;
            if f.as_constant().is_some() {
                NormalForm::empty(arity)
            } else {
                nf.push_action(j, SlotAction::Commutator(f.clone()))
            }
        }
        HyperExpr::Sum { terms } => {
            let mut out = NormalForm::empty(arity);
            for t in terms {
                out.merge(act(t, nf.clone())?);
            }
            out
        }
        HyperExpr::Product { factors } => {
            let mut acc = nf;
            for f in factors.iter().rev() {
                acc = act(f, acc)?;
            }
            acc
        }
        HyperExpr::Scale { c, h } => {
            let inner = act(h, nf)?;
            let mut out = NormalForm::empty(arity);
            for (k, v) in inner.terms {
                out.add(k, v.scale(c));
            }
            out
        }
    })
}

/// Applies `h` to the slot product `slots`. `base` is the operator used by
/// [`HyperExpr::SlotDelta`].
pub fn apply_hyper(h: &HyperExpr, slots: &[NcPoly], base: Option<&NcPoly>) -> Result<NcPoly> {
    if base.is_none() && h.needs_base() {
        return Err(Error::MissingBase);
    }
    h.expand(slots.len())?.apply(slots, base)
}

fn poly_factor(p: &NcPoly) -> String {
    if p.len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl fmt::Display for HyperExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperExpr::LeftMul { p } => f.write_str(&poly_factor(p)),
            HyperExpr::Delta { x } => write!(f, "δ[{x}]"),
            HyperExpr::SlotDelta { slot } => write!(f, "δ_{slot}"),
            HyperExpr::PartialDelta { f: g, slot } => write!(f, "δ[{g};{slot}]"),
            HyperExpr::Sum { terms } => {
                if terms.is_empty() {
                    return f.write_str("0");
                }
                for (i, t) in terms.iter().enumerate() {
                    let (neg, body) = match t {
                        HyperExpr::Scale { c, h } if c.is_negative() => {
                            (true, HyperExpr::scale(-c.clone(), (**h).clone()).to_string())
                        }
                        other => (false, other.to_string()),
                    };
                    match (i, neg) {
                        (0, true) => write!(f, "-{body}")?,
                        (0, false) => f.write_str(&body)?,
                        (_, true) => write!(f, " - {body}")?,
                        (_, false) => write!(f, " + {body}")?,
                    }
                }
                Ok(())
            }
            HyperExpr::Product { factors } => {
                if factors.is_empty() {
                    return f.write_str("1");
                }
                let parts: Vec<String> = factors
                    .iter()
                    .map(|h| match h {
                        HyperExpr::Sum { terms } if terms.len() > 1 => format!("({h})"),
                        _ => h.to_string(),
                    })
                    .collect();
                f.write_str(&parts.join("∘"))
            }
            HyperExpr::Scale { c, h } => {
                let inner = match **h {
                    HyperExpr::Sum { ref terms } if terms.len() > 1 => format!("({h})"),
                    _ => h.to_string(),
                };
                if c.is_one() {
                    f.write_str(&inner)
                } else if (-c).is_one() {
                    write!(f, "-{inner}")
                } else {
                    write!(f, "{c}*{inner}")
                }
            }
        }
    }
}
