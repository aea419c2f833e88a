//! A closed catalog of abelian monoids with exact arithmetic.
//!
//! Every catalog member is positive (zerosumfree), so each carries the
//! natural order `m ⊴ m'  ⟺  ∃k. m + k = m'`. Products and label-indexed
//! powers are built from the four base monoids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Label = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("weight {weight} does not belong to monoid {monoid}")]
    ShapeMismatch { monoid: String, weight: String },
    #[error("a product monoid needs at least one factor")]
    EmptyProduct,
    #[error("a power monoid needs a non-empty label set")]
    EmptyPower,
    #[error("index {index} out of range for a product of {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("label `{0}` is not in the power's label set")]
    UnknownLabel(Label),
    #[error("cannot compose homomorphisms: target {target} differs from source {next}")]
    NotComposable { target: String, next: String },
}

/// Description of a catalog monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonoidDesc {
    /// `({tt, ff}, ∨, ff)`
    BoolOr,
    /// `(ℕ, +, 0)`
    NatPlus,
    /// `(ℕ, max, 0)`
    NatMax,
    /// Nonnegative rationals under addition.
    RatPlus,
    Product(Vec<MonoidDesc>),
    /// `M^A` with pointwise addition.
    Power(BTreeSet<Label>, Box<MonoidDesc>),
}

/// An element of some catalog monoid.
///
/// `Map` is the payload of a power monoid; labels that are absent carry the
/// inner zero, and a canonical map never stores a zero explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weight {
    Bool(bool),
    Nat(BigUint),
    Rat(BigRational),
    Tuple(Vec<Weight>),
    Map(BTreeMap<Label, Weight>),
}

impl Weight {
    pub fn nat(n: u64) -> Weight {
        Weight::Nat(BigUint::from(n))
    }

    /// Panics if `den` is zero.
    pub fn rat(num: u64, den: u64) -> Weight {
        Weight::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Bool(b) => !b,
            Weight::Nat(n) => n.is_zero(),
            Weight::Rat(q) => q.is_zero(),
            Weight::Tuple(ws) => ws.iter().all(Weight::is_zero),
            Weight::Map(m) => m.values().all(Weight::is_zero),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Bool(true) => write!(f, "tt"),
            Weight::Bool(false) => write!(f, "ff"),
            Weight::Nat(n) => write!(f, "{n}"),
            Weight::Rat(q) => write!(f, "{q}"),
            Weight::Tuple(ws) => {
                write!(f, "(")?;
                for (k, w) in ws.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, ")")
            }
            Weight::Map(m) => {
                write!(f, "{{")?;
                for (k, (label, w)) in m.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    crate::textio::write_id(f, label)?;
                    write!(f, ": {w}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Display for MonoidDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidDesc::BoolOr => write!(f, "bool-or"),
            MonoidDesc::NatPlus => write!(f, "nat-plus"),
            MonoidDesc::NatMax => write!(f, "nat-max"),
            MonoidDesc::RatPlus => write!(f, "rat-plus"),
            MonoidDesc::Product(factors) => {
                write!(f, "prod(")?;
                for (k, m) in factors.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
            MonoidDesc::Power(labels, inner) => {
                write!(f, "pow({{")?;
                for (k, l) in labels.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    crate::textio::write_id(f, l)?;
                }
                write!(f, "}}, {inner})")
            }
        }
    }
}

impl MonoidDesc {
    pub fn product(factors: Vec<MonoidDesc>) -> Result<MonoidDesc, MonoidError> {
        if factors.is_empty() {
            return Err(MonoidError::EmptyProduct);
        }
        Ok(MonoidDesc::Product(factors))
    }

    pub fn power<I, S>(labels: I, inner: MonoidDesc) -> Result<MonoidDesc, MonoidError>
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        let labels: BTreeSet<Label> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(MonoidError::EmptyPower);
        }
        Ok(MonoidDesc::Power(labels, Box::new(inner)))
    }

    /// Every catalog monoid is zerosumfree.
    pub fn is_positive(&self) -> bool {
        true
    }

    pub fn is_cancellative(&self) -> bool {
        match self {
            MonoidDesc::BoolOr | MonoidDesc::NatMax => false,
            MonoidDesc::NatPlus | MonoidDesc::RatPlus => true,
            MonoidDesc::Product(fs) => fs.iter().all(MonoidDesc::is_cancellative),
            MonoidDesc::Power(_, inner) => inner.is_cancellative(),
        }
    }

    pub fn zero(&self) -> Weight {
        match self {
            MonoidDesc::BoolOr => Weight::Bool(false),
            MonoidDesc::NatPlus | MonoidDesc::NatMax => Weight::Nat(BigUint::zero()),
            MonoidDesc::RatPlus => Weight::Rat(BigRational::zero()),
            MonoidDesc::Product(fs) => Weight::Tuple(fs.iter().map(MonoidDesc::zero).collect()),
            MonoidDesc::Power(..) => Weight::Map(BTreeMap::new()),
        }
    }

    fn mismatch(&self, w: &Weight) -> MonoidError {
        MonoidError::ShapeMismatch {
            monoid: self.to_string(),
            weight: w.to_string(),
        }
    }

    /// Checks that `w` is a canonical element of this monoid.
    pub fn check(&self, w: &Weight) -> Result<(), MonoidError> {
        let ok = match (self, w) {
            (MonoidDesc::BoolOr, Weight::Bool(_)) => true,
            (MonoidDesc::NatPlus | MonoidDesc::NatMax, Weight::Nat(_)) => true,
            (MonoidDesc::RatPlus, Weight::Rat(q)) => !q.is_negative(),
            (MonoidDesc::Product(fs), Weight::Tuple(ws)) if fs.len() == ws.len() => {
                for (m, x) in fs.iter().zip(ws) {
                    m.check(x)?;
                }
                true
            }
            (MonoidDesc::Power(labels, inner), Weight::Map(map)) => {
                for (label, x) in map {
                    if !labels.contains(label) {
                        return Err(MonoidError::UnknownLabel(label.clone()));
                    }
                    inner.check(x)?;
                    if x.is_zero() {
                        return Err(self.mismatch(w));
                    }
                }
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.mismatch(w))
        }
    }

    pub fn add(&self, a: &Weight, b: &Weight) -> Result<Weight, MonoidError> {
        match (self, a, b) {
            (MonoidDesc::BoolOr, Weight::Bool(x), Weight::Bool(y)) => Ok(Weight::Bool(*x || *y)),
            (MonoidDesc::NatPlus, Weight::Nat(x), Weight::Nat(y)) => Ok(Weight::Nat(x + y)),
            (MonoidDesc::NatMax, Weight::Nat(x), Weight::Nat(y)) => Ok(Weight::Nat(x.max(y).clone())),
            (MonoidDesc::RatPlus, Weight::Rat(x), Weight::Rat(y)) => Ok(Weight::Rat(x + y)),
            (MonoidDesc::Product(fs), Weight::Tuple(xs), Weight::Tuple(ys))
                if fs.len() == xs.len() && fs.len() == ys.len() =>
            {
                let sum = fs
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(m, (x, y))| m.add(x, y))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Weight::Tuple(sum))
            }
            (MonoidDesc::Power(_, inner), Weight::Map(xs), Weight::Map(ys)) => {
                let mut out = xs.clone();
                for (label, y) in ys {
                    let merged = match out.get(label) {
                        Some(x) => inner.add(x, y)?,
                        None => y.clone(),
                    };
                    if merged.is_zero() {
                        out.remove(label);
                    } else {
                        out.insert(label.clone(), merged);
                    }
                }
                Ok(Weight::Map(out))
            }
            _ => {
                self.check(a)?;
                Err(self.mismatch(b))
            }
        }
    }

    /// Folds `add` over an iterator, starting at the unit.
    pub fn sum<'a, I>(&self, ws: I) -> Result<Weight, MonoidError>
    where
        I: IntoIterator<Item = &'a Weight>,
    {
        ws.into_iter().try_fold(self.zero(), |acc, w| self.add(&acc, w))
    }

    /// The natural order `a ⊴ b`.
    pub fn nat_leq(&self, a: &Weight, b: &Weight) -> Result<bool, MonoidError> {
        match (self, a, b) {
            (MonoidDesc::BoolOr, Weight::Bool(x), Weight::Bool(y)) => Ok(!*x || *y),
            (MonoidDesc::NatPlus | MonoidDesc::NatMax, Weight::Nat(x), Weight::Nat(y)) => Ok(x <= y),
            (MonoidDesc::RatPlus, Weight::Rat(x), Weight::Rat(y)) => Ok(x <= y),
            (MonoidDesc::Product(fs), Weight::Tuple(xs), Weight::Tuple(ys))
                if fs.len() == xs.len() && fs.len() == ys.len() =>
            {
                for (m, (x, y)) in fs.iter().zip(xs.iter().zip(ys)) {
                    if !m.nat_leq(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (MonoidDesc::Power(_, inner), Weight::Map(xs), Weight::Map(ys)) => {
                let zero = inner.zero();
                for (label, x) in xs {
                    let y = ys.get(label).unwrap_or(&zero);
                    if !inner.nat_leq(x, y)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => {
                self.check(a)?;
                Err(self.mismatch(b))
            }
        }
    }
}

/// Build `a·m`: the element of `M^A` valued `m` at `a` and zero elsewhere.
pub fn power_dirac(
    label: &str,
    m: &Weight,
    labels: &BTreeSet<Label>,
    inner: &MonoidDesc,
) -> Result<Weight, MonoidError> {
    if !labels.contains(label) {
        return Err(MonoidError::UnknownLabel(label.to_string()));
    }
    inner.check(m)?;
    let mut map = BTreeMap::new();
    if !m.is_zero() {
        map.insert(label.to_string(), m.clone());
    }
    Ok(Weight::Map(map))
}

/// Monoid homomorphisms expressible over the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homomorphism {
    Identity(MonoidDesc),
    /// `ι_k: M_k → ∏ M`, the section of the k-th projection.
    Section {
        factors: Vec<MonoidDesc>,
        index: usize,
    },
    /// `m ↦ a·m`, the section of the a-projection of `M^A`.
    LabelSection {
        labels: BTreeSet<Label>,
        label: Label,
        inner: MonoidDesc,
    },
    /// `π_k: ∏ M → M_k`; not injective once there are two factors.
    Projection {
        factors: Vec<MonoidDesc>,
        index: usize,
    },
    /// `second ∘ first`
    Compose(Box<Homomorphism>, Box<Homomorphism>),
}

/// The section `ι_index` of the index-th projection out of `product`.
pub fn monoid_section(index: usize, product: &MonoidDesc) -> Result<Homomorphism, MonoidError> {
    match product {
        MonoidDesc::Product(factors) => {
            if index >= factors.len() {
                return Err(MonoidError::IndexOutOfRange {
                    index,
                    len: factors.len(),
                });
            }
            Ok(Homomorphism::Section {
                factors: factors.clone(),
                index,
            })
        }
        other => Err(MonoidError::ShapeMismatch {
            monoid: other.to_string(),
            weight: "a product".into(),
        }),
    }
}

impl Homomorphism {
    pub fn compose(first: Homomorphism, second: Homomorphism) -> Result<Homomorphism, MonoidError> {
        let (t, s) = (first.target(), second.source());
        if t != s {
            return Err(MonoidError::NotComposable {
                target: t.to_string(),
                next: s.to_string(),
            });
        }
        Ok(Homomorphism::Compose(Box::new(first), Box::new(second)))
    }

    pub fn source(&self) -> MonoidDesc {
        match self {
            Homomorphism::Identity(m) => m.clone(),
            Homomorphism::Section { factors, index } => factors[*index].clone(),
            Homomorphism::LabelSection { inner, .. } => inner.clone(),
            Homomorphism::Projection { factors, .. } => MonoidDesc::Product(factors.clone()),
            Homomorphism::Compose(first, _) => first.source(),
        }
    }

    pub fn target(&self) -> MonoidDesc {
        match self {
            Homomorphism::Identity(m) => m.clone(),
            Homomorphism::Section { factors, .. } => MonoidDesc::Product(factors.clone()),
            Homomorphism::LabelSection { labels, inner, .. } => {
                MonoidDesc::Power(labels.clone(), Box::new(inner.clone()))
            }
            Homomorphism::Projection { factors, index } => factors[*index].clone(),
            Homomorphism::Compose(_, second) => second.target(),
        }
    }

    pub fn is_injective(&self) -> bool {
        match self {
            Homomorphism::Identity(_) | Homomorphism::Section { .. } | Homomorphism::LabelSection { .. } => true,
            // catalog monoids are non-trivial, so dropping a factor loses information
            Homomorphism::Projection { factors, .. } => factors.len() == 1,
            Homomorphism::Compose(a, b) => a.is_injective() && b.is_injective(),
        }
    }

    pub fn apply(&self, w: &Weight) -> Result<Weight, MonoidError> {
        match self {
            Homomorphism::Identity(m) => {
                m.check(w)?;
                Ok(w.clone())
            }
            Homomorphism::Section { factors, index } => {
                factors[*index].check(w)?;
                let tuple = factors
                    .iter()
                    .enumerate()
                    .map(|(k, m)| if k == *index { w.clone() } else { m.zero() })
                    .collect();
                Ok(Weight::Tuple(tuple))
            }
            Homomorphism::LabelSection { labels, label, inner } => power_dirac(label, w, labels, inner),
            Homomorphism::Projection { factors, index } => {
                MonoidDesc::Product(factors.clone()).check(w)?;
                match w {
                    Weight::Tuple(ws) => Ok(ws[*index].clone()),
                    _ => unreachable!("checked above"),
                }
            }
            Homomorphism::Compose(first, second) => second.apply(&first.apply(w)?),
        }
    }
}

/// `None` when the denominator is zero.
pub(crate) fn rat_from_parts(num: BigUint, den: BigUint) -> Option<BigRational> {
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(BigInt::from(num), BigInt::from(den)))
}
