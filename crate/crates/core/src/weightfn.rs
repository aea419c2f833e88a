//! Finitely supported, possibly nested, weight functions.
//!
//! A [`WeightTerm`] of depth `d + 1` is a map from depth-`d` terms to the
//! weights of one monoid; depth 0 is a state. Terms are kept canonical
//! (no zero entries, entries ordered) so that structural equality is
//! extensional equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bisim::Partition;
use crate::monoid::{MonoidDesc, MonoidError, Weight};
use crate::textio::write_id;

pub type StateId = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("expected a term of depth {expected}, found depth {found}")]
    DepthMismatch { expected: usize, found: usize },
    #[error("expected monoid {expected}, found {found}")]
    MonoidMismatch { expected: String, found: String },
    #[error("a state is not a weight function")]
    NotANode,
    #[error("a weight function has depth at least 1")]
    ZeroDepthNode,
    #[error("state `{0}` has no image under the map")]
    Unmapped(StateId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightTerm {
    Leaf(StateId),
    Node(Node),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    depth: usize,
    monoid: MonoidDesc,
    entries: BTreeMap<WeightTerm, Weight>,
}

impl Node {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn monoid(&self) -> &MonoidDesc {
        &self.monoid
    }

    pub fn entries(&self) -> &BTreeMap<WeightTerm, Weight> {
        &self.entries
    }
}

impl WeightTerm {
    pub fn leaf(id: impl Into<StateId>) -> WeightTerm {
        WeightTerm::Leaf(id.into())
    }

    pub fn zero(depth: usize, monoid: MonoidDesc) -> Result<WeightTerm, TermError> {
        if depth == 0 {
            return Err(TermError::ZeroDepthNode);
        }
        Ok(WeightTerm::Node(Node {
            depth,
            monoid,
            entries: BTreeMap::new(),
        }))
    }

    /// Builds a canonical node; repeated keys are summed and zero entries dropped.
    pub fn node<I>(depth: usize, monoid: MonoidDesc, entries: I) -> Result<WeightTerm, TermError>
    where
        I: IntoIterator<Item = (WeightTerm, Weight)>,
    {
        if depth == 0 {
            return Err(TermError::ZeroDepthNode);
        }
        let mut map: BTreeMap<WeightTerm, Weight> = BTreeMap::new();
        for (key, w) in entries {
            if key.depth() + 1 != depth {
                return Err(TermError::DepthMismatch {
                    expected: depth - 1,
                    found: key.depth(),
                });
            }
            monoid.check(&w)?;
            let merged = match map.remove(&key) {
                Some(prev) => monoid.add(&prev, &w)?,
                None => w,
            };
            if !merged.is_zero() {
                map.insert(key, merged);
            }
        }
        Ok(WeightTerm::Node(Node {
            depth,
            monoid,
            entries: map,
        }))
    }

    /// `{child: w}`
    pub fn dirac(child: WeightTerm, w: Weight, monoid: MonoidDesc) -> Result<WeightTerm, TermError> {
        let depth = child.depth() + 1;
        WeightTerm::node(depth, monoid, [(child, w)])
    }

    pub fn depth(&self) -> usize {
        match self {
            WeightTerm::Leaf(_) => 0,
            WeightTerm::Node(n) => n.depth,
        }
    }

    pub fn as_leaf(&self) -> Option<&str> {
        match self {
            WeightTerm::Leaf(id) => Some(id),
            WeightTerm::Node(_) => None,
        }
    }

    pub fn as_node(&self) -> Option<&Node> {
        match self {
            WeightTerm::Leaf(_) => None,
            WeightTerm::Node(n) => Some(n),
        }
    }

    pub fn monoid(&self) -> Option<&MonoidDesc> {
        self.as_node().map(|n| &n.monoid)
    }

    pub fn entries(&self) -> Option<&BTreeMap<WeightTerm, Weight>> {
        self.as_node().map(|n| &n.entries)
    }

    /// True for a node with empty support.
    pub fn is_zero(&self) -> bool {
        matches!(self, WeightTerm::Node(n) if n.entries.is_empty())
    }

    /// `{x | φ(x) ≠ 0}`
    pub fn support(&self) -> Result<BTreeSet<WeightTerm>, TermError> {
        let node = self.as_node().ok_or(TermError::NotANode)?;
        Ok(node.entries.keys().cloned().collect())
    }

    /// Every state occurring at the bottom of the term.
    pub fn leaves(&self) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut BTreeSet<StateId>) {
        match self {
            WeightTerm::Leaf(id) => {
                out.insert(id.clone());
            }
            WeightTerm::Node(n) => n.entries.keys().for_each(|k| k.collect_leaves(out)),
        }
    }

    /// Subterms of the given depth (the term itself if its depth matches).
    pub fn subterms_at_depth(&self, depth: usize) -> BTreeSet<WeightTerm> {
        let mut out = BTreeSet::new();
        self.collect_subterms(depth, &mut out);
        out
    }

    fn collect_subterms(&self, depth: usize, out: &mut BTreeSet<WeightTerm>) {
        if self.depth() == depth {
            out.insert(self.clone());
        } else if let WeightTerm::Node(n) = self {
            if n.depth > depth {
                n.entries.keys().for_each(|k| k.collect_subterms(depth, out));
            }
        }
    }

    /// Applies `F_{M0}…F_{Ml} f`: relabels leaves and sums colliding entries at every level.
    pub fn pushforward<F>(&self, f: &F) -> Result<WeightTerm, TermError>
    where
        F: Fn(&str) -> Option<StateId>,
    {
        match self {
            WeightTerm::Leaf(id) => f(id)
                .map(WeightTerm::Leaf)
                .ok_or_else(|| TermError::Unmapped(id.clone())),
            WeightTerm::Node(n) => {
                let mapped = n
                    .entries
                    .iter()
                    .map(|(k, w)| Ok((k.pushforward(f)?, w.clone())))
                    .collect::<Result<Vec<_>, TermError>>()?;
                WeightTerm::node(n.depth, n.monoid.clone(), mapped)
            }
        }
    }

    pub fn pushforward_map(&self, map: &BTreeMap<StateId, StateId>) -> Result<WeightTerm, TermError> {
        self.pushforward(&|x: &str| map.get(x).cloned())
    }

    /// `(Tκ)(t)` for the quotient map κ of `partition`.
    pub fn quotient(&self, partition: &Partition) -> Result<WeightTerm, TermError> {
        self.pushforward(&|x: &str| partition.block_id(x).map(str::to_string))
    }

    /// Structural equality of canonical forms; errors if the terms are not comparable.
    pub fn term_equal(&self, other: &WeightTerm) -> Result<bool, TermError> {
        if self.depth() != other.depth() {
            return Err(TermError::DepthMismatch {
                expected: self.depth(),
                found: other.depth(),
            });
        }
        if let (Some(a), Some(b)) = (self.monoid(), other.monoid()) {
            if a != b {
                return Err(TermError::MonoidMismatch {
                    expected: a.to_string(),
                    found: b.to_string(),
                });
            }
        }
        Ok(self == other)
    }

    /// `Σ_{y ∈ keys} φ(y)`; keys outside the support contribute zero.
    pub fn class_sum(&self, keys: &BTreeSet<WeightTerm>) -> Result<Weight, TermError> {
        self.class_sum_by(|k| keys.contains(k))
    }

    pub fn class_sum_by<P>(&self, mut pred: P) -> Result<Weight, TermError>
    where
        P: FnMut(&WeightTerm) -> bool,
    {
        let node = self.as_node().ok_or(TermError::NotANode)?;
        let selected = node.entries.iter().filter(|(k, _)| pred(k)).map(|(_, w)| w);
        Ok(node.monoid.sum(selected)?)
    }

    /// Rewrites the weights level by level (level 0 is the outermost node).
    /// `monoids[j]` is the new monoid of level `j`.
    pub fn map_weights<F>(&self, monoids: &[MonoidDesc], f: &F) -> Result<WeightTerm, TermError>
    where
        F: Fn(usize, &Weight) -> Result<Weight, MonoidError>,
    {
        self.map_weights_from(0, monoids, f)
    }

    fn map_weights_from<F>(&self, level: usize, monoids: &[MonoidDesc], f: &F) -> Result<WeightTerm, TermError>
    where
        F: Fn(usize, &Weight) -> Result<Weight, MonoidError>,
    {
        match self {
            WeightTerm::Leaf(_) => Ok(self.clone()),
            WeightTerm::Node(n) => {
                let monoid = monoids.get(level).cloned().ok_or(TermError::DepthMismatch {
                    expected: monoids.len(),
                    found: level + n.depth,
                })?;
                let entries = n
                    .entries
                    .iter()
                    .map(|(k, w)| Ok((k.map_weights_from(level + 1, monoids, f)?, f(level, w)?)))
                    .collect::<Result<Vec<_>, TermError>>()?;
                WeightTerm::node(n.depth, monoid, entries)
            }
        }
    }

    /// Checks depth and the monoid at every level against `monoids` (outermost first).
    pub fn check_stack(&self, monoids: &[MonoidDesc]) -> Result<(), TermError> {
        if self.depth() != monoids.len() {
            return Err(TermError::DepthMismatch {
                expected: monoids.len(),
                found: self.depth(),
            });
        }
        if let WeightTerm::Node(n) = self {
            if n.monoid != monoids[0] {
                return Err(TermError::MonoidMismatch {
                    expected: monoids[0].to_string(),
                    found: n.monoid.to_string(),
                });
            }
            for (k, w) in &n.entries {
                n.monoid.check(w)?;
                k.check_stack(&monoids[1..])?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for WeightTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightTerm::Leaf(id) => write_id(f, id),
            WeightTerm::Node(n) => {
                write!(f, "{{")?;
                for (k, (key, w)) in n.entries.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{key}: {w}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

pub fn support(t: &WeightTerm) -> Result<BTreeSet<WeightTerm>, TermError> {
    t.support()
}

pub fn pushforward(map: &BTreeMap<StateId, StateId>, t: &WeightTerm) -> Result<WeightTerm, TermError> {
    t.pushforward_map(map)
}

pub fn quotient_term(t: &WeightTerm, partition: &Partition) -> Result<WeightTerm, TermError> {
    t.quotient(partition)
}

pub fn term_equal(t: &WeightTerm, u: &WeightTerm) -> Result<bool, TermError> {
    t.term_equal(u)
}

pub fn class_sum(t: &WeightTerm, keys: &BTreeSet<WeightTerm>) -> Result<Weight, TermError> {
    t.class_sum(keys)
}
