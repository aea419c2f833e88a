//! The FuTS data model: signatures, systems, carrier maps, homomorphisms,
//! and the embeddings between system classes.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::monoid::{Homomorphism, Label, MonoidDesc, MonoidError, Weight};
use crate::weightfn::{StateId, TermError, WeightTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("a signature needs at least one component")]
    NoComponents,
    #[error("component {0} has an empty label set")]
    EmptyLabels(usize),
    #[error("component {0} has an empty monoid list")]
    EmptyMonoids(usize),
    #[error("component {0} does not exist")]
    UnknownComponent(usize),
    #[error("label `{label}` is not in A{component}")]
    UnknownLabel { component: usize, label: Label },
    #[error("state `{0}` is not in the carrier")]
    UnknownState(StateId),
    #[error("the systems have different signatures")]
    SignatureMismatch,
    #[error("{0}")]
    Precondition(String),
    #[error("homomorphism {0} is not injective")]
    NotInjective(String),
    #[error("the carrier map is not total: `{0}` has no image")]
    NotTotal(StateId),
}

/// One row `(A_i, ⟨M_{i,0}, …, M_{i,l_i}⟩)` of a signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub labels: BTreeSet<Label>,
    pub monoids: Vec<MonoidDesc>,
}

impl Component {
    pub fn new<I, S>(labels: I, monoids: Vec<MonoidDesc>) -> Component
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        Component {
            labels: labels.into_iter().map(Into::into).collect(),
            monoids,
        }
    }

    /// Depth of this component's transition terms, `l_i + 1`.
    pub fn depth(&self) -> usize {
        self.monoids.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    components: Vec<Component>,
}

impl Signature {
    pub fn new(components: Vec<Component>) -> Result<Signature, SystemError> {
        if components.is_empty() {
            return Err(SystemError::NoComponents);
        }
        for (i, c) in components.iter().enumerate() {
            if c.labels.is_empty() {
                return Err(SystemError::EmptyLabels(i));
            }
            if c.monoids.is_empty() {
                return Err(SystemError::EmptyMonoids(i));
            }
        }
        Ok(Signature { components })
    }

    /// `⟨(A, [M])⟩`, the signature of a WLTS.
    pub fn simple<I, S>(labels: I, monoid: MonoidDesc) -> Signature
    where
        I: IntoIterator<Item = S>,
        S: Into<Label>,
    {
        Signature::new(vec![Component::new(labels, vec![monoid])]).expect("non-empty label set")
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Result<&Component, SystemError> {
        self.components.get(i).ok_or(SystemError::UnknownComponent(i))
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_nested(&self) -> bool {
        self.components.len() == 1
    }

    pub fn is_combined(&self) -> bool {
        self.components.iter().all(|c| c.monoids.len() == 1)
    }

    pub fn is_simple(&self) -> bool {
        self.is_nested() && self.is_combined()
    }

    pub fn is_tabular(&self) -> bool {
        let d = self.components[0].depth();
        self.components.iter().all(|c| c.depth() == d)
    }

    pub fn is_homogeneous(&self) -> bool {
        let m = &self.components[0].monoids[0];
        self.components.iter().all(|c| c.monoids.iter().all(|x| x == m))
    }

    pub fn is_unlabelled(&self) -> bool {
        self.components.iter().all(|c| c.labels.len() == 1)
    }

    pub fn max_depth(&self) -> usize {
        self.components.iter().map(Component::depth).max().unwrap_or(0)
    }
}

/// A finite state-to-function transition system.
///
/// Transitions not stored explicitly are the zero term of the component's depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Futs {
    sig: Signature,
    states: BTreeSet<StateId>,
    trans: Vec<BTreeMap<(StateId, Label), WeightTerm>>,
}

/// A validation finding, located by component, state and label where applicable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub component: Option<usize>,
    pub state: Option<StateId>,
    pub label: Option<Label>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.component, &self.state, &self.label) {
            (Some(i), Some(x), Some(a)) => write!(f, "trans {i} {x} {a}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl Futs {
    pub fn new<I, S>(sig: Signature, states: I) -> Futs
    where
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        let n = sig.len();
        Futs {
            sig,
            states: states.into_iter().map(Into::into).collect(),
            trans: vec![BTreeMap::new(); n],
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn zero_term(&self, i: usize) -> WeightTerm {
        let c = &self.sig.components[i];
        WeightTerm::zero(c.depth(), c.monoids[0].clone()).expect("depth >= 1")
    }

    /// Stores a transition after checking labels, states and the monoid stack.
    pub fn set_transition(&mut self, i: usize, x: &str, a: &str, term: WeightTerm) -> Result<(), SystemError> {
        let c = self.sig.component(i)?;
        if !c.labels.contains(a) {
            return Err(SystemError::UnknownLabel {
                component: i,
                label: a.to_string(),
            });
        }
        if !self.states.contains(x) {
            return Err(SystemError::UnknownState(x.to_string()));
        }
        term.check_stack(&c.monoids)?;
        if let Some(y) = term.leaves().into_iter().find(|y| !self.states.contains(y)) {
            return Err(SystemError::UnknownState(y));
        }
        self.insert_unchecked(i, x.to_string(), a.to_string(), term);
        Ok(())
    }

    /// Stores a transition without checks; [`Futs::validate`] reports problems later.
    pub fn insert_unchecked(&mut self, i: usize, x: StateId, a: Label, term: WeightTerm) {
        if i >= self.trans.len() {
            self.trans.resize(i + 1, BTreeMap::new());
        }
        if term.is_zero() {
            self.trans[i].remove(&(x, a));
        } else {
            self.trans[i].insert((x, a), term);
        }
    }

    /// `α_i(x)(a)`
    pub fn transition(&self, i: usize, x: &str, a: &str) -> Cow<'_, WeightTerm> {
        match self.trans[i].get(&(x.to_string(), a.to_string())) {
            Some(t) => Cow::Borrowed(t),
            None => Cow::Owned(self.zero_term(i)),
        }
    }

    /// The explicitly stored (non-zero) transitions of component `i`.
    pub fn transitions(&self, i: usize) -> impl Iterator<Item = (&StateId, &Label, &WeightTerm)> {
        self.trans[i].iter().map(|((x, a), t)| (x, a, t))
    }

    /// Every `(i, a)` pair of the signature in order.
    pub fn component_labels(&self) -> Vec<(usize, Label)> {
        self.sig
            .components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.labels.iter().map(move |a| (i, a.clone())))
            .collect()
    }

    pub fn validate(&self) -> Result<(), Vec<Issue>> {
        let mut issues = Vec::new();
        let global = |message: &str| Issue {
            component: None,
            state: None,
            label: None,
            message: message.to_string(),
        };
        if self.states.is_empty() {
            issues.push(global("empty carrier"));
        }
        if self.trans.len() != self.sig.len() {
            issues.push(global("transition table does not match the signature"));
        }
        for (i, table) in self.trans.iter().enumerate() {
            let Some(c) = self.sig.components.get(i) else { continue };
            for ((x, a), t) in table {
                let mut push = |message: String| {
                    issues.push(Issue {
                        component: Some(i),
                        state: Some(x.clone()),
                        label: Some(a.clone()),
                        message,
                    })
                };
                if !self.states.contains(x) {
                    push(format!("unknown state `{x}`"));
                }
                if !c.labels.contains(a) {
                    push(format!("unknown label `{a}`"));
                }
                match t.check_stack(&c.monoids) {
                    Ok(()) => {}
                    Err(TermError::DepthMismatch { expected, found }) => {
                        push(format!("depth mismatch: expected {expected}, found {found}"))
                    }
                    Err(e) => push(e.to_string()),
                }
                for y in t.leaves() {
                    if !self.states.contains(&y) {
                        push(format!("unknown state `{y}`"));
                    }
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    /// Rebuilds the system on a new signature, keeping carrier and transitions.
    pub(crate) fn with_signature(sig: Signature, states: BTreeSet<StateId>) -> Futs {
        let n = sig.len();
        Futs {
            sig,
            states,
            trans: vec![BTreeMap::new(); n],
        }
    }
}

/// A total function between carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierMap {
    mapping: BTreeMap<StateId, StateId>,
}

impl CarrierMap {
    /// Checks totality on `source` and that every image is a state of `target`.
    pub fn new(source: &Futs, target: &Futs, mapping: BTreeMap<StateId, StateId>) -> Result<CarrierMap, SystemError> {
        for x in source.states() {
            match mapping.get(x) {
                None => return Err(SystemError::NotTotal(x.clone())),
                Some(y) if !target.states().contains(y) => return Err(SystemError::UnknownState(y.clone())),
                Some(_) => {}
            }
        }
        Ok(CarrierMap { mapping })
    }

    pub fn identity(states: &BTreeSet<StateId>) -> CarrierMap {
        CarrierMap {
            mapping: states.iter().map(|x| (x.clone(), x.clone())).collect(),
        }
    }

    pub(crate) fn from_mapping(mapping: BTreeMap<StateId, StateId>) -> CarrierMap {
        CarrierMap { mapping }
    }

    pub fn mapping(&self) -> &BTreeMap<StateId, StateId> {
        &self.mapping
    }

    pub fn apply(&self, x: &str) -> Option<&StateId> {
        self.mapping.get(x)
    }

    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<&StateId> = self.mapping.values().collect();
        images.len() == self.mapping.len()
    }

    pub fn is_surjective(&self, target: &Futs) -> bool {
        let images: BTreeSet<&StateId> = self.mapping.values().collect();
        target.states().iter().all(|y| images.contains(y))
    }

    /// `next ∘ self`
    pub fn then(&self, next: &CarrierMap) -> Result<CarrierMap, SystemError> {
        let mapping = self
            .mapping
            .iter()
            .map(|(x, y)| {
                next.apply(y)
                    .map(|z| (x.clone(), z.clone()))
                    .ok_or_else(|| SystemError::NotTotal(y.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(CarrierMap { mapping })
    }
}

/// Checks `β(f(x))(i)(a) = (T f)(α(x)(i)(a))` for every component, state and label.
pub fn is_homomorphism(source: &Futs, target: &Futs, f: &CarrierMap) -> Result<bool, SystemError> {
    if source.signature() != target.signature() {
        return Err(SystemError::SignatureMismatch);
    }
    for x in source.states() {
        let fx = f.apply(x).ok_or_else(|| SystemError::NotTotal(x.clone()))?;
        if !target.states().contains(fx) {
            return Err(SystemError::UnknownState(fx.clone()));
        }
        for (i, a) in source.component_labels() {
            let pushed = source.transition(i, x, &a).pushforward_map(f.mapping())?;
            if *target.transition(i, fx, &a) != pushed {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Embeds a WLTS as a ULTraS through `φ ↦ {φ: tt}`.
pub fn dirac_embed(w: &Futs) -> Result<Futs, SystemError> {
    if !w.signature().is_simple() {
        return Err(SystemError::Precondition(
            "dirac embedding requires a simple system".into(),
        ));
    }
    let c = &w.signature().components()[0];
    let sig = Signature::new(vec![Component {
        labels: c.labels.clone(),
        monoids: vec![MonoidDesc::BoolOr, c.monoids[0].clone()],
    }])?;
    let mut out = Futs::with_signature(sig, w.states().clone());
    for x in w.states() {
        for a in &c.labels {
            let phi = w.transition(0, x, a).into_owned();
            let outer = WeightTerm::dirac(phi, Weight::Bool(true), MonoidDesc::BoolOr)?;
            out.insert_unchecked(0, x.clone(), a.clone(), outer);
        }
    }
    Ok(out)
}

/// Maps the weight at level `j` of component `i` through `homs[i][j]`.
pub fn relabel_weights(s: &Futs, homs: &[Vec<Homomorphism>]) -> Result<Futs, SystemError> {
    let sig = s.signature();
    if homs.len() != sig.len() {
        return Err(SystemError::SignatureMismatch);
    }
    let mut components = Vec::with_capacity(sig.len());
    for (c, row) in sig.components().iter().zip(homs) {
        if row.len() != c.monoids.len() {
            return Err(SystemError::SignatureMismatch);
        }
        for (m, h) in c.monoids.iter().zip(row) {
            if h.source() != *m {
                return Err(SystemError::SignatureMismatch);
            }
            if !h.is_injective() {
                return Err(SystemError::NotInjective(format!("{h:?}")));
            }
        }
        components.push(Component {
            labels: c.labels.clone(),
            monoids: row.iter().map(Homomorphism::target).collect(),
        });
    }
    let mut out = Futs::with_signature(Signature::new(components)?, s.states().clone());
    for (i, row) in homs.iter().enumerate() {
        let targets: Vec<MonoidDesc> = row.iter().map(Homomorphism::target).collect();
        for (x, a, t) in s.transitions(i) {
            let mapped = t.map_weights(&targets, &|level, w| row[level].apply(w))?;
            out.insert_unchecked(i, x.clone(), a.clone(), mapped);
        }
    }
    Ok(out)
}
