//! Finite-conjunction logic: formulas, model checking, translations along
//! reductions, and a bounded logical-equivalence oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bisim::{largest_bisimulation, Partition};
use crate::monoid::{power_dirac, Label, MonoidDesc, MonoidError, Weight};
use crate::reduce::{homogeneous_section, nested_label, ReduceError, Reduction, Stage, UNIT_LABEL};
use crate::system::{Futs, Signature, SystemError};
use crate::weightfn::{StateId, TermError, WeightTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("formula mentions component {0}, which does not exist")]
    UnknownComponent(usize),
    #[error("label `{label}` is not in A{component}")]
    UnknownLabel { component: usize, label: Label },
    #[error("arity mismatch: component {component} needs {expected} bounds, found {found}")]
    Arity {
        component: usize,
        expected: usize,
        found: usize,
    },
    #[error("state `{0}` is not in the carrier")]
    UnknownState(StateId),
    #[error("the weight grid for component {component}, layer {layer} is empty")]
    EmptyGrid { component: usize, layer: usize },
    #[error("distinguishing formulas need a simple system")]
    NotSimple,
    #[error("distinguishing formulas need a positive cancellative monoid, found {0}")]
    NotCancellative(String),
    #[error("the states are not bisimilar, but no distinguishing formula was found")]
    NoWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    And(Box<Formula>, Box<Formula>),
    /// `⟨i|a|m_0, …, m_l⟩ body`
    Diamond {
        component: usize,
        label: Label,
        bounds: Vec<Weight>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn diamond(component: usize, label: impl Into<Label>, bounds: Vec<Weight>, body: Formula) -> Formula {
        Formula::Diamond {
            component,
            label: label.into(),
            bounds,
            body: Box::new(body),
        }
    }

    /// Nesting depth of diamonds.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top => 0,
            Formula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Diamond { body, .. } => 1 + body.modal_depth(),
        }
    }

    /// Number of connectives, counting `T`.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top => 1,
            Formula::And(l, r) => 1 + l.size() + r.size(),
            Formula::Diamond { body, .. } => 1 + body.size(),
        }
    }

    /// Checks component, label, arity and bound types against `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), LogicError> {
        match self {
            Formula::Top => Ok(()),
            Formula::And(l, r) => {
                l.check(sig)?;
                r.check(sig)
            }
            Formula::Diamond {
                component,
                label,
                bounds,
                body,
            } => {
                let c = sig
                    .component(*component)
                    .map_err(|_| LogicError::UnknownComponent(*component))?;
                if !c.labels.contains(label) {
                    return Err(LogicError::UnknownLabel {
                        component: *component,
                        label: label.clone(),
                    });
                }
                if bounds.len() != c.depth() {
                    return Err(LogicError::Arity {
                        component: *component,
                        expected: c.depth(),
                        found: bounds.len(),
                    });
                }
                for (m, w) in c.monoids.iter().zip(bounds) {
                    m.check(w)?;
                }
                body.check(sig)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        crate::textio::write_formula_into(&mut out, self, None, false);
        f.write_str(&out)
    }
}

/// `ρ ∈ ⟨m⟩Y`: the weight `ρ` puts on `Y` is at least `m` in the natural order.
pub fn diamond_member(rho: &WeightTerm, m: &Weight, set: &BTreeSet<WeightTerm>) -> Result<bool, LogicError> {
    let sum = rho.class_sum(set)?;
    Ok(rho.monoid().expect("class_sum succeeded on a node").nat_leq(m, &sum)?)
}

/// `t ∈ ⟨m_0⟩…⟨m_l⟩S` for a term of depth `l + 1` and a set of states `S`.
pub fn nested_member(t: &WeightTerm, bounds: &[Weight], sat: &BTreeSet<StateId>) -> Result<bool, LogicError> {
    match t {
        WeightTerm::Leaf(x) => Ok(sat.contains(x)),
        WeightTerm::Node(n) => {
            let (m, rest) = bounds.split_first().ok_or(TermError::DepthMismatch {
                expected: 0,
                found: n.depth(),
            })?;
            let mut chosen = Vec::new();
            for (k, w) in n.entries() {
                if nested_member(k, rest, sat)? {
                    chosen.push(w);
                }
            }
            let sum = n.monoid().sum(chosen)?;
            Ok(n.monoid().nat_leq(m, &sum)?)
        }
    }
}

/// `⟦φ⟧`, the states satisfying `φ`.
pub fn sat_set(s: &Futs, phi: &Formula) -> Result<BTreeSet<StateId>, LogicError> {
    phi.check(s.signature())?;
    sat_set_unchecked(s, phi)
}

fn sat_set_unchecked(s: &Futs, phi: &Formula) -> Result<BTreeSet<StateId>, LogicError> {
    match phi {
        Formula::Top => Ok(s.states().clone()),
        Formula::And(l, r) => {
            let l = sat_set_unchecked(s, l)?;
            let r = sat_set_unchecked(s, r)?;
            Ok(l.intersection(&r).cloned().collect())
        }
        Formula::Diamond {
            component,
            label,
            bounds,
            body,
        } => {
            let inner = sat_set_unchecked(s, body)?;
            let mut out = BTreeSet::new();
            for x in s.states() {
                if nested_member(&s.transition(*component, x, label), bounds, &inner)? {
                    out.insert(x.clone());
                }
            }
            Ok(out)
        }
    }
}

pub fn satisfies(s: &Futs, x: &str, phi: &Formula) -> Result<bool, LogicError> {
    if !s.states().contains(x) {
        return Err(LogicError::UnknownState(x.to_string()));
    }
    Ok(sat_set(s, phi)?.contains(x))
}

/// The formula translation paired with `stage`; `sig` is the stage's source signature.
pub fn translate(stage: Stage, sig: &Signature, phi: &Formula) -> Result<Formula, LogicError> {
    phi.check(sig)?;
    stage.check(sig)?;
    Ok(translate_unchecked(stage, sig, phi))
}

fn translate_unchecked(stage: Stage, sig: &Signature, phi: &Formula) -> Formula {
    let (component, label, bounds, body) = match phi {
        Formula::Top => return Formula::Top,
        Formula::And(l, r) => {
            return Formula::and(translate_unchecked(stage, sig, l), translate_unchecked(stage, sig, r))
        }
        Formula::Diamond {
            component,
            label,
            bounds,
            body,
        } => (*component, label, bounds, translate_unchecked(stage, sig, body)),
    };
    let c = &sig.components()[component];
    match stage {
        Stage::Unlabel => {
            let mut b = bounds.clone();
            b[0] = power_dirac(label, &bounds[0], &c.labels, &c.monoids[0]).expect("checked formula");
            Formula::diamond(component, UNIT_LABEL, b, body)
        }
        Stage::Tabularize => {
            let mut b = vec![Weight::nat(1); sig.max_depth() - c.depth()];
            b.extend(bounds.iter().cloned());
            Formula::diamond(component, label.clone(), b, body)
        }
        Stage::Homogenize => {
            let b = bounds
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    homogeneous_section(sig, component, j)
                        .apply(m)
                        .expect("checked formula")
                })
                .collect();
            Formula::diamond(component, label.clone(), b, body)
        }
        Stage::Nest => Formula::diamond(0, nested_label(component, label), bounds.clone(), body),
        Stage::Flatten => bounds
            .iter()
            .rev()
            .fold(body, |acc, m| Formula::diamond(0, label.clone(), vec![m.clone()], acc)),
    }
}

/// Translates along every stage of `r`, in order.
pub fn translate_along(r: &Reduction, phi: &Formula) -> Result<Formula, LogicError> {
    let mut out = phi.clone();
    for (stage, sig) in r.stage_signatures() {
        out = translate(stage, sig, &out)?;
    }
    Ok(out)
}

/// Candidate bounds per component and layer.
pub type Grid = Vec<Vec<BTreeSet<Weight>>>;

fn subset_sums(m: &MonoidDesc, ws: impl Iterator<Item = Weight>) -> Result<BTreeSet<Weight>, LogicError> {
    let mut sums = BTreeSet::from([m.zero()]);
    for w in ws {
        let grown = sums.iter().map(|s| m.add(s, &w)).collect::<Result<Vec<_>, _>>()?;
        sums.extend(grown);
    }
    Ok(sums)
}

fn walk_layers(t: &WeightTerm, layer: usize, out: &mut Vec<BTreeSet<WeightTerm>>) {
    if let WeightTerm::Node(n) = t {
        out[layer].insert(t.clone());
        for k in n.entries().keys() {
            walk_layers(k, layer + 1, out);
        }
    }
}

/// Every class sum realizable over a subset of the entries of some term, per layer.
pub fn default_grid(s: &Futs) -> Result<Grid, LogicError> {
    let mut grid = Vec::new();
    for (i, c) in s.signature().components().iter().enumerate() {
        let mut layers = vec![BTreeSet::new(); c.depth()];
        for (_, _, t) in s.transitions(i) {
            walk_layers(t, 0, &mut layers);
        }
        let mut row = Vec::with_capacity(c.depth());
        for (j, terms) in layers.iter().enumerate() {
            let mut sums = BTreeSet::from([c.monoids[j].zero()]);
            for t in terms {
                let ws = t.entries().expect("node").values().cloned();
                sums.extend(subset_sums(&c.monoids[j], ws)?);
            }
            row.push(sums);
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Splits a weight into its components embedded back into the monoid.
fn atoms(m: &MonoidDesc, w: &Weight) -> Vec<Weight> {
    match (m, w) {
        (MonoidDesc::Product(fs), Weight::Tuple(ws)) if fs.len() > 1 => {
            let mut out = Vec::new();
            for (k, (f, x)) in fs.iter().zip(ws).enumerate() {
                for a in atoms(f, x) {
                    let mut t: Vec<Weight> = fs.iter().map(MonoidDesc::zero).collect();
                    t[k] = a;
                    out.push(Weight::Tuple(t));
                }
            }
            out
        }
        (MonoidDesc::Product(fs), Weight::Tuple(ws)) => atoms(&fs[0], &ws[0])
            .into_iter()
            .map(|a| Weight::Tuple(vec![a]))
            .collect(),
        (MonoidDesc::Power(_, inner), Weight::Map(map)) if map.len() > 1 => map
            .iter()
            .flat_map(|(l, x)| {
                atoms(inner, x)
                    .into_iter()
                    .map(move |a| Weight::Map([(l.clone(), a)].into()))
            })
            .collect(),
        _ => vec![w.clone()],
    }
}

type Bits = Vec<bool>;

/// Printed length, used to prefer short witnesses.
fn bounds_cost(bounds: &[Weight]) -> usize {
    bounds.iter().map(|w| w.to_string().len()).sum()
}

/// Definable state sets, each with a formula defining it.
struct Family {
    sets: BTreeMap<Bits, Formula>,
}

impl Family {
    fn top(n: usize) -> Family {
        Family {
            sets: BTreeMap::from([(vec![true; n], Formula::Top)]),
        }
    }

    /// Adds `set` and its intersections with everything already present.
    fn close_with(&mut self, set: Bits, phi: Formula) {
        if self.sets.contains_key(&set) {
            return;
        }
        let mut pending = vec![(set, phi)];
        while let Some((set, phi)) = pending.pop() {
            if self.sets.contains_key(&set) {
                continue;
            }
            for (other, psi) in &self.sets {
                let meet: Bits = set.iter().zip(other).map(|(a, b)| *a && *b).collect();
                if !self.sets.contains_key(&meet) && meet != set {
                    pending.push((meet, Formula::and(phi.clone(), psi.clone())));
                }
            }
            self.sets.insert(set, phi);
        }
    }
}

struct Oracle<'a> {
    s: &'a Futs,
    states: Vec<StateId>,
    index: BTreeMap<StateId, usize>,
}

impl<'a> Oracle<'a> {
    fn new(s: &'a Futs) -> Oracle<'a> {
        let states: Vec<StateId> = s.states().iter().cloned().collect();
        let index = states.iter().enumerate().map(|(k, x)| (x.clone(), k)).collect();
        Oracle { s, states, index }
    }

    /// Sets `⟦⟨i|a|m⃗⟩ψ⟧` for `m⃗` ranging over `grid` and `ψ` defining `body`,
    /// computed innermost layer first over distinct subterms.
    fn diamond_sets(
        &self,
        i: usize,
        a: &str,
        body: &Bits,
        grid: &[BTreeSet<Weight>],
    ) -> Result<Vec<(Bits, Vec<Weight>)>, LogicError> {
        let depth = grid.len();
        let terms: Vec<WeightTerm> = self
            .states
            .iter()
            .map(|x| self.s.transition(i, x, a).into_owned())
            .collect();
        // layer j holds the distinct subterms of depth `depth - j`
        let layers: Vec<Vec<WeightTerm>> = (0..depth)
            .map(|j| {
                let set: BTreeSet<WeightTerm> = terms.iter().flat_map(|t| t.subterms_at_depth(depth - j)).collect();
                set.into_iter().collect()
            })
            .collect();
        // selection over the children of layer `depth - 1`, i.e. the states
        let mut selections: BTreeMap<Vec<bool>, Vec<Weight>> = BTreeMap::from([(body.clone(), Vec::new())]);
        let mut child_index: BTreeMap<WeightTerm, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, x)| (WeightTerm::leaf(x.clone()), k))
            .collect();
        for j in (0..depth).rev() {
            let monoid = &self.s.signature().components()[i].monoids[j];
            let mut next: BTreeMap<Vec<bool>, Vec<Weight>> = BTreeMap::new();
            for (chosen, suffix) in &selections {
                let sums: Vec<Weight> = layers[j]
                    .iter()
                    .map(|t| {
                        let picked = t
                            .entries()
                            .expect("node")
                            .iter()
                            .filter(|(k, _)| chosen[child_index[*k]])
                            .map(|(_, w)| w);
                        monoid.sum(picked)
                    })
                    .collect::<Result<_, _>>()?;
                for m in &grid[j] {
                    let sel = sums
                        .iter()
                        .map(|s| monoid.nat_leq(m, s))
                        .collect::<Result<Vec<bool>, _>>()?;
                    let mut b = vec![m.clone()];
                    b.extend(suffix.iter().cloned());
                    match next.get(&sel) {
                        Some(old) if bounds_cost(old) <= bounds_cost(&b) => {}
                        _ => {
                            next.insert(sel, b);
                        }
                    }
                }
            }
            selections = next;
            child_index = layers[j].iter().enumerate().map(|(k, t)| (t.clone(), k)).collect();
        }
        Ok(selections
            .into_iter()
            .map(|(sel, bounds)| {
                let bits = terms.iter().map(|t| sel[child_index[t]]).collect();
                (bits, bounds)
            })
            .collect())
    }

    /// Grows the definable family level by level; stops at a fixpoint, after
    /// `depth` levels, or once `stop` holds.
    fn run(&self, depth: usize, grid: &Grid, stop: impl Fn(&Family) -> bool) -> Result<Family, LogicError> {
        let mut family = Family::top(self.states.len());
        let labels = self.s.component_labels();
        for _ in 0..depth {
            if stop(&family) {
                break;
            }
            let before: BTreeSet<Bits> = family.sets.keys().cloned().collect();
            let mut fresh = Vec::new();
            for (body, psi) in &family.sets {
                for (i, a) in &labels {
                    for (bits, bounds) in self.diamond_sets(*i, a, body, &grid[*i])? {
                        fresh.push((bits, Formula::diamond(*i, a.clone(), bounds, psi.clone())));
                    }
                }
            }
            for (bits, phi) in fresh {
                family.close_with(bits, phi);
            }
            if family.sets.len() == before.len() {
                break;
            }
        }
        Ok(family)
    }

    fn partition(&self, family: &Family) -> Partition {
        Partition::from_key(self.states.iter(), |x| {
            let k = self.index[x];
            Some(
                family
                    .sets
                    .keys()
                    .map(|b| if b[k] { '1' } else { '0' })
                    .collect::<String>(),
            )
        })
    }
}

fn check_grid(s: &Futs, grid: &Grid) -> Result<(), LogicError> {
    for (i, c) in s.signature().components().iter().enumerate() {
        let row = grid.get(i).ok_or(LogicError::EmptyGrid { component: i, layer: 0 })?;
        for j in 0..c.depth() {
            match row.get(j) {
                Some(ws) if !ws.is_empty() => {
                    for w in ws {
                        c.monoids[j].check(w)?;
                    }
                }
                _ => return Err(LogicError::EmptyGrid { component: i, layer: j }),
            }
        }
    }
    Ok(())
}

/// Groups states that agree on every formula of modal depth at most `depth`
/// whose bounds come from `grid`.
///
/// Defaults: `depth` is the number of states, `grid` is [`default_grid`].
pub fn bounded_logical_equiv(s: &Futs, depth: Option<usize>, grid: Option<&Grid>) -> Result<Partition, LogicError> {
    let owned;
    let grid = match grid {
        Some(g) => g,
        None => {
            owned = default_grid(s)?;
            &owned
        }
    };
    check_grid(s, grid)?;
    let oracle = Oracle::new(s);
    let family = oracle.run(depth.unwrap_or(s.states().len()), grid, |_| false)?;
    Ok(oracle.partition(&family))
}

fn state_index(s: &Futs, x: &str) -> Result<usize, LogicError> {
    s.states()
        .iter()
        .position(|y| y == x)
        .ok_or_else(|| LogicError::UnknownState(x.to_string()))
}

/// A formula true at exactly one of `x`, `y` in a simple system over a
/// positive cancellative monoid, or `None` if they are bisimilar.
pub fn distinguishing_formula(s: &Futs, x: &str, y: &str) -> Result<Option<Formula>, LogicError> {
    if !s.signature().is_simple() {
        return Err(LogicError::NotSimple);
    }
    let m = &s.signature().components()[0].monoids[0];
    if !(m.is_positive() && m.is_cancellative()) {
        return Err(LogicError::NotCancellative(m.to_string()));
    }
    state_index(s, x)?;
    state_index(s, y)?;
    if largest_bisimulation(s).related(x, y) {
        return Ok(None);
    }
    search_distinguishing(s, x, y)?.map(Some).ok_or(LogicError::NoWitness)
}

/// The search behind [`distinguishing_formula`] without its preconditions.
///
/// Any formula returned is checked to hold at exactly one of the two
/// states; `None` means the search found nothing, which proves nothing.
pub fn search_distinguishing(s: &Futs, x: &str, y: &str) -> Result<Option<Formula>, LogicError> {
    if !s.signature().is_simple() {
        return Err(LogicError::NotSimple);
    }
    if state_index(s, x)? == state_index(s, y)? {
        return Ok(None);
    }
    let oracle = Oracle::new(s);
    let c = &s.signature().components()[0];
    let monoid = &c.monoids[0];
    let mut grid = default_grid(s)?;
    let extra: Vec<Weight> = grid[0][0].iter().flat_map(|w| atoms(monoid, w)).collect();
    grid[0][0].extend(extra);

    let direct = |family: &Family| -> Result<Option<Formula>, LogicError> {
        let mut bodies: Vec<(&Bits, &Formula)> = family.sets.iter().collect();
        bodies.sort_by_key(|(_, psi)| (psi.modal_depth(), psi.size()));
        for (bits, psi) in bodies {
            let set: BTreeSet<WeightTerm> = oracle
                .states
                .iter()
                .zip(bits)
                .filter(|(_, b)| **b)
                .map(|(z, _)| WeightTerm::leaf(z.clone()))
                .collect();
            for a in &c.labels {
                let sx = s.transition(0, x, a).class_sum(&set)?;
                let sy = s.transition(0, y, a).class_sum(&set)?;
                if sx == sy {
                    continue;
                }
                let bound = if !monoid.nat_leq(&sx, &sy)? { sx } else { sy };
                return Ok(Some(Formula::diamond(0, a.clone(), vec![bound], psi.clone())));
            }
        }
        Ok(None)
    };

    let mut family = Family::top(oracle.states.len());
    let mut found = direct(&family)?;
    while found.is_none() {
        let grown = extend_once(&oracle, &family, &grid)?;
        if grown.sets.len() == family.sets.len() {
            break;
        }
        family = grown;
        found = direct(&family)?;
    }
    if let Some(phi) = &found {
        let sat = sat_set(s, phi)?;
        debug_assert!(sat.contains(x) != sat.contains(y));
        if sat.contains(x) == sat.contains(y) {
            return Ok(None);
        }
    }
    Ok(found)
}

fn extend_once(oracle: &Oracle<'_>, family: &Family, grid: &Grid) -> Result<Family, LogicError> {
    let mut out = Family {
        sets: family.sets.clone(),
    };
    let labels = oracle.s.component_labels();
    for (body, psi) in &family.sets {
        for (i, a) in &labels {
            for (bits, bounds) in oracle.diamond_sets(*i, a, body, &grid[*i])? {
                out.close_with(bits, Formula::diamond(*i, a.clone(), bounds, psi.clone()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{ab_plus_a, ring, two_layer_blind_spot, w3};
    use crate::reduce::{to_wts, unlabel};
    use crate::textio::parse_formula;

    fn f(s: &Futs, text: &str) -> Formula {
        parse_formula(text, s.signature()).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<StateId> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn ring_satisfaction() {
        let s = ring();
        let b = f(&s, "<0|b|tt,1/2> T");
        assert_eq!(sat_set(&s, &b).unwrap(), set(&["s1"]));
        let ab = f(&s, "<0|a|tt,1/2> <0|b|tt,1/2> T");
        assert!(satisfies(&s, "s0", &ab).unwrap());
        assert!(!satisfies(&s, "s2", &ab).unwrap());
        let zero = f(&s, "<0|b|ff,0> T");
        assert_eq!(sat_set(&s, &zero).unwrap(), s.states().clone());
        assert_eq!(sat_set(&s, &f(&s, "T")).unwrap(), s.states().clone());
        let with_top = Formula::and(b.clone(), Formula::Top);
        assert_eq!(sat_set(&s, &with_top).unwrap(), sat_set(&s, &b).unwrap());
    }

    #[test]
    fn malformed_formulas() {
        let s = ring();
        let bad = Formula::diamond(0, "a", vec![Weight::Bool(true)], Formula::Top);
        assert!(matches!(sat_set(&s, &bad), Err(LogicError::Arity { .. })));
        let bad = Formula::diamond(0, "z", vec![Weight::Bool(true), Weight::rat(1, 2)], Formula::Top);
        assert!(matches!(sat_set(&s, &bad), Err(LogicError::UnknownLabel { .. })));
    }

    #[test]
    fn translations() {
        let s = ring();
        let phi = f(&s, "<0|a|tt,1/2> T");
        let u = translate(Stage::Unlabel, s.signature(), &phi).unwrap();
        assert_eq!(u.to_string(), "<0|_|{a: tt},1/2> T");
        for st in Stage::ALL {
            if let Ok(t) = translate(st, s.signature(), &Formula::Top) {
                assert_eq!(t, Formula::Top);
            }
        }
        let r = to_wts(&s).unwrap();
        let b = f(&s, "<0|b|tt,1/2> T");
        let t = translate_along(&r, &b).unwrap();
        assert_eq!(t.modal_depth(), 2);
        assert_eq!(sat_set(r.target(), &t).unwrap(), set(&["s1"]));
    }

    #[test]
    fn oracle_defaults() {
        let s = ring();
        assert_eq!(
            bounded_logical_equiv(&s, None, None).unwrap(),
            Partition::identity(s.states())
        );
        let w = w3();
        assert_eq!(
            bounded_logical_equiv(&w, None, None).unwrap().to_string(),
            "{ {x, x'}, {y, z} }"
        );
        assert_eq!(bounded_logical_equiv(&w, Some(0), None).unwrap().num_blocks(), 1);
        let empty: Grid = vec![vec![BTreeSet::new()]];
        assert!(matches!(
            bounded_logical_equiv(&w, None, Some(&empty)),
            Err(LogicError::EmptyGrid { .. })
        ));
    }

    #[test]
    fn conjunction_cannot_see_absence() {
        let s = ab_plus_a();
        assert!(!largest_bisimulation(&s).related("p", "q"));
        assert!(bounded_logical_equiv(&s, None, None).unwrap().related("p", "q"));
    }

    #[test]
    fn nested_layers_escape_the_logic() {
        let s = two_layer_blind_spot();
        assert!(!largest_bisimulation(&s).related("x", "x'"));
        assert!(bounded_logical_equiv(&s, None, None).unwrap().related("x", "x'"));
    }

    #[test]
    fn w3_witnesses() {
        let s = w3();
        let phi = distinguishing_formula(&s, "x", "y").unwrap().unwrap();
        assert_eq!(phi.to_string(), "<0|a|2> T");
        assert_eq!(distinguishing_formula(&s, "x", "x'").unwrap(), None);
        assert_eq!(distinguishing_formula(&s, "y", "z").unwrap(), None);
        assert!(matches!(
            distinguishing_formula(&ring(), "s0", "s1"),
            Err(LogicError::NotSimple)
        ));
        assert!(matches!(
            distinguishing_formula(&ab_plus_a(), "p", "q"),
            Err(LogicError::NotCancellative(_))
        ));
    }

    #[test]
    fn witness_over_reduced_system() {
        let r = to_wts(&ring()).unwrap();
        let phi = search_distinguishing(r.target(), "s0", "s2").unwrap().unwrap();
        let sat = sat_set(r.target(), &phi).unwrap();
        assert!(sat.contains("s0") != sat.contains("s2"));
        let u = unlabel(&w3()).unwrap();
        let phi = distinguishing_formula(u.target(), "x", "z").unwrap().unwrap();
        assert!(satisfies(u.target(), "x", &phi).unwrap());
    }

    #[test]
    fn diamond_operator() {
        let rho = WeightTerm::node(
            1,
            MonoidDesc::NatPlus,
            [
                (WeightTerm::leaf("y"), Weight::nat(1)),
                (WeightTerm::leaf("z"), Weight::nat(1)),
            ],
        )
        .unwrap();
        let ys: BTreeSet<WeightTerm> = [WeightTerm::leaf("y")].into();
        let yz: BTreeSet<WeightTerm> = [WeightTerm::leaf("y"), WeightTerm::leaf("z")].into();
        assert!(diamond_member(&rho, &Weight::nat(1), &ys).unwrap());
        assert!(!diamond_member(&rho, &Weight::nat(2), &ys).unwrap());
        assert!(diamond_member(&rho, &Weight::nat(2), &yz).unwrap());
    }
}
