//! Seeded random systems and formulas for property tests and benchmarks.
//!
//! Generated systems contain clones of some states with leaves randomly
//! redirected to clones, so that non-trivial bisimulations are common.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::logic::{default_grid, Formula};
use crate::monoid::{Label, MonoidDesc, Weight};
use crate::system::{Component, Futs, Signature};
use crate::weightfn::{StateId, WeightTerm};

/// Parameters for [`random_system`].
#[derive(Clone, Debug)]
pub struct Shape {
    /// Total states, clones included.
    pub max_states: usize,
    pub max_components: usize,
    pub max_labels: usize,
    pub max_depth: usize,
    /// Each layer's monoid is drawn from here.
    pub monoids: Vec<MonoidDesc>,
    /// Chance that a given transition is non-zero.
    pub density: f64,
}

impl Shape {
    /// One component, one layer: a WLTS.
    pub fn wlts(monoids: Vec<MonoidDesc>) -> Shape {
        Shape {
            max_states: 5,
            max_components: 1,
            max_labels: 2,
            max_depth: 1,
            monoids,
            density: 0.6,
        }
    }

    pub fn futs(monoids: Vec<MonoidDesc>) -> Shape {
        Shape {
            max_states: 5,
            max_components: 2,
            max_labels: 2,
            max_depth: 2,
            monoids,
            density: 0.6,
        }
    }
}

pub fn random_weight<R: Rng>(rng: &mut R, m: &MonoidDesc) -> Weight {
    match m {
        MonoidDesc::BoolOr => Weight::Bool(rng.gen_bool(0.6)),
        MonoidDesc::NatPlus | MonoidDesc::NatMax => Weight::Nat(BigUint::from(rng.gen_range(0u32..4))),
        MonoidDesc::RatPlus => {
            let den = *[1u64, 2, 3].choose(rng).expect("non-empty");
            Weight::rat(rng.gen_range(0..4), den)
        }
        MonoidDesc::Product(fs) => Weight::Tuple(fs.iter().map(|f| random_weight(rng, f)).collect()),
        MonoidDesc::Power(labels, inner) => Weight::Map(
            labels
                .iter()
                .map(|l| (l.clone(), random_weight(rng, inner)))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        ),
    }
}

fn nonzero_weight<R: Rng>(rng: &mut R, m: &MonoidDesc) -> Weight {
    for _ in 0..16 {
        let w = random_weight(rng, m);
        if !w.is_zero() {
            return w;
        }
    }
    match m {
        MonoidDesc::BoolOr => Weight::Bool(true),
        MonoidDesc::NatPlus | MonoidDesc::NatMax => Weight::nat(1),
        MonoidDesc::RatPlus => Weight::rat(1, 1),
        MonoidDesc::Product(fs) => {
            let mut t: Vec<Weight> = fs.iter().map(MonoidDesc::zero).collect();
            t[0] = nonzero_weight(rng, &fs[0]);
            Weight::Tuple(t)
        }
        MonoidDesc::Power(labels, inner) => {
            let l = labels.iter().next().expect("non-empty").clone();
            Weight::Map([(l, nonzero_weight(rng, inner))].into())
        }
    }
}

/// A random term over `states` with one layer per monoid; inner terms are
/// drawn from a small shared pool so that equal subterms recur.
pub fn random_term<R: Rng>(
    rng: &mut R,
    monoids: &[MonoidDesc],
    states: &[StateId],
    pool: &mut BTreeMap<usize, Vec<WeightTerm>>,
) -> WeightTerm {
    let depth = monoids.len();
    let width = rng.gen_range(1..=3.min(states.len().max(1)));
    let mut entries = Vec::new();
    for _ in 0..width {
        let key = if depth == 1 {
            WeightTerm::leaf(states.choose(rng).expect("non-empty carrier").clone())
        } else {
            let reuse = pool
                .get(&(depth - 1))
                .filter(|p| !p.is_empty() && rng.gen_bool(0.5))
                .cloned();
            match reuse {
                Some(p) => p.choose(rng).expect("non-empty").clone(),
                None => {
                    let t = random_term(rng, &monoids[1..], states, pool);
                    pool.entry(depth - 1).or_default().push(t.clone());
                    t
                }
            }
        };
        entries.push((key, nonzero_weight(rng, &monoids[0])));
    }
    WeightTerm::node(depth, monoids[0].clone(), entries).expect("well-typed by construction")
}

pub fn random_signature<R: Rng>(rng: &mut R, shape: &Shape) -> Signature {
    let n = rng.gen_range(1..=shape.max_components);
    let names = ["a", "b", "c", "d"];
    let rows = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=shape.max_labels.min(names.len()));
            let depth = rng.gen_range(1..=shape.max_depth);
            let monoids = (0..depth)
                .map(|_| shape.monoids.choose(rng).expect("non-empty monoid list").clone())
                .collect();
            Component::new(names[..k].iter().copied(), monoids)
        })
        .collect();
    Signature::new(rows).expect("non-empty rows")
}

/// Replaces every leaf by a random member of its clone group.
fn scatter<R: Rng>(rng: &mut R, t: &WeightTerm, groups: &BTreeMap<StateId, Vec<StateId>>) -> WeightTerm {
    match t {
        WeightTerm::Leaf(x) => WeightTerm::leaf(groups[x].choose(rng).expect("group has its origin").clone()),
        WeightTerm::Node(n) => {
            let entries: Vec<(WeightTerm, Weight)> = n
                .entries()
                .iter()
                .map(|(k, w)| (scatter(rng, k, groups), w.clone()))
                .collect();
            WeightTerm::node(n.depth(), n.monoid().clone(), entries).expect("same shape")
        }
    }
}

pub fn random_system_with<R: Rng>(rng: &mut R, sig: Signature, max_states: usize, density: f64) -> Futs {
    let total = rng.gen_range(1..=max_states.max(1));
    let base = rng.gen_range(1..=total);
    let originals: Vec<StateId> = (0..base).map(|k| format!("s{k}")).collect();
    let mut origin: BTreeMap<StateId, StateId> = originals.iter().map(|x| (x.clone(), x.clone())).collect();
    let mut groups: BTreeMap<StateId, Vec<StateId>> = originals.iter().map(|x| (x.clone(), vec![x.clone()])).collect();
    for k in 0..total - base {
        let of = originals.choose(rng).expect("non-empty").clone();
        let id = format!("c{k}");
        origin.insert(id.clone(), of.clone());
        groups.get_mut(&of).expect("original").push(id);
    }
    let mut behaviour: BTreeMap<(usize, StateId, Label), WeightTerm> = BTreeMap::new();
    for (i, c) in sig.components().iter().enumerate() {
        let mut pool = BTreeMap::new();
        for x in &originals {
            for a in &c.labels {
                if rng.gen_bool(density) {
                    behaviour.insert(
                        (i, x.clone(), a.clone()),
                        random_term(rng, &c.monoids, &originals, &mut pool),
                    );
                }
            }
        }
    }
    let mut s = Futs::new(sig.clone(), origin.keys().cloned());
    for (x, o) in &origin {
        for (i, c) in sig.components().iter().enumerate() {
            for a in &c.labels {
                if let Some(t) = behaviour.get(&(i, o.clone(), a.clone())) {
                    let t = scatter(rng, t, &groups);
                    s.set_transition(i, x, a, t).expect("well-formed by construction");
                }
            }
        }
    }
    s
}

pub fn random_system<R: Rng>(rng: &mut R, shape: &Shape) -> Futs {
    let sig = random_signature(rng, shape);
    random_system_with(rng, sig, shape.max_states, shape.density)
}

/// A random formula of modal depth at most `depth`. Bounds come from the
/// system's realizable class sums half of the time.
pub fn random_formula<R: Rng>(rng: &mut R, s: &Futs, depth: usize) -> Formula {
    let grid = default_grid(s).expect("generated systems are well-formed");
    formula_rec(rng, s.signature(), &grid, depth)
}

fn formula_rec<R: Rng>(rng: &mut R, sig: &Signature, grid: &[Vec<BTreeSet<Weight>>], depth: usize) -> Formula {
    let roll = rng.gen_range(0..10);
    if depth == 0 || roll == 0 {
        return Formula::Top;
    }
    if roll <= 2 {
        return Formula::and(
            formula_rec(rng, sig, grid, depth),
            formula_rec(rng, sig, grid, depth - 1),
        );
    }
    let i = rng.gen_range(0..sig.len());
    let c = &sig.components()[i];
    let labels: Vec<&Label> = c.labels.iter().collect();
    let a = labels.choose(rng).expect("non-empty").to_string();
    let bounds = c
        .monoids
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let pool: Vec<&Weight> = grid[i][j].iter().collect();
            if rng.gen_bool(0.5) && !pool.is_empty() {
                (*pool.choose(rng).expect("non-empty")).clone()
            } else {
                random_weight(rng, m)
            }
        })
        .collect();
    Formula::diamond(i, a, bounds, formula_rec(rng, sig, grid, depth - 1))
}
