//! Reference implementations used as oracles by the integration suites.
//!
//! Nothing here calls the quotient or refinement code of the library: terms
//! are compared by class sums computed directly from the definition.
#![allow(dead_code)]

pub mod laws;

use std::collections::{BTreeMap, BTreeSet};

use futs_core::bisim::Partition;
use futs_core::monoid::{MonoidDesc, Weight};
use futs_core::system::Futs;
use futs_core::weightfn::{StateId, WeightTerm};

/// Groups `items` into classes of `eq`, which must be an equivalence.
pub fn classes<T: Clone, F: FnMut(&T, &T) -> bool>(items: &[T], mut eq: F) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    'next: for x in items {
        for class in out.iter_mut() {
            if eq(&class[0], x) {
                class.push(x.clone());
                continue 'next;
            }
        }
        out.push(vec![x.clone()]);
    }
    out
}

fn sum_over(m: &MonoidDesc, t: &WeightTerm, keys: &[WeightTerm]) -> Weight {
    let entries = t.entries().expect("node");
    let mut acc = m.zero();
    for k in keys {
        if let Some(w) = entries.get(k) {
            acc = m.add(&acc, w).expect("typed");
        }
    }
    acc
}

/// `t R^T u` by the recursive class-sum characterisation.
pub fn oracle_ext(p: &Partition, t: &WeightTerm, u: &WeightTerm) -> bool {
    match (t, u) {
        (WeightTerm::Leaf(x), WeightTerm::Leaf(y)) => p.related(x, y),
        (WeightTerm::Node(_), WeightTerm::Node(_)) => {
            let m = t.monoid().expect("node");
            let keys: Vec<WeightTerm> = t
                .entries()
                .unwrap()
                .keys()
                .chain(u.entries().unwrap().keys())
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            classes(&keys, |a, b| oracle_ext(p, a, b))
                .iter()
                .all(|c| sum_over(m, t, c) == sum_over(m, u, c))
        }
        _ => false,
    }
}

pub fn oracle_is_bisim(s: &Futs, p: &Partition) -> bool {
    let labels = s.component_labels();
    let states: Vec<&StateId> = s.states().iter().collect();
    for (k, x) in states.iter().enumerate() {
        for y in &states[k + 1..] {
            if !p.related(x, y) {
                continue;
            }
            for (i, a) in &labels {
                if !oracle_ext(p, &s.transition(*i, x, a), &s.transition(*i, y, a)) {
                    return false;
                }
            }
        }
    }
    true
}

/// All equivalence relations on `carrier`, by restricted growth strings.
pub fn all_partitions(carrier: &BTreeSet<StateId>) -> Vec<Partition> {
    let xs: Vec<&StateId> = carrier.iter().collect();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; xs.len()];
    loop {
        let mut blocks: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (x, b) in xs.iter().zip(&rgs) {
            blocks.entry(*b).or_default().push(x.as_str());
        }
        out.push(Partition::from_blocks(blocks.into_values()).expect("disjoint"));
        // next restricted growth string
        let mut k = xs.len();
        loop {
            if k <= 1 {
                return out;
            }
            k -= 1;
            let max_prefix = rgs[..k].iter().copied().max().unwrap_or(0);
            if rgs[k] <= max_prefix {
                rgs[k] += 1;
                for r in rgs.iter_mut().skip(k + 1) {
                    *r = 0;
                }
                break;
            }
        }
    }
}

/// The union of every equivalence accepted by `accept`, closed transitively.
pub fn union_closure<F: FnMut(&Partition) -> bool>(carrier: &BTreeSet<StateId>, mut accept: F) -> Partition {
    let xs: Vec<StateId> = carrier.iter().cloned().collect();
    let index: BTreeMap<&str, usize> = xs.iter().enumerate().map(|(k, x)| (x.as_str(), k)).collect();
    let mut parent: Vec<usize> = (0..xs.len()).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for p in all_partitions(carrier) {
        if !accept(&p) {
            continue;
        }
        for (x, y) in p.pairs() {
            let (a, b) = (
                root(&mut parent, index[x.as_str()]),
                root(&mut parent, index[y.as_str()]),
            );
            parent[a] = b;
        }
    }
    Partition::from_key(carrier.iter(), |x| xs[root(&mut parent, index[x.as_str()])].clone())
}

/// Sums `rho` over the leaves in `set`.
pub fn mass(rho: &WeightTerm, set: &BTreeSet<StateId>) -> Weight {
    let m = rho.monoid().expect("node");
    let mut acc = m.zero();
    for (k, w) in rho.entries().unwrap() {
        if k.as_leaf().is_some_and(|x| set.contains(x)) {
            acc = m.add(&acc, w).unwrap();
        }
    }
    acc
}

/// `rho ∈ <m>Y` straight from the definition.
pub fn in_diamond(rho: &WeightTerm, m: &Weight, set: &BTreeSet<StateId>) -> bool {
    let monoid = rho.monoid().expect("node");
    monoid.nat_leq(m, &mass(rho, set)).unwrap()
}
