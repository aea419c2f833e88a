//! Small example systems used throughout the tests and the documentation.

use crate::monoid::{MonoidDesc, Weight};
use crate::system::{Component, Futs, Signature};
use crate::weightfn::WeightTerm;

fn leaf(s: &str) -> WeightTerm {
    WeightTerm::leaf(s)
}

fn dist(entries: &[(&str, Weight)]) -> WeightTerm {
    WeightTerm::node(
        1,
        MonoidDesc::RatPlus,
        entries.iter().map(|(k, w)| (leaf(k), w.clone())),
    )
    .unwrap()
}

fn set_of(t: WeightTerm) -> WeightTerm {
    WeightTerm::dirac(t, Weight::Bool(true), MonoidDesc::BoolOr).unwrap()
}

/// The probabilistic ULTraS with states `s0..s3`: each `s_i` moves on `a` to
/// the distribution `r_i` (half on `s_i`, half on `s_{i+1}`), and `s1` moves on
/// `b` to `r4 = {s0: 1/6, s2: 1/2, s3: 1/3}`.
pub fn ring() -> Futs {
    let sig = Signature::new(vec![Component::new(
        ["a", "b"],
        vec![MonoidDesc::BoolOr, MonoidDesc::RatPlus],
    )])
    .unwrap();
    let mut s = Futs::new(sig, ["s0", "s1", "s2", "s3"]);
    for i in 0..4 {
        let here = format!("s{i}");
        let next = format!("s{}", (i + 1) % 4);
        let r = dist(&[(&here, Weight::rat(1, 2)), (&next, Weight::rat(1, 2))]);
        s.set_transition(0, &here, "a", set_of(r)).unwrap();
    }
    let r4 = dist(&[
        ("s0", Weight::rat(1, 6)),
        ("s2", Weight::rat(1, 2)),
        ("s3", Weight::rat(1, 3)),
    ]);
    s.set_transition(0, "s1", "b", set_of(r4)).unwrap();
    s
}

/// A WLTS over `nat-plus`: `x --a,2--> y`, `x' --a,1--> y`, `x' --a,1--> z`.
pub fn w3() -> Futs {
    let mut s = Futs::new(Signature::simple(["a"], MonoidDesc::NatPlus), ["x", "x'", "y", "z"]);
    let t = |entries: &[(&str, u64)]| {
        WeightTerm::node(
            1,
            MonoidDesc::NatPlus,
            entries.iter().map(|(k, w)| (leaf(k), Weight::nat(*w))),
        )
        .unwrap()
    };
    s.set_transition(0, "x", "a", t(&[("y", 2)])).unwrap();
    s.set_transition(0, "x'", "a", t(&[("y", 1), ("z", 1)])).unwrap();
    s
}

/// Two self-looping states over `bool-or`.
pub fn selfloops() -> Futs {
    let mut s = Futs::new(Signature::simple(["a"], MonoidDesc::BoolOr), ["p", "q"]);
    for x in ["p", "q"] {
        let t = WeightTerm::dirac(leaf(x), Weight::Bool(true), MonoidDesc::BoolOr).unwrap();
        s.set_transition(0, x, "a", t).unwrap();
    }
    s
}

/// `P = a.b + a` and `Q = a.b` as one LTS over `bool-or`, sharing the
/// deadlocked state `nil`.
pub fn ab_plus_a() -> Futs {
    let mut s = Futs::new(
        Signature::simple(["a", "b"], MonoidDesc::BoolOr),
        ["nil", "p", "p1", "q", "q1"],
    );
    let set = |xs: &[&str]| {
        WeightTerm::node(1, MonoidDesc::BoolOr, xs.iter().map(|x| (leaf(x), Weight::Bool(true)))).unwrap()
    };
    s.set_transition(0, "p", "a", set(&["p1", "nil"])).unwrap();
    s.set_transition(0, "p1", "b", set(&["nil"])).unwrap();
    s.set_transition(0, "q", "a", set(&["q1"])).unwrap();
    s.set_transition(0, "q1", "b", set(&["nil"])).unwrap();
    s
}

/// Two non-bisimilar states that no finite-conjunction formula separates
/// when the system has two weighted layers over `nat-plus`.
///
/// `x` and `x'` each reach three inner functions with weight 1. Writing an
/// inner function as the pair of its masses on `y` and `z`, `x` reaches
/// `(0,1), (1,2), (2,0)` and `x'` reaches `(0,2), (1,0), (2,1)`. The mass on
/// `y`, the mass on `z` and the total mass agree as multisets, so every
/// single-threshold test counts the same number of inner functions on both
/// sides, while the multisets of pairs differ.
pub fn two_layer_blind_spot() -> Futs {
    let sig = Signature::new(vec![Component::new(
        ["a", "b", "c"],
        vec![MonoidDesc::NatPlus, MonoidDesc::NatPlus],
    )])
    .unwrap();
    let mut s = Futs::new(sig, ["w", "x", "x'", "y", "z"]);
    let inner = |ym: u64, zm: u64| {
        WeightTerm::node(
            1,
            MonoidDesc::NatPlus,
            [(leaf("y"), Weight::nat(ym)), (leaf("z"), Weight::nat(zm))],
        )
        .unwrap()
    };
    let outer = |pairs: &[(u64, u64)]| {
        WeightTerm::node(
            2,
            MonoidDesc::NatPlus,
            pairs.iter().map(|(a, b)| (inner(*a, *b), Weight::nat(1))),
        )
        .unwrap()
    };
    s.set_transition(0, "x", "a", outer(&[(0, 1), (1, 2), (2, 0)])).unwrap();
    s.set_transition(0, "x'", "a", outer(&[(0, 2), (1, 0), (2, 1)]))
        .unwrap();
    let to_w = WeightTerm::dirac(
        WeightTerm::dirac(leaf("w"), Weight::nat(1), MonoidDesc::NatPlus).unwrap(),
        Weight::nat(1),
        MonoidDesc::NatPlus,
    )
    .unwrap();
    s.set_transition(0, "y", "b", to_w.clone()).unwrap();
    s.set_transition(0, "z", "c", to_w).unwrap();
    s
}
