//! One-instance checkers for the extension, bisimulation and modal-operator
//! laws. Each returns `Err` with a printable counterexample.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use futs_core::bisim::{ext_related, is_bisimulation, largest_bisimulation, Partition};
use futs_core::generate::{random_system_with, random_term, random_weight};
use futs_core::logic::{diamond_member, sat_set, Formula};
use futs_core::monoid::{monoid_section, Homomorphism, MonoidDesc, Weight};
use futs_core::reduce::{component_projection, flatten, term_state_id};
use futs_core::system::{Component, Futs, Signature};
use futs_core::weightfn::{StateId, WeightTerm};

use super::{all_partitions, classes, oracle_ext, oracle_is_bisim};

pub type Law = fn(&mut ChaCha8Rng) -> Result<(), String>;

pub fn catalog() -> Vec<MonoidDesc> {
    vec![
        MonoidDesc::BoolOr,
        MonoidDesc::NatPlus,
        MonoidDesc::NatMax,
        MonoidDesc::RatPlus,
        MonoidDesc::Product(vec![MonoidDesc::NatPlus, MonoidDesc::RatPlus]),
        MonoidDesc::Product(vec![MonoidDesc::BoolOr, MonoidDesc::NatPlus]),
        MonoidDesc::Power(["a".into(), "b".into()].into(), Box::new(MonoidDesc::NatPlus)),
    ]
}

pub fn random_monoid(rng: &mut ChaCha8Rng) -> MonoidDesc {
    catalog().choose(rng).unwrap().clone()
}

fn random_product(rng: &mut ChaCha8Rng) -> MonoidDesc {
    let k = rng.gen_range(1..=3);
    let leaves = [MonoidDesc::BoolOr, MonoidDesc::NatPlus, MonoidDesc::RatPlus];
    MonoidDesc::Product((0..k).map(|_| leaves.choose(rng).unwrap().clone()).collect())
}

pub fn carrier(n: usize) -> Vec<StateId> {
    (0..n).map(|k| format!("s{k}")).collect()
}

pub fn random_partition(rng: &mut ChaCha8Rng, xs: &[StateId]) -> Partition {
    let k = rng.gen_range(1..=xs.len().max(1));
    let keys: BTreeMap<&StateId, usize> = xs.iter().map(|x| (x, rng.gen_range(0..k))).collect();
    Partition::from_key(xs.iter(), |x| keys[x])
}

pub fn random_subset(rng: &mut ChaCha8Rng, xs: &[StateId]) -> BTreeSet<StateId> {
    xs.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

fn term(rng: &mut ChaCha8Rng, monoids: &[MonoidDesc], xs: &[StateId]) -> WeightTerm {
    random_term(rng, monoids, xs, &mut BTreeMap::new())
}

/// Moves leaves to random members of their block, so that related pairs are common.
fn blur(rng: &mut ChaCha8Rng, t: &WeightTerm, p: &Partition) -> WeightTerm {
    let blocks: Vec<Vec<StateId>> = p.blocks().into_values().map(|b| b.into_iter().collect()).collect();
    blur_with(rng, t, &blocks)
}

fn blur_with(rng: &mut ChaCha8Rng, t: &WeightTerm, blocks: &[Vec<StateId>]) -> WeightTerm {
    match t {
        WeightTerm::Leaf(x) => {
            let b = blocks.iter().find(|b| b.contains(x)).unwrap();
            WeightTerm::leaf(b.choose(rng).unwrap().clone())
        }
        WeightTerm::Node(n) => {
            let entries: Vec<(WeightTerm, Weight)> = n
                .entries()
                .iter()
                .map(|(k, w)| (blur_with(rng, k, blocks), w.clone()))
                .collect();
            WeightTerm::node(n.depth(), n.monoid().clone(), entries).unwrap()
        }
    }
}

fn pair(rng: &mut ChaCha8Rng, monoids: &[MonoidDesc], xs: &[StateId], p: &Partition) -> (WeightTerm, WeightTerm) {
    let t = term(rng, monoids, xs);
    let u = if rng.gen_bool(0.6) {
        blur(rng, &t, p)
    } else {
        term(rng, monoids, xs)
    };
    (t, u)
}

/// `(R^S)^T = R^{TS}` for weight-function functors, which preserve injections.
pub fn extension_composition(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let xs = carrier(rng.gen_range(1..=4));
    let depth = rng.gen_range(2..=3);
    let monoids: Vec<MonoidDesc> = (0..depth).map(|_| random_monoid(rng)).collect();
    let p = random_partition(rng, &xs);
    let (t, u) = pair(rng, &monoids, &xs, &p);
    let layered = oracle_ext(&p, &t, &u);
    let direct = ext_related(&p, &t, &u).map_err(|e| e.to_string())?;
    if layered == direct {
        Ok(())
    } else {
        Err(format!(
            "R = {p}, t = {t}, u = {u}: (R^S)^T gives {layered}, R^(TS) gives {direct}"
        ))
    }
}

fn project(t: &WeightTerm, factors: &[MonoidDesc], k: usize) -> WeightTerm {
    let pi = Homomorphism::Projection {
        factors: factors.to_vec(),
        index: k,
    };
    let n = t.as_node().unwrap();
    let entries: Vec<(WeightTerm, Weight)> = n
        .entries()
        .iter()
        .map(|(key, w)| (key.clone(), pi.apply(w).unwrap()))
        .collect();
    WeightTerm::node(n.depth(), factors[k].clone(), entries).unwrap()
}

/// `F_{∏M_k} ≅ ∏F_{M_k}` and extensions agree across the isomorphism.
pub fn extension_product(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let xs = carrier(rng.gen_range(1..=4));
    let top = random_product(rng);
    let factors = match &top {
        MonoidDesc::Product(fs) => fs.clone(),
        _ => unreachable!(),
    };
    let mut monoids = vec![top];
    if rng.gen_bool(0.4) {
        monoids.push(random_monoid(rng));
    }
    let p = random_partition(rng, &xs);
    let (t, u) = pair(rng, &monoids, &xs, &p);
    let whole = ext_related(&p, &t, &u).map_err(|e| e.to_string())?;
    let parts = (0..factors.len()).all(|k| oracle_ext(&p, &project(&t, &factors, k), &project(&u, &factors, k)));
    if whole == parts {
        Ok(())
    } else {
        Err(format!(
            "R = {p}, t = {t}, u = {u}: product gives {whole}, factors give {parts}"
        ))
    }
}

/// `(R|_X)^T = R^T|_{TX}`.
pub fn extension_restriction(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let zs = carrier(rng.gen_range(2..=5));
    let mut sub = random_subset(rng, &zs);
    if sub.is_empty() {
        sub.insert(zs[0].clone());
    }
    let xs: Vec<StateId> = sub.iter().cloned().collect();
    let depth = rng.gen_range(1..=2);
    let monoids: Vec<MonoidDesc> = (0..depth).map(|_| random_monoid(rng)).collect();
    let p = random_partition(rng, &zs);
    let restricted = p.restrict(&sub);
    let (t, u) = pair(rng, &monoids, &xs, &restricted);
    let lhs = oracle_ext(&restricted, &t, &u);
    let rhs = ext_related(&p, &t, &u).map_err(|e| e.to_string())?;
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "R = {p}, X = {}, t = {t}, u = {u}: (R|X)^T gives {lhs}, R^T|TX gives {rhs}",
            show(&sub)
        ))
    }
}

fn random_injection(rng: &mut ChaCha8Rng) -> Homomorphism {
    let leaves = [MonoidDesc::BoolOr, MonoidDesc::NatPlus, MonoidDesc::RatPlus];
    let m = leaves.choose(rng).unwrap().clone();
    match rng.gen_range(0..3) {
        0 => Homomorphism::Identity(m),
        1 => {
            let mut factors: Vec<MonoidDesc> = (0..rng.gen_range(1..=2))
                .map(|_| leaves.choose(rng).unwrap().clone())
                .collect();
            let k = rng.gen_range(0..=factors.len());
            factors.insert(k, m);
            monoid_section(k, &MonoidDesc::Product(factors)).unwrap()
        }
        _ => {
            let labels: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
            let label = if rng.gen_bool(0.5) { "a" } else { "b" };
            let inner = Homomorphism::LabelSection {
                labels,
                label: label.into(),
                inner: m.clone(),
            };
            let outer = MonoidDesc::Product(vec![inner.target(), MonoidDesc::NatPlus]);
            Homomorphism::compose(inner, monoid_section(0, &outer).unwrap()).unwrap()
        }
    }
}

/// For an injective transformation μ: `φ R^T ψ ⟺ μφ R^S μψ`.
pub fn injective_transformation(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let xs = carrier(rng.gen_range(1..=4));
    let h = random_injection(rng);
    let mut monoids = vec![h.source()];
    if rng.gen_bool(0.4) {
        monoids.push(random_monoid(rng));
    }
    let mut mapped = monoids.clone();
    mapped[0] = h.target();
    let p = random_partition(rng, &xs);
    let (t, u) = pair(rng, &monoids, &xs, &p);
    let mu = |v: &WeightTerm| {
        v.map_weights(&mapped, &|level, w| if level == 0 { h.apply(w) } else { Ok(w.clone()) })
            .unwrap()
    };
    let (mt, mu_u) = (mu(&t), mu(&u));
    let before = ext_related(&p, &t, &u).map_err(|e| e.to_string())?;
    let after = oracle_ext(&p, &mt, &mu_u);
    if before == after {
        Ok(())
    } else {
        Err(format!(
            "R = {p}, t = {t}, u = {u}, μ through {}: {before} before, {after} after",
            h.target()
        ))
    }
}

fn random_combined(rng: &mut ChaCha8Rng) -> Futs {
    let n = rng.gen_range(1..=3);
    let rows = (0..n)
        .map(|_| {
            let labels = if rng.gen_bool(0.5) { vec!["a"] } else { vec!["a", "b"] };
            let depth = rng.gen_range(1..=2);
            Component::new(labels, (0..depth).map(|_| random_monoid(rng)).collect())
        })
        .collect();
    random_system_with(rng, Signature::new(rows).unwrap(), 4, 0.7)
}

/// `bis(α) = ∩ bis(π_i α)` over every equivalence on the carrier.
pub fn bisim_product(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = random_combined(rng);
    let projections: Vec<Futs> = s
        .component_labels()
        .iter()
        .map(|(i, a)| component_projection(&s, *i, a).unwrap())
        .collect();
    for p in all_partitions(s.states()) {
        let whole = is_bisimulation(&s, &p).map_err(|e| e.to_string())?;
        let parts = projections.iter().all(|q| oracle_is_bisim(q, &p));
        if whole != parts {
            return Err(format!(
                "R = {p} on\n{}\nwhole system says {whole}, projections say {parts}",
                futs_core::textio::write_system(&s)
            ));
        }
    }
    Ok(())
}

/// An unlabelled nested system of depth 2 or 3 over one monoid.
pub fn random_homogeneous_nested(rng: &mut ChaCha8Rng, max_states: usize) -> Futs {
    let m = random_monoid(rng);
    let depth = rng.gen_range(2..=3);
    let sig = Signature::new(vec![Component::new(["_"], vec![m; depth])]).unwrap();
    random_system_with(rng, sig, max_states, 0.8)
}

/// Both implications of the flattening correspondence. The witness `R'` is
/// built from the definition: `R` on states, `R^{T^k}` on depth-k terms.
pub fn bisim_flattening(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = random_homogeneous_nested(rng, 4);
    let flat = flatten(&s).map_err(|e| e.to_string())?.target().clone();
    let xs = s.states().clone();
    let mut terms: BTreeMap<StateId, WeightTerm> = BTreeMap::new();
    for (_, _, t) in s.transitions(0) {
        for d in 1..t.depth() {
            for sub in t.subterms_at_depth(d) {
                terms.insert(term_state_id(&sub), sub);
            }
        }
    }
    let expected: BTreeSet<StateId> = xs.iter().cloned().chain(terms.keys().cloned()).collect();
    if &expected != flat.states() {
        return Err(format!(
            "flattened carrier {:?}, expected {:?}",
            flat.states(),
            expected
        ));
    }
    let show = || futs_core::textio::write_system(&s);
    let mut found = vec![Partition::identity(flat.states().iter()), largest_bisimulation(&flat)];
    for r in all_partitions(&xs) {
        if !oracle_is_bisim(&s, &r) {
            continue;
        }
        let items: Vec<WeightTerm> = terms.values().cloned().collect();
        let mut blocks: Vec<Vec<StateId>> = r.blocks().into_values().map(|b| b.into_iter().collect()).collect();
        for class in classes(&items, |a, b| a.depth() == b.depth() && oracle_ext(&r, a, b)) {
            blocks.push(class.iter().map(term_state_id).collect());
        }
        let lifted = Partition::from_blocks(blocks).unwrap();
        if !oracle_is_bisim(&flat, &lifted) || lifted.restrict(&xs) != r {
            return Err(format!(
                "R = {r} is a bisimulation but its lift {lifted} is not one of the flattening of\n{}",
                show()
            ));
        }
        found.push(lifted);
    }
    if flat.states().len() <= 7 {
        found = all_partitions(flat.states())
            .into_iter()
            .filter(|q| oracle_is_bisim(&flat, q))
            .collect();
    } else {
        let ids: Vec<StateId> = flat.states().iter().cloned().collect();
        for _ in 0..60 {
            let q = random_partition(rng, &ids);
            if oracle_is_bisim(&flat, &q) {
                found.push(q);
            }
        }
    }
    for q in found {
        let back = q.restrict(&xs);
        if !oracle_is_bisim(&s, &back) {
            return Err(format!(
                "{q} is a bisimulation of the flattening but {back} is not one of\n{}",
                show()
            ));
        }
    }
    Ok(())
}

fn leaf_set(xs: &BTreeSet<StateId>) -> BTreeSet<WeightTerm> {
    xs.iter().map(WeightTerm::leaf).collect()
}

fn member(rho: &WeightTerm, m: &Weight, ys: &BTreeSet<StateId>) -> bool {
    diamond_member(rho, m, &leaf_set(ys)).unwrap()
}

struct ModalInstance {
    monoid: MonoidDesc,
    xs: Vec<StateId>,
    rho: WeightTerm,
}

fn modal_instance(rng: &mut ChaCha8Rng, monoid: MonoidDesc) -> ModalInstance {
    let xs = carrier(rng.gen_range(1..=4));
    let rho = term(rng, std::slice::from_ref(&monoid), &xs);
    ModalInstance { monoid, xs, rho }
}

fn positive_monoid(rng: &mut ChaCha8Rng) -> MonoidDesc {
    random_monoid(rng)
}

/// `⟨m⟩(Y ∩ Y') = ⟨m⟩Y ∩ ⟨m⟩Y'`.
pub fn modal_intersection(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m0 = positive_monoid(rng);
    let ModalInstance { monoid, xs, rho } = modal_instance(rng, m0);
    let m = random_weight(rng, &monoid);
    let (y1, y2) = (random_subset(rng, &xs), random_subset(rng, &xs));
    let meet: BTreeSet<StateId> = y1.intersection(&y2).cloned().collect();
    let lhs = member(&rho, &m, &meet);
    let rhs = member(&rho, &m, &y1) && member(&rho, &m, &y2);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "ρ = {rho}, m = {m}, Y = {}, Y' = {}: ρ ∈ ⟨m⟩(Y∩Y') is {lhs}, ρ ∈ ⟨m⟩Y ∩ ⟨m⟩Y' is {rhs}",
            show(&y1),
            show(&y2)
        ))
    }
}

/// `⟨m + m'⟩Y = ⟨m⟩Y ∩ ⟨m'⟩Y`.
pub fn modal_sum(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m0 = positive_monoid(rng);
    let ModalInstance { monoid, xs, rho } = modal_instance(rng, m0);
    let (a, b) = (random_weight(rng, &monoid), random_weight(rng, &monoid));
    let ab = monoid.add(&a, &b).unwrap();
    let ys = random_subset(rng, &xs);
    let lhs = member(&rho, &ab, &ys);
    let rhs = member(&rho, &a, &ys) && member(&rho, &b, &ys);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "ρ = {rho}, m = {a}, m' = {b}, Y = {}: ρ ∈ ⟨m+m'⟩Y is {lhs}, ρ ∈ ⟨m⟩Y ∩ ⟨m'⟩Y is {rhs}",
            show(&ys)
        ))
    }
}

/// `⟨(m_k)⟩Y = ∩ ⟨ι_k(m_k)⟩Y` over a product monoid.
pub fn modal_projection(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let product = random_product(rng);
    let ModalInstance { monoid, xs, rho } = modal_instance(rng, product);
    let m = random_weight(rng, &monoid);
    let Weight::Tuple(parts) = &m else { unreachable!() };
    let ys = random_subset(rng, &xs);
    let lhs = member(&rho, &m, &ys);
    let rhs = parts
        .iter()
        .enumerate()
        .all(|(k, mk)| member(&rho, &monoid_section(k, &monoid).unwrap().apply(mk).unwrap(), &ys));
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "ρ = {rho}, m = {m}, Y = {}: tuple bound gives {lhs}, sections give {rhs}",
            show(&ys)
        ))
    }
}

/// `ρ ∈ ⟨m⟩Y ⟺ f∘ρ ∈ ⟨f(m)⟩Y` for injective `f`.
pub fn modal_homomorphism(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = random_injection(rng);
    let ModalInstance { monoid, xs, rho } = modal_instance(rng, f.source());
    let m = random_weight(rng, &monoid);
    let ys = random_subset(rng, &xs);
    let frho = rho.map_weights(&[f.target()], &|_, w| f.apply(w)).unwrap();
    let lhs = member(&rho, &m, &ys);
    let rhs = member(&frho, &f.apply(&m).unwrap(), &ys);
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!(
            "ρ = {rho}, m = {m}, f into {}, Y = {}: {lhs} before, {rhs} after",
            f.target(),
            show(&ys)
        ))
    }
}

fn random_simple(rng: &mut ChaCha8Rng) -> Futs {
    let m = [MonoidDesc::BoolOr, MonoidDesc::NatPlus, MonoidDesc::RatPlus]
        .choose(rng)
        .unwrap()
        .clone();
    random_system_with(rng, Signature::simple(["a", "b"], m), 5, 0.7)
}

/// `⟦⟨m⟩(φ∧φ')⟧ = ⟦⟨m⟩φ ∧ ⟨m⟩φ'⟧` in simple systems.
pub fn diamond_distribution(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = random_simple(rng);
    let phi = futs_core::generate::random_formula(rng, &s, 2);
    let psi = futs_core::generate::random_formula(rng, &s, 2);
    let a = if rng.gen_bool(0.5) { "a" } else { "b" };
    let m = futs_core::generate::random_formula(rng, &s, 1);
    let bound = match m {
        Formula::Diamond { bounds, .. } => bounds,
        _ => vec![random_weight(rng, &s.signature().components()[0].monoids[0])],
    };
    let joint = Formula::diamond(0, a, bound.clone(), Formula::and(phi.clone(), psi.clone()));
    let split = Formula::and(
        Formula::diamond(0, a, bound.clone(), phi.clone()),
        Formula::diamond(0, a, bound, psi.clone()),
    );
    let (l, r) = (sat_set(&s, &joint).unwrap(), sat_set(&s, &split).unwrap());
    if l == r {
        Ok(())
    } else {
        Err(format!(
            "⟦{joint}⟧ = {} but ⟦{split}⟧ = {} in\n{}",
            show(&l),
            show(&r),
            futs_core::textio::write_system(&s)
        ))
    }
}

/// The instance `a.b + a.c` against `⟨a⟩(⟨b⟩ ∧ ⟨c⟩)`.
pub fn distribution_counterexample() -> Result<(), String> {
    let s = futs_core::textio::parse_system(
        "futs\nlabels A0 = { a, b, c }\nmonoids M0 = [ bool-or ]\nstates { nil, p, p1, p2 }\n\
         trans 0 p a -> {p1: tt, p2: tt}\ntrans 0 p1 b -> {nil: tt}\ntrans 0 p2 c -> {nil: tt}\n",
    )
    .unwrap();
    let tt = || vec![Weight::Bool(true)];
    let b = Formula::diamond(0, "b", tt(), Formula::Top);
    let c = Formula::diamond(0, "c", tt(), Formula::Top);
    let joint = Formula::diamond(0, "a", tt(), Formula::and(b.clone(), c.clone()));
    let split = Formula::and(Formula::diamond(0, "a", tt(), b), Formula::diamond(0, "a", tt(), c));
    let (l, r) = (sat_set(&s, &joint).unwrap(), sat_set(&s, &split).unwrap());
    if l == r {
        Ok(())
    } else {
        Err(format!(
            "⟦{joint}⟧ = {} but ⟦{split}⟧ = {} in a.b + a.c",
            show(&l),
            show(&r)
        ))
    }
}

pub fn show(xs: &BTreeSet<StateId>) -> String {
    format!("{{{}}}", xs.iter().cloned().collect::<Vec<_>>().join(", "))
}

/// Runs `law` on `n` seeded instances; returns the failure count and the first counterexample.
pub fn run(law: Law, seed: u64, n: usize) -> (usize, Option<String>) {
    use rand::SeedableRng;
    let mut failures = 0;
    let mut first = None;
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(k as u64));
        if let Err(e) = law(&mut rng) {
            failures += 1;
            first.get_or_insert(e);
        }
    }
    (failures, first)
}
