//! Bisimulation-coherent reductions from general FuTSs down to weighted
//! transition systems, and an exhaustive checker for their coherence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bisim::{equivalence_relations, is_bisimulation, largest_bisimulation, BisimError, Partition};
use crate::monoid::{power_dirac, Homomorphism, Label, MonoidDesc, Weight};
use crate::system::{relabel_weights, CarrierMap, Component, Futs, Signature, SystemError};
use crate::weightfn::{StateId, WeightTerm};

/// The single label left after unlabelling.
pub const UNIT_LABEL: &str = "_";

/// Largest carrier accepted by [`VerifyMode::Exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error("{stage} requires {requirement}")]
    Precondition { stage: Stage, requirement: &'static str },
    #[error("reductions do not compose: the second one starts from a different system")]
    NotComposable,
    #[error("the partition is not a bisimulation of the {0} system")]
    NotABisimulation(&'static str),
    #[error("exhaustive verification is limited to {EXHAUSTIVE_LIMIT} states, the source has {0}")]
    TooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Unlabel,
    Tabularize,
    Homogenize,
    Nest,
    Flatten,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Unlabel,
        Stage::Tabularize,
        Stage::Homogenize,
        Stage::Nest,
        Stage::Flatten,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Unlabel => "unlabel",
            Stage::Tabularize => "tabularize",
            Stage::Homogenize => "homogenize",
            Stage::Nest => "nest",
            Stage::Flatten => "flatten",
        }
    }

    /// Checks the stage's precondition on a signature.
    pub fn check(self, sig: &Signature) -> Result<(), ReduceError> {
        let fail = |requirement| {
            Err(ReduceError::Precondition {
                stage: self,
                requirement,
            })
        };
        match self {
            Stage::Unlabel | Stage::Tabularize | Stage::Homogenize => Ok(()),
            Stage::Nest if !(sig.is_tabular() && sig.is_homogeneous()) => fail("tabular homogeneous input"),
            Stage::Flatten if !(sig.is_unlabelled() && sig.is_homogeneous() && sig.is_nested()) => {
                fail("unlabelled homogeneous nested input")
            }
            Stage::Nest | Stage::Flatten => Ok(()),
        }
    }

    /// The signature this stage produces from `sig`.
    pub fn target_signature(self, sig: &Signature) -> Result<Signature, ReduceError> {
        self.check(sig)?;
        let rows = sig.components();
        let out = match self {
            Stage::Unlabel => rows
                .iter()
                .map(|c| {
                    let mut monoids = c.monoids.clone();
                    monoids[0] = MonoidDesc::Power(c.labels.clone(), Box::new(monoids[0].clone()));
                    Component::new([UNIT_LABEL], monoids)
                })
                .collect(),
            Stage::Tabularize => {
                let l = sig.max_depth();
                rows.iter()
                    .map(|c| {
                        let mut monoids = vec![MonoidDesc::NatPlus; l - c.depth()];
                        monoids.extend(c.monoids.iter().cloned());
                        Component {
                            labels: c.labels.clone(),
                            monoids,
                        }
                    })
                    .collect()
            }
            Stage::Homogenize => {
                let q = homogeneous_monoid(sig);
                rows.iter()
                    .map(|c| Component {
                        labels: c.labels.clone(),
                        monoids: vec![q.clone(); c.depth()],
                    })
                    .collect()
            }
            Stage::Nest => vec![Component {
                labels: rows
                    .iter()
                    .enumerate()
                    .flat_map(|(i, c)| c.labels.iter().map(move |a| nested_label(i, a)))
                    .collect(),
                monoids: rows[0].monoids.clone(),
            }],
            Stage::Flatten => vec![Component {
                labels: rows[0].labels.clone(),
                monoids: vec![rows[0].monoids[0].clone()],
            }],
        };
        Ok(Signature::new(out)?)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The fused label for `(i, a)` after nesting.
pub fn nested_label(i: usize, a: &str) -> Label {
    format!("c{i}_{a}")
}

/// `∏_{i,j} M_{i,j}` in row-major order.
pub fn homogeneous_monoid(sig: &Signature) -> MonoidDesc {
    MonoidDesc::Product(
        sig.components()
            .iter()
            .flat_map(|c| c.monoids.iter().cloned())
            .collect(),
    )
}

/// The section `ι_{i,j}` into [`homogeneous_monoid`].
pub fn homogeneous_section(sig: &Signature, i: usize, j: usize) -> Homomorphism {
    let factors: Vec<MonoidDesc> = sig
        .components()
        .iter()
        .flat_map(|c| c.monoids.iter().cloned())
        .collect();
    let index = sig.components()[..i].iter().map(Component::depth).sum::<usize>() + j;
    Homomorphism::Section { factors, index }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum StepKind {
    /// The carrier is unchanged.
    Identity,
    /// Originals are kept; the other target states stand for these terms.
    Flatten(BTreeMap<StateId, WeightTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Step {
    stage: Stage,
    source_sig: Signature,
    kind: StepKind,
}

/// A chain of reduction stages applied to one system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    source: Futs,
    target: Futs,
    carrier_map: CarrierMap,
    full: bool,
    steps: Vec<Step>,
}

impl Reduction {
    /// The unit of [`Reduction::then`].
    pub fn identity(s: &Futs) -> Reduction {
        Reduction {
            source: s.clone(),
            target: s.clone(),
            carrier_map: CarrierMap::identity(s.states()),
            full: true,
            steps: Vec::new(),
        }
    }

    pub fn source(&self) -> &Futs {
        &self.source
    }

    pub fn target(&self) -> &Futs {
        &self.target
    }

    pub fn carrier_map(&self) -> &CarrierMap {
        &self.carrier_map
    }

    /// Whether the carrier map is surjective.
    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn stages(&self) -> Vec<Stage> {
        self.steps.iter().map(|s| s.stage).collect()
    }

    /// Source signature of every stage, in order.
    pub fn stage_signatures(&self) -> Vec<(Stage, &Signature)> {
        self.steps.iter().map(|s| (s.stage, &s.source_sig)).collect()
    }

    /// `next ∘ self`; `next` must start where `self` ends.
    pub fn then(&self, next: &Reduction) -> Result<Reduction, ReduceError> {
        if next.source != self.target {
            return Err(ReduceError::NotComposable);
        }
        let mut steps = self.steps.clone();
        steps.extend(next.steps.iter().cloned());
        Ok(Reduction {
            source: self.source.clone(),
            target: next.target.clone(),
            carrier_map: self.carrier_map.then(&next.carrier_map)?,
            full: self.full && next.full,
            steps,
        })
    }

    /// Swaps in a different target system, keeping the carrier map.
    ///
    /// Meant for exercising [`verify_reduction`] on deliberately broken
    /// reductions.
    pub fn replace_target(&mut self, target: Futs) {
        self.target = target;
    }

    fn single(source: &Futs, target: Futs, stage: Stage, kind: StepKind) -> Reduction {
        let carrier_map = match &kind {
            StepKind::Identity => CarrierMap::identity(source.states()),
            StepKind::Flatten(_) => {
                CarrierMap::from_mapping(source.states().iter().map(|x| (x.clone(), x.clone())).collect())
            }
        };
        let full = match &kind {
            StepKind::Identity => true,
            StepKind::Flatten(terms) => terms.is_empty(),
        };
        Reduction {
            source: source.clone(),
            target,
            carrier_map,
            full,
            steps: vec![Step {
                stage,
                source_sig: source.signature().clone(),
                kind,
            }],
        }
    }
}

/// Runs one stage on `s`.
pub fn apply_stage(stage: Stage, s: &Futs) -> Result<Reduction, ReduceError> {
    match stage {
        Stage::Unlabel => unlabel(s),
        Stage::Tabularize => tabularize(s),
        Stage::Homogenize => homogenize(s),
        Stage::Nest => nest(s),
        Stage::Flatten => flatten(s),
    }
}

/// Folds each component's labels into a power monoid on the outer layer.
pub fn unlabel(s: &Futs) -> Result<Reduction, ReduceError> {
    let sig = Stage::Unlabel.target_signature(s.signature())?;
    let mut out = Futs::new(sig.clone(), s.states().iter().cloned());
    for (i, c) in s.signature().components().iter().enumerate() {
        let outer = sig.components()[i].monoids[0].clone();
        for x in s.states() {
            let mut entries = Vec::new();
            for a in &c.labels {
                let t = s.transition(i, x, a);
                for (k, w) in t.entries().expect("component terms are nodes") {
                    entries.push((
                        k.clone(),
                        power_dirac(a, w, &c.labels, &c.monoids[0]).map_err(SystemError::from)?,
                    ));
                }
            }
            let term = WeightTerm::node(c.depth(), outer.clone(), entries).map_err(SystemError::from)?;
            out.insert_unchecked(i, x.clone(), UNIT_LABEL.to_string(), term);
        }
    }
    Ok(Reduction::single(s, out, Stage::Unlabel, StepKind::Identity))
}

/// Pads every row on the left with `nat-plus` layers of Dirac functions `{t: 1}`.
pub fn tabularize(s: &Futs) -> Result<Reduction, ReduceError> {
    let sig = Stage::Tabularize.target_signature(s.signature())?;
    let l = sig.max_depth();
    let mut out = Futs::new(sig, s.states().iter().cloned());
    for (i, c) in s.signature().components().iter().enumerate() {
        for x in s.states() {
            for a in &c.labels {
                let mut t = s.transition(i, x, a).into_owned();
                for _ in c.depth()..l {
                    t = WeightTerm::dirac(t, Weight::nat(1), MonoidDesc::NatPlus).map_err(SystemError::from)?;
                }
                out.insert_unchecked(i, x.clone(), a.clone(), t);
            }
        }
    }
    Ok(Reduction::single(s, out, Stage::Tabularize, StepKind::Identity))
}

/// Maps every weight into the product of all monoids of the signature.
pub fn homogenize(s: &Futs) -> Result<Reduction, ReduceError> {
    let sig = s.signature();
    let homs: Vec<Vec<Homomorphism>> = sig
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| (0..c.depth()).map(|j| homogeneous_section(sig, i, j)).collect())
        .collect();
    let out = relabel_weights(s, &homs)?;
    Ok(Reduction::single(s, out, Stage::Homogenize, StepKind::Identity))
}

/// Merges the components of a tabular homogeneous system into one, with
/// labels `c{i}_{a}`.
pub fn nest(s: &Futs) -> Result<Reduction, ReduceError> {
    let sig = Stage::Nest.target_signature(s.signature())?;
    let mut out = Futs::new(sig, s.states().iter().cloned());
    for i in 0..s.signature().len() {
        for (x, a, t) in s.transitions(i) {
            out.insert_unchecked(0, x.clone(), nested_label(i, a), t.clone());
        }
    }
    Ok(Reduction::single(s, out, Stage::Nest, StepKind::Identity))
}

/// State id of an intermediate term in a flattened system.
pub fn term_state_id(t: &WeightTerm) -> StateId {
    format!("#{}:{t}", t.depth())
}

/// Turns a nested system into a simple one whose extra states are the
/// intermediate weight functions reachable from some transition.
pub fn flatten(s: &Futs) -> Result<Reduction, ReduceError> {
    let sig = Stage::Flatten.target_signature(s.signature())?;
    let c = &s.signature().components()[0];
    let label = c.labels.first().expect("unlabelled").clone();
    let monoid = c.monoids[0].clone();
    let mut terms: BTreeMap<StateId, WeightTerm> = BTreeMap::new();
    let mut ids: BTreeMap<WeightTerm, StateId> = BTreeMap::new();
    for (_, _, t) in s.transitions(0) {
        for d in 1..t.depth() {
            for sub in t.subterms_at_depth(d) {
                if ids.contains_key(&sub) {
                    continue;
                }
                let mut id = term_state_id(&sub);
                while s.states().contains(&id) || terms.contains_key(&id) {
                    id.push('\'');
                }
                ids.insert(sub.clone(), id.clone());
                terms.insert(id, sub);
            }
        }
    }
    let states = s.states().iter().chain(terms.keys()).cloned();
    let mut out = Futs::new(sig, states);
    let one_level = |t: &WeightTerm| -> Result<WeightTerm, ReduceError> {
        let entries = t.entries().expect("node").iter().map(|(k, w)| {
            let key = match k {
                WeightTerm::Leaf(_) => k.clone(),
                WeightTerm::Node(_) => WeightTerm::leaf(ids[k].clone()),
            };
            (key, w.clone())
        });
        Ok(WeightTerm::node(1, monoid.clone(), entries).map_err(SystemError::from)?)
    };
    for (x, _, t) in s.transitions(0) {
        out.insert_unchecked(0, x.clone(), label.clone(), one_level(t)?);
    }
    for (id, t) in &terms {
        out.insert_unchecked(0, id.clone(), label.clone(), one_level(t)?);
    }
    Ok(Reduction::single(s, out, Stage::Flatten, StepKind::Flatten(terms)))
}

/// The stages [`to_wts`] runs on a system with signature `sig`.
///
/// Unlabelling comes first so that every later stage sees a signature that
/// literally meets its precondition; after nesting several components, the
/// fused label set is folded once more and the result re-homogenized.
pub fn pipeline(sig: &Signature) -> Result<Vec<Stage>, ReduceError> {
    let mut stages = vec![Stage::Unlabel, Stage::Tabularize, Stage::Homogenize, Stage::Nest];
    let mut cur = sig.clone();
    for st in &stages {
        cur = st.target_signature(&cur)?;
    }
    if !cur.is_unlabelled() {
        stages.extend([Stage::Unlabel, Stage::Homogenize]);
    }
    stages.push(Stage::Flatten);
    Ok(stages)
}

/// Runs the stages in order.
pub fn reduce_through(s: &Futs, stages: &[Stage]) -> Result<Reduction, ReduceError> {
    let mut r = Reduction::identity(s);
    for st in stages {
        let next = apply_stage(*st, r.target())?;
        r = r.then(&next)?;
    }
    Ok(r)
}

/// Reduces any FuTS to an unlabelled simple system.
pub fn to_wts(s: &Futs) -> Result<Reduction, ReduceError> {
    reduce_through(s, &pipeline(s.signature())?)
}

/// Pulls a target partition back along the carrier map.
pub fn restrict_bisim_unchecked(r: &Reduction, target: &Partition) -> Partition {
    let map = r.carrier_map.mapping();
    Partition::from_key(r.source.states(), |x| target.block_id(&map[x]).map(str::to_string))
}

/// [`restrict_bisim_unchecked`], requiring `target` to be a bisimulation.
pub fn restrict_bisim(r: &Reduction, target: &Partition) -> Result<Partition, ReduceError> {
    if !is_bisimulation(&r.target, target)? {
        return Err(ReduceError::NotABisimulation("target"));
    }
    Ok(restrict_bisim_unchecked(r, target))
}

/// Transports a source partition to the target; intermediate term-states of
/// a flattening are grouped by their image under the quotient.
pub fn extend_bisim_unchecked(r: &Reduction, source: &Partition) -> Result<Partition, ReduceError> {
    let mut p = source.clone();
    for step in &r.steps {
        if let StepKind::Flatten(terms) = &step.kind {
            let mut key: BTreeMap<StateId, String> = BTreeMap::new();
            for x in p.carrier() {
                key.insert(x.clone(), format!("s:{}", p.block_id(&x).expect("member")));
            }
            for (id, t) in terms {
                key.insert(id.clone(), format!("t:{}", t.quotient(&p).map_err(SystemError::from)?));
            }
            p = Partition::from_key(key.keys(), |x| Some(key[x].clone()));
        }
    }
    let map = r.carrier_map.mapping();
    let inverse: BTreeMap<&StateId, &StateId> = map.iter().map(|(x, y)| (y, x)).collect();
    Ok(Partition::from_key(r.target.states(), |y| {
        let x = inverse.get(y).map_or(y.as_str(), |x| x.as_str());
        p.block_id(x).map(str::to_string)
    }))
}

/// [`extend_bisim_unchecked`], requiring `source` to be a bisimulation.
pub fn extend_bisim(r: &Reduction, source: &Partition) -> Result<Partition, ReduceError> {
    if !is_bisimulation(&r.source, source)? {
        return Err(ReduceError::NotABisimulation("source"));
    }
    extend_bisim_unchecked(r, source)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every equivalence relation on the source carrier.
    Exhaustive,
    /// The identity, the largest bisimulation, and `samples` random relations.
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: Option<Partition>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.relation {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub total: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}/{} relations checked, {} violations",
            self.checked,
            self.total,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

fn random_partition(states: &BTreeSet<StateId>, rng: &mut ChaCha8Rng) -> Partition {
    let mut blocks: Vec<Vec<StateId>> = Vec::new();
    for x in states {
        let k = rng.gen_range(0..=blocks.len());
        if k == blocks.len() {
            blocks.push(vec![x.clone()]);
        } else {
            blocks[k].push(x.clone());
        }
    }
    Partition::from_blocks(blocks).expect("disjoint blocks")
}

/// Checks that bisimulations of source and target correspond along `r`.
///
/// For every relation `R`: `R` is a bisimulation iff its extension is one;
/// for bisimulations, restricting the extension gives back `R`. The largest
/// bisimulations must also correspond, and the carrier map must be
/// injective (and onto, for full reductions).
pub fn verify_reduction(r: &Reduction, mode: VerifyMode) -> Result<VerifyReport, ReduceError> {
    let states = r.source.states();
    let relations = match mode {
        VerifyMode::Exhaustive => {
            if states.len() > EXHAUSTIVE_LIMIT {
                return Err(ReduceError::TooLarge(states.len()));
            }
            equivalence_relations(states)
        }
        VerifyMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rels = vec![Partition::identity(states), largest_bisimulation(&r.source)];
            rels.extend((0..samples).map(|_| random_partition(states, &mut rng)));
            rels
        }
    };
    let mut report = VerifyReport {
        checked: 0,
        total: relations.len(),
        violations: Vec::new(),
    };
    let global = |message: String| Violation {
        relation: None,
        message,
    };
    if !r.carrier_map.is_injective() {
        report.violations.push(global("carrier map is not injective".into()));
    }
    if r.full && !r.carrier_map.is_surjective(&r.target) {
        report
            .violations
            .push(global("full reduction with a non-surjective carrier map".into()));
    }
    let src_largest = largest_bisimulation(&r.source);
    let back = restrict_bisim_unchecked(r, &largest_bisimulation(&r.target));
    if back != src_largest {
        report.violations.push(global(format!(
            "largest bisimulation {src_largest} pulls back as {back}"
        )));
    }
    for rel in relations {
        report.checked += 1;
        let src_bis = is_bisimulation(&r.source, &rel)?;
        let ext = extend_bisim_unchecked(r, &rel)?;
        let tgt_bis = is_bisimulation(&r.target, &ext)?;
        let mut fail = |message: String| {
            report.violations.push(Violation {
                relation: Some(rel.clone()),
                message,
            })
        };
        if src_bis != tgt_bis {
            fail(format!(
                "bisimulation on source: {src_bis}, extension {ext} bisimulation on target: {tgt_bis}"
            ));
            continue;
        }
        if !src_bis {
            continue;
        }
        let round = restrict_bisim_unchecked(r, &ext);
        if round != rel {
            fail(format!("extension {ext} restricts to {round}"));
            continue;
        }
        let map = r.carrier_map.mapping();
        for x in states {
            for y in states {
                if rel.related(x, y) != ext.related(&map[x], &map[y]) {
                    fail(format!("`{x}` and `{y}` are related on one side only"));
                }
            }
        }
    }
    Ok(report)
}

/// The subsystem of component `i` restricted to label `a`.
pub fn component_projection(s: &Futs, i: usize, a: &str) -> Result<Futs, ReduceError> {
    let c = s.signature().component(i)?;
    if !c.labels.contains(a) {
        return Err(SystemError::UnknownLabel {
            component: i,
            label: a.to_string(),
        }
        .into());
    }
    let sig = Signature::new(vec![Component::new([a], c.monoids.clone())])?;
    let mut out = Futs::new(sig, s.states().iter().cloned());
    for (x, b, t) in s.transitions(i) {
        if b == a {
            out.insert_unchecked(0, x.clone(), b.clone(), t.clone());
        }
    }
    Ok(out)
}
