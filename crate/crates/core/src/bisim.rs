//! Equivalence extensions, strong bisimulation and partition refinement.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::system::{is_homomorphism, CarrierMap, Futs, SystemError};
use crate::textio::write_id;
use crate::weightfn::{StateId, TermError, WeightTerm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BisimError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("blocks overlap on `{0}`")]
    Overlap(StateId),
    #[error("a block is empty")]
    EmptyBlock,
    #[error("the partition's carrier differs from the system's states")]
    CarrierMismatch,
    #[error("the partition is not a bisimulation")]
    NotABisimulation,
}

/// An equivalence relation on a finite carrier, stored as its quotient map.
///
/// Block ids are the least member of each block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    block_of: BTreeMap<StateId, StateId>,
}

impl Partition {
    pub fn from_blocks<B, I, S>(blocks: B) -> Result<Partition, BisimError>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        let mut block_of = BTreeMap::new();
        for block in blocks {
            let members: BTreeSet<StateId> = block.into_iter().map(Into::into).collect();
            let Some(least) = members.first().cloned() else {
                return Err(BisimError::EmptyBlock);
            };
            for m in members {
                if block_of.insert(m.clone(), least.clone()).is_some() {
                    return Err(BisimError::Overlap(m));
                }
            }
        }
        Ok(Partition { block_of })
    }

    pub fn identity<I, S>(carrier: I) -> Partition
    where
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        Partition {
            block_of: carrier
                .into_iter()
                .map(|x| {
                    let x = x.into();
                    (x.clone(), x)
                })
                .collect(),
        }
    }

    pub fn one_block<I, S>(carrier: I) -> Partition
    where
        I: IntoIterator<Item = S>,
        S: Into<StateId>,
    {
        let members: Vec<StateId> = carrier.into_iter().map(Into::into).collect();
        Partition::from_blocks([members]).unwrap_or_else(|_| Partition::identity(Vec::<String>::new()))
    }

    /// Groups the carrier by the value of `key`.
    pub fn from_key<'a, I, K, F>(carrier: I, mut key: F) -> Partition
    where
        I: IntoIterator<Item = &'a StateId>,
        K: Ord,
        F: FnMut(&StateId) -> K,
    {
        let mut groups: BTreeMap<K, Vec<StateId>> = BTreeMap::new();
        for x in carrier {
            groups.entry(key(x)).or_default().push(x.clone());
        }
        Partition::from_blocks(groups.into_values()).expect("groups are disjoint and non-empty")
    }

    pub fn carrier(&self) -> BTreeSet<StateId> {
        self.block_of.keys().cloned().collect()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.block_of.contains_key(x)
    }

    /// κ(x)
    pub fn block_id(&self, x: &str) -> Option<&str> {
        self.block_of.get(x).map(String::as_str)
    }

    pub fn quotient_map(&self) -> &BTreeMap<StateId, StateId> {
        &self.block_of
    }

    pub fn related(&self, x: &str, y: &str) -> bool {
        match (self.block_of.get(x), self.block_of.get(y)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// Blocks keyed by block id, members sorted.
    pub fn blocks(&self) -> BTreeMap<StateId, BTreeSet<StateId>> {
        let mut out: BTreeMap<StateId, BTreeSet<StateId>> = BTreeMap::new();
        for (x, b) in &self.block_of {
            out.entry(b.clone()).or_default().insert(x.clone());
        }
        out
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of.values().collect::<BTreeSet<_>>().len()
    }

    /// Every related pair, including the diagonal.
    pub fn pairs(&self) -> BTreeSet<(StateId, StateId)> {
        let mut out = BTreeSet::new();
        for block in self.blocks().values() {
            for x in block {
                for y in block {
                    out.insert((x.clone(), y.clone()));
                }
            }
        }
        out
    }

    /// The partition induced on a subset of the carrier.
    pub fn restrict(&self, subset: &BTreeSet<StateId>) -> Partition {
        Partition::from_key(subset.iter().filter(|x| self.contains(x)), |x| self.block_of[x].clone())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ ")?;
        for (k, block) in self.blocks().values().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write_id(f, x)?;
            }
            write!(f, "}}")?;
        }
        write!(f, " }}")
    }
}

/// Every equivalence relation on `carrier`, enumerated by restricted growth strings.
pub fn equivalence_relations(carrier: &BTreeSet<StateId>) -> Vec<Partition> {
    let elems: Vec<&StateId> = carrier.iter().collect();
    let n = elems.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::identity(Vec::<String>::new()));
        return out;
    }
    let mut rgs = vec![0usize; n];
    loop {
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        for (k, &b) in rgs.iter().enumerate() {
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(elems[k].clone());
        }
        out.push(Partition::from_blocks(blocks).expect("restricted growth strings give partitions"));
        // next restricted growth string
        let mut k = n - 1;
        loop {
            if k == 0 {
                return out;
            }
            let max_prefix = rgs[..k].iter().copied().max().unwrap_or(0);
            if rgs[k] <= max_prefix {
                rgs[k] += 1;
                for r in rgs.iter_mut().skip(k + 1) {
                    *r = 0;
                }
                break;
            }
            k -= 1;
        }
    }
}

/// `t R^T t'`: equal images under the quotient map.
pub fn ext_related(p: &Partition, t: &WeightTerm, u: &WeightTerm) -> Result<bool, BisimError> {
    let qt = t.quotient(p)?;
    let qu = u.quotient(p)?;
    Ok(qt.term_equal(&qu)?)
}

fn check_carrier(s: &Futs, p: &Partition) -> Result<(), BisimError> {
    if p.carrier() != *s.states() {
        return Err(BisimError::CarrierMismatch);
    }
    Ok(())
}

/// Every pair in a block must have extension-related transitions for every `(i, a)`.
pub fn is_bisimulation(s: &Futs, p: &Partition) -> Result<bool, BisimError> {
    check_carrier(s, p)?;
    let labels = s.component_labels();
    for block in p.blocks().values() {
        let mut members = block.iter();
        let Some(rep) = members.next() else { continue };
        for x in members {
            for (i, a) in &labels {
                if !ext_related(p, &s.transition(*i, rep, a), &s.transition(*i, x, a))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Per-state split key: the quotiented transition for every `(i, a)`.
fn signature_of(s: &Futs, p: &Partition, labels: &[(usize, String)], x: &str) -> Vec<WeightTerm> {
    labels
        .iter()
        .map(|(i, a)| {
            s.transition(*i, x, a)
                .quotient(p)
                .expect("validated systems only mention their own states")
        })
        .collect()
}

/// One refinement round: split every block by the signature of its members.
pub fn refine_once(s: &Futs, p: &Partition) -> Partition {
    let labels = s.component_labels();
    Partition::from_key(s.states().iter(), |x| {
        (p.block_id(x).map(str::to_string), signature_of(s, p, &labels, x))
    })
}

/// Coarsest bisimulation, by naive signature refinement from the one-block partition.
pub fn largest_bisimulation(s: &Futs) -> Partition {
    let mut p = Partition::one_block(s.states().iter().cloned());
    loop {
        let next = refine_once(s, &p);
        if next.num_blocks() == p.num_blocks() {
            return next;
        }
        p = next;
    }
}

/// Quotient built from block representatives, without checking well-definedness.
fn quotient_from_representatives(s: &Futs, p: &Partition) -> Result<Futs, BisimError> {
    let blocks = p.blocks();
    let mut q = Futs::new(s.signature().clone(), blocks.keys().cloned());
    for (i, a) in s.component_labels() {
        for rep in blocks.keys() {
            let t = s.transition(i, rep, &a).quotient(p)?;
            q.insert_unchecked(i, rep.clone(), a.clone(), t);
        }
    }
    Ok(q)
}

/// The system on block ids; fails unless `p` is a bisimulation.
pub fn quotient_system(s: &Futs, p: &Partition) -> Result<Futs, BisimError> {
    if !is_bisimulation(s, p)? {
        return Err(BisimError::NotABisimulation);
    }
    quotient_from_representatives(s, p)
}

/// `p` is the kernel of a homomorphism: build the quotient from representatives
/// and check that κ is a homomorphism into it.
pub fn is_kernel_bisimulation(s: &Futs, p: &Partition) -> bool {
    if check_carrier(s, p).is_err() {
        return false;
    }
    let Ok(q) = quotient_from_representatives(s, p) else {
        return false;
    };
    let kappa = CarrierMap::from_mapping(p.quotient_map().clone());
    is_homomorphism(s, &q, &kappa).unwrap_or(false)
}
