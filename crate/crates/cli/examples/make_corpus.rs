//! Regenerates `tests/data/corpus` from fixed seeds.
//!
//! cargo run -p futs-tool --example make_corpus

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use futs_core::fixtures;
use futs_core::generate::random_system_with;
use futs_core::monoid::MonoidDesc;
use futs_core::system::{Component, Futs, Signature};
use futs_core::textio::write_system;

const PER_KIND: usize = 8;

fn labels(rng: &mut ChaCha8Rng, names: &[&'static str]) -> Vec<&'static str> {
    names[..rng.gen_range(1..=names.len())].to_vec()
}

fn signature(kind: &str, rng: &mut ChaCha8Rng) -> Signature {
    use MonoidDesc::*;
    let pick = |rng: &mut ChaCha8Rng, ms: &[MonoidDesc]| ms.choose(rng).unwrap().clone();
    let flat = [
        BoolOr,
        NatPlus,
        RatPlus,
        Product(vec![NatPlus, RatPlus]),
        Product(vec![BoolOr, NatPlus]),
    ];
    let rows = match kind {
        "wlts" => vec![Component::new(labels(rng, &["a", "b"]), vec![pick(rng, &flat)])],
        "ultras" => vec![Component::new(
            labels(rng, &["a", "b"]),
            vec![BoolOr, pick(rng, &[RatPlus, NatPlus])],
        )],
        "combined" => vec![
            Component::new(labels(rng, &["a", "b"]), vec![pick(rng, &flat)]),
            Component::new(["c"], vec![pick(rng, &[BoolOr, NatPlus]), pick(rng, &flat)]),
        ],
        _ => vec![Component::new(
            labels(rng, &["a", "b"]),
            vec![
                pick(rng, &[BoolOr, NatPlus]),
                pick(rng, &flat),
                pick(rng, &[NatPlus, RatPlus]),
            ],
        )],
    };
    Signature::new(rows).unwrap()
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus");
    fs::create_dir_all(&dir).unwrap();
    let named: [(&str, Futs); 5] = [
        ("ring", fixtures::ring()),
        ("w3", fixtures::w3()),
        ("selfloops", fixtures::selfloops()),
        ("ab_plus_a", fixtures::ab_plus_a()),
        ("two_layer", fixtures::two_layer_blind_spot()),
    ];
    for (name, s) in named {
        fs::write(dir.join(format!("fixture_{name}.futs")), write_system(&s)).unwrap();
    }
    for (k, kind) in ["wlts", "ultras", "combined", "nested3"].into_iter().enumerate() {
        for n in 0..PER_KIND {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * k as u64 + n as u64);
            let sig = signature(kind, &mut rng);
            let s = random_system_with(&mut rng, sig, 5, 0.7);
            fs::write(dir.join(format!("{kind}_{n:02}.futs")), write_system(&s)).unwrap();
        }
    }
}
