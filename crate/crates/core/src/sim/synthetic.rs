//! Seeded stand-in resources for nodes that come without a resource file.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fz::resource::ResourceDescriptor;
use crate::id::{Id, IdSpace};
use crate::ring::Ring;

const KINDS: [&str; 6] = ["cpu", "ram", "disk", "gpu", "net", "os"];
const GRADES: [&str; 4] = ["basic", "standard", "fast", "premium"];
pub const MAX_SYNTHETIC: usize = 12;
/// One node in this many also gets a resource nobody else has.
const SPECIAL_ONE_IN: u64 = 64;

fn catalog() -> Vec<ResourceDescriptor> {
    KINDS
        .iter()
        .flat_map(|k| GRADES.iter().map(move |g| ResourceDescriptor::new(k, g)))
        .collect()
}

/// Resources of node `id`; depends only on `(seed, id)` so a node that
/// rejoins gets the same set back.
pub fn synthetic_resources(seed: u64, id: Id) -> BTreeSet<ResourceDescriptor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ id.0.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let count = rng.random_range(1..=MAX_SYNTHETIC);
    let mut set: BTreeSet<ResourceDescriptor> =
        catalog().choose_multiple(&mut rng, count).cloned().collect();
    if rng.random_range(0..SPECIAL_ONE_IN) == 0 {
        set.insert(ResourceDescriptor::new("special", &format!("n{}", id.0)));
    }
    set
}

pub fn assign_synthetic_resources(ring: &mut Ring, seed: u64) -> Result<()> {
    for id in ring.ids().collect::<Vec<_>>() {
        ring.set_resources(id, synthetic_resources(seed, id))?;
    }
    Ok(())
}

/// `n` distinct ids drawn without replacement from the space.
pub fn random_ids(space: IdSpace, n: usize, seed: u64) -> BTreeSet<Id> {
    assert!(n as u64 <= space.size(), "more nodes than identifiers");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids = BTreeSet::new();
    while ids.len() < n {
        ids.insert(Id(rng.random_range(0..space.size())));
    }
    ids
}

/// Stabilized ring of `n` random nodes with synthetic resources.
pub fn random_ring(space: IdSpace, n: usize, seed: u64) -> Result<Ring> {
    let mut ring = Ring::build(space, random_ids(space, n, seed), [])?;
    assign_synthetic_resources(&mut ring, seed)?;
    Ok(ring)
}
