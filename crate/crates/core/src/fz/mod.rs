//! Fuzzy three-ring overlay.
//!
//! Nodes are split by normalized resource count into HOT, HOTTER and HOTTEST
//! sub-rings; nodes holding a resource nobody else has are always placed in
//! HOTTEST. Each non-empty sub-ring elects the member with the most
//! resources as its Ring-Head, and a deduplicated resource table is
//! replicated at every node.
//!
//! A lookup goes from the origin to its own Ring-Head, which forwards the
//! query to the other heads in parallel. The head whose ring holds the owner
//! routes inside its sub-ring; the result travels back through that head and
//! the origin's head.

pub mod fuzzy;
pub mod resource;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::id::{Id, IdSpace};
use crate::lookup::{route, LookupResult, MessagePlan};
use crate::ring::Ring;

use self::fuzzy::{classify, normalize_resources};
use self::resource::{build_resource_table, detect_unique, ResourceTableEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingLabel {
    Hot,
    Hotter,
    Hottest,
}

impl RingLabel {
    pub const ALL: [RingLabel; 3] = [RingLabel::Hot, RingLabel::Hotter, RingLabel::Hottest];
}

impl fmt::Display for RingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RingLabel::Hot => "HOT",
            RingLabel::Hotter => "HOTTER",
            RingLabel::Hottest => "HOTTEST",
        })
    }
}

#[derive(Clone, Debug)]
pub struct FzOverlay {
    space: IdSpace,
    subrings: BTreeMap<RingLabel, Ring>,
    ring_heads: BTreeMap<RingLabel, Id>,
    labels: BTreeMap<Id, RingLabel>,
    unique_nodes: BTreeSet<Id>,
    resource_table: Vec<ResourceTableEntry>,
}

/// Member of `subring` with the most resources, lowest id on ties.
pub fn elect_ring_head(subring: &Ring) -> Option<Id> {
    subring
        .nodes()
        .max_by(|a, b| a.resources.len().cmp(&b.resources.len()).then(b.id.cmp(&a.id)))
        .map(|n| n.id)
}

/// Splits a stabilized ring into the three labeled sub-rings.
pub fn partition(ring: &Ring) -> Result<FzOverlay> {
    let inventory = ring.inventory();
    let fractions = normalize_resources(&inventory)?;
    let unique_nodes = detect_unique(&inventory);

    let mut labels = BTreeMap::new();
    for (&id, &fraction) in &fractions {
        let label = if unique_nodes.contains(&id) { RingLabel::Hottest } else { classify(fraction)? };
        labels.insert(id, label);
    }

    let mut subrings = BTreeMap::new();
    let mut ring_heads = BTreeMap::new();
    for label in RingLabel::ALL {
        let members: Vec<Id> = labels.iter().filter(|(_, &l)| l == label).map(|(&id, _)| id).collect();
        if members.is_empty() {
            continue;
        }
        let mut sub = Ring::build(ring.space(), members.iter().copied(), [])?;
        for &id in &members {
            sub.set_resources(id, inventory[&id].iter().cloned())?;
        }
        let head = elect_ring_head(&sub).expect("non-empty sub-ring");
        ring_heads.insert(label, head);
        subrings.insert(label, sub);
    }

    Ok(FzOverlay {
        space: ring.space(),
        subrings,
        ring_heads,
        labels,
        unique_nodes,
        resource_table: build_resource_table(&inventory),
    })
}

impl FzOverlay {
    pub fn space(&self) -> IdSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subring(&self, label: RingLabel) -> Option<&Ring> {
        self.subrings.get(&label)
    }

    pub fn ring_head(&self, label: RingLabel) -> Option<Id> {
        self.ring_heads.get(&label).copied()
    }

    pub fn label_of(&self, id: Id) -> Option<RingLabel> {
        self.labels.get(&id).copied()
    }

    pub fn members(&self, label: RingLabel) -> impl Iterator<Item = Id> + '_ {
        self.labels.iter().filter(move |(_, &l)| l == label).map(|(&id, _)| id)
    }

    pub fn unique_nodes(&self) -> &BTreeSet<Id> {
        &self.unique_nodes
    }

    pub fn resource_table(&self) -> &[ResourceTableEntry] {
        &self.resource_table
    }

    /// Owner of `key` on the full ring, resolved from the replicated node list.
    pub fn owner_of(&self, key: Id) -> Id {
        self.labels
            .range(key..)
            .next()
            .or_else(|| self.labels.iter().next())
            .map(|(&id, _)| id)
            .expect("overlay is never empty")
    }

    fn head(&self, label: RingLabel) -> Result<Id> {
        self.ring_head(label)
            .ok_or_else(|| Error::Inconsistent(format!("{label} ring has members but no head")))
    }
}

/// Three-ring lookup from `origin`.
///
/// Hops count the successful chain only: origin, its head, the owning
/// ring's head, then the intra-ring route to the owner. Messages add the
/// requests and miss replies of the other heads and the relay of the result
/// back through both heads.
pub fn fz_lookup(overlay: &FzOverlay, origin: Id, key: Id) -> Result<LookupResult> {
    let origin_label = overlay.label_of(origin).ok_or(Error::UnknownNode(origin))?;
    let owner = overlay.owner_of(key);
    if owner == origin {
        return Ok(LookupResult::serial(vec![origin]));
    }
    let owner_label = overlay
        .label_of(owner)
        .ok_or_else(|| Error::Inconsistent(format!("owner {owner} belongs to no sub-ring")))?;
    let origin_head = overlay.head(origin_label)?;
    let owner_head = overlay.head(owner_label)?;
    let owner_ring = overlay.subrings.get(&owner_label).expect("labeled ring exists");

    let intra = route(owner_ring, owner_head, owner)?;
    if intra.last() != Some(&owner) {
        return Err(Error::Inconsistent(format!("{owner_label} ring routed {key} to {intra:?}")));
    }

    let mut path = vec![origin];
    for hop in [origin_head, owner_head] {
        if *path.last().unwrap() != hop {
            path.push(hop);
        }
    }
    path.extend_from_slice(&intra[1..]);

    let to_head = u32::from(origin != origin_head);
    let cross = u32::from(owner_head != origin_head);
    let intra_hops = (intra.len() - 1) as u32;
    let relay_to_head = u32::from(owner != owner_head);
    let mut branches = vec![cross + intra_hops + relay_to_head + cross];
    for label in RingLabel::ALL {
        if label != origin_label && label != owner_label && overlay.ring_heads.contains_key(&label) {
            branches.push(2);
        }
    }
    let plan = MessagePlan { prefix: to_head, branches, suffix: to_head };

    let hops = (path.len() - 1) as u32;
    Ok(LookupResult { owner, hops, messages: plan.total(), path, elapsed_ms: 0.0, plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fz::resource::ResourceDescriptor;
    use crate::ring::successor_oracle;

    /// Resources `0..count` of a shared catalog, so nobody is unique unless
    /// given an extra descriptor.
    fn catalog(count: usize) -> Vec<ResourceDescriptor> {
        (0..count).map(|i| ResourceDescriptor::new("res", &i.to_string())).collect()
    }

    /// 128-id ring with 44 and 10 rich, 67 mid-range and 83's owner poor.
    pub(crate) fn three_ring_fixture() -> Ring {
        let space = IdSpace::new(7).unwrap();
        let counts: [(u64, usize); 12] = [
            (3, 2), (10, 9), (21, 5), (30, 10), (44, 10), (52, 1),
            (67, 5), (75, 4), (84, 2), (90, 1), (101, 6), (117, 3),
        ];
        let mut ring = Ring::build(space, counts.iter().map(|&(id, _)| Id(id)), []).unwrap();
        for (id, c) in counts {
            ring.set_resources(Id(id), catalog(c)).unwrap();
        }
        ring
    }

    #[test]
    fn three_ring_placement() {
        let overlay = partition(&three_ring_fixture()).unwrap();
        assert_eq!(overlay.label_of(Id(44)), Some(RingLabel::Hottest));
        assert_eq!(overlay.label_of(Id(10)), Some(RingLabel::Hottest));
        assert_eq!(overlay.label_of(Id(67)), Some(RingLabel::Hotter));
        assert_eq!(overlay.owner_of(Id(83)), Id(84));
        assert_eq!(overlay.label_of(Id(84)), Some(RingLabel::Hot));
        // 30 and 44 tie at ten resources; the lower id wins.
        assert_eq!(overlay.ring_head(RingLabel::Hottest), Some(Id(30)));
        assert_eq!(overlay.ring_head(RingLabel::Hotter), Some(Id(101)));
        assert_eq!(overlay.ring_head(RingLabel::Hot), Some(Id(117)));
        let sizes: usize = RingLabel::ALL.iter().map(|&l| overlay.members(l).count()).sum();
        assert_eq!(sizes, 12);
    }

    #[test]
    fn hottest_origin_finds_hot_key() {
        let overlay = partition(&three_ring_fixture()).unwrap();
        let r = fz_lookup(&overlay, Id(44), Id(83)).unwrap();
        assert_eq!(r.owner, Id(84));
        // 44 -> HOTTEST head 30 -> HOT head 117 -> route inside HOT to 84.
        assert_eq!(&r.path[..3], &[Id(44), Id(30), Id(117)]);
        assert_eq!(*r.path.last().unwrap(), Id(84));
        // prefix and suffix: 44 <-> 30; owning branch: 30->117, intra, 84->117, 117->30;
        // HOTTER branch: request and miss reply.
        let intra = (r.path.len() - 3) as u32;
        assert_eq!(r.plan, MessagePlan { prefix: 1, branches: vec![1 + intra + 1 + 1, 2], suffix: 1 });
        assert_eq!(r.hops, 2 + intra);
        assert_eq!(r.messages, r.plan.total());
    }

    #[test]
    fn hotter_origin_finds_hottest_key() {
        let overlay = partition(&three_ring_fixture()).unwrap();
        let r = fz_lookup(&overlay, Id(67), Id(10)).unwrap();
        assert_eq!(r.owner, Id(10));
        assert_eq!(&r.path[..3], &[Id(67), Id(101), Id(30)]);
        assert_eq!(*r.path.last().unwrap(), Id(10));
    }

    #[test]
    fn local_hit_costs_nothing() {
        let overlay = partition(&three_ring_fixture()).unwrap();
        let r = fz_lookup(&overlay, Id(44), Id(40)).unwrap();
        assert_eq!((r.owner, r.hops, r.messages), (Id(44), 0, 0));
        assert!(fz_lookup(&overlay, Id(45), Id(40)).is_err());
    }

    #[test]
    fn same_ring_owner_collapses_relay() {
        let overlay = partition(&three_ring_fixture()).unwrap();
        // 30 is the HOTTEST head and 44 owns key 40.
        let r = fz_lookup(&overlay, Id(30), Id(40)).unwrap();
        assert_eq!(r.path, vec![Id(30), Id(44)]);
        // HOTTER and HOT heads each get a request and answer with a miss.
        assert_eq!(r.plan, MessagePlan { prefix: 0, branches: vec![2, 2, 2], suffix: 0 });
        assert_eq!((r.hops, r.messages), (1, 6));
    }

    #[test]
    fn equal_resources_fill_hottest() {
        let mut ring = three_ring_fixture();
        for id in ring.ids().collect::<Vec<_>>() {
            ring.set_resources(id, catalog(4)).unwrap();
        }
        let overlay = partition(&ring).unwrap();
        assert_eq!(overlay.members(RingLabel::Hottest).count(), 12);
        assert!(overlay.subring(RingLabel::Hot).is_none());
        assert!(overlay.ring_head(RingLabel::Hotter).is_none());
        let r = fz_lookup(&overlay, Id(3), Id(60)).unwrap();
        assert_eq!(r.owner, Id(67));
        assert!(r.plan.branches.len() == 1);
    }

    #[test]
    fn unique_poor_node_is_promoted() {
        let mut ring = three_ring_fixture();
        ring.set_resources(Id(52), [ResourceDescriptor::new("gpu", "a100")]).unwrap();
        let overlay = partition(&ring).unwrap();
        let fraction = fuzzy::normalize_resources(&ring.inventory()).unwrap()[&Id(52)];
        assert_eq!(fraction, 0.1);
        assert_eq!(classify(fraction), Ok(RingLabel::Hot));
        assert_eq!(overlay.label_of(Id(52)), Some(RingLabel::Hottest));
        assert!(overlay.unique_nodes().contains(&Id(52)));
    }

    #[test]
    fn resourceless_ring_is_rejected() {
        let space = IdSpace::new(7).unwrap();
        let ring = Ring::build(space, [Id(1), Id(2)], []).unwrap();
        assert_eq!(partition(&ring).unwrap_err(), Error::AllResourceless);
    }

    #[test]
    fn head_election() {
        let space = IdSpace::new(7).unwrap();
        let mut ring = Ring::build(space, [Id(44), Id(10)], []).unwrap();
        ring.set_resources(Id(44), catalog(9)).unwrap();
        ring.set_resources(Id(10), catalog(7)).unwrap();
        assert_eq!(elect_ring_head(&ring), Some(Id(44)));
        let mut ring = Ring::build(space, [Id(9), Id(5)], []).unwrap();
        ring.set_resources(Id(9), catalog(3)).unwrap();
        ring.set_resources(Id(5), catalog(3)).unwrap();
        assert_eq!(elect_ring_head(&ring), Some(Id(5)));
        let ring = Ring::build(space, [Id(77)], []).unwrap();
        assert_eq!(elect_ring_head(&ring), Some(Id(77)));
    }

    #[test]
    fn every_key_resolves_to_oracle() {
        let ring = three_ring_fixture();
        let overlay = partition(&ring).unwrap();
        for origin in ring.ids() {
            for key in 0..128 {
                let r = fz_lookup(&overlay, origin, Id(key)).unwrap();
                assert_eq!(r.owner, successor_oracle(&ring, Id(key)));
                assert_eq!(r.messages, r.plan.total());
                assert_eq!(r.hops as usize, r.path.len() - 1);
            }
        }
    }
}
