//! Ring membership, finger tables and key placement.
//!
//! Stabilization is an atomic global repair: after [`Ring::stabilize`] every
//! successor, predecessor and finger matches the brute-force
//! [`successor_oracle`]. Corrections are booked in the ring's maintenance
//! counter, never in lookup metrics.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fz::resource::{Inventory, ResourceDescriptor};
use crate::id::{in_interval, Id, IdSpace, IntervalBounds};
use crate::rvn;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FingerEntry {
    pub start: Id,
    /// Start of the next finger; the last entry wraps to the first start.
    pub interval_end: Id,
    pub node: Id,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeState {
    pub id: Id,
    pub predecessor: Id,
    pub successor: Id,
    pub fingers: Vec<FingerEntry>,
    /// Recently visited node slot, consulted only by RVN lookups.
    pub rvn: Id,
    pub stored_keys: BTreeSet<Id>,
    pub resources: BTreeSet<ResourceDescriptor>,
}

/// Keys handed from one node to another by a join or a leave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyTransfer {
    pub from: Id,
    pub to: Id,
    pub keys: BTreeSet<Id>,
}

#[derive(Clone, Debug)]
pub struct Ring {
    space: IdSpace,
    nodes: BTreeMap<Id, NodeState>,
    all_keys: BTreeSet<Id>,
    maintenance: u64,
}

/// First active id clockwise from `x`, inclusive, found by scanning every
/// node. Ground truth for correctness checks.
pub fn successor_oracle(ring: &Ring, x: Id) -> Id {
    let space = ring.space();
    ring.ids()
        .min_by_key(|&n| space.distance_cw(x, n))
        .expect("ring is never empty")
}

impl Ring {
    /// Builds a fully stabilized ring and places every key at its successor.
    pub fn build(
        space: IdSpace,
        ids: impl IntoIterator<Item = Id>,
        keys: impl IntoIterator<Item = Id>,
    ) -> Result<Self> {
        let mut nodes = BTreeMap::new();
        for id in ids {
            space.id(id.0)?;
            let state = NodeState {
                id,
                predecessor: id,
                successor: id,
                fingers: Vec::new(),
                rvn: id,
                stored_keys: BTreeSet::new(),
                resources: BTreeSet::new(),
            };
            if nodes.insert(id, state).is_some() {
                return Err(Error::DuplicateId(id));
            }
        }
        if nodes.is_empty() {
            return Err(Error::EmptyRing);
        }
        let mut ring = Ring { space, nodes, all_keys: BTreeSet::new(), maintenance: 0 };
        for key in keys {
            ring.insert_key(key)?;
        }
        ring.stabilize();
        ring.maintenance = 0;
        let ids: Vec<Id> = ring.nodes.keys().copied().collect();
        for id in ids {
            let succ = ring.nodes[&id].successor;
            ring.nodes.get_mut(&id).unwrap().rvn = succ;
        }
        Ok(ring)
    }

    pub fn space(&self) -> IdSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: Id) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = Id> + '_ {
        self.nodes.keys().copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeState> {
        self.nodes.values()
    }

    pub fn node(&self, id: Id) -> Result<&NodeState> {
        self.nodes.get(&id).ok_or(Error::UnknownNode(id))
    }

    pub(crate) fn node_mut(&mut self, id: Id) -> Result<&mut NodeState> {
        self.nodes.get_mut(&id).ok_or(Error::UnknownNode(id))
    }

    pub(crate) fn nodes_mut(&mut self) -> impl Iterator<Item = &mut NodeState> {
        self.nodes.values_mut()
    }

    pub fn all_keys(&self) -> &BTreeSet<Id> {
        &self.all_keys
    }

    /// Maintenance messages booked so far (stabilization corrections and
    /// RVN propagation).
    pub fn maintenance_messages(&self) -> u64 {
        self.maintenance
    }

    pub(crate) fn add_maintenance(&mut self, n: u64) {
        self.maintenance += n;
    }

    /// First active id clockwise from `x`, inclusive.
    pub fn successor(&self, x: Id) -> Id {
        self.nodes
            .range(x..)
            .next()
            .or_else(|| self.nodes.iter().next())
            .map(|(&id, _)| id)
            .expect("ring is never empty")
    }

    /// Last active id strictly counter-clockwise from `x`.
    pub fn predecessor(&self, x: Id) -> Id {
        self.nodes
            .range(..x)
            .next_back()
            .or_else(|| self.nodes.iter().next_back())
            .map(|(&id, _)| id)
            .expect("ring is never empty")
    }

    /// Node currently storing `key`, if the key is known to the ring.
    pub fn holder_of(&self, key: Id) -> Option<Id> {
        if !self.all_keys.contains(&key) {
            return None;
        }
        let owner = self.successor(key);
        self.nodes[&owner].stored_keys.contains(&key).then_some(owner)
    }

    pub fn insert_key(&mut self, key: Id) -> Result<Id> {
        self.space.id(key.0)?;
        let owner = self.successor(key);
        self.all_keys.insert(key);
        self.nodes.get_mut(&owner).unwrap().stored_keys.insert(key);
        Ok(owner)
    }

    pub fn set_resources(
        &mut self,
        id: Id,
        resources: impl IntoIterator<Item = ResourceDescriptor>,
    ) -> Result<()> {
        self.node_mut(id)?.resources = resources.into_iter().collect();
        Ok(())
    }

    /// Resource sets of every node, keyed by id.
    pub fn inventory(&self) -> Inventory {
        self.nodes.iter().map(|(&id, n)| (id, n.resources.clone())).collect()
    }

    /// Finger table of `n` computed from current membership.
    pub fn build_finger_table(&self, n: Id) -> Result<Vec<FingerEntry>> {
        if !self.contains(n) {
            return Err(Error::UnknownNode(n));
        }
        Ok(self.fingers_for(n))
    }

    fn fingers_for(&self, n: Id) -> Vec<FingerEntry> {
        let bits = self.space.bits();
        let starts: Vec<Id> = (1..=bits)
            .map(|k| self.space.finger_start(n, k).expect("k in range"))
            .collect();
        (0..starts.len())
            .map(|i| FingerEntry {
                start: starts[i],
                interval_end: starts[(i + 1) % starts.len()],
                node: self.successor(starts[i]),
            })
            .collect()
    }

    /// Repairs every pointer and finger; returns the number of entries changed.
    pub fn stabilize(&mut self) -> usize {
        let ids: Vec<Id> = self.nodes.keys().copied().collect();
        let mut changed = 0;
        for (i, &id) in ids.iter().enumerate() {
            let pred = ids[(i + ids.len() - 1) % ids.len()];
            let succ = ids[(i + 1) % ids.len()];
            let fingers = self.fingers_for(id);
            let node = self.nodes.get_mut(&id).unwrap();
            if node.predecessor != pred {
                node.predecessor = pred;
                changed += 1;
            }
            if node.successor != succ {
                node.successor = succ;
                changed += 1;
            }
            if node.fingers.len() != fingers.len() {
                changed += fingers.len();
            } else {
                changed += node.fingers.iter().zip(&fingers).filter(|(a, b)| a != b).count();
            }
            node.fingers = fingers;
        }
        self.maintenance += changed as u64;
        changed
    }

    /// Inserts `new_id`, moves the keys it now owns and re-stabilizes.
    pub fn join(&mut self, new_id: Id) -> Result<KeyTransfer> {
        let transfer = self.join_unrepaired(new_id)?;
        self.stabilize();
        Ok(transfer)
    }

    /// Inserts `new_id` with a correct local state and takes over its keys,
    /// but leaves every other node's pointers stale until [`Ring::stabilize`].
    pub fn join_unrepaired(&mut self, new_id: Id) -> Result<KeyTransfer> {
        self.space.id(new_id.0)?;
        if self.contains(new_id) {
            return Err(Error::IdCollision(new_id));
        }
        let succ = self.successor(new_id);
        let pred = self.predecessor(new_id);
        let succ_state = self.nodes.get_mut(&succ).unwrap();
        let moved: BTreeSet<Id> = succ_state
            .stored_keys
            .iter()
            .copied()
            .filter(|&k| in_interval(k, pred, new_id, IntervalBounds::OPEN_CLOSED))
            .collect();
        for k in &moved {
            succ_state.stored_keys.remove(k);
        }
        let rvn = succ_state.rvn;
        self.nodes.insert(
            new_id,
            NodeState {
                id: new_id,
                predecessor: pred,
                successor: succ,
                fingers: Vec::new(),
                rvn,
                stored_keys: moved.clone(),
                resources: BTreeSet::new(),
            },
        );
        let fingers = self.fingers_for(new_id);
        self.nodes.get_mut(&new_id).unwrap().fingers = fingers;
        Ok(KeyTransfer { from: succ, to: new_id, keys: moved })
    }

    /// Removes `id`, hands its keys to its successor, re-stabilizes and
    /// repairs RVN slots that pointed at it.
    pub fn leave(&mut self, id: Id) -> Result<KeyTransfer> {
        let transfer = self.leave_unrepaired(id)?;
        rvn::rvn_repair(self, id, transfer.to);
        Ok(transfer)
    }

    /// Removes `id` and moves its keys without touching any other pointer.
    pub fn leave_unrepaired(&mut self, id: Id) -> Result<KeyTransfer> {
        if !self.contains(id) {
            return Err(Error::UnknownNode(id));
        }
        if self.len() == 1 {
            return Err(Error::LastNode(id));
        }
        let departed = self.nodes.remove(&id).unwrap();
        let succ = self.successor(id);
        self.nodes
            .get_mut(&succ)
            .unwrap()
            .stored_keys
            .extend(departed.stored_keys.iter().copied());
        Ok(KeyTransfer { from: id, to: succ, keys: departed.stored_keys })
    }

    /// True iff stored keys partition `all_keys` and each sits at its successor.
    pub fn keys_conserved(&self) -> bool {
        let mut seen = 0usize;
        for node in self.nodes.values() {
            for k in &node.stored_keys {
                if !self.all_keys.contains(k) || self.successor(*k) != node.id {
                    return false;
                }
            }
            seen += node.stored_keys.len();
        }
        seen == self.all_keys.len()
    }

    /// True iff every pointer and finger matches the brute-force oracle.
    pub fn is_consistent_with_oracle(&self) -> bool {
        self.nodes.values().all(|node| {
            let fingers_ok = node.fingers.len() == self.space.bits() as usize
                && node.fingers.iter().enumerate().all(|(i, f)| {
                    let start = self.space.finger_start(node.id, i as u32 + 1).unwrap();
                    f.start == start && f.node == successor_oracle(self, start)
                });
            fingers_ok
                && node.successor == successor_oracle(self, self.space.add(node.id, 1))
                && node.fingers[0].node == node.successor
        })
    }
}
