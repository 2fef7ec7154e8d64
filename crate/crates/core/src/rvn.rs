//! Recently-visited-node lookups.
//!
//! Every node carries one extra slot holding the id of the node that
//! answered the most recent successful lookup. A lookup consults that slot
//! before falling back to ordinary Chord routing:
//!
//! * `key == rvn`: the recent node owns its own id, answer directly;
//! * `key > rvn` (plain integer comparison): jump to the recent node and
//!   route from there;
//! * otherwise: route from the origin as base Chord does.
//!
//! Propagating the slot to every node after a lookup costs `N - 1`
//! maintenance messages, booked on the ring rather than on the lookup.

use crate::error::{Error, Result};
use crate::id::{in_interval, Id, IntervalBounds};
use crate::lookup::{route, LookupResult};
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RvnOptions {
    /// Replace the integer `key > rvn` test with a circular one: jump only
    /// when the key lies on the arc from the recent node back to the origin.
    pub modular_guard: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RvnBranch {
    Exact,
    Jump,
    Fallback,
}

/// Which rule an RVN lookup from `origin` takes for `key`.
pub fn rvn_branch(ring: &Ring, origin: Id, key: Id, opts: RvnOptions) -> Result<RvnBranch> {
    let rvn = ring.node(origin)?.rvn;
    let jump = if opts.modular_guard {
        in_interval(key, rvn, origin, IntervalBounds::OPEN)
    } else {
        key > rvn
    };
    Ok(if key == rvn {
        RvnBranch::Exact
    } else if jump {
        RvnBranch::Jump
    } else {
        RvnBranch::Fallback
    })
}

pub fn rvn_lookup(ring: &Ring, origin: Id, key: Id, opts: RvnOptions) -> Result<LookupResult> {
    let rvn = ring.node(origin)?.rvn;
    let path = match rvn_branch(ring, origin, key, opts)? {
        RvnBranch::Exact if rvn == origin => vec![origin],
        RvnBranch::Exact => vec![origin, rvn],
        RvnBranch::Jump if rvn == origin => route(ring, origin, key)?,
        RvnBranch::Jump => {
            let mut path = vec![origin];
            path.extend(route(ring, rvn, key)?);
            path
        }
        RvnBranch::Fallback => route(ring, origin, key)?,
    };
    Ok(LookupResult::serial(path))
}

/// Records `resolved` in every node's slot. Returns the maintenance
/// messages spent, one per other node.
pub fn rvn_commit(ring: &mut Ring, resolved: Id) -> Result<u64> {
    if !ring.contains(resolved) {
        return Err(Error::UnknownNode(resolved));
    }
    for node in ring.nodes_mut() {
        node.rvn = resolved;
    }
    let cost = ring.len() as u64 - 1;
    ring.add_maintenance(cost);
    Ok(cost)
}

/// Points slots that referenced `departed` at its old successor, then
/// re-stabilizes every finger table. Returns the number of slots rewritten.
pub fn rvn_repair(ring: &mut Ring, departed: Id, old_successor: Id) -> usize {
    let mut rewritten = 0;
    for node in ring.nodes_mut() {
        if node.rvn == departed {
            node.rvn = old_successor;
            rewritten += 1;
        }
    }
    ring.stabilize();
    rewritten
}
