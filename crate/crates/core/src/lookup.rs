//! Base Chord lookup with hop, message and path accounting.
//!
//! Message model shared by every protocol: one request per forwarding step,
//! plus one reply from the owner back to the origin whenever the lookup left
//! the origin.

use crate::error::{Error, Result};
use crate::id::{in_interval, Id, IntervalBounds};
use crate::ring::{NodeState, Ring};

/// How a lookup's messages are laid out in time: a serial prefix, a set of
/// branches running in parallel, and a serial suffix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MessagePlan {
    pub prefix: u32,
    pub branches: Vec<u32>,
    pub suffix: u32,
}

impl MessagePlan {
    pub fn serial(prefix: u32, suffix: u32) -> Self {
        Self { prefix, branches: Vec::new(), suffix }
    }

    pub fn total(&self) -> u32 {
        self.prefix + self.branches.iter().sum::<u32>() + self.suffix
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LookupResult {
    pub owner: Id,
    pub hops: u32,
    pub messages: u32,
    /// Visited nodes, origin first, owner last.
    pub path: Vec<Id>,
    /// Virtual time; zero until the harness samples latencies.
    pub elapsed_ms: f64,
    pub plan: MessagePlan,
}

impl LookupResult {
    /// Builds a result for a purely serial path under the shared message model.
    pub(crate) fn serial(path: Vec<Id>) -> Self {
        let hops = (path.len() - 1) as u32;
        let reply = u32::from(hops > 0);
        LookupResult {
            owner: *path.last().unwrap(),
            hops,
            messages: hops + reply,
            path,
            elapsed_ms: 0.0,
            plan: MessagePlan::serial(hops, reply),
        }
    }
}

/// Highest finger of `node` strictly between `node.id` and `key`, or
/// `node.id` itself when no finger qualifies.
pub fn closest_preceding_finger(node: &NodeState, key: Id) -> Id {
    node.fingers
        .iter()
        .rev()
        .map(|f| f.node)
        .find(|&f| in_interval(f, node.id, key, IntervalBounds::OPEN))
        .unwrap_or(node.id)
}

/// Nodes visited when `start` routes towards the owner of `key`, ending at
/// the owner.
pub(crate) fn route(ring: &Ring, start: Id, key: Id) -> Result<Vec<Id>> {
    let mut current = ring.node(start)?;
    let mut path = vec![start];
    if in_interval(key, current.predecessor, current.id, IntervalBounds::OPEN_CLOSED) {
        return Ok(path);
    }
    // One more step than the hop bound before declaring the ring broken.
    for _ in 0..=ring.space().bits() + 1 {
        if in_interval(key, current.id, current.successor, IntervalBounds::OPEN_CLOSED) {
            path.push(current.successor);
            return Ok(path);
        }
        let mut next = closest_preceding_finger(current, key);
        if next == current.id {
            next = current.successor;
        }
        path.push(next);
        current = ring.node(next)?;
    }
    Err(Error::Inconsistent(format!("lookup of {key} from {start} did not converge")))
}

/// Iterative Chord lookup from `origin`.
pub fn find_successor(ring: &Ring, origin: Id, key: Id) -> Result<LookupResult> {
    Ok(LookupResult::serial(route(ring, origin, key)?))
}
