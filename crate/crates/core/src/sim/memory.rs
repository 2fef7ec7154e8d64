//! Routing-state byte accounting.
//!
//! With `b = ceil(m / 8)` bytes per identifier:
//!
//! * Chord: `N * (3m + 2) * b` (each finger stores start, interval end and
//!   node; plus successor and predecessor);
//! * RVN-Chord: Chord plus one `b`-byte slot per node;
//! * FZ-Chord: Chord plus, at every node, a full replica of the resource
//!   table (`E * (b + 4 + 1)` for `E` entries: representative id, count,
//!   status byte) and a three-entry Ring-Head registry (`3b`).

use crate::error::{Error, Result};
use crate::fz::FzOverlay;
use crate::id::IdSpace;
use crate::ring::Ring;
use crate::sim::Protocol;

pub fn bytes_per_id(space: IdSpace) -> u64 {
    u64::from(space.bits()).div_ceil(8)
}

pub fn chord_bytes(space: IdSpace, nodes: u64) -> u64 {
    nodes * (3 * u64::from(space.bits()) + 2) * bytes_per_id(space)
}

pub fn rvn_bytes(space: IdSpace, nodes: u64) -> u64 {
    chord_bytes(space, nodes) + nodes * bytes_per_id(space)
}

pub fn fz_bytes(space: IdSpace, nodes: u64, table_entries: u64) -> u64 {
    let b = bytes_per_id(space);
    chord_bytes(space, nodes) + nodes * (table_entries * (b + 4 + 1) + 3 * b)
}

/// Bytes of routing state for `protocol` on `ring`. FZ needs its overlay.
pub fn memory_footprint(protocol: Protocol, ring: &Ring, overlay: Option<&FzOverlay>) -> Result<u64> {
    let n = ring.len() as u64;
    let space = ring.space();
    Ok(match protocol {
        Protocol::Chord => chord_bytes(space, n),
        Protocol::Rvn => rvn_bytes(space, n),
        Protocol::Fz => {
            let overlay =
                overlay.ok_or_else(|| Error::Config("fz memory needs a built overlay".into()))?;
            fz_bytes(space, n, overlay.resource_table().len() as u64)
        }
    })
}
