//! Identifier arithmetic on the `2^m` circle.
//!
//! Nodes and keys share one identifier space. An [`IdSpace`] fixes the bit
//! width `m` for a whole simulation; [`Id`] is a plain value that is only
//! meaningful together with the space it was created in.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use crate::error::{Error, Result};

pub const MIN_BITS: u32 = 3;
pub const MAX_BITS: u32 = 63;

/// A point on the identifier circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Id(pub u64);

impl Id {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for Id {
    fn from(v: u64) -> Self {
        Id(v)
    }
}

/// Which endpoints of a circular interval are included.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalBounds {
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl IntervalBounds {
    /// `(a, b)`
    pub const OPEN: Self = Self { lower_closed: false, upper_closed: false };
    /// `[a, b)`
    pub const CLOSED_OPEN: Self = Self { lower_closed: true, upper_closed: false };
    /// `(a, b]`
    pub const OPEN_CLOSED: Self = Self { lower_closed: false, upper_closed: true };
    /// `[a, b]`
    pub const CLOSED: Self = Self { lower_closed: true, upper_closed: true };
}

/// Returns true iff `x` lies on the clockwise arc from `a` to `b`.
///
/// When `a == b` the arc wraps the entire ring: `(a, a]`, `[a, a)` and
/// `[a, a]` contain every identifier, `(a, a)` contains all but `a`.
pub fn in_interval(x: Id, a: Id, b: Id, bounds: IntervalBounds) -> bool {
    if x == a {
        return bounds.lower_closed || (a == b && bounds.upper_closed);
    }
    if x == b {
        return bounds.upper_closed;
    }
    if a == b {
        return true;
    }
    if a < b {
        a < x && x < b
    } else {
        x > a || x < b
    }
}

/// The identifier circle `Z_{2^m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdSpace {
    bits: u32,
}

impl IdSpace {
    pub fn new(bits: u32) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&bits) {
            return Err(Error::InvalidBits(bits));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of identifiers, `2^m`.
    pub fn size(&self) -> u64 {
        1u64 << self.bits
    }

    fn mask(&self) -> u64 {
        self.size() - 1
    }

    pub fn id(&self, value: u64) -> Result<Id> {
        if value > self.mask() {
            return Err(Error::IdOutOfRange { value, bits: self.bits });
        }
        Ok(Id(value))
    }

    pub fn contains(&self, id: Id) -> bool {
        id.0 <= self.mask()
    }

    /// Reduces an arbitrary integer onto the circle.
    pub fn wrap(&self, value: u64) -> Id {
        Id(value & self.mask())
    }

    pub fn add(&self, id: Id, delta: u64) -> Id {
        self.wrap(id.0.wrapping_add(delta))
    }

    /// Hashes `label` with SHA-1 and keeps the most significant `m` bits.
    pub fn hash_id(&self, label: &[u8]) -> Result<Id> {
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let digest = Sha1::digest(label);
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Ok(Id(u64::from_be_bytes(head) >> (64 - self.bits)))
    }

    /// `(n + 2^(k-1)) mod 2^m` for `k` in `1..=m`.
    pub fn finger_start(&self, n: Id, k: u32) -> Result<Id> {
        if k == 0 || k > self.bits {
            return Err(Error::FingerIndex { index: k, bits: self.bits });
        }
        Ok(self.add(n, 1u64 << (k - 1)))
    }

    /// Clockwise distance from `a` to `b`, `(b - a) mod 2^m`.
    pub fn distance_cw(&self, a: Id, b: Id) -> u64 {
        b.0.wrapping_sub(a.0) & self.mask()
    }
}

/// Convenience: hash a label into a fresh space of `bits` width.
pub fn hash_id(label: &[u8], bits: u32) -> Result<Id> {
    IdSpace::new(bits)?.hash_id(label)
}
