//! Resource descriptors, the deduplicated resource table and unique-node
//! detection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use sha1::{Digest, Sha1};

use crate::error::Error;
use crate::id::Id;

/// A single resource such as `ram:1ghz`. Always stored in canonical
/// (trimmed, lowercase) form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResourceDescriptor {
    kind: String,
    attribute: String,
}

impl ResourceDescriptor {
    pub fn new(kind: &str, attribute: &str) -> Self {
        Self {
            kind: kind.trim().to_lowercase(),
            attribute: attribute.trim().to_lowercase(),
        }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }
}

impl fmt::Display for ResourceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.attribute)
    }
}

impl FromStr for ResourceDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (kind, attribute) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("descriptor `{s}` is not kind:attribute")))?;
        let d = Self::new(kind, attribute);
        if d.kind.is_empty() || d.attribute.is_empty() || d.attribute.contains(':') {
            return Err(Error::Config(format!("descriptor `{s}` is not kind:attribute")));
        }
        Ok(d)
    }
}

/// Resource sets per node.
pub type Inventory = BTreeMap<Id, BTreeSet<ResourceDescriptor>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeStatus {
    pub online: bool,
    pub unique: bool,
}

/// One row of the resource table: every node sharing one exact resource set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceTableEntry {
    pub node_ids: BTreeSet<Id>,
    pub resource_count: usize,
    pub status: NodeStatus,
    pub signature: String,
}

/// Hex SHA-1 over the sorted, `;`-joined canonical descriptors.
pub fn signature(resources: &BTreeSet<ResourceDescriptor>) -> String {
    let joined = resources.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";");
    Sha1::digest(joined.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Nodes holding at least one descriptor that no other node holds.
pub fn detect_unique(inventory: &Inventory) -> BTreeSet<Id> {
    let mut holders: BTreeMap<&ResourceDescriptor, usize> = BTreeMap::new();
    for set in inventory.values() {
        for d in set {
            *holders.entry(d).or_default() += 1;
        }
    }
    inventory
        .iter()
        .filter(|(_, set)| set.iter().any(|d| holders[d] == 1))
        .map(|(&id, _)| id)
        .collect()
}

/// Groups nodes by identical resource sets, one entry per distinct set,
/// sorted by signature.
pub fn build_resource_table(inventory: &Inventory) -> Vec<ResourceTableEntry> {
    let unique = detect_unique(inventory);
    let mut groups: BTreeMap<&BTreeSet<ResourceDescriptor>, BTreeSet<Id>> = BTreeMap::new();
    for (&id, set) in inventory {
        groups.entry(set).or_default().insert(id);
    }
    let mut table: Vec<ResourceTableEntry> = groups
        .into_iter()
        .map(|(set, node_ids)| ResourceTableEntry {
            status: NodeStatus {
                online: true,
                unique: node_ids.iter().all(|id| unique.contains(id)),
            },
            node_ids,
            resource_count: set.len(),
            signature: signature(set),
        })
        .collect();
    table.sort_by(|a, b| a.signature.cmp(&b.signature));
    table
}
