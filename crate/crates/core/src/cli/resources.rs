//! Resource assignment files.
//!
//! One node per line: `<node-id>,<kind>:<attribute>[;<kind>:<attribute>]*`.
//! Blank lines and lines starting with `#` are skipped.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fz::resource::{Inventory, ResourceDescriptor};
use crate::id::Id;

pub fn parse_resources_str(text: &str) -> Result<Inventory> {
    let mut inventory = Inventory::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let (id, descriptors) = line
            .split_once(',')
            .ok_or_else(|| err(format!("expected `<node-id>,<kind>:<attribute>`, got `{line}`")))?;
        let id: u64 = id.trim().parse().map_err(|_| err(format!("bad node id `{}`", id.trim())))?;
        let set = descriptors
            .split(';')
            .map(|d| d.parse::<ResourceDescriptor>().map_err(|e| err(e.to_string())))
            .collect::<Result<_>>()?;
        if inventory.insert(Id(id), set).is_some() {
            return Err(err(format!("node {id} listed twice")));
        }
    }
    Ok(inventory)
}

pub fn parse_resources(path: &Path) -> Result<Inventory> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_resources_str(&text)
}

/// Canonical text form; parses back to the same inventory.
pub fn format_resources(inventory: &Inventory) -> String {
    inventory
        .iter()
        .map(|(id, set)| {
            let ds: Vec<String> = set.iter().map(|d| d.to_string()).collect();
            format!("{id},{}\n", ds.join(";"))
        })
        .collect()
}
