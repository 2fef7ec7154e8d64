//! Resource normalization, triangular membership grades and the crisp
//! three-way split.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fz::resource::Inventory;
use crate::fz::RingLabel;
use crate::id::Id;

/// Upper edge of HOT (exclusive) and lower edge of HOTTER (inclusive).
pub const HOT_BELOW: f64 = 0.34;
/// Upper edge of HOTTER (inclusive); anything above is HOTTEST.
pub const HOTTEST_ABOVE: f64 = 0.66;

/// Triangle anchors `(left zero, peak, right zero)` of the membership
/// functions. HOT and HOTTEST are shouldered at 0 and 1.
pub const HOT_ANCHORS: (f64, f64) = (0.0, 0.34);
pub const HOTTER_ANCHORS: (f64, f64, f64) = (0.17, 0.50, 0.83);
pub const HOTTEST_ANCHORS: (f64, f64) = (0.66, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MembershipGrades {
    pub hot: f64,
    pub hotter: f64,
    pub hottest: f64,
}

impl MembershipGrades {
    /// Label with the largest grade; ties go to the richer ring.
    pub fn argmax(&self) -> RingLabel {
        if self.hottest >= self.hotter && self.hottest >= self.hot {
            RingLabel::Hottest
        } else if self.hotter >= self.hot {
            RingLabel::Hotter
        } else {
            RingLabel::Hot
        }
    }
}

fn check(fraction: f64) -> Result<()> {
    if (0.0..=1.0).contains(&fraction) {
        Ok(())
    } else {
        Err(Error::FractionOutOfRange(fraction))
    }
}

/// Resource count of each node divided by the largest count in the set.
pub fn normalize_resources(inventory: &Inventory) -> Result<BTreeMap<Id, f64>> {
    let max = inventory.values().map(|s| s.len()).max().unwrap_or(0);
    if max == 0 {
        return Err(Error::AllResourceless);
    }
    Ok(inventory.iter().map(|(&id, s)| (id, s.len() as f64 / max as f64)).collect())
}

pub fn membership(fraction: f64) -> Result<MembershipGrades> {
    check(fraction)?;
    let (_, hot_zero) = HOT_ANCHORS;
    let (l, peak, r) = HOTTER_ANCHORS;
    let (hottest_zero, hottest_one) = HOTTEST_ANCHORS;
    let hotter = if fraction <= l || fraction >= r {
        0.0
    } else if fraction <= peak {
        (fraction - l) / (peak - l)
    } else {
        (r - fraction) / (r - peak)
    };
    Ok(MembershipGrades {
        hot: (1.0 - fraction / hot_zero).max(0.0),
        hotter,
        hottest: ((fraction - hottest_zero) / (hottest_one - hottest_zero)).clamp(0.0, 1.0),
    })
}

/// Crisp split: above 0.66 HOTTEST, 0.34..=0.66 HOTTER, below 0.34 HOT.
pub fn classify(fraction: f64) -> Result<RingLabel> {
    check(fraction)?;
    Ok(if fraction > HOTTEST_ABOVE {
        RingLabel::Hottest
    } else if fraction >= HOT_BELOW {
        RingLabel::Hotter
    } else {
        RingLabel::Hot
    })
}
