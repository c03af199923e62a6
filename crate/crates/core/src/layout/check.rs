//! Invariant checks shared by tests, the acceptance suite and the CLI.

use std::collections::BTreeMap;
use std::fmt;

use super::{collate, range_width, LabelId, LayoutParams, MultiCircleLayout};
use crate::geometry::wrap_radian;

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Overlap { circle: usize, a: LabelId, b: LabelId, gap: f64, required: f64 },
    Unsorted { circle: usize },
    OutOfRange { label: LabelId, rad: f64 },
    RangeWidth { label: LabelId, width: f64, expected: f64 },
    RadiiNotIncreasing { circle: usize },
    WrongCircleIndex { label: LabelId },
    Duplicate { label: LabelId },
    Missing { label: LabelId },
    Unexpected { label: LabelId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Construction-independent checks: partition of the input, increasing radii,
/// consistent circle indices and no overlap between radian neighbours.
pub fn check_layout(
    layout: &MultiCircleLayout,
    input: &[LabelId],
    params: &LayoutParams,
) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();

    let mut seen: BTreeMap<LabelId, usize> = BTreeMap::new();
    for (_, l) in layout.placed() {
        *seen.entry(l.id).or_default() += 1;
    }
    for d in &layout.dropped {
        *seen.entry(d.label.id).or_default() += 1;
    }
    for id in input {
        match seen.remove(id) {
            None => out.push(Violation::Missing { label: *id }),
            Some(1) => {}
            Some(_) => out.push(Violation::Duplicate { label: *id }),
        }
    }
    out.extend(seen.into_keys().map(|label| Violation::Unexpected { label }));

    for (i, w) in layout.circles.windows(2).enumerate() {
        if w[1].radius <= w[0].radius {
            out.push(Violation::RadiiNotIncreasing { circle: i + 1 });
        }
    }

    for (ci, c) in layout.circles.iter().enumerate() {
        for l in &c.entries {
            if l.circle_index != Some(ci) {
                out.push(Violation::WrongCircleIndex { label: l.id });
            }
        }
        if c.entries.len() < 2 {
            continue;
        }
        let required = params.separation_at(c.radius);
        let mut by_rad: Vec<(f64, LabelId)> =
            c.entries.iter().map(|l| (wrap_radian(l.rad), l.id)).collect();
        by_rad.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = by_rad.len();
        for i in 0..n {
            let (ra, a) = by_rad[i];
            let (rb, b) = by_rad[(i + 1) % n];
            let gap = if i + 1 < n { rb - ra } else { rb + std::f64::consts::TAU - ra };
            if gap < required - 1e-9 {
                out.push(Violation::Overlap { circle: ci, a, b, gap, required });
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// [`check_layout`] plus the sorted-layout guarantees: alphabetical and
/// counterclockwise circles, range containment and the range-width law.
pub fn check_sorted_layout(
    layout: &MultiCircleLayout,
    input: &[LabelId],
    params: &LayoutParams,
) -> Result<(), Vec<Violation>> {
    let mut out = match check_layout(layout, input, params) {
        Ok(()) => Vec::new(),
        Err(v) => v,
    };
    for (ci, c) in layout.circles.iter().enumerate() {
        let alphabetical = c.entries.windows(2).all(|w| collate(&w[0], &w[1]).is_lt());
        if !alphabetical || !c.is_cyclically_ordered() {
            out.push(Violation::Unsorted { circle: ci });
        }
        for l in &c.entries {
            if !l.ran.contains(l.rad) {
                out.push(Violation::OutOfRange { label: l.id, rad: l.rad });
            }
            let expected = range_width(l.dis);
            if (l.ran.width() - expected).abs() > 1e-9 {
                out.push(Violation::RangeWidth { label: l.id, width: l.ran.width(), expected });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
