use std::f64::consts::TAU;

use super::{collate, CircleLayout, Label, LabelId, LayoutParams};
use crate::geometry::{angular_distance, wrap_radian};

/// Tries to place `label` into `circle` between its alphabetical neighbours.
///
/// Both neighbours must lie inside the label's sliding range. The label goes
/// to the midpoint of the nearer neighbour and the range endpoint closest to
/// that neighbour, clamped into the slot between the neighbours (kept at least
/// one separation away from each when the slot allows it). On refusal the
/// label is handed back untouched.
pub fn try_insert(
    circle: &mut CircleLayout,
    mut label: Label,
    separation: f64,
) -> Result<usize, Label> {
    let n = circle.entries.len();
    if n == 0 {
        label.rad = wrap_radian(label.rad_p);
        label.circle_index = Some(circle.index);
        circle.entries.push(label);
        return Ok(0);
    }

    let at = circle
        .entries
        .partition_point(|e| collate(e, &label).is_lt());
    let li = (at + n - 1) % n;
    let ri = at % n;
    let (left, right) = (&circle.entries[li], &circle.entries[ri]);
    if !(label.ran.contains(left.rad) && label.ran.contains(right.rad)) {
        return Err(label);
    }

    // Counterclockwise slot from the left neighbour to the right one.
    let lo = left.rad;
    let width = if n == 1 { TAU } else { circle.gaps()[li] };
    let hi = lo + width;
    if width <= 0.0 {
        return Err(label);
    }
    let margin = separation.min(width / 2.0);
    let (slot_lo, slot_hi) = (lo + margin, hi - margin);

    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(2);
    for m in -2..=2 {
        let shift = m as f64 * TAU;
        let a = slot_lo.max(label.ran.min + shift);
        let b = slot_hi.min(label.ran.max + shift);
        if a <= b {
            pieces.push((a, b));
        }
    }
    if pieces.is_empty() {
        return Err(label);
    }

    // Nearer neighbour by initial radian; ties favour the left one.
    let near_left =
        angular_distance(left.rad, label.rad_p) <= angular_distance(right.rad, label.rad_p);
    let near = if near_left { lo } else { hi };
    let endpoint = (-2..=2)
        .flat_map(|m| {
            let s = m as f64 * TAU;
            [label.ran.min + s, label.ran.max + s]
        })
        .min_by(|a, b| (a - near).abs().total_cmp(&(b - near).abs()))
        .expect("non-empty");
    let target = (near + endpoint) / 2.0;

    let placed = pieces
        .iter()
        .map(|&(a, b)| target.clamp(a, b))
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .expect("non-empty");

    label.rad = wrap_radian(placed);
    label.circle_index = Some(circle.index);
    circle.entries.insert(at, label);
    Ok(at)
}

/// Moves the label `id` from `scl` into `circle` if it fits; returns whether
/// it was placed. Both collections are unchanged on refusal.
pub fn insert(
    circle: &mut CircleLayout,
    scl: &mut Vec<Label>,
    id: LabelId,
    params: &LayoutParams,
) -> bool {
    let Some(pos) = scl.iter().position(|l| l.id == id) else {
        return false;
    };
    let label = scl.remove(pos);
    match try_insert(circle, label, params.separation_at(circle.radius)) {
        Ok(_) => true,
        Err(label) => {
            scl.insert(pos, label);
            false
        }
    }
}
