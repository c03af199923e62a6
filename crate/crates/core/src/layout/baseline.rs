//! Comparison layouts: strict orientation, one even alphabetical circle, and
//! the full-screen alphabetical rings.

use std::f64::consts::TAU;

use super::{
    collate, CircleLayout, DropReason, DroppedLabel, Label, LayoutParams, MultiCircleLayout,
};
use crate::geometry::{angular_distance, wrap_radian, ScreenVec};

/// Upper bound on rings for the baselines, which have no circle budget.
pub const BASELINE_MAX_CIRCLES: usize = 64;

/// Every label stays exactly at its initial radian; a label that would
/// overlap moves outward to the first circle with room at that radian.
pub fn strict_orientation_layout(
    mut labels: Vec<Label>,
    center: ScreenVec,
    params: &LayoutParams,
) -> MultiCircleLayout {
    labels.sort_by(collate);
    let mut layout = MultiCircleLayout::empty(center);
    'next: for mut label in labels {
        label.rad = label.rad_p;
        for k in 0..BASELINE_MAX_CIRCLES {
            if k == layout.circles.len() {
                layout.circles.push(CircleLayout::new(k, params.radius(k)));
            }
            let circle = &mut layout.circles[k];
            let sep = params.separation_at(circle.radius);
            let free = circle
                .entries
                .iter()
                .all(|e| angular_distance(e.rad, label.rad) >= sep - 1e-12);
            if free {
                label.circle_index = Some(k);
                let at = circle.entries.partition_point(|e| e.rad < label.rad);
                circle.entries.insert(at, label);
                continue 'next;
            }
        }
        layout.dropped.push(DroppedLabel {
            label,
            reason: DropReason::CircleLimit,
        });
    }
    layout
}

/// All labels on one circle in alphabetical order with even spacing, turned
/// as a whole to minimise the mean angular error to the initial radians. The
/// circle grows outward until the labels fit.
pub fn even_circle_layout(
    mut labels: Vec<Label>,
    center: ScreenVec,
    params: &LayoutParams,
) -> MultiCircleLayout {
    let mut layout = MultiCircleLayout::empty(center);
    let n = labels.len();
    if n == 0 {
        return layout;
    }
    labels.sort_by(collate);
    let spacing = TAU / n as f64;
    let k = (0..BASELINE_MAX_CIRCLES)
        .find(|&k| n == 1 || params.separation(k) <= spacing)
        .unwrap_or(BASELINE_MAX_CIRCLES - 1);

    // The mean error is piecewise linear in the rotation with its minima at
    // offsets where some label lands exactly on its initial radian.
    let mean_error = |phi: f64| -> f64 {
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| angular_distance(phi + spacing * i as f64, l.rad_p))
            .sum::<f64>()
            / n as f64
    };
    let mut best = (f64::INFINITY, 0.0);
    let mut candidates: Vec<f64> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| wrap_radian(l.rad_p - spacing * i as f64))
        .collect();
    candidates.sort_by(f64::total_cmp);
    for phi in candidates {
        let e = mean_error(phi);
        if e < best.0 - 1e-12 {
            best = (e, phi);
        }
    }
    let phi = best.1;

    let mut circle = CircleLayout::new(0, params.radius(k));
    for (i, mut l) in labels.into_iter().enumerate() {
        l.rad = wrap_radian(phi + spacing * i as f64);
        l.circle_index = Some(0);
        circle.entries.push(l);
    }
    layout.circles.push(circle);
    layout
}

/// Every label of the scene, alphabetical from three o'clock, filling
/// concentric rings from the inside with even spacing per ring.
pub fn full_screen_layout(
    mut labels: Vec<Label>,
    center: ScreenVec,
    params: &LayoutParams,
) -> MultiCircleLayout {
    labels.sort_by(collate);
    let mut layout = MultiCircleLayout::empty(center);
    let mut rest = labels.into_iter().peekable();
    let mut k = 0;
    while rest.peek().is_some() {
        let capacity = ((TAU / params.separation(k)).floor() as usize).max(1);
        let chunk: Vec<Label> = rest.by_ref().take(capacity).collect();
        let spacing = TAU / chunk.len() as f64;
        let mut circle = CircleLayout::new(k, params.radius(k));
        for (i, mut l) in chunk.into_iter().enumerate() {
            l.rad = spacing * i as f64;
            l.circle_index = Some(k);
            circle.entries.push(l);
        }
        layout.circles.push(circle);
        k += 1;
    }
    layout
}
