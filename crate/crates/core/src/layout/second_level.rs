use std::collections::{BTreeMap, BTreeSet};

use super::{
    collate, insert, max_sorted_subseq, relax, CircleLayout, DropReason, DroppedLabel, Label,
    LabelId, LayoutParams, MultiCircleLayout, RadianRange,
};
use crate::error::LayoutError;
use crate::geometry::{radian_of, Projection, ViewState};
use crate::scene::{ObjectId, SceneObject};

/// Sets distance, initial radian and sliding range of every label relative to
/// the gaze point, and returns them in collation order.
///
/// The radian points from the gaze toward the anchor's screen projection.
/// Anchors behind the viewer are pushed to the screen edge along their
/// in-plane direction. An anchor exactly on the gaze ray gets radian 0 and a
/// zero-width range.
pub fn init_label_attrs(
    labels: &[Label],
    objects: &[SceneObject],
    view: &ViewState,
    projection: &Projection,
) -> Result<Vec<Label>, LayoutError> {
    let positions: BTreeMap<ObjectId, _> = objects.iter().map(|o| (o.id, o.position)).collect();
    let mut scl = labels
        .iter()
        .map(|l| {
            let anchor = positions
                .get(&l.anchor)
                .ok_or(LayoutError::UnresolvedAnchor(l.anchor))?;
            let offset = projection.world_to_screen_clamped(*anchor, view) - view.gaze;
            let dis = offset.norm();
            let rad = radian_of(offset).unwrap_or(0.0);
            Ok(Label {
                dis,
                rad,
                rad_p: rad,
                ran: RadianRange::around(rad, dis),
                circle_index: None,
                ..l.clone()
            })
        })
        .collect::<Result<Vec<_>, LayoutError>>()?;
    scl.sort_by(collate);
    Ok(scl)
}

/// Builds the second-level sorted circle layout around the gaze point.
///
/// Per circle: seed with the longest alphabetical-and-counterclockwise
/// subsequence, sweep the remaining labels through [`insert`], then
/// [`relax`]. Labels removed by relaxation are offered to the next circle;
/// whatever is left after `max_circles` circles is reported as dropped.
pub fn build_second_level(
    labels: &[Label],
    objects: &[SceneObject],
    view: &ViewState,
    projection: &Projection,
    params: &LayoutParams,
) -> Result<MultiCircleLayout, LayoutError> {
    params.validate()?;
    let mut scl = init_label_attrs(labels, objects, view, projection)?;
    let mut layout = MultiCircleLayout::empty(view.gaze);
    let mut relaxed_out: BTreeSet<LabelId> = BTreeSet::new();

    let mut k = 0;
    while !scl.is_empty() && k < params.max_circles {
        let mut circle = CircleLayout::new(k, params.radius(k));
        for mut l in max_sorted_subseq(&mut scl) {
            l.circle_index = Some(k);
            circle.entries.push(l);
        }
        let pending: Vec<LabelId> = scl.iter().map(|l| l.id).collect();
        for id in pending {
            insert(&mut circle, &mut scl, id, params);
        }
        let removed = relax(&mut circle, params, params.relax_iters);
        relaxed_out.extend(removed.iter().map(|l| l.id));
        scl.extend(removed);
        scl.sort_by(collate);
        layout.circles.push(circle);
        k += 1;
    }

    for label in scl {
        let reason = if relaxed_out.contains(&label.id) && k == params.max_circles {
            DropReason::Relaxation
        } else {
            DropReason::CircleLimit
        };
        log::warn!(
            "label {:?} ({}) not placed: {:?}",
            label.id,
            label.text,
            reason
        );
        layout.dropped.push(DroppedLabel { label, reason });
    }
    Ok(layout)
}
